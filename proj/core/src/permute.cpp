#include "survscore/permute.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>
#include <vector>

#include "survscore/error.hpp"
#include "survscore/rng.hpp"

namespace survscore {

namespace {

// Values centred on their mean plus the tie tolerance used for comparisons.
// Centring removes any common shift, and the tolerance scales with the spread,
// so a*v + b ranks relabellings exactly as v does.
struct Prepared {
    std::vector<double> centred;
    std::size_t n_experimental = 0;
    double observed = 0.0;
    double tolerance = 0.0;
};

Prepared prepare(std::span<const double> values, std::span<const Arm> arms) {
    if (values.size() != arms.size()) throw Error("values and arms differ in length");
    Prepared p;
    const std::size_t n = values.size();
    for (Arm a : arms) p.n_experimental += a == Arm::experimental ? 1 : 0;
    if (p.n_experimental == 0 || p.n_experimental == n) throw Error("both arms must be non-empty");

    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
    p.centred.resize(n);
    double spread = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        p.centred[k] = values[k] - mean;
        spread += std::abs(p.centred[k]);
    }
    p.tolerance = 1e-9 * spread;

    // Same right fold as the enumeration below, over ascending indices.
    for (std::size_t k = n; k-- > 0;) {
        if (arms[k] == Arm::experimental) p.observed = p.centred[k] + p.observed;
    }
    return p;
}

bool at_least_as_extreme(double sum, const Prepared& p, Direction direction) {
    return direction == Direction::lower ? sum <= p.observed + p.tolerance : sum >= p.observed - p.tolerance;
}

}  // namespace

std::uint64_t count_assignments(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t c = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        // c * (n - k + i) / i stays integral at every step
        const std::uint64_t num = n - k + i;
        if (c > std::numeric_limits<std::uint64_t>::max() / num) return std::numeric_limits<std::uint64_t>::max();
        c = c * num / i;
    }
    return c;
}

PermutationResult exact_perm_p(std::span<const double> values, std::span<const Arm> arms, Direction direction) {
    const Prepared p = prepare(values, arms);
    const std::size_t n = values.size();
    const std::size_t k = p.n_experimental;
    const std::uint64_t total = count_assignments(n, k);
    if (total > kMaxExactAssignments) {
        throw Error("exact enumeration needs " + std::to_string(total) + " relabellings (limit " +
                    std::to_string(kMaxExactAssignments) + "); use Monte Carlo");
    }

    // Colexicographic order. suffix[m] = v[c[m]] + suffix[m + 1]; a step that
    // bumps position i only refolds positions 0..i, so each sum is the same
    // right fold no matter how it was reached.
    std::vector<std::size_t> c(k);
    std::iota(c.begin(), c.end(), std::size_t{0});
    std::vector<double> suffix(k + 1, 0.0);
    for (std::size_t m = k; m-- > 0;) suffix[m] = p.centred[c[m]] + suffix[m + 1];

    std::uint64_t extreme = 0;
    std::uint64_t seen = 0;
    for (;;) {
        ++seen;
        if (at_least_as_extreme(suffix[0], p, direction)) ++extreme;

        std::size_t i = 0;
        while (i < k && c[i] + 1 == (i + 1 < k ? c[i + 1] : n)) ++i;
        if (i == k) break;
        ++c[i];
        suffix[i] = p.centred[c[i]] + suffix[i + 1];
        for (std::size_t m = i; m-- > 0;) {
            c[m] = m;
            suffix[m] = p.centred[m] + suffix[m + 1];
        }
    }

    PermutationResult r;
    r.extreme = extreme;
    r.total = seen;
    r.p = static_cast<double>(extreme) / static_cast<double>(seen);
    return r;
}

PermutationResult mc_perm_p(std::span<const double> values, std::span<const Arm> arms, std::uint64_t replicates,
                            std::uint64_t seed, Direction direction, unsigned threads) {
    if (replicates < 1) throw Error("Monte Carlo permutation needs at least one replicate");
    const Prepared p = prepare(values, arms);
    const std::size_t n = values.size();
    const std::size_t k = p.n_experimental;

    unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, replicates));

    std::vector<std::uint64_t> counts(workers, 0);
    const auto run_block = [&](unsigned w) {
        const std::uint64_t begin = replicates * w / workers;
        const std::uint64_t end = replicates * (w + 1) / workers;
        std::vector<std::size_t> perm(n);
        std::uint64_t local = 0;
        for (std::uint64_t r = begin; r < end; ++r) {
            SplitMix64 g = derive_stream(seed, r);
            std::iota(perm.begin(), perm.end(), std::size_t{0});
            double sum = 0.0;
            for (std::size_t i = 0; i < k; ++i) {
                const std::size_t j = i + static_cast<std::size_t>(uniform_below(g, n - i));
                std::swap(perm[i], perm[j]);
                sum += p.centred[perm[i]];
            }
            if (at_least_as_extreme(sum, p, direction)) ++local;
        }
        counts[w] = local;
    };

    if (workers == 1) {
        run_block(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run_block, w);
        for (auto& t : pool) t.join();
    }

    PermutationResult r;
    r.extreme = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
    r.total = replicates;
    r.p = static_cast<double>(r.extreme + 1) / static_cast<double>(replicates + 1);
    r.standard_error = std::sqrt(r.p * (1.0 - r.p) / static_cast<double>(replicates));
    return r;
}

PermutationResult permutation_p(std::span<const double> values, std::span<const Arm> arms,
                                const PermutationPlan& plan) {
    if (plan.mode == PermutationPlan::Mode::exact) return exact_perm_p(values, arms, plan.direction);
    return mc_perm_p(values, arms, plan.replicates, plan.seed, plan.direction, plan.threads);
}

}  // namespace survscore
