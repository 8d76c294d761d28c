#pragma once

// Permutation p-values for the difference in mean value between arms.
//
// With the arm sizes fixed, mean(arm 1) - mean(arm 0) is an increasing affine
// function of the arm-1 sum, so every relabelling is ranked by that sum.

#include <cstddef>
#include <cstdint>
#include <span>

#include "survscore/survdata.hpp"

namespace survscore {

/// `lower`: count relabellings whose statistic is <= the observed one.
/// `upper`: count those >= the observed one.
enum class Direction { lower, upper };

inline constexpr std::uint64_t kMaxExactAssignments = 2'000'000;

struct PermutationResult {
    double p = 1.0;
    double standard_error = 0.0;  // 0 for exact enumeration
    std::uint64_t extreme = 0;    // relabellings at least as extreme (observed included)
    std::uint64_t total = 0;      // C(N, N1) for exact; R for Monte Carlo
};

struct PermutationPlan {
    enum class Mode { exact, monte_carlo };

    Mode mode = Mode::exact;
    std::uint64_t replicates = 10'000;
    std::uint64_t seed = 20240101;
    Direction direction = Direction::lower;
    unsigned threads = 0;  // Monte Carlo only; 0 = hardware concurrency
};

/// C(n, k), saturating at UINT64_MAX.
std::uint64_t count_assignments(std::size_t n, std::size_t k);

/// Enumerates every relabelling with the observed arm sizes. Ties with the
/// observed statistic count as extreme. Throws when C(N, N1) exceeds
/// kMaxExactAssignments.
PermutationResult exact_perm_p(std::span<const double> values, std::span<const Arm> arms, Direction direction);

/// (1 + #extreme) / (R + 1) over R random relabellings. Replicate r draws from
/// derive_stream(seed, r), so the result does not depend on `threads`.
PermutationResult mc_perm_p(std::span<const double> values, std::span<const Arm> arms, std::uint64_t replicates,
                            std::uint64_t seed, Direction direction, unsigned threads = 0);

PermutationResult permutation_p(std::span<const double> values, std::span<const Arm> arms,
                                const PermutationPlan& plan);

}  // namespace survscore
