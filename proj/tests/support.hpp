#pragma once

// Shared fixtures and brute-force reference computations for the tests.
// Nothing here calls into the library's estimators: each oracle recomputes
// its quantity directly from the subject list.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <set>
#include <vector>

#include "survscore/pseudo.hpp"
#include "survscore/survdata.hpp"

namespace survscore::oracle {

inline TrialDataset toy_dataset() {
    // The 12-subject toy trial used throughout the tests, in file order.
    return TrialDataset({
        {34.64, Arm::control, false},
        {4.38, Arm::control, true},
        {28.69, Arm::control, false},
        {6.69, Arm::control, true},
        {24.98, Arm::control, true},
        {6.32, Arm::control, true},
        {13.38, Arm::experimental, true},
        {33.21, Arm::experimental, false},
        {6.12, Arm::experimental, true},
        {16.73, Arm::experimental, true},
        {27.68, Arm::experimental, false},
        {29.46, Arm::experimental, false},
    });
}

struct RandomDatasetOptions {
    std::size_t min_n = 2;
    std::size_t max_n = 50;
    int time_grid = 30;           // times are multiples of 0.5 up to time_grid / 2: ties are common
    double event_probability = 0.7;
    std::size_t min_per_arm = 1;  // both arms guaranteed at least this many
    std::size_t min_events = 1;
};

/// Random two-arm dataset with tied times, censoring, and at least one event.
inline TrialDataset random_dataset(std::mt19937_64& rng, const RandomDatasetOptions& opt = {}) {
    std::uniform_int_distribution<std::size_t> size_dist(std::max(opt.min_n, 2 * opt.min_per_arm), opt.max_n);
    std::uniform_int_distribution<int> time_dist(1, opt.time_grid);
    std::bernoulli_distribution event_dist(opt.event_probability);
    std::bernoulli_distribution arm_dist(0.5);
    for (;;) {
        const std::size_t n = size_dist(rng);
        std::vector<Subject> subjects;
        std::size_t per_arm[2] = {0, 0};
        std::size_t events = 0;
        for (std::size_t k = 0; k < n; ++k) {
            Arm arm = k < 2 * opt.min_per_arm ? static_cast<Arm>(k % 2)
                                              : (arm_dist(rng) ? Arm::experimental : Arm::control);
            const bool event = event_dist(rng);
            subjects.push_back({0.5 * time_dist(rng), arm, event});
            ++per_arm[arm_index(arm)];
            events += event ? 1 : 0;
        }
        if (per_arm[0] >= opt.min_per_arm && per_arm[1] >= opt.min_per_arm && events >= opt.min_events) {
            std::shuffle(subjects.begin(), subjects.end(), rng);
            return TrialDataset(std::move(subjects));
        }
    }
}

// --- product-limit oracle ------------------------------------------------

struct NaiveCurve {
    std::vector<double> times;
    std::vector<double> values;
    double max_time = 0.0;

    double at(double t) const {
        double s = 1.0;
        for (std::size_t m = 0; m < times.size(); ++m) {
            if (times[m] <= t) s = values[m];
        }
        return s;
    }
    double left(double t) const {
        double s = 1.0;
        for (std::size_t m = 0; m < times.size(); ++m) {
            if (times[m] < t) s = values[m];
        }
        return s;
    }
};

inline NaiveCurve naive_km(const std::vector<Subject>& subjects) {
    std::set<double> event_times;
    NaiveCurve c;
    for (const auto& s : subjects) {
        if (s.event) event_times.insert(s.time);
        c.max_time = std::max(c.max_time, s.time);
    }
    double surv = 1.0;
    for (double t : event_times) {
        int n = 0;
        int d = 0;
        for (const auto& s : subjects) {
            if (s.time >= t) ++n;
            if (s.time == t && s.event) ++d;
        }
        surv *= 1.0 - static_cast<double>(d) / n;
        c.times.push_back(t);
        c.values.push_back(surv);
    }
    return c;
}

/// Integral of the step curve over [0, tau] by walking every observed time.
inline double naive_step_integral(const NaiveCurve& c, double tau) {
    double area = 0.0;
    double prev = 0.0;
    for (std::size_t m = 0; m <= c.times.size(); ++m) {
        const double next = m < c.times.size() ? std::min(c.times[m], tau) : tau;
        area += (next - prev) * c.at(prev);
        prev = next;
        if (prev >= tau) break;
    }
    return area;
}

// --- parametric oracle ---------------------------------------------------

struct NaiveHazard {
    std::vector<double> cuts;   // interval ends, last = +inf
    std::vector<double> rates;

    double cumulative(double t) const {
        double h = 0.0;
        double start = 0.0;
        for (std::size_t b = 0; b < cuts.size(); ++b) {
            if (t > start) h += rates[b] * (std::min(t, cuts[b]) - start);
            start = cuts[b];
        }
        return h;
    }
    double at(double t) const { return std::exp(-cumulative(t)); }
    double integral(double tau) const {
        double area = 0.0;
        double start = 0.0;
        for (std::size_t b = 0; b < cuts.size() && start < tau; ++b) {
            const double end = std::min(tau, cuts[b]);
            const double s0 = at(start);
            area += rates[b] == 0.0 ? s0 * (end - start) : s0 * (1.0 - std::exp(-rates[b] * (end - start))) / rates[b];
            start = cuts[b];
        }
        return area;
    }
};

inline NaiveHazard naive_piecewise(const std::vector<Subject>& subjects, const std::vector<double>& breakpoints) {
    NaiveHazard h;
    h.cuts = breakpoints;
    h.cuts.push_back(std::numeric_limits<double>::infinity());
    double start = 0.0;
    for (double end : h.cuts) {
        double events = 0.0;
        double exposure = 0.0;
        for (const auto& s : subjects) {
            if (s.time > start) exposure += std::min(s.time, end) - start;
            if (s.event && s.time > start && s.time <= end) events += 1.0;
        }
        h.rates.push_back(exposure > 0.0 ? events / exposure : 0.0);
        start = end;
    }
    return h;
}

// --- pseudo-value oracle --------------------------------------------------

inline double naive_functional(const Estimand& e, const EstimandSpec& spec, const std::vector<Subject>& subjects) {
    const bool km = spec.backend == Backend::km;
    const NaiveCurve curve = km ? naive_km(subjects) : NaiveCurve{};
    const NaiveHazard haz =
        km ? NaiveHazard{}
           : naive_piecewise(subjects, spec.backend == Backend::piecewise ? spec.breakpoints : std::vector<double>{});
    const auto surv = [&](double t) { return km ? curve.at(t) : haz.at(t); };
    const auto area = [&](double tau) { return km ? naive_step_integral(curve, tau) : haz.integral(tau); };

    if (const auto* r = std::get_if<Rmst>(&e)) return area(r->tau);
    if (const auto* m = std::get_if<Milestone>(&e)) return surv(m->kappa);
    if (const auto* w = std::get_if<Wmst>(&e)) return area(w->tau2) - area(w->tau1);
    const auto& a = std::get<Ahsw>(e);
    const double ratio = (1.0 - surv(a.tau)) / area(a.tau);
    return a.log_scale ? std::log(ratio) : ratio;
}

/// theta_k = n est(group) - (n - 1) est(group without k), refitting from scratch.
inline std::vector<double> naive_pseudo_values(const TrialDataset& ds, const EstimandSpec& spec) {
    std::vector<double> out(ds.size());
    for (std::size_t k = 0; k < ds.size(); ++k) {
        std::vector<Subject> group;
        std::vector<Subject> without;
        for (std::size_t i = 0; i < ds.size(); ++i) {
            const bool same = spec.pooling == Pooling::pooled || ds[i].arm == ds[k].arm;
            if (!same) continue;
            group.push_back(ds[i]);
            if (i != k) without.push_back(ds[i]);
        }
        const double n = static_cast<double>(group.size());
        out[k] = n * naive_functional(spec.estimand, spec, group) -
                 (n - 1.0) * naive_functional(spec.estimand, spec, without);
    }
    return out;
}

// --- score oracle -----------------------------------------------------------

/// Scores straight from the definition: sum over event times up to the
/// subject's own time of w_i O_i / n_i, with w from `weight_of(S(t_i-))`.
template <class WeightFn>
std::vector<double> naive_scores(const TrialDataset& ds, WeightFn weight_of) {
    const std::vector<Subject> all(ds.subjects().begin(), ds.subjects().end());
    const NaiveCurve pooled = naive_km(all);
    std::vector<double> out;
    for (const auto& s : all) {
        double cum = 0.0;
        double own_weight = 0.0;
        for (double t : pooled.times) {
            if (t > s.time) break;
            int n = 0;
            int d = 0;
            for (const auto& o : all) {
                if (o.time >= t) ++n;
                if (o.time == t && o.event) ++d;
            }
            const double w = weight_of(pooled.left(t));
            cum += w * d / n;
            if (t == s.time) own_weight = w;
        }
        out.push_back(s.event ? own_weight - cum : -cum);
    }
    return out;
}

/// Exact permutation count by visiting all 2^N label vectors with N1 ones.
inline std::uint64_t brute_force_extreme(const std::vector<double>& v, const std::vector<Arm>& arms, bool lower,
                                          std::uint64_t* total = nullptr) {
    const std::size_t n = v.size();
    std::size_t n1 = 0;
    double observed = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (arms[k] == Arm::experimental) {
            ++n1;
            observed += v[k];
        }
    }
    const auto mean_diff = [&](double sum1) {
        double all = 0.0;
        for (double x : v) all += x;
        return sum1 / n1 - (all - sum1) / (n - n1);
    };
    double scale = 0.0;
    for (double x : v) scale = std::max(scale, std::abs(x));
    const double tol = 1e-9 * std::max(scale, 1e-300);
    const double obs = mean_diff(observed);
    std::uint64_t count = 0;
    std::uint64_t seen = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcountll(mask)) != n1) continue;
        ++seen;
        double sum1 = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (mask >> k & 1) sum1 += v[k];
        }
        const double stat = mean_diff(sum1);
        if (lower ? stat <= obs + tol : stat >= obs - tol) ++count;
    }
    if (total) *total = seen;
    return count;
}

}  // namespace survscore::oracle
