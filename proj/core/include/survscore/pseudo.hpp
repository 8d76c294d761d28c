#pragma once

// Jackknife pseudo-values for survival-curve functionals (RMST, milestone
// survival, window mean survival, average hazard with survival weight).

#include <array>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "survscore/km.hpp"
#include "survscore/survdata.hpp"
#include "survscore/test_result.hpp"

namespace survscore {

struct Rmst {
    double tau = 0.0;
};
struct Milestone {
    double kappa = 0.0;
};
/// RMST(tau2) - RMST(tau1); tau1 may be 0.
struct Wmst {
    double tau1 = 0.0;
    double tau2 = 0.0;
};
/// (1 - S(tau)) / RMST(tau), optionally on the log scale.
struct Ahsw {
    double tau = 0.0;
    bool log_scale = true;
};

using Estimand = std::variant<Rmst, Milestone, Wmst, Ahsw>;

enum class Backend { km, exponential, piecewise };

/// Per-arm pooling fits each arm separately (n = arm size); pooled fits all
/// subjects together (n = N).
enum class Pooling { per_arm, pooled };

struct EstimandSpec {
    Estimand estimand = Rmst{};
    Backend backend = Backend::km;
    std::vector<double> breakpoints{2.0, 4.0, 6.0, 8.0};  // piecewise backend only
    Pooling pooling = Pooling::per_arm;

    void validate() const;
    std::string describe() const;
};

/// The functional applied to one fitted curve. Step curves reject horizons
/// past their last follow-up time.
double evaluate_functional(const Estimand& e, const Survival& s);

/// True when a larger value means a better outcome (everything but AHSW).
bool larger_is_better(const Estimand& e);

struct PseudoSet {
    EstimandSpec spec;
    std::vector<double> values;         // theta_k, dataset order
    std::vector<double> loo_estimates;  // functional with subject k removed
    std::vector<double> scaled;         // empty until standardize_pseudo()
    double scale = 0.0;                 // scaled = scale * theta + offset
    double offset = 0.0;
    std::array<double, 2> full_estimates{};  // per arm; equal under pooled fitting
};

/// theta_k = n * est(full) - (n - 1) * est(without k) within each fitting group.
PseudoSet pseudo_values(const TrialDataset& ds, const EstimandSpec& spec);

/// Orientation-reversing map onto [-1, 1]: the largest theta maps to -1.
PseudoSet standardize_pseudo(PseudoSet ps);

/// Difference in mean pseudo-value (arm 1 minus arm 0) with its permutation
/// variance; the tail is chosen so benefit on arm 1 gives a small p.
TestResult pseudo_test(const PseudoSet& ps, std::span<const Arm> arms);

}  // namespace survscore
