#pragma once

// Weighted log-rank tests expressed as per-subject scores.

#include <span>
#include <string>
#include <vector>

#include "survscore/km.hpp"
#include "survscore/survdata.hpp"
#include "survscore/test_result.hpp"

namespace survscore {

struct WeightSpec {
    enum class Kind { logrank, fleming_harrington, modest };

    Kind kind = Kind::logrank;
    double rho = 0.0;
    double gamma = 0.0;
    double s_star = 1.0;

    static WeightSpec logrank() { return {}; }
    static WeightSpec fleming_harrington(double rho, double gamma);
    static WeightSpec modest(double s_star);

    /// Throws on negative FH exponents or s* outside (0, 1].
    void validate() const;
    /// "logrank", "FH(0,1)", "MW(s*=0.5)".
    std::string describe() const;

    /// Weight given the pooled survival just before the event time.
    double weight(double surv_left) const;
};

struct ScoreSet {
    WeightSpec spec;
    std::vector<double> weights;  // one per risk-table row
    std::vector<double> raw;      // a_k, dataset order
    std::vector<double> scaled;   // b_k; empty until standardize()
    double scale = 0.0;           // A
    double offset = 0.0;          // B
};

struct LogRankSums {
    double u = 0.0;
    double v = 0.0;
};

/// Weights per risk-table row; `pooled` must be the KM fit of the same data.
std::vector<double> compute_weights(const RiskTable& rt, const StepSurvival& pooled, const WeightSpec& spec);

/// Observed-minus-expected statistic for arm 1 and its hypergeometric variance.
/// Rows with a single subject at risk contribute nothing to the variance.
LogRankSums u_and_v(const RiskTable& rt, std::span<const double> weights);

/// Per-subject scores (raw only): an event at t_j scores w_j - C_j, a censoring
/// in [t_j, t_{j+1}) scores -C_j, and a censoring before t_1 scores 0, where
/// C_j is the cumulative sum of w_i O_i / n_i up to row j.
ScoreSet compute_scores(const TrialDataset& ds, const RiskTable& rt, std::span<const double> weights,
                        const WeightSpec& spec = {});

/// Maps raw scores onto [-1, 1] by b = A a + B. Throws on a degenerate range.
ScoreSet standardize(ScoreSet scores);

struct PermutationMoments {
    double var_sum = 0.0;        // Var_P of the arm-1 sum
    double var_mean_diff = 0.0;  // Var_P of mean(arm 1) - mean(arm 0)
};

/// Permutation variances for a random draw of `n_experimental` labels. Values
/// are centred first, so non-zero-sum inputs (pseudo-values) are fine.
PermutationMoments perm_moments(std::span<const double> values, std::size_t n_experimental);

/// mean(arm 1) - mean(arm 0). Throws if either arm is empty.
double mean_score_diff(std::span<const double> values, std::span<const Arm> arms);

struct WeightedLogRankTest {
    TestResult result;  // lower tail: negative U (benefit on arm 1) gives small p
    ScoreSet scores;    // standardized unless every score is equal (see warnings)
    LogRankSums sums;
};

WeightedLogRankTest wlrt_test(const TrialDataset& ds, const WeightSpec& spec);

}  // namespace survscore
