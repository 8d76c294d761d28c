#include "survscore/wlrt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "survscore/error.hpp"

namespace survscore {

namespace {

std::string short_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

}  // namespace

WeightSpec WeightSpec::fleming_harrington(double rho, double gamma) {
    WeightSpec w;
    w.kind = Kind::fleming_harrington;
    w.rho = rho;
    w.gamma = gamma;
    w.validate();
    return w;
}

WeightSpec WeightSpec::modest(double s_star) {
    WeightSpec w;
    w.kind = Kind::modest;
    w.s_star = s_star;
    w.validate();
    return w;
}

void WeightSpec::validate() const {
    switch (kind) {
        case Kind::logrank:
            return;
        case Kind::fleming_harrington:
            if (!(rho >= 0.0) || !(gamma >= 0.0) || !std::isfinite(rho) || !std::isfinite(gamma)) {
                throw Error("Fleming-Harrington exponents must be finite and nonnegative");
            }
            return;
        case Kind::modest:
            if (!(s_star > 0.0 && s_star <= 1.0)) throw Error("modest weighting needs s* in (0, 1]");
            return;
    }
}

std::string WeightSpec::describe() const {
    switch (kind) {
        case Kind::logrank:
            return "logrank";
        case Kind::fleming_harrington:
            return "FH(" + short_number(rho) + "," + short_number(gamma) + ")";
        case Kind::modest:
            return "MW(s*=" + short_number(s_star) + ")";
    }
    return {};
}

double WeightSpec::weight(double surv_left) const {
    switch (kind) {
        case Kind::logrank:
            return 1.0;
        case Kind::fleming_harrington:
            // std::pow(0, 0) == 1, which is the convention we want at S = 1 or S = 0.
            return std::pow(surv_left, rho) * std::pow(1.0 - surv_left, gamma);
        case Kind::modest:
            return 1.0 / std::max(surv_left, s_star);
    }
    return 1.0;
}

std::vector<double> compute_weights(const RiskTable& rt, const StepSurvival& pooled, const WeightSpec& spec) {
    spec.validate();
    std::vector<double> w;
    w.reserve(rt.size());
    for (const auto& row : rt.rows()) w.push_back(spec.weight(pooled.left(row.time)));
    return w;
}

LogRankSums u_and_v(const RiskTable& rt, std::span<const double> weights) {
    if (weights.size() != rt.size()) throw Error("one weight per event time required");
    LogRankSums out;
    for (std::size_t j = 0; j < rt.size(); ++j) {
        const RiskRow& row = rt[j];
        const double w = weights[j];
        const double n = row.n();
        const double o = row.o();
        out.u += w * (row.events[1] - row.expected(Arm::experimental));
        if (row.n() > 1) {
            out.v += w * w * row.at_risk[0] * row.at_risk[1] * o * (n - o) / (n * n * (n - 1.0));
        }
    }
    return out;
}

ScoreSet compute_scores(const TrialDataset& ds, const RiskTable& rt, std::span<const double> weights,
                        const WeightSpec& spec) {
    if (weights.size() != rt.size()) throw Error("one weight per event time required");

    std::vector<double> cumulative(rt.size());
    double c = 0.0;
    for (std::size_t j = 0; j < rt.size(); ++j) {
        c += weights[j] * rt[j].o() / rt[j].n();
        cumulative[j] = c;
    }

    ScoreSet out;
    out.spec = spec;
    out.weights.assign(weights.begin(), weights.end());
    out.raw.reserve(ds.size());
    for (const auto& s : ds.subjects()) {
        const std::size_t j = rt.interval_of(s.time);
        if (j == 0) {
            out.raw.push_back(0.0);
        } else if (s.event) {
            out.raw.push_back(weights[j - 1] - cumulative[j - 1]);
        } else {
            out.raw.push_back(-cumulative[j - 1]);
        }
    }
    return out;
}

ScoreSet standardize(ScoreSet scores) {
    if (scores.raw.empty()) throw Error("degenerate score range");
    const auto [lo, hi] = std::minmax_element(scores.raw.begin(), scores.raw.end());
    const double min_a = *lo;
    const double max_a = *hi;
    if (!(max_a > min_a)) throw Error("degenerate score range");
    scores.scale = 2.0 / (max_a - min_a);
    scores.offset = 1.0 - scores.scale * max_a;
    scores.scaled.resize(scores.raw.size());
    for (std::size_t k = 0; k < scores.raw.size(); ++k) {
        // (2a - max - min) / (max - min), arranged so the extremes map to exactly +/-1
        scores.scaled[k] = ((scores.raw[k] - min_a) - (max_a - scores.raw[k])) / (max_a - min_a);
    }
    return scores;
}

PermutationMoments perm_moments(std::span<const double> values, std::size_t n_experimental) {
    const std::size_t n = values.size();
    if (n < 2) throw Error("permutation moments need at least two subjects");
    if (n_experimental < 1 || n_experimental > n - 1) throw Error("both arms must be non-empty");

    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);

    const double n1 = static_cast<double>(n_experimental);
    const double n0 = static_cast<double>(n - n_experimental);
    const double nn = static_cast<double>(n);
    PermutationMoments out;
    out.var_sum = n1 * n0 / (nn * (nn - 1.0)) * ss;
    const double f = 1.0 / n1 + 1.0 / n0;
    out.var_mean_diff = f * f * out.var_sum;
    return out;
}

double mean_score_diff(std::span<const double> values, std::span<const Arm> arms) {
    if (values.size() != arms.size()) throw Error("values and arms differ in length");
    double sum[2] = {0.0, 0.0};
    std::size_t count[2] = {0, 0};
    for (std::size_t k = 0; k < values.size(); ++k) {
        sum[arm_index(arms[k])] += values[k];
        ++count[arm_index(arms[k])];
    }
    if (count[0] == 0 || count[1] == 0) throw Error("both arms must be non-empty");
    return sum[1] / static_cast<double>(count[1]) - sum[0] / static_cast<double>(count[0]);
}

WeightedLogRankTest wlrt_test(const TrialDataset& ds, const WeightSpec& spec) {
    ds.require_two_arms();
    const RiskTable rt = build_risk_table(ds);
    const StepSurvival pooled = km_fit(ds);
    const auto weights = compute_weights(rt, pooled, spec);

    WeightedLogRankTest out;
    out.sums = u_and_v(rt, weights);
    out.result = make_test_result(spec.describe(), out.sums.u, out.sums.v, Tail::lower);
    out.scores = compute_scores(ds, rt, weights, spec);
    const auto [lo, hi] = std::minmax_element(out.scores.raw.begin(), out.scores.raw.end());
    if (*hi > *lo) {
        out.scores = standardize(std::move(out.scores));
    } else {
        out.result.warnings.emplace_back("degenerate score range; no standardized scores");
    }
    return out;
}

}  // namespace survscore
