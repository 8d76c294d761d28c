#pragma once

// Survival-curve estimators: Kaplan-Meier step curves and (piecewise)
// exponential fits, with exact restricted-mean integration.

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "survscore/survdata.hpp"

namespace survscore {

/// Right-continuous step function: S(t) = 1 before the first jump, values[m]
/// on [times[m], times[m+1]).
class StepSurvival {
public:
    /// `max_followup` is the last observed time of the generating data; the
    /// curve is not defined beyond it for integration purposes.
    StepSurvival(std::vector<double> times, std::vector<double> values, double max_followup);

    std::span<const double> times() const noexcept { return times_; }
    std::span<const double> values() const noexcept { return values_; }
    double max_followup() const noexcept { return max_followup_; }

    double at(double t) const;
    /// Left limit S(t-).
    double left(double t) const;
    /// Exact integral of S over [0, tau]. Throws when tau > max_followup().
    double rmst(double tau) const;

private:
    std::vector<double> times_;
    std::vector<double> values_;
    double max_followup_ = 0.0;
};

/// Piecewise-constant hazard: rates[0] on [0, c_1], rates[b] on (c_b, c_{b+1}],
/// rates.back() beyond the last breakpoint. An exponential model has no
/// breakpoints.
class ParametricSurvival {
public:
    enum class Kind { exponential, piecewise_exponential };

    static ParametricSurvival exponential(double rate);
    static ParametricSurvival piecewise(std::vector<double> breakpoints, std::vector<double> rates);

    Kind kind() const noexcept { return kind_; }
    std::span<const double> breakpoints() const noexcept { return breakpoints_; }
    std::span<const double> rates() const noexcept { return rates_; }

    double cumulative_hazard(double t) const;
    double at(double t) const;
    double left(double t) const { return at(t); }
    double rmst(double tau) const;

private:
    ParametricSurvival(Kind kind, std::vector<double> breakpoints, std::vector<double> rates);

    Kind kind_;
    std::vector<double> breakpoints_;
    std::vector<double> rates_;
};

using Survival = std::variant<StepSurvival, ParametricSurvival>;

double surv_at(const Survival& s, double t);
double surv_left(const Survival& s, double t);
double rmst(const Survival& s, double tau);

/// Product-limit estimate. Throws when the dataset has no events.
StepSurvival km_fit(const TrialDataset& ds);

/// Kaplan-Meier curve of `ds` with subject `k` removed.
StepSurvival km_loo(const TrialDataset& ds, std::size_t k);

/// Shares one sorted risk table across all leave-one-out refits of a dataset;
/// each refit adjusts the counts instead of re-sorting.
class LeaveOneOutKM {
public:
    explicit LeaveOneOutKM(const TrialDataset& ds);

    StepSurvival full() const;
    /// Throws survscore::Error("degenerate leave-one-out") when no events remain.
    StepSurvival without(std::size_t k) const;

private:
    struct Row {
        double time;
        int at_risk;
        int events;
    };
    StepSurvival product_limit(std::size_t removed, double followup) const;  // removed == n: none

    std::vector<Row> rows_;  // distinct event times of the pooled data
    std::vector<double> times_;
    std::vector<bool> events_;
    double max_time_ = 0.0;
    double second_max_time_ = 0.0;
    std::size_t max_count_ = 0;
};

/// Maximum-likelihood constant hazard: events / total time at risk.
ParametricSurvival fit_exponential(const TrialDataset& ds);

/// Per-interval maximum-likelihood hazards; intervals are (c_{b-1}, c_b].
/// Throws if breakpoints are not strictly ascending and positive.
ParametricSurvival fit_piecewise_exponential(const TrialDataset& ds, std::span<const double> breakpoints);

/// Events and exposure per hazard interval; subtracting one subject's share
/// gives the leave-one-out fit without another pass over the data.
class PiecewiseExposure {
public:
    PiecewiseExposure(const TrialDataset& ds, std::span<const double> breakpoints);

    ParametricSurvival fit(ParametricSurvival::Kind kind) const;
    ParametricSurvival fit_without(std::size_t k, ParametricSurvival::Kind kind) const;

    std::span<const double> events() const noexcept { return events_; }
    std::span<const double> exposure() const noexcept { return exposure_; }

private:
    void accumulate(const Subject& s, double sign, std::vector<double>& events,
                    std::vector<double>& exposure) const;
    ParametricSurvival make(const std::vector<double>& events, const std::vector<double>& exposure,
                            ParametricSurvival::Kind kind) const;

    std::vector<Subject> subjects_;
    std::vector<double> breakpoints_;
    std::vector<double> events_;
    std::vector<double> exposure_;
};

}  // namespace survscore
