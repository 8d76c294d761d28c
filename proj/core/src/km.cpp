#include "survscore/km.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "survscore/error.hpp"

namespace survscore {

StepSurvival::StepSurvival(std::vector<double> times, std::vector<double> values, double max_followup)
    : times_(std::move(times)), values_(std::move(values)), max_followup_(max_followup) {
    if (times_.size() != values_.size()) throw Error("step curve: times and values differ in length");
}

double StepSurvival::at(double t) const {
    const auto m = std::upper_bound(times_.begin(), times_.end(), t) - times_.begin();
    return m == 0 ? 1.0 : values_[static_cast<std::size_t>(m - 1)];
}

double StepSurvival::left(double t) const {
    const auto m = std::lower_bound(times_.begin(), times_.end(), t) - times_.begin();
    return m == 0 ? 1.0 : values_[static_cast<std::size_t>(m - 1)];
}

double StepSurvival::rmst(double tau) const {
    if (!(tau >= 0.0)) throw Error("restriction time must be nonnegative");
    if (tau > max_followup_) throw Error("restriction time beyond data");
    double area = 0.0;
    double prev = 0.0;
    double s = 1.0;
    for (std::size_t m = 0; m < times_.size() && times_[m] < tau; ++m) {
        area += (times_[m] - prev) * s;
        prev = times_[m];
        s = values_[m];
    }
    return area + (tau - prev) * s;
}

ParametricSurvival::ParametricSurvival(Kind kind, std::vector<double> breakpoints, std::vector<double> rates)
    : kind_(kind), breakpoints_(std::move(breakpoints)), rates_(std::move(rates)) {
    if (rates_.size() != breakpoints_.size() + 1) throw Error("piecewise model needs one rate per interval");
    for (std::size_t b = 0; b < breakpoints_.size(); ++b) {
        if (!(breakpoints_[b] > (b == 0 ? 0.0 : breakpoints_[b - 1])) || !std::isfinite(breakpoints_[b])) {
            throw Error("breakpoints must be positive and strictly ascending");
        }
    }
    for (double r : rates_) {
        if (!(r >= 0.0) || !std::isfinite(r)) throw Error("hazard rates must be finite and nonnegative");
    }
}

ParametricSurvival ParametricSurvival::exponential(double rate) {
    return ParametricSurvival(Kind::exponential, {}, {rate});
}

ParametricSurvival ParametricSurvival::piecewise(std::vector<double> breakpoints, std::vector<double> rates) {
    return ParametricSurvival(Kind::piecewise_exponential, std::move(breakpoints), std::move(rates));
}

double ParametricSurvival::cumulative_hazard(double t) const {
    double h = 0.0;
    double start = 0.0;
    for (std::size_t b = 0; b < rates_.size() && t > start; ++b) {
        const double end = b < breakpoints_.size() ? breakpoints_[b] : std::numeric_limits<double>::infinity();
        h += rates_[b] * (std::min(t, end) - start);
        start = end;
    }
    return h;
}

double ParametricSurvival::at(double t) const { return std::exp(-cumulative_hazard(t)); }

double ParametricSurvival::rmst(double tau) const {
    if (!(tau >= 0.0) || !std::isfinite(tau)) throw Error("restriction time must be finite and nonnegative");
    double area = 0.0;
    double h = 0.0;
    double start = 0.0;
    for (std::size_t b = 0; b < rates_.size() && tau > start; ++b) {
        const double end = b < breakpoints_.size() ? breakpoints_[b] : std::numeric_limits<double>::infinity();
        const double len = std::min(tau, end) - start;
        const double rate = rates_[b];
        // integral of exp(-h - rate*u) over u in [0, len]
        area += rate > 0.0 ? std::exp(-h) * -std::expm1(-rate * len) / rate : std::exp(-h) * len;
        h += rate * len;
        start = end;
    }
    return area;
}

double surv_at(const Survival& s, double t) {
    return std::visit([t](const auto& curve) { return curve.at(t); }, s);
}

double surv_left(const Survival& s, double t) {
    return std::visit([t](const auto& curve) { return curve.left(t); }, s);
}

double rmst(const Survival& s, double tau) {
    return std::visit([tau](const auto& curve) { return curve.rmst(tau); }, s);
}

LeaveOneOutKM::LeaveOneOutKM(const TrialDataset& ds) {
    times_.reserve(ds.size());
    events_.reserve(ds.size());
    for (const auto& s : ds.subjects()) {
        times_.push_back(s.time);
        events_.push_back(s.event);
    }

    std::vector<std::size_t> order(ds.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return times_[a] < times_[b]; });

    int remaining = static_cast<int>(ds.size());
    for (std::size_t i = 0; i < order.size();) {
        const double t = times_[order[i]];
        int events = 0;
        std::size_t m = i;
        for (; m < order.size() && times_[order[m]] == t; ++m) events += events_[order[m]] ? 1 : 0;
        if (events > 0) rows_.push_back({t, remaining, events});
        remaining -= static_cast<int>(m - i);
        i = m;
    }

    if (!order.empty()) {
        max_time_ = times_[order.back()];
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            if (times_[*it] == max_time_) {
                ++max_count_;
            } else {
                second_max_time_ = times_[*it];
                break;
            }
        }
    }
}

StepSurvival LeaveOneOutKM::product_limit(std::size_t removed, double followup) const {
    const bool has_removed = removed < times_.size();
    const double removed_time = has_removed ? times_[removed] : -1.0;
    const bool removed_event = has_removed && events_[removed];

    std::vector<double> jump_times;
    std::vector<double> values;
    jump_times.reserve(rows_.size());
    values.reserve(rows_.size());
    double s = 1.0;
    for (const Row& row : rows_) {
        int n = row.at_risk;
        int o = row.events;
        if (has_removed && row.time <= removed_time) --n;
        if (removed_event && row.time == removed_time) --o;
        if (o == 0) continue;
        s *= 1.0 - static_cast<double>(o) / static_cast<double>(n);
        jump_times.push_back(row.time);
        values.push_back(s);
    }
    if (jump_times.empty()) {
        throw Error(has_removed ? "degenerate leave-one-out: no events remain" : "no event times");
    }
    return StepSurvival(std::move(jump_times), std::move(values), followup);
}

StepSurvival LeaveOneOutKM::full() const { return product_limit(times_.size(), max_time_); }

StepSurvival LeaveOneOutKM::without(std::size_t k) const {
    if (k >= times_.size()) throw Error("subject index out of range");
    if (times_.size() < 2) throw Error("degenerate leave-one-out: fewer than two subjects");
    const double followup = (times_[k] == max_time_ && max_count_ == 1) ? second_max_time_ : max_time_;
    return product_limit(k, followup);
}

StepSurvival km_fit(const TrialDataset& ds) {
    if (ds.event_count() == 0) throw Error("no event times");
    return LeaveOneOutKM(ds).full();
}

StepSurvival km_loo(const TrialDataset& ds, std::size_t k) { return LeaveOneOutKM(ds).without(k); }

PiecewiseExposure::PiecewiseExposure(const TrialDataset& ds, std::span<const double> breakpoints)
    : subjects_(ds.subjects().begin(), ds.subjects().end()),
      breakpoints_(breakpoints.begin(), breakpoints.end()),
      events_(breakpoints.size() + 1, 0.0),
      exposure_(breakpoints.size() + 1, 0.0) {
    for (std::size_t b = 0; b < breakpoints_.size(); ++b) {
        if (!(breakpoints_[b] > (b == 0 ? 0.0 : breakpoints_[b - 1])) || !std::isfinite(breakpoints_[b])) {
            throw Error("breakpoints must be positive and strictly ascending");
        }
    }
    for (const auto& s : subjects_) accumulate(s, 1.0, events_, exposure_);
}

void PiecewiseExposure::accumulate(const Subject& s, double sign, std::vector<double>& events,
                                   std::vector<double>& exposure) const {
    double start = 0.0;
    for (std::size_t b = 0; b < events.size() && s.time > start; ++b) {
        const double end = b < breakpoints_.size() ? breakpoints_[b] : std::numeric_limits<double>::infinity();
        exposure[b] += sign * (std::min(s.time, end) - start);
        if (s.event && s.time <= end) events[b] += sign;
        start = end;
    }
}

ParametricSurvival PiecewiseExposure::make(const std::vector<double>& events, const std::vector<double>& exposure,
                                           ParametricSurvival::Kind kind) const {
    std::vector<double> rates(events.size());
    for (std::size_t b = 0; b < rates.size(); ++b) {
        rates[b] = (exposure[b] > 0.0 && events[b] > 0.0) ? events[b] / exposure[b] : 0.0;
    }
    if (kind == ParametricSurvival::Kind::exponential) {
        if (!breakpoints_.empty()) throw Error("exponential model takes no breakpoints");
        return ParametricSurvival::exponential(rates[0]);
    }
    return ParametricSurvival::piecewise(breakpoints_, std::move(rates));
}

ParametricSurvival PiecewiseExposure::fit(ParametricSurvival::Kind kind) const {
    return make(events_, exposure_, kind);
}

ParametricSurvival PiecewiseExposure::fit_without(std::size_t k, ParametricSurvival::Kind kind) const {
    if (k >= subjects_.size()) throw Error("subject index out of range");
    auto events = events_;
    auto exposure = exposure_;
    accumulate(subjects_[k], -1.0, events, exposure);
    return make(events, exposure, kind);
}

ParametricSurvival fit_exponential(const TrialDataset& ds) {
    const double total = ds.total_time();
    const double rate = total > 0.0 ? static_cast<double>(ds.event_count()) / total : 0.0;
    return ParametricSurvival::exponential(rate);
}

ParametricSurvival fit_piecewise_exponential(const TrialDataset& ds, std::span<const double> breakpoints) {
    return PiecewiseExposure(ds, breakpoints).fit(ParametricSurvival::Kind::piecewise_exponential);
}

}  // namespace survscore
