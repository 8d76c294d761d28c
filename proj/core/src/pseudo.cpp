#include "survscore/pseudo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>

#include "survscore/error.hpp"
#include "survscore/wlrt.hpp"

namespace survscore {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

void check_horizon(const Survival& s, double horizon) {
    if (const auto* step = std::get_if<StepSurvival>(&s); step && horizon > step->max_followup()) {
        throw Error("restriction time beyond data");
    }
}

// One fitting group: either an arm or the whole trial.
class GroupFits {
public:
    GroupFits(const TrialDataset& group, const EstimandSpec& spec) : backend_(spec.backend) {
        switch (backend_) {
            case Backend::km:
                km_.emplace(group);
                break;
            case Backend::exponential:
                exposure_.emplace(group, std::span<const double>{});
                break;
            case Backend::piecewise:
                exposure_.emplace(group, spec.breakpoints);
                break;
        }
    }

    Survival full() const {
        if (km_) return km_->full();
        return exposure_->fit(kind());
    }

    Survival without(std::size_t k) const {
        if (km_) return km_->without(k);
        return exposure_->fit_without(k, kind());
    }

private:
    ParametricSurvival::Kind kind() const {
        return backend_ == Backend::exponential ? ParametricSurvival::Kind::exponential
                                                : ParametricSurvival::Kind::piecewise_exponential;
    }

    Backend backend_;
    std::optional<LeaveOneOutKM> km_;
    std::optional<PiecewiseExposure> exposure_;
};

}  // namespace

void EstimandSpec::validate() const {
    const auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    std::visit(overloaded{
                   [&](const Rmst& e) {
                       if (!positive(e.tau)) throw Error("RMST horizon tau must be positive");
                   },
                   [&](const Milestone& e) {
                       if (!positive(e.kappa)) throw Error("milestone time kappa must be positive");
                   },
                   [&](const Wmst& e) {
                       if (!(e.tau1 >= 0.0) || !positive(e.tau2) || !(e.tau1 < e.tau2)) {
                           throw Error("WMST window needs 0 <= tau1 < tau2");
                       }
                   },
                   [&](const Ahsw& e) {
                       if (!positive(e.tau)) throw Error("AHSW horizon tau must be positive");
                   },
               },
               estimand);
    if (backend == Backend::piecewise) {
        for (std::size_t b = 0; b < breakpoints.size(); ++b) {
            if (!(breakpoints[b] > (b == 0 ? 0.0 : breakpoints[b - 1]))) {
                throw Error("breakpoints must be positive and strictly ascending");
            }
        }
    }
}

std::string EstimandSpec::describe() const {
    std::string out;
    switch (backend) {
        case Backend::km:
            out = "KM ";
            break;
        case Backend::exponential:
            out = "Exp ";
            break;
        case Backend::piecewise:
            out = "PWExp ";
            break;
    }
    out += std::visit(overloaded{
                          [](const Rmst& e) { return "RMST(" + num(e.tau) + ")"; },
                          [](const Milestone& e) { return "milestone(" + num(e.kappa) + ")"; },
                          [](const Wmst& e) { return "WMST(" + num(e.tau1) + "," + num(e.tau2) + ")"; },
                          [](const Ahsw& e) {
                              return std::string(e.log_scale ? "log-AHSW(" : "AHSW(") + num(e.tau) + ")";
                          },
                      },
                      estimand);
    if (pooling == Pooling::pooled) out += " pooled";
    return out;
}

double evaluate_functional(const Estimand& e, const Survival& s) {
    return std::visit(overloaded{
                          [&](const Rmst& r) { return rmst(s, r.tau); },
                          [&](const Milestone& m) {
                              check_horizon(s, m.kappa);
                              return surv_at(s, m.kappa);
                          },
                          [&](const Wmst& w) {
                              const double upper = rmst(s, w.tau2);
                              return w.tau1 > 0.0 ? upper - rmst(s, w.tau1) : upper;
                          },
                          [&](const Ahsw& a) {
                              check_horizon(s, a.tau);
                              const double ratio = (1.0 - surv_at(s, a.tau)) / rmst(s, a.tau);
                              if (!a.log_scale) return ratio;
                              if (!(ratio > 0.0)) throw Error("log-AHSW undefined: no hazard before tau");
                              return std::log(ratio);
                          },
                      },
                      e);
}

bool larger_is_better(const Estimand& e) { return !std::holds_alternative<Ahsw>(e); }

PseudoSet pseudo_values(const TrialDataset& ds, const EstimandSpec& spec) {
    spec.validate();
    if (ds.empty()) throw Error("pseudo-values need at least one subject");

    std::vector<std::vector<std::size_t>> groups;
    if (spec.pooling == Pooling::pooled) {
        groups.emplace_back(ds.size());
        for (std::size_t k = 0; k < ds.size(); ++k) groups[0][k] = k;
    } else {
        groups.resize(2);
        for (std::size_t k = 0; k < ds.size(); ++k) groups[arm_index(ds[k].arm)].push_back(k);
    }

    PseudoSet out;
    out.spec = spec;
    out.values.assign(ds.size(), 0.0);
    out.loo_estimates.assign(ds.size(), 0.0);

    for (std::size_t g = 0; g < groups.size(); ++g) {
        const auto& members = groups[g];
        if (members.empty()) continue;
        if (members.size() < 2) {
            throw Error("pseudo-values need at least two subjects per fitting group");
        }
        std::vector<Subject> subjects;
        subjects.reserve(members.size());
        for (std::size_t k : members) subjects.push_back(ds[k]);
        const GroupFits fits(TrialDataset(std::move(subjects)), spec);

        double full = 0.0;
        try {
            full = evaluate_functional(spec.estimand, fits.full());
        } catch (const Error& e) {
            throw Error(std::string("full-sample fit: ") + e.what());
        }
        if (spec.pooling == Pooling::pooled) {
            out.full_estimates = {full, full};
        } else {
            out.full_estimates[g] = full;
        }

        const double n = static_cast<double>(members.size());
        for (std::size_t i = 0; i < members.size(); ++i) {
            const std::size_t k = members[i];
            double loo = 0.0;
            try {
                loo = evaluate_functional(spec.estimand, fits.without(i));
            } catch (const Error& e) {
                throw Error("after removing subject " + std::to_string(k + 1) + " (time " + num(ds[k].time) +
                            "): " + e.what());
            }
            out.loo_estimates[k] = loo;
            out.values[k] = n * full - (n - 1.0) * loo;
        }
    }
    return out;
}

PseudoSet standardize_pseudo(PseudoSet ps) {
    if (ps.values.empty()) throw Error("degenerate pseudo-value range");
    const auto [lo, hi] = std::minmax_element(ps.values.begin(), ps.values.end());
    const double min_v = *lo;
    const double max_v = *hi;
    if (!(max_v > min_v)) throw Error("degenerate pseudo-value range");
    const double range = max_v - min_v;
    ps.scale = -2.0 / range;
    ps.offset = (max_v + min_v) / range;
    ps.scaled.resize(ps.values.size());
    for (std::size_t k = 0; k < ps.values.size(); ++k) {
        ps.scaled[k] = ((max_v - ps.values[k]) - (ps.values[k] - min_v)) / range;
    }
    return ps;
}

TestResult pseudo_test(const PseudoSet& ps, std::span<const Arm> arms) {
    if (arms.size() != ps.values.size()) throw Error("values and arms differ in length");
    const double statistic = mean_score_diff(ps.values, arms);
    const auto n1 = static_cast<std::size_t>(std::count(arms.begin(), arms.end(), Arm::experimental));
    const auto moments = perm_moments(ps.values, n1);
    return make_test_result(ps.spec.describe(), statistic, moments.var_mean_diff,
                            larger_is_better(ps.spec.estimand) ? Tail::upper : Tail::lower);
}

}  // namespace survscore
