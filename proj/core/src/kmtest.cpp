#include "survscore/kmtest.hpp"

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "survscore/error.hpp"
#include "survscore/km.hpp"

namespace survscore {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

struct ArmFit {
    RiskTable table;
    StepSurvival curve;
};

ArmFit fit_arm(const TrialDataset& arm, int index, double horizon) {
    if (arm.empty()) throw Error("arm " + std::to_string(index) + " has no subjects");
    if (horizon > arm.max_time()) {
        throw Error("restriction time beyond data on arm " + std::to_string(index));
    }
    if (arm.event_count() == 0) {
        // No events: the curve stays at 1 and there is nothing to add to the variance.
        return {RiskTable({}, {}), StepSurvival({}, {}, arm.max_time())};
    }
    return {build_risk_table(arm), km_fit(arm)};
}

// O / (n (n - O)), or -1 when everyone at risk has the event.
double greenwood_term(const RiskRow& row) {
    const int n = row.n();
    const int o = row.o();
    if (n == o) return -1.0;
    return static_cast<double>(o) / (static_cast<double>(n) * (n - o));
}

}  // namespace

TestResult rmst_test(const TrialDataset& ds, double tau) {
    if (!(tau > 0.0)) throw Error("RMST horizon tau must be positive");
    const auto [control, experimental] = split_by_arm(ds);
    const ArmFit fits[2] = {fit_arm(control, 0, tau), fit_arm(experimental, 1, tau)};

    std::vector<std::string> warnings;
    double variance = 0.0;
    double area[2] = {0.0, 0.0};
    for (int a = 0; a < 2; ++a) {
        const auto& fit = fits[a];
        area[a] = fit.curve.rmst(tau);

        // Tail integrals int_{t_j}^{tau} S, accumulated backwards over the rows up to tau.
        const auto rows = fit.table.rows();
        std::size_t last = 0;
        while (last < rows.size() && rows[last].time <= tau) ++last;
        double tail = 0.0;
        double upper = tau;
        for (std::size_t j = last; j-- > 0;) {
            tail += (upper - rows[j].time) * fit.curve.at(rows[j].time);
            upper = rows[j].time;
            const double g = greenwood_term(rows[j]);
            if (g < 0.0) {
                warnings.push_back("arm " + std::to_string(a) + ": all at risk had the event at t=" +
                                   num(rows[j].time) + "; variance term dropped");
                continue;
            }
            variance += tail * tail * g;
        }
    }
    return make_test_result("KM RMST(" + num(tau) + ") difference", area[1] - area[0], variance, Tail::upper,
                            std::move(warnings));
}

TestResult milestone_test(const TrialDataset& ds, double kappa) {
    if (!(kappa > 0.0)) throw Error("milestone time kappa must be positive");
    const auto [control, experimental] = split_by_arm(ds);
    const ArmFit fits[2] = {fit_arm(control, 0, kappa), fit_arm(experimental, 1, kappa)};

    std::vector<std::string> warnings;
    double variance = 0.0;
    double surv[2] = {0.0, 0.0};
    for (int a = 0; a < 2; ++a) {
        const auto& fit = fits[a];
        surv[a] = fit.curve.at(kappa);
        for (const auto& row : fit.table.rows()) {
            if (row.time > kappa) break;
            const double g = greenwood_term(row);
            if (g < 0.0) {
                warnings.push_back("arm " + std::to_string(a) + ": all at risk had the event at t=" +
                                   num(row.time) + "; variance term dropped");
                continue;
            }
            variance += surv[a] * surv[a] * g;
        }
    }
    return make_test_result("KM milestone(" + num(kappa) + ") difference", surv[1] - surv[0], variance,
                            Tail::upper, std::move(warnings));
}

}  // namespace survscore
