#include <gtest/gtest.h>

#include <random>

#include "support.hpp"
#include "survscore/error.hpp"
#include "survscore/kmtest.hpp"

using namespace survscore;

namespace {

// Greenwood-type variance of one arm's RMST(tau) written out term by term:
// sum over event times t_j <= tau of (int_{t_j}^tau S)^2 O_j / (n_j (n_j - O_j)).
double rmst_variance_oracle(const std::vector<Subject>& arm, double tau) {
    const oracle::NaiveCurve c = oracle::naive_km(arm);
    const double total = oracle::naive_step_integral(c, tau);
    double v = 0.0;
    for (double t : c.times) {
        if (t > tau) break;
        int n = 0;
        int d = 0;
        for (const auto& s : arm) {
            if (s.time >= t) ++n;
            if (s.time == t && s.event) ++d;
        }
        if (n == d) continue;
        const double tail = total - oracle::naive_step_integral(c, t);
        v += tail * tail * d / (static_cast<double>(n) * (n - d));
    }
    return v;
}

double milestone_variance_oracle(const std::vector<Subject>& arm, double kappa) {
    const oracle::NaiveCurve c = oracle::naive_km(arm);
    const double s = c.at(kappa);
    double v = 0.0;
    for (double t : c.times) {
        if (t > kappa) break;
        int n = 0;
        int d = 0;
        for (const auto& x : arm) {
            if (x.time >= t) ++n;
            if (x.time == t && x.event) ++d;
        }
        if (n != d) v += static_cast<double>(d) / (static_cast<double>(n) * (n - d));
    }
    return s * s * v;
}

std::vector<Subject> arm_subjects(const TrialDataset& ds, Arm a) {
    std::vector<Subject> out;
    for (const auto& s : ds.subjects()) {
        if (s.arm == a) out.push_back(s);
    }
    return out;
}

}  // namespace

TEST(RmstTest, Toy) {
    const auto toy = oracle::toy_dataset();
    const TestResult r = rmst_test(toy, 18.0);
    EXPECT_NEAR(r.statistic, 3.14, 1e-9);
    const double v = rmst_variance_oracle(arm_subjects(toy, Arm::control), 18.0) +
                     rmst_variance_oracle(arm_subjects(toy, Arm::experimental), 18.0);
    EXPECT_NEAR(r.variance, v, 1e-9);
    EXPECT_NEAR(r.p_one_sided, normal_cdf(-r.z), 1e-15);
    EXPECT_EQ(r.method, "KM RMST(18) difference");
}

TEST(MilestoneTest, Toy) {
    const TestResult r = milestone_test(oracle::toy_dataset(), 18.0);
    EXPECT_NEAR(r.statistic, 0.0, 1e-12);
    EXPECT_NEAR(r.z, 0.0, 1e-12);
    EXPECT_NEAR(r.p_one_sided, 0.5, 1e-12);
}

TEST(KmTests, MatchOracleOnRandomData) {
    std::mt19937_64 rng(51);
    for (int rep = 0; rep < 100; ++rep) {
        const TrialDataset ds = oracle::random_dataset(rng, {.min_n = 6, .max_n = 40, .min_per_arm = 3});
        const auto a0 = arm_subjects(ds, Arm::control);
        const auto a1 = arm_subjects(ds, Arm::experimental);
        double horizon = ds.max_time();
        for (const auto* a : {&a0, &a1}) {
            double m = 0.0;
            for (const auto& s : *a) m = std::max(m, s.time);
            horizon = std::min(horizon, m);
        }
        const double tau = 0.8 * horizon;
        const TestResult r = rmst_test(ds, tau);
        ASSERT_NEAR(r.statistic,
                    oracle::naive_step_integral(oracle::naive_km(a1), tau) -
                        oracle::naive_step_integral(oracle::naive_km(a0), tau),
                    1e-9);
        ASSERT_NEAR(r.variance, rmst_variance_oracle(a0, tau) + rmst_variance_oracle(a1, tau), 1e-9);

        const TestResult m = milestone_test(ds, tau);
        ASSERT_NEAR(m.statistic, oracle::naive_km(a1).at(tau) - oracle::naive_km(a0).at(tau), 1e-12);
        ASSERT_NEAR(m.variance, milestone_variance_oracle(a0, tau) + milestone_variance_oracle(a1, tau), 1e-12);
    }
}

TEST(KmTests, EveryoneDiesWarns) {
    const TrialDataset ds({{1.0, Arm::control, true}, {2.0, Arm::control, true}, {1.5, Arm::experimental, true},
                           {3.0, Arm::experimental, false}});
    const TestResult r = rmst_test(ds, 2.0);
    EXPECT_FALSE(r.warnings.empty());
}

TEST(KmTests, Errors) {
    const auto toy = oracle::toy_dataset();
    EXPECT_THROW(rmst_test(toy, 40.0), Error);
    EXPECT_THROW(rmst_test(toy, -1.0), Error);
    EXPECT_THROW(milestone_test(TrialDataset({{1.0, Arm::control, true}}), 0.5), Error);
}
