#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "support.hpp"
#include "survscore/error.hpp"
#include "survscore/wlrt.hpp"

using namespace survscore;

namespace {

ScoreSet scores_for(const TrialDataset& ds, const WeightSpec& spec) {
    const RiskTable rt = build_risk_table(ds);
    return compute_scores(ds, rt, compute_weights(rt, km_fit(ds), spec), spec);
}

const WeightSpec kSpecs[] = {
    WeightSpec::logrank(),
    WeightSpec::fleming_harrington(0.0, 1.0),
    WeightSpec::fleming_harrington(1.0, 1.0),
    WeightSpec::modest(0.5),
};

}  // namespace

TEST(Weights, Formulas) {
    EXPECT_EQ(WeightSpec::logrank().weight(0.3), 1.0);
    EXPECT_NEAR(WeightSpec::fleming_harrington(1.0, 2.0).weight(0.6), 0.6 * 0.16, 1e-15);
    EXPECT_EQ(WeightSpec::fleming_harrington(0.0, 1.0).weight(1.0), 0.0);
    EXPECT_EQ(WeightSpec::fleming_harrington(0.0, 0.0).weight(1.0), 1.0);
    EXPECT_EQ(WeightSpec::fleming_harrington(1.0, 0.0).weight(0.0), 0.0);
    EXPECT_EQ(WeightSpec::modest(0.5).weight(0.8), 1.25);
    EXPECT_EQ(WeightSpec::modest(0.5).weight(0.2), 2.0);
}

TEST(Weights, Validation) {
    EXPECT_THROW(WeightSpec::fleming_harrington(-1.0, 0.0), Error);
    EXPECT_THROW(WeightSpec::modest(0.0), Error);
    EXPECT_THROW(WeightSpec::modest(1.5), Error);
    EXPECT_EQ(WeightSpec::fleming_harrington(0.0, 1.0).describe(), "FH(0,1)");
    EXPECT_EQ(WeightSpec::modest(0.5).describe(), "MW(s*=0.5)");
}

TEST(Scores, ToyLogRank) {
    const auto toy = oracle::toy_dataset();
    const ScoreSet s = standardize(scores_for(toy, WeightSpec::logrank()));
    // dataset order; the event at 24.98 scores 1 - (sum of O/n up to it) = 0.180123
    const double raw[] = {-0.8198773, 0.9166667, -0.8198773, 0.6146465, 0.1801227, 0.7257576,
                          0.4896465,  -0.8198773, 0.8257576, 0.3467893, -0.8198773, -0.8198773};
    for (std::size_t k = 0; k < 12; ++k) EXPECT_NEAR(s.raw[k], raw[k], 1e-7) << k;
    const double range = 11.0 / 12 + 0.8198773448773448;
    EXPECT_NEAR(s.scale, 2.0 / range, 1e-12);
    EXPECT_NEAR(s.offset, 1.0 - 2.0 / range * 11.0 / 12, 1e-12);
    EXPECT_EQ(*std::max_element(s.scaled.begin(), s.scaled.end()), 1.0);
    EXPECT_EQ(*std::min_element(s.scaled.begin(), s.scaled.end()), -1.0);
    const auto arms = toy.arms();
    const double m = mean_score_diff(s.scaled, arms);
    EXPECT_NEAR(m, -0.208807 - 0.097333, 1e-6);
}

TEST(Scores, ToyUandV) {
    const auto toy = oracle::toy_dataset();
    const RiskTable rt = build_risk_table(toy);
    const auto w = compute_weights(rt, km_fit(toy), WeightSpec::logrank());
    const LogRankSums uv = u_and_v(rt, w);
    EXPECT_NEAR(uv.u, -0.797439, 1e-6);
    EXPECT_NEAR(uv.v, 1.7241204237, 1e-9);
    const auto pm = perm_moments(scores_for(toy, WeightSpec::logrank()).raw, 6);
    EXPECT_NEAR(pm.var_sum, 1.685488, 1e-6);
    const auto t = wlrt_test(toy, WeightSpec::logrank());
    EXPECT_NEAR(t.result.z, -0.607314, 1e-6);
    EXPECT_NEAR(t.result.p_one_sided, normal_cdf(t.result.z), 1e-15);
    EXPECT_EQ(t.result.method, "logrank");
}

TEST(Scores, ToyFlemingHarringtonIsNonMonotone) {
    const auto toy = oracle::toy_dataset();
    const RiskTable rt = build_risk_table(toy);
    const auto w = compute_weights(rt, km_fit(toy), WeightSpec::fleming_harrington(0.0, 1.0));
    ScoreSet s = compute_scores(toy, rt, w, WeightSpec::fleming_harrington(0.0, 1.0));
    // events at 4.38, 6.12, 6.32 are subjects 1, 8, 5
    EXPECT_NEAR(s.raw[1], 0.0, 1e-12);
    EXPECT_NEAR(s.raw[8], 0.0757576, 1e-7);
    EXPECT_NEAR(s.raw[5], 0.142424, 1e-6);
}

TEST(Scores, MatchDefinitionOracle) {
    std::mt19937_64 rng(31);
    for (int rep = 0; rep < 100; ++rep) {
        const TrialDataset ds = oracle::random_dataset(rng);
        for (const auto& spec : kSpecs) {
            const auto fast = scores_for(ds, spec).raw;
            const auto slow = oracle::naive_scores(ds, [&](double s) { return spec.weight(s); });
            for (std::size_t k = 0; k < ds.size(); ++k) ASSERT_NEAR(fast[k], slow[k], 1e-12);
        }
    }
}

TEST(Scores, SumToZeroAndMatchU) {
    std::mt19937_64 rng(32);
    for (int rep = 0; rep < 200; ++rep) {
        const TrialDataset ds = oracle::random_dataset(rng);
        const RiskTable rt = build_risk_table(ds);
        for (const auto& spec : kSpecs) {
            const auto w = compute_weights(rt, km_fit(ds), spec);
            const auto raw = compute_scores(ds, rt, w, spec).raw;
            double total = 0.0;
            double arm1 = 0.0;
            for (std::size_t k = 0; k < ds.size(); ++k) {
                total += raw[k];
                if (ds[k].arm == Arm::experimental) arm1 += raw[k];
            }
            ASSERT_NEAR(total, 0.0, 1e-9);
            ASSERT_NEAR(arm1, u_and_v(rt, w).u, 1e-9);
        }
    }
}

TEST(Scores, LogRankEventScoresDecreaseInTime) {
    std::mt19937_64 rng(33);
    for (int rep = 0; rep < 200; ++rep) {
        const TrialDataset ds = oracle::random_dataset(rng);
        const auto raw = scores_for(ds, WeightSpec::logrank()).raw;
        for (std::size_t a = 0; a < ds.size(); ++a) {
            for (std::size_t b = 0; b < ds.size(); ++b) {
                if (ds[a].event && ds[b].event && ds[a].time < ds[b].time) ASSERT_GT(raw[a], raw[b]);
            }
        }
    }
}

TEST(Scores, StandardizeIsAffineOntoUnitInterval) {
    std::mt19937_64 rng(34);
    for (int rep = 0; rep < 100; ++rep) {
        const TrialDataset ds = oracle::random_dataset(rng, {.min_n = 4});
        const ScoreSet raw = scores_for(ds, WeightSpec::logrank());
        if (*std::max_element(raw.raw.begin(), raw.raw.end()) == *std::min_element(raw.raw.begin(), raw.raw.end())) {
            EXPECT_THROW(standardize(raw), Error);
            continue;
        }
        const ScoreSet s = standardize(raw);
        for (std::size_t k = 0; k < ds.size(); ++k) {
            ASSERT_GE(s.scaled[k], -1.0);
            ASSERT_LE(s.scaled[k], 1.0);
            ASSERT_NEAR(s.scaled[k], s.scale * s.raw[k] + s.offset, 1e-12);
        }
        ASSERT_GT(s.scale, 0.0);
    }
}

TEST(Scores, IdentityWeightingsMatchLogRank) {
    std::mt19937_64 rng(35);
    for (int rep = 0; rep < 100; ++rep) {
        const TrialDataset ds = oracle::random_dataset(rng);
        const auto lr = scores_for(ds, WeightSpec::logrank()).raw;
        const auto fh00 = scores_for(ds, WeightSpec::fleming_harrington(0.0, 0.0)).raw;
        const auto mw1 = scores_for(ds, WeightSpec::modest(1.0)).raw;
        for (std::size_t k = 0; k < ds.size(); ++k) {
            ASSERT_NEAR(fh00[k], lr[k], 1e-12);
            ASSERT_NEAR(mw1[k], lr[k], 1e-12);
        }
    }
}

TEST(PermMoments, MatchesEnumeration) {
    const std::vector<double> v{0.3, -1.2, 2.5, 0.0, 0.7, -0.4, 1.1};
    const std::size_t n1 = 3;
    // second moment of the arm-1 sum over all C(7,3) label sets
    double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double m2 = 0.0;
    int count = 0;
    for (unsigned mask = 0; mask < 128; ++mask) {
        if (__builtin_popcount(mask) != 3) continue;
        double s = 0.0;
        for (std::size_t k = 0; k < v.size(); ++k) {
            if (mask >> k & 1) s += v[k] - mean;
        }
        m2 += s * s;
        ++count;
    }
    const auto pm = perm_moments(v, n1);
    EXPECT_NEAR(pm.var_sum, m2 / count, 1e-12);
    const double f = 1.0 / 3 + 1.0 / 4;
    EXPECT_NEAR(pm.var_mean_diff, f * f * m2 / count, 1e-12);
    EXPECT_THROW(perm_moments(v, 0), Error);
    EXPECT_THROW(perm_moments(std::vector<double>{1.0}, 1), Error);
}

TEST(WlrtTest, ZeroVarianceWarns) {
    // one event with one subject at risk
    const TrialDataset ds({{1.0, Arm::control, false}, {2.0, Arm::experimental, true}});
    const auto t = wlrt_test(ds, WeightSpec::logrank());
    EXPECT_EQ(t.sums.v, 0.0);
    EXPECT_FALSE(t.result.warnings.empty());
}
