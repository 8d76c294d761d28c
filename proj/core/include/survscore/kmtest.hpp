#pragma once

// Classical Kaplan-Meier based two-sample tests with Greenwood-type variances.

#include "survscore/survdata.hpp"
#include "survscore/test_result.hpp"

namespace survscore {

/// U = RMST_1(tau) - RMST_0(tau); upper tail (arm-1 benefit gives small p).
/// Event times where everybody at risk dies are left out of the variance and
/// reported in `warnings`.
TestResult rmst_test(const TrialDataset& ds, double tau);

/// U = S_1(kappa) - S_0(kappa); upper tail.
TestResult milestone_test(const TrialDataset& ds, double kappa);

}  // namespace survscore
