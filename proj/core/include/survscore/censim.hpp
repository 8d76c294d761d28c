#pragma once

#include <cstdint>

#include "survscore/survdata.hpp"

namespace survscore {

/// Adds independent Uniform(0, c_max) censoring: one draw per subject, in
/// dataset order, from derive_stream(seed, 0). A subject keeps its event when
/// the event time is <= the draw.
TrialDataset inject_censoring(const TrialDataset& ds, double c_max, std::uint64_t seed);

}  // namespace survscore
