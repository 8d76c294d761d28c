#include "survscore/censim.hpp"

#include <cmath>
#include <vector>

#include "survscore/error.hpp"
#include "survscore/rng.hpp"

namespace survscore {

TrialDataset inject_censoring(const TrialDataset& ds, double c_max, std::uint64_t seed) {
    if (!(c_max > 0.0) || !std::isfinite(c_max)) throw Error("censoring bound must be positive and finite");
    SplitMix64 g = derive_stream(seed, 0);
    std::vector<Subject> out;
    out.reserve(ds.size());
    for (const auto& s : ds.subjects()) {
        double u = c_max * uniform_open01(g);
        if (u >= c_max) u = std::nextafter(c_max, 0.0);
        Subject t = s;
        if (s.time > u) {
            t.time = u;
            t.event = false;
        }
        out.push_back(t);
    }
    return TrialDataset(std::move(out));
}

}  // namespace survscore
