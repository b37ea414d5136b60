#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "uatpc/types.hpp"

namespace fixtures {

inline std::vector<int> levels(int lo, int hi, int step = 1)
{
    std::vector<int> out;
    for (int v = lo; v <= hi; v += step) {
        out.push_back(v);
    }
    return out;
}

// n APs on one channel with the given levels; AP-AP path loss 60 + 5|a-b|.
inline uatpc::NetworkInstance instance(std::size_t n, const std::vector<int>& lv, int channel = 36)
{
    std::vector<uatpc::AccessPoint> aps;
    uatpc::Matrix pl(n, n);
    for (std::size_t a = 0; a < n; ++a) {
        aps.push_back({"ap" + std::to_string(a), lv, channel});
        for (std::size_t b = 0; b < n; ++b) {
            pl(a, b) = a == b ? 0.0 : 60.0 + 5.0 * std::abs(static_cast<double>(a) - static_cast<double>(b));
        }
    }
    return {aps, pl};
}

inline uatpc::ReferencePointSet random_rps(std::size_t n_rps, std::size_t n_aps, std::uint64_t seed, double lo = 40.0,
                                           double hi = 110.0)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    uatpc::ReferencePointSet rps;
    rps.rp_pl = uatpc::Matrix(n_rps, n_aps);
    for (auto& v : rps.rp_pl.data()) {
        v = u(rng);
    }
    for (std::size_t r = 0; r < n_rps; ++r) {
        rps.origin_ids.push_back("rp" + std::to_string(r));
    }
    return rps;
}

inline uatpc::PowerConfig random_config(const uatpc::NetworkInstance& inst, std::mt19937_64& rng)
{
    uatpc::PowerConfig c;
    for (const auto& ap : inst.aps()) {
        std::uniform_int_distribution<std::size_t> pick(0, ap.allowed_levels.size() - 1);
        c.levels.push_back(ap.allowed_levels[pick(rng)]);
    }
    return c;
}

} // namespace fixtures
