#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "uatpc/random.hpp"
#include "uatpc/types.hpp"

namespace uatpc {

/// Log-distance model: pl0 + 10 n log10(max(d, d0) / d0) + N(0, sigma).
struct PathLossParams {
    double pl0_db = 40.0;
    double ref_dist_m = 1.0;
    double exponent = 3.0;
    double shadowing_sigma_db = 0.0;
};

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point2&) const = default;
};

double distance(const Point2& a, const Point2& b);

/// Deterministic part of the model.
double pathloss(double d_m, const PathLossParams& params);

/// Adds seeded Gaussian shadowing when params.shadowing_sigma_db > 0.
double pathloss(double d_m, const PathLossParams& params, Rng& rng);

std::vector<int> level_range(int lo, int hi, int step = 1);

struct ScenarioParams {
    std::size_t n_aps = 33;
    std::size_t n_stas = 330;
    double side_m = 100.0;
    std::vector<int> levels = level_range(4, 32, 4);
    PathLossParams pl_params{};
    std::uint64_t seed = 0;
    std::optional<std::vector<int>> channels; // per-AP plan; default all on one channel
};

struct HotspotParams {
    std::size_t n_hotspots = 50;
    std::size_t n_stas = 10000;
    double clustered_fraction = 0.9;
    double cluster_sigma_m = 1.0;
    double side_m = 100.0;
    std::size_t n_aps = 33;
    std::vector<int> levels = level_range(4, 32, 4);
    PathLossParams pl_params{};
    std::uint64_t seed = 0;
};

struct SyntheticScenario {
    double side_m = 0.0;
    std::vector<Point2> ap_positions;
    std::vector<Point2> sta_positions;
    std::vector<Point2> hotspot_centers;
    std::vector<int> sta_hotspot; // hotspot index per STA, -1 when placed uniformly
    NetworkInstance instance;
    Matrix rp_pl; // ground truth, STA x AP
    PathLossParams pl_params;

    ReferencePointSet reference_points() const;
};

/// APs and STAs i.i.d. uniform on a square of side side_m.
SyntheticScenario gen_uniform_scenario(const ScenarioParams& params);

/// Uniform APs; a clustered_fraction of STAs Gaussian around uniformly drawn
/// hotspot centers, the rest uniform. With clustered_fraction = 0 the STA
/// placement equals gen_uniform_scenario's for the same seed.
SyntheticScenario gen_hotspot_scenario(const HotspotParams& params);

/// Keeps the k_visible smallest path losses of every row (ties by AP index);
/// the serving AP is the smallest-PL one.
std::vector<MeasurementRecord> obfuscate(const Matrix& ground_truth, const NetworkInstance& instance,
                                         std::size_t k_visible);

} // namespace uatpc
