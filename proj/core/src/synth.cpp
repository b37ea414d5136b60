#include "uatpc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "uatpc/errors.hpp"

namespace uatpc {

double distance(const Point2& a, const Point2& b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

double pathloss(double d_m, const PathLossParams& params)
{
    if (d_m < 0.0) {
        throw ValidationError("distance must be non-negative");
    }
    const double d = std::max(d_m, params.ref_dist_m);
    return params.pl0_db + 10.0 * params.exponent * std::log10(d / params.ref_dist_m);
}

double pathloss(double d_m, const PathLossParams& params, Rng& rng)
{
    double pl = pathloss(d_m, params);
    if (params.shadowing_sigma_db > 0.0) {
        std::normal_distribution<double> shadow(0.0, params.shadowing_sigma_db);
        pl += shadow(rng);
    }
    return std::max(pl, 0.0);
}

std::vector<int> level_range(int lo, int hi, int step)
{
    std::vector<int> out;
    for (int l = lo; l <= hi; l += step) {
        out.push_back(l);
    }
    return out;
}

ReferencePointSet SyntheticScenario::reference_points() const
{
    ReferencePointSet rps;
    rps.rp_pl = rp_pl;
    for (std::size_t i = 0; i < rp_pl.rows(); ++i) {
        rps.origin_ids.push_back("sta" + std::to_string(i));
    }
    return rps;
}

namespace {

Point2 uniform_point(double side, Rng& rng)
{
    std::uniform_real_distribution<double> u(0.0, side);
    const double x = u(rng);
    const double y = u(rng);
    return {x, y};
}

std::vector<Point2> uniform_points(std::size_t n, double side, Rng& rng)
{
    std::vector<Point2> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        pts.push_back(uniform_point(side, rng));
    }
    return pts;
}

// Fills the instance and ground-truth matrix from positions.
void derive_pathlosses(SyntheticScenario& s, const std::vector<int>& levels,
                       const std::optional<std::vector<int>>& channels, std::uint64_t seed)
{
    const auto n_aps = s.ap_positions.size();
    if (channels && channels->size() != n_aps) {
        throw ValidationError("channel plan must name one channel per AP");
    }
    Rng shadow(derive_seed(seed, "shadowing"));
    Matrix ap_pl(n_aps, n_aps);
    for (std::size_t a = 0; a < n_aps; ++a) {
        for (std::size_t b = a + 1; b < n_aps; ++b) {
            const double pl = pathloss(distance(s.ap_positions[a], s.ap_positions[b]), s.pl_params, shadow);
            ap_pl(a, b) = pl;
            ap_pl(b, a) = pl;
        }
    }
    std::vector<AccessPoint> aps;
    for (std::size_t a = 0; a < n_aps; ++a) {
        aps.push_back({"ap" + std::to_string(a), levels, channels ? (*channels)[a] : 36});
    }
    s.instance = NetworkInstance(std::move(aps), std::move(ap_pl));

    s.rp_pl = Matrix(s.sta_positions.size(), n_aps);
    for (std::size_t i = 0; i < s.sta_positions.size(); ++i) {
        for (std::size_t a = 0; a < n_aps; ++a) {
            s.rp_pl(i, a) = pathloss(distance(s.sta_positions[i], s.ap_positions[a]), s.pl_params, shadow);
        }
    }
}

} // namespace

SyntheticScenario gen_uniform_scenario(const ScenarioParams& params)
{
    if (params.n_aps < 1 || params.n_stas < 1) {
        throw ValidationError("scenario needs at least one AP and one STA");
    }
    SyntheticScenario s;
    s.side_m = params.side_m;
    s.pl_params = params.pl_params;
    Rng ap_rng(derive_seed(params.seed, "aps"));
    Rng sta_rng(derive_seed(params.seed, "stas"));
    s.ap_positions = uniform_points(params.n_aps, params.side_m, ap_rng);
    s.sta_positions = uniform_points(params.n_stas, params.side_m, sta_rng);
    s.sta_hotspot.assign(params.n_stas, -1);
    derive_pathlosses(s, params.levels, params.channels, params.seed);
    return s;
}

SyntheticScenario gen_hotspot_scenario(const HotspotParams& params)
{
    if (params.clustered_fraction < 0.0 || params.clustered_fraction > 1.0) {
        throw ValidationError("clustered_fraction must lie in [0, 1]");
    }
    if (params.n_aps < 1 || params.n_stas < 1) {
        throw ValidationError("scenario needs at least one AP and one STA");
    }
    if (params.clustered_fraction > 0.0 && params.n_hotspots < 1) {
        throw ValidationError("clustered STAs need at least one hotspot");
    }
    SyntheticScenario s;
    s.side_m = params.side_m;
    s.pl_params = params.pl_params;
    Rng ap_rng(derive_seed(params.seed, "aps"));
    Rng sta_rng(derive_seed(params.seed, "stas"));
    Rng hotspot_rng(derive_seed(params.seed, "hotspots"));
    s.ap_positions = uniform_points(params.n_aps, params.side_m, ap_rng);
    s.hotspot_centers = uniform_points(params.n_hotspots, params.side_m, hotspot_rng);

    const auto n_clustered =
        static_cast<std::size_t>(std::llround(params.clustered_fraction * static_cast<double>(params.n_stas)));
    const auto n_uniform = params.n_stas - n_clustered;
    s.sta_positions = uniform_points(n_uniform, params.side_m, sta_rng);
    s.sta_hotspot.assign(n_uniform, -1);

    std::uniform_int_distribution<std::size_t> pick(0, params.n_hotspots == 0 ? 0 : params.n_hotspots - 1);
    std::normal_distribution<double> jitter(0.0, 1.0);
    for (std::size_t i = 0; i < n_clustered; ++i) {
        const auto h = pick(hotspot_rng);
        const auto& c = s.hotspot_centers[h];
        const double dx = params.cluster_sigma_m * jitter(hotspot_rng);
        const double dy = params.cluster_sigma_m * jitter(hotspot_rng);
        s.sta_positions.push_back({c.x + dx, c.y + dy});
        s.sta_hotspot.push_back(static_cast<int>(h));
    }
    derive_pathlosses(s, params.levels, std::nullopt, params.seed);
    return s;
}

std::vector<MeasurementRecord> obfuscate(const Matrix& ground_truth, const NetworkInstance& instance,
                                         std::size_t k_visible)
{
    const auto n_aps = ground_truth.cols();
    if (n_aps != instance.size()) {
        throw ValidationError("ground truth width does not match the AP count");
    }
    if (k_visible < 1 || k_visible > n_aps) {
        throw ValidationError("k_visible must lie in [1, |APs|]");
    }
    std::vector<MeasurementRecord> out;
    out.reserve(ground_truth.rows());
    std::vector<std::size_t> order(n_aps);
    for (std::size_t r = 0; r < ground_truth.rows(); ++r) {
        const auto row = ground_truth.row(r);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return row[a] < row[b]; });
        MeasurementRecord rec;
        rec.timestamp = static_cast<std::int64_t>(r);
        rec.sta_id = "sta" + std::to_string(r);
        rec.serving_ap = instance.ap(order[0]).id;
        for (std::size_t k = 0; k < k_visible; ++k) {
            rec.pl[instance.ap(order[k]).id] = row[order[k]];
        }
        out.push_back(std::move(rec));
    }
    return out;
}

} // namespace uatpc
