#include "uatpc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "uatpc/errors.hpp"
#include "uatpc/io.hpp"

namespace uatpc {

std::size_t associate(std::span<const double> rp_row, const PowerConfig& config)
{
    if (rp_row.empty()) {
        throw ValidationError("cannot associate with an empty AP set");
    }
    std::size_t best = 0;
    double best_rssi = received_signal(config.levels[0], rp_row[0]);
    for (std::size_t a = 1; a < rp_row.size(); ++a) {
        const double rssi = received_signal(config.levels[a], rp_row[a]);
        if (rssi > best_rssi) {
            best_rssi = rssi;
            best = a;
        }
    }
    return best;
}

std::vector<double> ap_loads(const ReferencePointSet& rps, const PowerConfig& config)
{
    if (rps.size() == 0) {
        throw ValidationError("load requires at least one reference point");
    }
    std::vector<std::size_t> counts(rps.rp_pl.cols(), 0);
    for (std::size_t r = 0; r < rps.size(); ++r) {
        ++counts[associate(rps.rp_pl.row(r), config)];
    }
    std::vector<double> loads(counts.size());
    const double n = static_cast<double>(rps.size());
    std::transform(counts.begin(), counts.end(), loads.begin(), [n](std::size_t c) { return c / n; });
    return loads;
}

double interference_at(std::span<const double> rp_row, const PowerConfig& config, const NetworkInstance& instance,
                       std::span<const double> loads, const UtilityParams& params)
{
    const auto serving = associate(rp_row, config);
    double interference = 0.0;
    for (std::size_t a = 0; a < rp_row.size(); ++a) {
        if (a == serving || !instance.overlaps(a, serving)) {
            continue;
        }
        if (received_signal(config.levels[a], rp_row[a]) >= params.cs_threshold_dbm) {
            interference += loads[a];
        }
    }
    return interference;
}

double utility_ref(std::span<const double> rp_row, const PowerConfig& config, const NetworkInstance& instance,
                   std::span<const double> loads, const UtilityParams& params)
{
    const auto serving = associate(rp_row, config);
    const double rssi = received_signal(config.levels[serving], rp_row[serving]);
    const double sig = std::pow(10.0, rssi / 10.0);
    const double interference = interference_at(rp_row, config, instance, loads, params);
    return sig / std::max(loads[serving] + interference, params.epsilon);
}

UtilityBreakdown network_utility(const ReferencePointSet& rps, const PowerConfig& config,
                                 const NetworkInstance& instance, const UtilityParams& params)
{
    if (params.epsilon <= 0.0) {
        throw ValidationError("epsilon must be positive");
    }
    rps.validate(instance.size());
    check_feasible(instance, config);

    const auto loads = ap_loads(rps, config);
    UtilityBreakdown out;
    out.per_rp.reserve(rps.size());
    for (std::size_t r = 0; r < rps.size(); ++r) {
        const auto row = rps.rp_pl.row(r);
        RpUtility u;
        u.serving = associate(row, config);
        u.rssi_dbm = received_signal(config.levels[u.serving], row[u.serving]);
        u.sig_mw = std::pow(10.0, u.rssi_dbm / 10.0);
        u.load = loads[u.serving];
        u.interference = interference_at(row, config, instance, loads, params);
        u.utility = utility_ref(row, config, instance, loads, params);
        out.total += std::log(u.utility);
        out.per_rp.push_back(u);
    }
    return out;
}

std::string breakdown_csv(const UtilityBreakdown& breakdown, const NetworkInstance& instance)
{
    std::string out = "rp_index,serving,rssi_dbm,load,interference,utility\n";
    for (std::size_t r = 0; r < breakdown.per_rp.size(); ++r) {
        const auto& u = breakdown.per_rp[r];
        out += std::to_string(r) + ',' + instance.ap(u.serving).id + ',' + format_double(u.rssi_dbm) + ',' +
               format_double(u.load) + ',' + format_double(u.interference) + ',' + format_double(u.utility) + '\n';
    }
    return out;
}

UtilityEvaluator::UtilityEvaluator(const NetworkInstance& instance, const ReferencePointSet& rps,
                                   UtilityParams params)
    : n_aps_(instance.size()), n_rps_(rps.size()), params_(params)
{
    if (n_rps_ == 0) {
        throw ValidationError("utility needs at least one reference point");
    }
    if (params_.epsilon <= 0.0) {
        throw ValidationError("epsilon must be positive");
    }
    rps.validate(n_aps_);
    pl_.assign(rps.rp_pl.data().begin(), rps.rp_pl.data().end());
    overlap_.resize(n_aps_ * n_aps_);
    for (std::size_t a = 0; a < n_aps_; ++a) {
        for (std::size_t b = 0; b < n_aps_; ++b) {
            overlap_[a * n_aps_ + b] = instance.overlaps(a, b) ? 1 : 0;
        }
    }
    rssi_.resize(pl_.size());
    serving_.resize(n_rps_);
    loads_.resize(n_aps_);
}

double UtilityEvaluator::operator()(std::span<const int> levels) const
{
    ++evaluations_;
    std::fill(loads_.begin(), loads_.end(), 0.0);
    for (std::size_t r = 0; r < n_rps_; ++r) {
        const double* pl = pl_.data() + r * n_aps_;
        double* rssi = rssi_.data() + r * n_aps_;
        std::size_t best = 0;
        for (std::size_t a = 0; a < n_aps_; ++a) {
            rssi[a] = received_signal(levels[a], pl[a]);
            if (rssi[a] > rssi[best]) {
                best = a;
            }
        }
        serving_[r] = best;
        loads_[best] += 1.0;
    }
    const double n = static_cast<double>(n_rps_);
    for (auto& l : loads_) {
        l /= n;
    }

    double total = 0.0;
    for (std::size_t r = 0; r < n_rps_; ++r) {
        const double* rssi = rssi_.data() + r * n_aps_;
        const std::size_t s = serving_[r];
        const unsigned char* ov = overlap_.data() + s * n_aps_;
        double interference = 0.0;
        for (std::size_t a = 0; a < n_aps_; ++a) {
            if (a != s && ov[a] && rssi[a] >= params_.cs_threshold_dbm) {
                interference += loads_[a];
            }
        }
        const double sig = std::pow(10.0, rssi[s] / 10.0);
        total += std::log(sig / std::max(loads_[s] + interference, params_.epsilon));
    }
    return total;
}

PearsonResult pearson_r(std::span<const double> xs, std::span<const double> ys)
{
    if (xs.size() != ys.size()) {
        throw ValidationError("pearson_r needs equal-length series");
    }
    if (xs.size() < 3) {
        throw ValidationError("pearson_r needs at least 3 samples");
    }
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0.0;
    double syy = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw ValidationError("correlation undefined for a constant series");
    }
    PearsonResult out;
    out.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    const double dof = n - 2.0;
    const double denom = 1.0 - out.r * out.r;
    if (denom <= 0.0) {
        out.p_value = 0.0;
        return out;
    }
    const double t = out.r * std::sqrt(dof / denom);
    boost::math::students_t dist(dof);
    out.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
    return out;
}

} // namespace uatpc
