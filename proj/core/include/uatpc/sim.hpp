#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "uatpc/types.hpp"

namespace uatpc {

struct RpUtility {
    std::size_t serving = 0;
    double rssi_dbm = 0.0;
    double sig_mw = 0.0;
    double load = 0.0;
    double interference = 0.0;
    double utility = 0.0;
};

struct UtilityBreakdown {
    std::vector<RpUtility> per_rp;
    double total = 0.0; // sum of log(utility)
};

constexpr double received_signal(double power_dbm, double pl_db) noexcept { return power_dbm - pl_db; }

/// Strongest-signal association; ties go to the lowest AP index.
std::size_t associate(std::span<const double> rp_row, const PowerConfig& config);

/// Fraction of RPs associated to each AP (uniform per-RP load).
std::vector<double> ap_loads(const ReferencePointSet& rps, const PowerConfig& config);

/// Load-weighted count of contending APs heard at or above the carrier-sense
/// threshold. The serving AP is excluded; its load enters through lambda.
double interference_at(std::span<const double> rp_row, const PowerConfig& config, const NetworkInstance& instance,
                       std::span<const double> loads, const UtilityParams& params);

/// SIG / max(lambda + I, epsilon) with SIG in linear mW.
double utility_ref(std::span<const double> rp_row, const PowerConfig& config, const NetworkInstance& instance,
                   std::span<const double> loads, const UtilityParams& params);

UtilityBreakdown network_utility(const ReferencePointSet& rps, const PowerConfig& config,
                                 const NetworkInstance& instance, const UtilityParams& params = {});

/// `rp_index,serving,rssi_dbm,load,interference,utility`
std::string breakdown_csv(const UtilityBreakdown& breakdown, const NetworkInstance& instance);

/// Allocation-free evaluator of the network utility for repeated calls with
/// the same RP set. Produces the same total as network_utility().
class UtilityEvaluator {
public:
    UtilityEvaluator(const NetworkInstance& instance, const ReferencePointSet& rps, UtilityParams params = {});

    double operator()(std::span<const int> levels) const;
    double operator()(const PowerConfig& config) const { return (*this)(config.levels); }

    std::size_t evaluations() const noexcept { return evaluations_; }
    std::size_t n_aps() const noexcept { return n_aps_; }
    std::size_t n_rps() const noexcept { return n_rps_; }

private:
    std::size_t n_aps_;
    std::size_t n_rps_;
    std::vector<double> pl_;            // RP-major
    std::vector<unsigned char> overlap_; // AP x AP
    UtilityParams params_;
    mutable std::vector<double> rssi_;
    mutable std::vector<std::size_t> serving_;
    mutable std::vector<double> loads_;
    mutable std::size_t evaluations_ = 0;
};

struct PearsonResult {
    double r = 0.0;
    double p_value = 1.0;
};

/// Product-moment correlation with a two-sided t-test p-value.
PearsonResult pearson_r(std::span<const double> xs, std::span<const double> ys);

} // namespace uatpc
