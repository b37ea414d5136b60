#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "uatpc/sim.hpp"
#include "uatpc/types.hpp"

namespace uatpc {

enum class Termination { local_optimum, time_cap };

std::string to_string(Termination t);

struct SearchOptions {
    std::optional<int> trials = 15; // per-AP candidate cap L; nullopt = all levels ("nl")
    double time_cap_s = 600.0;
    std::uint64_t seed = 0;
};

struct SearchReport {
    PowerConfig best_config;
    double best_utility = 0.0;
    std::size_t iterations = 0;
    std::vector<double> utility_trace; // initial utility, then best after each outer pass
    Termination terminated_by = Termination::local_optimum;
    std::size_t evaluations = 0;
    std::uint64_t seed = 0;

    bool operator==(const SearchReport&) const = default;
};

/// Coordinate-wise local search over per-AP power levels.
///
/// Starts from a seeded random configuration. Every outer pass finds, for
/// each AP in turn, the best of up to L candidate levels with the other APs
/// held at the incumbent; the candidates always include the AP's current
/// level, and the others are levels not yet tried against this incumbent.
/// The best single-AP move is then compared with the vector combining every
/// AP's best level and the higher one is taken (the single move wins ties).
/// Stops at a local optimum, i.e. once every level of every AP has been tried
/// against the incumbent without strict improvement, or when the time cap
/// expires.
SearchReport local_search(const NetworkInstance& instance, const ReferencePointSet& rps,
                          const SearchOptions& options = {}, const UtilityParams& params = {});

SearchReport local_search(const NetworkInstance& instance, const UtilityEvaluator& utility,
                          const SearchOptions& options);

/// Independent runs with seeds derived from options.seed; the best is kept
/// (earliest restart on ties). Evaluations are summed over runs.
SearchReport local_search_restarts(const NetworkInstance& instance, const ReferencePointSet& rps, int restarts,
                                   const SearchOptions& options = {}, const UtilityParams& params = {});

struct ExhaustiveResult {
    PowerConfig config;
    double utility = 0.0;
    std::size_t evaluations = 0;
};

inline constexpr double kDefaultExhaustiveCap = 1e7;

/// Enumerates every feasible configuration in lexicographic order and keeps
/// the first maximum. Throws ValidationError when the space exceeds `cap`.
ExhaustiveResult exhaustive_search(const NetworkInstance& instance, const ReferencePointSet& rps,
                                   const UtilityParams& params = {}, double cap = kDefaultExhaustiveCap);

double search_space_size(const NetworkInstance& instance);

PowerConfig full_power(const NetworkInstance& instance);

/// Offline neighbor-threshold heuristic: each AP targets `tpc_threshold_dbm`
/// at its third-closest neighbor (by AP-AP path loss), snapped to the nearest
/// allowed level with ties to the lower level. Instances with fewer than 4
/// APs fall back to full power.
PowerConfig tpcv1_offline(const NetworkInstance& instance, double tpc_threshold_dbm = -70.0);

/// Nearest allowed level to `target_dbm`, clamped to the allowed range.
int snap_to_allowed(const std::vector<int>& allowed, double target_dbm);

/// Percent shortfall of exp(u) relative to exp(u_ref). Negative when u > u_ref.
double optimality_gap(double u, double u_ref);

std::string search_report_to_json(const NetworkInstance& instance, const SearchReport& report);

} // namespace uatpc
