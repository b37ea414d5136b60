#include "uatpc/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>

#include <json.hpp>

#include "uatpc/errors.hpp"
#include "uatpc/random.hpp"

namespace uatpc {

std::string to_string(Termination t)
{
    return t == Termination::local_optimum ? "local_optimum" : "time_cap";
}

namespace {

PowerConfig random_config(const NetworkInstance& instance, Rng& rng)
{
    PowerConfig config;
    config.levels.reserve(instance.size());
    for (const auto& ap : instance.aps()) {
        std::uniform_int_distribution<std::size_t> pick(0, ap.allowed_levels.size() - 1);
        config.levels.push_back(ap.allowed_levels[pick(rng)]);
    }
    return config;
}

// Incumbent first, then up to limit-1 levels not yet tried against the
// current incumbent, drawn without replacement.
std::vector<int> candidate_levels(int incumbent, std::vector<int>& untried, const std::optional<int>& limit, Rng& rng)
{
    std::size_t take = untried.size();
    if (limit) {
        take = std::min(take, static_cast<std::size_t>(*limit - 1));
        for (std::size_t i = 0; i < take; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, untried.size() - 1);
            std::swap(untried[i], untried[pick(rng)]);
        }
    }
    std::vector<int> out;
    out.reserve(take + 1);
    out.push_back(incumbent);
    out.insert(out.end(), untried.begin(), untried.begin() + static_cast<std::ptrdiff_t>(take));
    untried.erase(untried.begin(), untried.begin() + static_cast<std::ptrdiff_t>(take));
    return out;
}

std::vector<int> other_levels(const AccessPoint& ap, int incumbent)
{
    std::vector<int> out;
    for (int level : ap.allowed_levels) {
        if (level != incumbent) {
            out.push_back(level);
        }
    }
    return out;
}

} // namespace

SearchReport local_search(const NetworkInstance& instance, const UtilityEvaluator& utility,
                          const SearchOptions& options)
{
    if (options.trials && *options.trials < 1) {
        throw ValidationError("per-AP trial cap must be at least 1");
    }
    if (utility.n_aps() != instance.size()) {
        throw ValidationError("evaluator and instance disagree on the AP count");
    }
    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();
    const auto deadline_reached = [&] {
        return std::chrono::duration<double>(Clock::now() - start).count() >= options.time_cap_s;
    };

    const auto evals_before = utility.evaluations();
    Rng rng(options.seed);
    const std::size_t n = instance.size();

    SearchReport report;
    report.seed = options.seed;
    report.best_config = random_config(instance, rng);
    report.best_utility = utility(report.best_config);
    report.utility_trace.push_back(report.best_utility);

    std::vector<int> per_ap_best(n);
    std::vector<double> per_ap_utility(n);
    // Levels of each AP not yet evaluated against the current incumbent.
    std::vector<std::vector<int>> untried(n);
    const auto reset_untried = [&] {
        for (std::size_t a = 0; a < n; ++a) {
            untried[a] = other_levels(instance.ap(a), report.best_config.levels[a]);
        }
    };
    reset_untried();
    PowerConfig trial;
    bool timed_out = false;

    while (true) {
        auto& incumbent = report.best_config;
        const double current = report.best_utility;
        for (std::size_t a = 0; a < n && !timed_out; ++a) {
            auto candidates = candidate_levels(incumbent.levels[a], untried[a], options.trials, rng);
            per_ap_best[a] = incumbent.levels[a];
            per_ap_utility[a] = current;
            trial = incumbent;
            for (std::size_t c = 1; c < candidates.size(); ++c) {
                if (deadline_reached()) {
                    timed_out = true;
                    break;
                }
                trial.levels[a] = candidates[c];
                const double u = utility(trial);
                if (u > per_ap_utility[a]) {
                    per_ap_utility[a] = u;
                    per_ap_best[a] = candidates[c];
                }
            }
        }
        if (timed_out) {
            break;
        }
        ++report.iterations;

        // Best single-AP move.
        std::size_t best_ap = 0;
        for (std::size_t a = 1; a < n; ++a) {
            if (per_ap_utility[a] > per_ap_utility[best_ap]) {
                best_ap = a;
            }
        }
        PowerConfig next = incumbent;
        next.levels[best_ap] = per_ap_best[best_ap];
        double next_utility = per_ap_utility[best_ap];

        // Combined per-AP best vector.
        PowerConfig combined{per_ap_best};
        if (combined != next && combined != incumbent) {
            const double u = utility(combined);
            if (u > next_utility) {
                next = std::move(combined);
                next_utility = u;
            }
        }

        if (next_utility > current) {
            report.best_config = std::move(next);
            report.best_utility = next_utility;
            reset_untried();
        }
        report.utility_trace.push_back(report.best_utility);
        const bool exhausted = std::all_of(untried.begin(), untried.end(), [](const auto& u) { return u.empty(); });
        if (next_utility <= current && exhausted) {
            break; // every single-AP move has been tried: local optimum
        }
        if (deadline_reached()) {
            timed_out = true;
            break;
        }
    }

    report.terminated_by = timed_out ? Termination::time_cap : Termination::local_optimum;
    report.evaluations = utility.evaluations() - evals_before;
    return report;
}

SearchReport local_search(const NetworkInstance& instance, const ReferencePointSet& rps,
                          const SearchOptions& options, const UtilityParams& params)
{
    if (rps.size() == 0) {
        throw ValidationError("local search needs at least one reference point");
    }
    UtilityEvaluator utility(instance, rps, params);
    return local_search(instance, utility, options);
}

SearchReport local_search_restarts(const NetworkInstance& instance, const ReferencePointSet& rps, int restarts,
                                   const SearchOptions& options, const UtilityParams& params)
{
    if (restarts < 1) {
        throw ValidationError("restarts must be at least 1");
    }
    if (rps.size() == 0) {
        throw ValidationError("local search needs at least one reference point");
    }
    UtilityEvaluator utility(instance, rps, params);
    SearchReport best;
    std::size_t total_evals = 0;
    for (int i = 0; i < restarts; ++i) {
        auto opts = options;
        opts.seed = restarts == 1 ? options.seed : derive_seed(options.seed, static_cast<std::uint64_t>(i));
        auto report = local_search(instance, utility, opts);
        total_evals += report.evaluations;
        if (i == 0 || report.best_utility > best.best_utility) {
            best = std::move(report);
        }
    }
    best.evaluations = total_evals;
    return best;
}

double search_space_size(const NetworkInstance& instance)
{
    double size = 1.0;
    for (const auto& ap : instance.aps()) {
        size *= static_cast<double>(ap.allowed_levels.size());
    }
    return size;
}

ExhaustiveResult exhaustive_search(const NetworkInstance& instance, const ReferencePointSet& rps,
                                   const UtilityParams& params, double cap)
{
    if (instance.size() == 0) {
        throw ValidationError("exhaustive search needs at least one AP");
    }
    const double space = search_space_size(instance);
    if (space > cap) {
        throw ValidationError("search space of " + std::to_string(space) + " configurations exceeds cap " +
                              std::to_string(cap));
    }
    UtilityEvaluator utility(instance, rps, params);
    const std::size_t n = instance.size();
    std::vector<std::size_t> digits(n, 0);
    PowerConfig config;
    for (const auto& ap : instance.aps()) {
        config.levels.push_back(ap.allowed_levels.front());
    }

    ExhaustiveResult best;
    bool first = true;
    while (true) {
        const double u = utility(config);
        if (first || u > best.utility) {
            best.config = config;
            best.utility = u;
            first = false;
        }
        // Odometer: last AP varies fastest, giving lexicographic order.
        std::size_t pos = n;
        while (pos > 0) {
            --pos;
            const auto& allowed = instance.ap(pos).allowed_levels;
            if (++digits[pos] < allowed.size()) {
                config.levels[pos] = allowed[digits[pos]];
                break;
            }
            digits[pos] = 0;
            config.levels[pos] = allowed.front();
            if (pos == 0) {
                best.evaluations = utility.evaluations();
                return best;
            }
        }
    }
}

PowerConfig full_power(const NetworkInstance& instance)
{
    PowerConfig config;
    for (const auto& ap : instance.aps()) {
        config.levels.push_back(ap.max_level());
    }
    return config;
}

int snap_to_allowed(const std::vector<int>& allowed, double target_dbm)
{
    if (target_dbm <= allowed.front()) {
        return allowed.front();
    }
    if (target_dbm >= allowed.back()) {
        return allowed.back();
    }
    auto upper = std::lower_bound(allowed.begin(), allowed.end(), target_dbm,
                                  [](int level, double t) { return level < t; });
    if (*upper == target_dbm) {
        return *upper;
    }
    const int hi = *upper;
    const int lo = *std::prev(upper);
    return (hi - target_dbm) < (target_dbm - lo) ? hi : lo;
}

PowerConfig tpcv1_offline(const NetworkInstance& instance, double tpc_threshold_dbm)
{
    if (instance.size() < 4) {
        std::clog << "warning: TPCv1 needs a third neighbor; using maximum level for " << instance.size()
                  << " AP(s)\n";
        return full_power(instance);
    }
    PowerConfig config;
    for (std::size_t a = 0; a < instance.size(); ++a) {
        std::vector<double> neighbors;
        for (std::size_t b = 0; b < instance.size(); ++b) {
            if (b != a) {
                neighbors.push_back(instance.ap_pl()(a, b));
            }
        }
        std::nth_element(neighbors.begin(), neighbors.begin() + 2, neighbors.end());
        const double third = neighbors[2];
        config.levels.push_back(snap_to_allowed(instance.ap(a).allowed_levels, tpc_threshold_dbm + third));
    }
    return config;
}

double optimality_gap(double u, double u_ref)
{
    return -100.0 * std::expm1(u - u_ref);
}

std::string search_report_to_json(const NetworkInstance& instance, const SearchReport& report)
{
    nlohmann::json levels = nlohmann::json::object();
    for (std::size_t a = 0; a < instance.size(); ++a) {
        levels[instance.ap(a).id] = report.best_config.levels[a];
    }
    nlohmann::json j{
        {"best_config", {{"levels_dbm", levels}}},
        {"best_utility", report.best_utility},
        {"iterations", report.iterations},
        {"utility_trace", report.utility_trace},
        {"terminated_by", to_string(report.terminated_by)},
        {"evaluations", report.evaluations},
        {"seed", report.seed},
    };
    return j.dump(2);
}

} // namespace uatpc
