#include <cmath>
#include <map>
#include <memory>

#include "uatpc/imputation.hpp"
#include "uatpc/random.hpp"
#include "uatpc/sim.hpp"

namespace uatpc {

std::string to_string(ImputeStrategy s)
{
    switch (s) {
    case ImputeStrategy::high:
        return "high";
    case ImputeStrategy::median:
        return "median";
    case ImputeStrategy::oracle_5db:
        return "oracle5db";
    }
    return "unknown";
}

double relative_utility_loss(double achieved, double reference)
{
    return -100.0 * std::expm1(achieved - reference);
}

const DegradationSummary& DegradationReport::at(std::size_t visible, ImputeStrategy strategy) const
{
    for (const auto& s : summary) {
        if (s.visible == visible && s.strategy == strategy) {
            return s;
        }
    }
    throw ValidationError("no summary for visible=" + std::to_string(visible) + " strategy=" + to_string(strategy));
}

DegradationReport utility_degradation_study(const DegradationParams& params)
{
    for (auto k : params.visible_counts) {
        if (k < 1 || k > params.n_aps) {
            throw ValidationError("visible counts must lie in [1, n_aps]");
        }
    }
    DegradationReport report;
    for (std::size_t t = 0; t < params.n_topologies; ++t) {
        const auto topo_seed = derive_seed(params.seed, static_cast<std::uint64_t>(t));
        ScenarioParams sp;
        sp.n_aps = params.n_aps;
        sp.n_stas = params.n_rps;
        sp.side_m = params.side_m;
        sp.levels = params.levels;
        sp.pl_params = params.pl_params;
        sp.seed = topo_seed;
        const auto scenario = gen_uniform_scenario(sp);
        const auto truth = scenario.reference_points();
        const UtilityEvaluator score(scenario.instance, truth);

        auto search = params.search;
        search.seed = derive_seed(topo_seed, "search");
        const auto reference = local_search_restarts(scenario.instance, truth, params.restarts, search);

        for (auto k : params.visible_counts) {
            const auto records = obfuscate(scenario.rp_pl, scenario.instance, k);
            const auto partial = to_partial_matrix(records, scenario.instance.ids());
            for (auto strategy : params.strategies) {
                std::unique_ptr<Imputer> imputer;
                switch (strategy) {
                case ImputeStrategy::high:
                    imputer = std::make_unique<HighImputer>();
                    break;
                case ImputeStrategy::median:
                    imputer = std::make_unique<MedianImputer>(MedianImputer::fit(partial));
                    break;
                case ImputeStrategy::oracle_5db:
                    imputer = std::make_unique<NoisyOracleImputer>(
                        scenario.rp_pl, params.oracle_mae_db,
                        derive_seed(topo_seed, static_cast<std::uint64_t>(1000 + k)));
                    break;
                }
                ReferencePointSet completed;
                completed.rp_pl = imputer->complete_all(partial);
                completed.origin_ids = truth.origin_ids;
                const auto plan = local_search_restarts(scenario.instance, completed, params.restarts, search);

                DegradationRow row;
                row.topology = t;
                row.visible = k;
                row.strategy = strategy;
                row.reference_utility = reference.best_utility;
                row.achieved_utility = score(plan.best_config);
                row.loss_pct = relative_utility_loss(row.achieved_utility, row.reference_utility);
                report.rows.push_back(row);
            }
        }
    }

    for (auto k : params.visible_counts) {
        for (auto strategy : params.strategies) {
            std::vector<double> losses;
            for (const auto& row : report.rows) {
                if (row.visible == k && row.strategy == strategy) {
                    losses.push_back(row.loss_pct);
                }
            }
            if (losses.empty()) {
                continue;
            }
            report.summary.push_back(
                {k, strategy, quantile(losses, 0.5), quantile(losses, 0.25), quantile(losses, 0.75)});
        }
    }
    return report;
}

} // namespace uatpc
