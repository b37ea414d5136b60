#include <algorithm>
#include <chrono>
#include <cmath>

#include "uatpc/errors.hpp"
#include "uatpc/pipeline.hpp"
#include "uatpc/random.hpp"

namespace uatpc {

std::string variant_name(const std::optional<int>& trials)
{
    return trials ? "LS-l" + std::to_string(*trials) : "LS-nl";
}

const GapSummary& GapStudyReport::at(const std::string& variant) const
{
    for (const auto& s : summary) {
        if (s.variant == variant) {
            return s;
        }
    }
    throw ValidationError("no gap summary for " + variant);
}

GapStudyReport study_optimality_gap(const GapStudyParams& params)
{
    if (std::pow(static_cast<double>(params.levels.size()), static_cast<double>(params.n_aps)) >
        kDefaultExhaustiveCap) {
        throw ValidationError("gap study instance exceeds the exhaustive-search cap");
    }

    GapStudyReport report;
    for (std::size_t i = 0; i < params.n_instances; ++i) {
        const auto seed = derive_seed(params.seed, static_cast<std::uint64_t>(i));
        ScenarioParams sp;
        sp.n_aps = params.n_aps;
        sp.n_stas = params.n_rps;
        sp.side_m = params.side_m;
        sp.levels = params.levels;
        sp.pl_params = params.pl_params;
        sp.seed = seed;
        const auto scenario = gen_uniform_scenario(sp);
        const auto rps = scenario.reference_points();
        const auto optimum = exhaustive_search(scenario.instance, rps);

        for (const auto& trials : params.variants) {
            SearchOptions opts;
            opts.trials = trials;
            opts.time_cap_s = params.time_cap_s;
            opts.seed = derive_seed(seed, "search");
            const auto start = std::chrono::steady_clock::now();
            const auto ls = local_search(scenario.instance, rps, opts);
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            report.rows.push_back({i, variant_name(trials), ls.best_utility, optimum.utility,
                                   optimality_gap(ls.best_utility, optimum.utility), ls.evaluations, secs});
        }
    }
    for (const auto& trials : params.variants) {
        const auto name = variant_name(trials);
        std::vector<double> gaps;
        std::vector<double> secs;
        for (const auto& r : report.rows) {
            if (r.variant == name) {
                gaps.push_back(r.gap_pct);
                secs.push_back(r.seconds);
            }
        }
        if (gaps.empty()) {
            continue;
        }
        report.summary.push_back(
            {name, quantile(gaps, 0.5), quantile(gaps, 0.25), quantile(gaps, 0.75), quantile(secs, 0.5)});
    }
    return report;
}

SelectionStudyReport study_selection_hotspots(const SelectionStudyParams& params)
{
    auto hp = params.hotspots;
    hp.seed = derive_seed(params.seed, "hotspots");
    // Only STA positions matter here; keep the AP side of the scenario small.
    hp.n_aps = std::max<std::size_t>(1, std::min<std::size_t>(hp.n_aps, 4));
    const auto scenario = gen_hotspot_scenario(hp);

    std::vector<std::array<double, 2>> xy;
    xy.reserve(scenario.sta_positions.size());
    for (const auto& p : scenario.sta_positions) {
        xy.push_back({p.x, p.y});
    }
    const auto emb = embed_positions(xy);

    SelectionStudyReport report;
    report.neighbor_counts = neighbor_counts(emb, params.neighbor_radius.value_or(params.radius));
    std::vector<double> counts(report.neighbor_counts.begin(), report.neighbor_counts.end());
    report.isolated_threshold = quantile(counts, params.isolated_quantile);
    report.dense_threshold = quantile(counts, params.dense_quantile);

    report.stratified = stratified_select(emb, params.radius, derive_seed(params.seed, "stratified"));
    report.uniform = uniform_select(emb.size(), report.stratified.selected_indices.size(),
                                    derive_seed(params.seed, "uniform"));

    auto describe = [&](const std::string& name, const SelectionResult& sel) {
        SelectionStudyMethod m;
        m.method = name;
        m.selected = sel.selected_indices.size();
        std::size_t isolated = 0;
        std::size_t dense = 0;
        std::size_t hotspot = 0;
        for (auto i : sel.selected_indices) {
            const double c = static_cast<double>(report.neighbor_counts[i]);
            isolated += c <= report.isolated_threshold ? 1 : 0;
            dense += c >= report.dense_threshold ? 1 : 0;
            hotspot += scenario.sta_hotspot[i] >= 0 ? 1 : 0;
        }
        const double n = std::max<double>(1.0, static_cast<double>(m.selected));
        m.isolated_fraction = static_cast<double>(isolated) / n;
        m.dense_fraction = static_cast<double>(dense) / n;
        m.hotspot_fraction = static_cast<double>(hotspot) / n;
        return m;
    };
    report.coverage_friendly = describe("coverage_friendly", report.stratified);
    report.density_preserving = describe("density_preserving", report.uniform);
    return report;
}

void write_gap_study(const std::filesystem::path& dir, const GapStudyReport& report)
{
    std::string rows = "instance,variant,ls_utility,optimal_utility,gap_pct,evaluations,seconds\n";
    for (const auto& r : report.rows) {
        rows += std::to_string(r.instance) + ',' + r.variant + ',' + format_double(r.ls_utility) + ',' +
                format_double(r.optimal_utility) + ',' + format_double(r.gap_pct) + ',' +
                std::to_string(r.evaluations) + ',' + format_double(r.seconds) + '\n';
    }
    write_file(dir / "gap_instances.csv", rows);
    std::string summary = "variant,gap_median,gap_q1,gap_q3,seconds_median\n";
    for (const auto& s : report.summary) {
        summary += s.variant + ',' + format_double(s.median) + ',' + format_double(s.q1) + ',' +
                   format_double(s.q3) + ',' + format_double(s.seconds_median) + '\n';
    }
    write_file(dir / "gap_summary.csv", summary);
}

void write_degradation_study(const std::filesystem::path& dir, const DegradationReport& report)
{
    std::string rows = "topology,visible,strategy,reference_utility,achieved_utility,loss_pct\n";
    for (const auto& r : report.rows) {
        rows += std::to_string(r.topology) + ',' + std::to_string(r.visible) + ',' + to_string(r.strategy) + ',' +
                format_double(r.reference_utility) + ',' + format_double(r.achieved_utility) + ',' +
                format_double(r.loss_pct) + '\n';
    }
    write_file(dir / "imputation_instances.csv", rows);
    std::string summary = "visible,strategy,loss_median,loss_q1,loss_q3\n";
    for (const auto& s : report.summary) {
        summary += std::to_string(s.visible) + ',' + to_string(s.strategy) + ',' + format_double(s.median) + ',' +
                   format_double(s.q1) + ',' + format_double(s.q3) + '\n';
    }
    write_file(dir / "imputation_summary.csv", summary);
}

void write_selection_study(const std::filesystem::path& dir, const SelectionStudyReport& report)
{
    std::string summary = "method,selected,isolated_fraction,dense_fraction,hotspot_fraction,isolated_threshold,"
                          "dense_threshold\n";
    for (const auto* m : {&report.coverage_friendly, &report.density_preserving}) {
        summary += m->method + ',' + std::to_string(m->selected) + ',' + format_double(m->isolated_fraction) + ',' +
                   format_double(m->dense_fraction) + ',' + format_double(m->hotspot_fraction) + ',' +
                   format_double(report.isolated_threshold) + ',' + format_double(report.dense_threshold) + '\n';
    }
    write_file(dir / "selection_summary.csv", summary);

    std::vector<unsigned char> in_strat(report.neighbor_counts.size(), 0);
    std::vector<unsigned char> in_unif(report.neighbor_counts.size(), 0);
    for (auto i : report.stratified.selected_indices) {
        in_strat[i] = 1;
    }
    for (auto i : report.uniform.selected_indices) {
        in_unif[i] = 1;
    }
    std::string points = "index,neighbor_count,coverage_friendly,density_preserving\n";
    for (std::size_t i = 0; i < report.neighbor_counts.size(); ++i) {
        points += std::to_string(i) + ',' + std::to_string(report.neighbor_counts[i]) + ',' +
                  std::to_string(in_strat[i]) + ',' + std::to_string(in_unif[i]) + '\n';
    }
    write_file(dir / "selection_points.csv", points);
}

} // namespace uatpc
