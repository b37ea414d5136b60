#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <set>
#include <json.hpp>

#include "uatpc/io.hpp"
#include "uatpc/pipeline.hpp"

using namespace uatpc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / ("uatpc_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

RunConfig synthetic_run(const fs::path& dir)
{
    ScenarioParams p;
    p.n_aps = 10;
    p.n_stas = 300;
    p.seed = 3;
    const auto sc = gen_uniform_scenario(p);
    save_instance(dir / "topology.json", sc.instance);
    write_measurements_jsonl(dir / "measurements.jsonl", obfuscate(sc.rp_pl, sc.instance, 6));

    RunConfig c;
    c.topology = dir / "topology.json";
    c.measurements = dir / "measurements.jsonl";
    c.output_dir = dir / "out";
    c.train.hidden = {32, 16};
    c.train.epochs = 30;
    c.search.trials = 3;
    c.seed = 11;
    return c;
}

} // namespace

TEST(Pipeline, ManifestListsHashedArtifactsAndIsReproducible)
{
    const auto dir = scratch("pipeline");
    auto cfg = synthetic_run(dir);
    const auto first = run_pipeline(cfg);

    const std::vector<std::string> expected{"config.json",          "ingest_report.json",
                                            "imputation_model.json", "selection.json",
                                            "reference_points.csv", "search_report.json",
                                            "power_config_ua.json", "power_config_fullpower.json",
                                            "power_config_tpcv1.json", "comparison.csv"};
    std::set<std::string> listed;
    for (const auto& f : first.files) {
        listed.insert(f.file);
        const auto content = read_file(cfg.output_dir / f.file);
        EXPECT_EQ(sha256_hex(content), f.sha256) << f.file;
        EXPECT_EQ(content.size(), f.bytes);
    }
    for (const auto& name : expected) {
        EXPECT_TRUE(listed.count(name)) << name;
    }
    EXPECT_TRUE(fs::exists(cfg.output_dir / "manifest.json"));

    cfg.output_dir = dir / "out2";
    const auto second = run_pipeline(cfg);
    ASSERT_EQ(first.files.size(), second.files.size());
    for (std::size_t i = 0; i < first.files.size(); ++i) {
        if (first.files[i].file == "config.json") {
            continue; // records the output directory
        }
        EXPECT_EQ(first.files[i].sha256, second.files[i].sha256) << first.files[i].file;
    }
}

TEST(Pipeline, MissingTopologyNamesIngestStage)
{
    const auto dir = scratch("missing");
    RunConfig c;
    c.topology = dir / "nope.json";
    c.measurements = dir / "m.jsonl";
    c.output_dir = dir / "out";
    try {
        run_pipeline(c);
        FAIL() << "expected StageError";
    } catch (const StageError& e) {
        EXPECT_EQ(e.stage(), "ingest");
        EXPECT_NE(std::string(e.what()).find("nope.json"), std::string::npos);
    }
}

TEST(Pipeline, IngestReportAccounting)
{
    ParseResult r;
    r.lines_read = 3;
    r.lines_accepted = 2;
    r.rejects.push_back({2, "bad json"});
    const auto j = nlohmann::json::parse(ingest_report_json(r));
    EXPECT_EQ(j.at("lines_read"), 3);
    EXPECT_EQ(j.at("lines_accepted"), 2);
    EXPECT_EQ(j.at("rejects").size(), 1u);
}

TEST(Compare, OrdersConfigurations)
{
    ScenarioParams p;
    p.n_aps = 12;
    p.n_stas = 200;
    p.seed = 9;
    const auto sc = gen_uniform_scenario(p);
    const auto rps = sc.reference_points();
    const auto ua = local_search(sc.instance, rps, {}).best_config;
    PowerConfig lowest;
    for (const auto& ap : sc.instance.aps()) {
        lowest.levels.push_back(ap.min_level());
    }
    const auto rows = compare_configs(rps, sc.instance,
                                      {{"ua", ua},
                                       {"fullpower", full_power(sc.instance)},
                                       {"tpcv1", tpcv1_offline(sc.instance)},
                                       {"min", lowest}});
    ASSERT_EQ(rows.size(), 4u);
    for (const auto& r : rows) {
        EXPECT_LE(r.mean_power_dbm, rows[1].mean_power_dbm);
        EXPECT_GE(r.good_coverage + r.bad_coverage, 0.0);
        EXPECT_LE(r.good_coverage + r.bad_coverage, 1.0);
        EXPECT_LE(r.rssi_q1, r.rssi_median);
        EXPECT_LE(r.rssi_median, r.rssi_q3);
    }
    EXPECT_GE(rows[0].utility, rows[2].utility);
    EXPECT_GE(rows[0].utility, rows[3].utility);
    const auto csv = comparison_csv(rows);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
}

TEST(RunConfigJson, RoundTripAndPartialOverride)
{
    RunConfig c;
    c.topology = "t.json";
    c.measurements = "m.csv";
    c.format = MeasurementFormat::csv;
    c.radius = 1.5;
    c.search.trials = 4;
    c.restarts = 3;
    c.seed = 77;
    const auto back = parse_run_config(run_config_to_json(c));
    EXPECT_EQ(back.topology, c.topology);
    EXPECT_EQ(back.format, MeasurementFormat::csv);
    EXPECT_EQ(back.radius, c.radius);
    EXPECT_EQ(back.search.trials, c.search.trials);
    EXPECT_EQ(back.restarts, 3);
    EXPECT_EQ(back.seed, 77u);

    const auto partial = parse_run_config(R"({"seed": 5})", c);
    EXPECT_EQ(partial.seed, 5u);
    EXPECT_EQ(partial.restarts, 3);
    EXPECT_THROW(parse_run_config("[1,2"), ValidationError);
}

TEST(Studies, GapStudyShape)
{
    GapStudyParams p;
    p.n_instances = 3;
    p.n_aps = 4;
    p.levels = {8, 20, 32};
    p.n_rps = 10;
    const auto r = study_optimality_gap(p);
    EXPECT_EQ(r.rows.size(), 6u);
    for (const auto& row : r.rows) {
        EXPECT_GE(row.gap_pct, -1e-9);
        EXPECT_LE(row.ls_utility, row.optimal_utility + 1e-9);
    }
    EXPECT_NO_THROW(r.at("LS-nl"));
    const auto dir = scratch("gap");
    write_gap_study(dir, r);
    const auto csv = read_file(dir / "gap_instances.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
}

TEST(Studies, FullVisibilityHasNoLoss)
{
    DegradationParams p;
    p.n_topologies = 1;
    p.n_aps = 6;
    p.n_rps = 40;
    p.visible_counts = {6};
    const auto r = utility_degradation_study(p);
    for (const auto& row : r.rows) {
        EXPECT_NEAR(row.loss_pct, 0.0, 1e-9);
    }
}

TEST(Studies, SelectionStudy)
{
    SelectionStudyParams p;
    p.hotspots.n_aps = 2;
    p.hotspots.n_stas = 2000;
    p.seed = 1;
    const auto r = study_selection_hotspots(p);
    EXPECT_EQ(r.coverage_friendly.selected, r.density_preserving.selected);
    EXPECT_GT(r.coverage_friendly.isolated_fraction, r.density_preserving.isolated_fraction);
    EXPECT_NEAR(r.density_preserving.hotspot_fraction, 0.9, 0.1);
}
