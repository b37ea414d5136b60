#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "uatpc/imputation.hpp"
#include "uatpc/io.hpp"
#include "uatpc/optimizer.hpp"
#include "uatpc/selection.hpp"
#include "uatpc/sim.hpp"
#include "uatpc/synth.hpp"
#include "uatpc/types.hpp"

namespace uatpc {

struct RunConfig {
    std::filesystem::path topology;
    std::filesystem::path measurements;
    MeasurementFormat format = MeasurementFormat::jsonl;
    std::filesystem::path output_dir = "out";

    // imputation
    std::optional<std::filesystem::path> model_path; // load instead of training
    std::size_t min_visible = 4;
    TrainOptions train{};

    // selection
    SelectionMethod selection = SelectionMethod::stratified;
    ProjectionMethod projection = ProjectionMethod::pca;
    std::optional<std::size_t> k;      // uniform
    std::optional<double> radius;      // stratified, embedding units
    double radius_quantile = 0.02;     // used when radius is unset
    TsneOptions tsne{};

    // optimization
    SearchOptions search{};
    int restarts = 1;
    double tpc_threshold_dbm = -70.0;
    UtilityParams utility{};

    std::uint64_t seed = 0;
};

std::string run_config_to_json(const RunConfig& config);

/// Fields absent from the JSON keep the values already in `base`.
RunConfig parse_run_config(const std::string& json_text, RunConfig base = {});

struct ManifestEntry {
    std::string file; // relative to the output directory
    std::string sha256;
    std::size_t bytes = 0;
};

struct RunManifest {
    std::uint64_t seed = 0;
    std::vector<std::string> stages;
    std::vector<ManifestEntry> files;
};

std::string sha256_hex(std::string_view content);

/// Line counts and per-line rejection reasons of one ingest.
std::string ingest_report_json(const ParseResult& parsed);

/// ingest -> imputation model -> impute -> select -> optimize -> evaluate.
/// Writes every artifact plus manifest.json into config.output_dir. A failing
/// stage raises StageError naming it.
RunManifest run_pipeline(const RunConfig& config);

std::string manifest_to_json(const RunManifest& manifest);

struct NamedConfig {
    std::string name;
    PowerConfig config;
};

struct ConfigComparison {
    std::string name;
    double utility = 0.0;
    double rssi_q1 = 0.0;
    double rssi_median = 0.0;
    double rssi_q3 = 0.0;
    double mean_power_dbm = 0.0;
    double interference_q1 = 0.0;
    double interference_median = 0.0;
    double interference_q3 = 0.0;
    double good_coverage = 0.0; // RSSI >= -65 dBm
    double bad_coverage = 0.0;  // RSSI < -80 dBm
};

inline constexpr double kGoodCoverageDbm = -65.0;
inline constexpr double kBadCoverageDbm = -80.0;

/// Scores every configuration on the same RP set and utility parameters.
std::vector<ConfigComparison> compare_configs(const ReferencePointSet& rps, const NetworkInstance& instance,
                                              const std::vector<NamedConfig>& configs,
                                              const UtilityParams& params = {});

std::string comparison_csv(const std::vector<ConfigComparison>& rows);

// --- studies ---------------------------------------------------------------

struct GapStudyParams {
    std::size_t n_instances = 32;
    std::size_t n_aps = 8;
    std::vector<int> levels = {8, 16, 24, 32};
    std::size_t n_rps = 30;
    double side_m = 60.0;
    PathLossParams pl_params{};
    std::vector<std::optional<int>> variants = {std::nullopt, 2}; // LS-nl, LS-l2
    double time_cap_s = 600.0;
    std::uint64_t seed = 0;
};

struct GapRow {
    std::size_t instance = 0;
    std::string variant;
    double ls_utility = 0.0;
    double optimal_utility = 0.0;
    double gap_pct = 0.0;
    std::size_t evaluations = 0;
    double seconds = 0.0;
};

struct GapSummary {
    std::string variant;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double seconds_median = 0.0;
};

struct GapStudyReport {
    std::vector<GapRow> rows;
    std::vector<GapSummary> summary;

    const GapSummary& at(const std::string& variant) const;
};

std::string variant_name(const std::optional<int>& trials);

GapStudyReport study_optimality_gap(const GapStudyParams& params);

struct SelectionStudyParams {
    HotspotParams hotspots{};
    double radius = 2.0;                    // stratified radius, metres
    std::optional<double> neighbor_radius;  // defaults to radius
    double isolated_quantile = 0.10;
    double dense_quantile = 0.90;
    std::uint64_t seed = 0;
};

struct SelectionStudyMethod {
    std::string method;
    std::size_t selected = 0;
    double isolated_fraction = 0.0; // neighbor count at or below the isolated threshold
    double dense_fraction = 0.0;    // neighbor count at or above the dense threshold
    double hotspot_fraction = 0.0;  // selected points that belong to a hotspot
};

struct SelectionStudyReport {
    double isolated_threshold = 0.0;
    double dense_threshold = 0.0;
    SelectionStudyMethod coverage_friendly;
    SelectionStudyMethod density_preserving;
    std::vector<std::size_t> neighbor_counts;
    SelectionResult stratified;
    SelectionResult uniform;
};

/// Coverage-friendly (radius pruning in the STA plane) versus
/// density-preserving (uniform, same count) selection on a hotspot layout.
SelectionStudyReport study_selection_hotspots(const SelectionStudyParams& params);

void write_gap_study(const std::filesystem::path& dir, const GapStudyReport& report);
void write_degradation_study(const std::filesystem::path& dir, const DegradationReport& report);
void write_selection_study(const std::filesystem::path& dir, const SelectionStudyReport& report);

} // namespace uatpc
