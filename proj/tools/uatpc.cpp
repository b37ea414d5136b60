// uatpc: command-line front end for the user-aware power-control toolkit.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "uatpc/errors.hpp"
#include "uatpc/imputation.hpp"
#include "uatpc/io.hpp"
#include "uatpc/optimizer.hpp"
#include "uatpc/pipeline.hpp"
#include "uatpc/random.hpp"
#include "uatpc/selection.hpp"
#include "uatpc/sim.hpp"
#include "uatpc/synth.hpp"

namespace fs = std::filesystem;
using namespace uatpc;

namespace {

// --config is read before CLI11 parses so that explicit flags override it.
RunConfig preload_config(int argc, char** argv)
{
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            return parse_run_config(read_file(argv[i + 1]));
        }
    }
    return {};
}

std::optional<int> parse_trials(const std::string& s)
{
    if (s == "nl") {
        return std::nullopt;
    }
    try {
        const int t = std::stoi(s);
        if (t < 1) {
            throw ValidationError("--trials must be 'nl' or a positive integer");
        }
        return t;
    } catch (const std::logic_error&) {
        throw ValidationError("--trials must be 'nl' or a positive integer, got '" + s + "'");
    }
}

std::string trials_text(const std::optional<int>& t)
{
    return t ? std::to_string(*t) : "nl";
}

ParseResult ingest(const fs::path& measurements, const std::string& format, const NetworkInstance& instance)
{
    if (!fs::exists(measurements)) {
        throw ValidationError("measurement file not found: " + measurements.string());
    }
    return parse_measurements(measurements, parse_format(format), &instance);
}

NetworkInstance topology_at(const fs::path& p)
{
    if (!fs::exists(p)) {
        throw ValidationError("topology file not found: " + p.string());
    }
    return load_instance(p);
}

void write_synthetic(const fs::path& out, const SyntheticScenario& sc, std::size_t visible)
{
    save_instance(out / "topology.json", sc.instance);
    write_measurements_jsonl(out / "measurements.jsonl", obfuscate(sc.rp_pl, sc.instance, visible));
    save_rps_csv(out / "groundtruth_rp_pl.csv", sc.instance, sc.reference_points());
    std::string pos = "kind,index,x,y,hotspot\n";
    for (std::size_t i = 0; i < sc.ap_positions.size(); ++i) {
        pos += "ap," + std::to_string(i) + ',' + format_double(sc.ap_positions[i].x) + ',' +
               format_double(sc.ap_positions[i].y) + ",-1\n";
    }
    for (std::size_t i = 0; i < sc.sta_positions.size(); ++i) {
        const int h = i < sc.sta_hotspot.size() ? sc.sta_hotspot[i] : -1;
        pos += "sta," + std::to_string(i) + ',' + format_double(sc.sta_positions[i].x) + ',' +
               format_double(sc.sta_positions[i].y) + ',' + std::to_string(h) + '\n';
    }
    write_file(out / "groundtruth_positions.csv", pos);
}

} // namespace

int main(int argc, char** argv)
{
    RunConfig cfg;
    try {
        cfg = preload_config(argc, argv);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    CLI::App app{"User-aware WLAN transmit power control toolkit"};
    app.require_subcommand(1);
    std::string config_path;
    std::string out = cfg.output_dir.string();
    std::uint64_t seed = cfg.seed;
    app.add_option("--config", config_path, "JSON run config; explicit flags override it");
    app.add_option("--seed", seed, "Global seed")->capture_default_str();
    app.add_option("--out", out, "Output directory or file")->capture_default_str();

    std::string topology = cfg.topology.string();
    std::string measurements = cfg.measurements.string();
    std::string format = cfg.format == MeasurementFormat::csv ? "csv" : "jsonl";
    std::string rps_path;
    std::string model_path = cfg.model_path ? cfg.model_path->string() : "";

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a synthetic scenario");
    synth->require_subcommand(1);
    ScenarioParams sp;
    HotspotParams hp;
    std::size_t visible = 6;
    double sigma = 0.0;
    auto add_common_synth = [&](CLI::App* c, std::size_t& aps, std::size_t& stas, double& side) {
        c->add_option("--aps", aps, "Number of APs")->capture_default_str();
        c->add_option("--stas", stas, "Number of STAs")->capture_default_str();
        c->add_option("--side", side, "Square side in metres")->capture_default_str();
        c->add_option("--visible", visible, "Path losses kept per STA (nearest first)")->capture_default_str();
        c->add_option("--sigma", sigma, "Shadowing standard deviation, dB")->capture_default_str();
    };
    auto* synth_uniform = synth->add_subcommand("uniform", "Uniform APs and STAs");
    add_common_synth(synth_uniform, sp.n_aps, sp.n_stas, sp.side_m);
    auto* synth_hotspot = synth->add_subcommand("hotspot", "STAs clustered around hotspots");
    add_common_synth(synth_hotspot, hp.n_aps, hp.n_stas, hp.side_m);
    synth_hotspot->add_option("--hotspots", hp.n_hotspots)->capture_default_str();
    synth_hotspot->add_option("--clustered", hp.clustered_fraction)->capture_default_str();
    synth_hotspot->add_option("--cluster-sigma", hp.cluster_sigma_m)->capture_default_str();

    // ingest
    auto* ingest_cmd = app.add_subcommand("ingest", "Parse and validate measurement reports");
    ingest_cmd->add_option("--topology", topology)->required();
    ingest_cmd->add_option("--measurements", measurements)->required();
    ingest_cmd->add_option("--format", format)->check(CLI::IsMember({"jsonl", "csv"}))->capture_default_str();

    // impute
    auto* impute_cmd = app.add_subcommand("impute", "Train, apply or evaluate the path-loss imputer");
    impute_cmd->require_subcommand(1);
    std::size_t min_visible = cfg.min_visible;
    TrainOptions train = cfg.train;
    std::size_t hide = 1;
    auto* impute_train = impute_cmd->add_subcommand("train", "Train one regressor per AP");
    auto* impute_apply = impute_cmd->add_subcommand("apply", "Complete every measurement record");
    auto* impute_eval = impute_cmd->add_subcommand("eval", "Hide observed entries and measure the error");
    for (auto* c : {impute_train, impute_apply, impute_eval}) {
        c->add_option("--topology", topology)->required();
        c->add_option("--measurements", measurements)->required();
        c->add_option("--format", format)->check(CLI::IsMember({"jsonl", "csv"}))->capture_default_str();
    }
    impute_train->add_option("--min-visible", min_visible)->capture_default_str();
    impute_train->add_option("--epochs", train.epochs)->capture_default_str();
    impute_train->add_option("--patience", train.patience)->capture_default_str();
    impute_apply->add_option("--model", model_path)->required();
    impute_eval->add_option("--model", model_path)->required();
    impute_eval->add_option("--hide", hide, "Entries hidden per record")->capture_default_str();

    // select
    auto* select_cmd = app.add_subcommand("select", "Choose reference points");
    std::string method = to_string(cfg.selection);
    std::string proj = to_string(cfg.projection);
    std::optional<std::size_t> k = cfg.k;
    std::optional<double> radius = cfg.radius;
    double radius_q = cfg.radius_quantile;
    select_cmd->add_option("--rps", rps_path, "Completed RP path-loss CSV")->required();
    select_cmd->add_option("--topology", topology)->required();
    select_cmd->add_option("--method", method)->check(CLI::IsMember({"uniform", "stratified"}))->capture_default_str();
    select_cmd->add_option("--k", k, "Uniform sample size");
    select_cmd->add_option("--radius", radius, "Stratified radius in embedding units");
    select_cmd->add_option("--radius-q", radius_q, "Pairwise-distance quantile used when --radius is unset")
        ->capture_default_str();
    select_cmd->add_option("--proj", proj)->check(CLI::IsMember({"pca", "tsne", "identity"}))->capture_default_str();
    select_cmd->add_option("--perplexity", cfg.tsne.perplexity)->capture_default_str();

    // optimize
    auto* optimize_cmd = app.add_subcommand("optimize", "Search a power configuration");
    std::string algo = "ls";
    std::string trials = trials_text(cfg.search.trials);
    double time_cap = cfg.search.time_cap_s;
    int restarts = cfg.restarts;
    double tpc_threshold = cfg.tpc_threshold_dbm;
    optimize_cmd->add_option("--topology", topology)->required();
    optimize_cmd->add_option("--rps", rps_path)->required();
    optimize_cmd->add_option("--algo", algo)
        ->check(CLI::IsMember({"ls", "exhaustive", "fullpower", "tpcv1"}))
        ->capture_default_str();
    optimize_cmd->add_option("--trials", trials, "Per-AP candidates per pass, or 'nl'")->capture_default_str();
    optimize_cmd->add_option("--time-cap", time_cap, "Seconds")->capture_default_str();
    optimize_cmd->add_option("--restarts", restarts)->capture_default_str();
    optimize_cmd->add_option("--tpc-threshold", tpc_threshold)->capture_default_str();

    // baseline
    auto* baseline_cmd = app.add_subcommand("baseline", "Write the FullPower and TPCv1-offline configurations");
    baseline_cmd->add_option("--topology", topology)->required();
    baseline_cmd->add_option("--tpc-threshold", tpc_threshold)->capture_default_str();

    // evaluate
    auto* evaluate_cmd = app.add_subcommand("evaluate", "Compare power configurations on one RP set");
    std::vector<std::string> config_files;
    evaluate_cmd->add_option("--topology", topology)->required();
    evaluate_cmd->add_option("--rps", rps_path)->required();
    evaluate_cmd->add_option("--power", config_files, "name=path.json, repeatable")->required();

    // study
    auto* study = app.add_subcommand("study", "Run a controlled study");
    study->require_subcommand(1);
    GapStudyParams gap;
    DegradationParams deg;
    SelectionStudyParams sel_study;
    auto* study_gap = study->add_subcommand("gap", "Local search versus exhaustive optimum");
    study_gap->add_option("--instances", gap.n_instances)->capture_default_str();
    study_gap->add_option("--aps", gap.n_aps)->capture_default_str();
    study_gap->add_option("--rps", gap.n_rps)->capture_default_str();
    study_gap->add_option("--side", gap.side_m)->capture_default_str();
    auto* study_imp = study->add_subcommand("imputation", "Utility loss under partial visibility");
    study_imp->add_option("--topologies", deg.n_topologies)->capture_default_str();
    study_imp->add_option("--aps", deg.n_aps)->capture_default_str();
    study_imp->add_option("--rps", deg.n_rps)->capture_default_str();
    study_imp->add_option("--side", deg.side_m)->capture_default_str();
    study_imp->add_option("--visible", deg.visible_counts)->capture_default_str();
    auto* study_sel = study->add_subcommand("selection", "Hotspot selection contrast");
    study_sel->add_option("--radius", sel_study.radius)->capture_default_str();
    study_sel->add_option("--cluster-sigma", sel_study.hotspots.cluster_sigma_m)->capture_default_str();
    study_sel->add_option("--stas", sel_study.hotspots.n_stas)->capture_default_str();

    // pipeline
    auto* pipeline_cmd = app.add_subcommand("pipeline", "Run every stage end to end");
    pipeline_cmd->add_option("--topology", topology);
    pipeline_cmd->add_option("--measurements", measurements);
    pipeline_cmd->add_option("--format", format)->check(CLI::IsMember({"jsonl", "csv"}))->capture_default_str();
    pipeline_cmd->add_option("--model", model_path);
    pipeline_cmd->add_option("--min-visible", min_visible)->capture_default_str();
    pipeline_cmd->add_option("--epochs", train.epochs)->capture_default_str();
    pipeline_cmd->add_option("--method", method)->check(CLI::IsMember({"uniform", "stratified"}))->capture_default_str();
    pipeline_cmd->add_option("--proj", proj)->check(CLI::IsMember({"pca", "tsne"}))->capture_default_str();
    pipeline_cmd->add_option("--k", k);
    pipeline_cmd->add_option("--radius", radius);
    pipeline_cmd->add_option("--radius-q", radius_q)->capture_default_str();
    pipeline_cmd->add_option("--trials", trials)->capture_default_str();
    pipeline_cmd->add_option("--time-cap", time_cap)->capture_default_str();
    pipeline_cmd->add_option("--restarts", restarts)->capture_default_str();
    pipeline_cmd->add_option("--tpc-threshold", tpc_threshold)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    const fs::path out_path = out;
    try {
        if (synth_uniform->parsed()) {
            sp.seed = seed;
            sp.pl_params.shadowing_sigma_db = sigma;
            write_synthetic(out_path, gen_uniform_scenario(sp), std::min(visible, sp.n_aps));
        } else if (synth_hotspot->parsed()) {
            hp.seed = seed;
            hp.pl_params.shadowing_sigma_db = sigma;
            write_synthetic(out_path, gen_hotspot_scenario(hp), std::min(visible, hp.n_aps));
        } else if (ingest_cmd->parsed()) {
            const auto instance = topology_at(topology);
            const auto parsed = ingest(measurements, format, instance);
            write_file(out_path / "ingest_report.json", ingest_report_json(parsed));
            write_measurements_jsonl(out_path / "records.jsonl", parsed.records);
            std::cout << parsed.lines_accepted << " of " << parsed.lines_read << " lines accepted, "
                      << parsed.records.size() << " records\n";
        } else if (impute_train->parsed()) {
            const auto instance = topology_at(topology);
            const auto parsed = ingest(measurements, format, instance);
            const auto datasets =
                build_datasets(parsed.records, instance.ids(), min_visible, derive_seed(seed, "datasets"));
            train.seed = derive_seed(seed, "train");
            const auto model = train_model(datasets, instance.ids(), train);
            const fs::path file = out_path.has_extension() ? out_path : out_path / "imputation_model.json";
            save_model(file, model);
            for (std::size_t a = 0; a < model.per_ap.size(); ++a) {
                const auto& r = model.per_ap[a];
                std::cout << model.ap_ids[a] << (r.trained ? "" : " (fallback)") << " test_mae=" << r.test_mae
                          << '\n';
            }
        } else if (impute_apply->parsed()) {
            const auto instance = topology_at(topology);
            const auto parsed = ingest(measurements, format, instance);
            const auto model = load_model(model_path);
            if (model.fingerprint() != ap_order_fingerprint(instance.ids())) {
                throw ValidationError("imputation model was trained on a different AP order");
            }
            const auto partial = to_partial_matrix(parsed.records, instance.ids());
            auto median = std::make_shared<MedianImputer>(MedianImputer::fit(partial));
            ReferencePointSet rps{LearnedImputer(model, median).complete_all(partial), {}};
            for (const auto& r : parsed.records) {
                rps.origin_ids.push_back(r.sta_id + "@" + std::to_string(r.timestamp));
            }
            const fs::path file = out_path.has_extension() ? out_path : out_path / "completed_rp_pl.csv";
            save_rps_csv(file, instance, rps);
        } else if (impute_eval->parsed()) {
            const auto instance = topology_at(topology);
            const auto parsed = ingest(measurements, format, instance);
            const auto model = load_model(model_path);
            const auto partial = to_partial_matrix(parsed.records, instance.ids());
            const auto s = hide_and_impute_eval(partial, hide, model, derive_seed(seed, "hide"));
            nlohmann::json j{{"n_hidden", s.n_hidden}, {"records", s.records}, {"median", s.median},
                             {"q1", s.q1},             {"q3", s.q3},           {"p95", s.p95}};
            std::cout << j.dump(2) << '\n';
        } else if (select_cmd->parsed()) {
            const auto instance = topology_at(topology);
            const auto rps = load_rps_csv(rps_path, instance);
            const auto sel_seed = derive_seed(seed, "select");
            SelectionResult sel;
            if (method == "uniform") {
                sel = uniform_select(rps.size(), std::min(k.value_or(rps.size()), rps.size()), sel_seed);
            } else {
                Embedding emb;
                const auto pm = parse_projection(proj);
                if (pm == ProjectionMethod::tsne) {
                    auto opts = cfg.tsne;
                    opts.seed = derive_seed(seed, "tsne");
                    emb = tsne_project(rps.rp_pl, opts).embedding;
                } else if (pm == ProjectionMethod::pca) {
                    emb = pca_project(rps.rp_pl);
                } else {
                    if (rps.rp_pl.cols() > 3) {
                        throw ValidationError("identity projection needs at most 3 APs");
                    }
                    emb.coords = Matrix(rps.size(), 3);
                    for (std::size_t r = 0; r < rps.size(); ++r) {
                        for (std::size_t c = 0; c < rps.rp_pl.cols(); ++c) {
                            emb.coords(r, c) = rps.rp_pl(r, c);
                        }
                    }
                    emb.method = ProjectionMethod::identity;
                }
                const double r = radius ? *radius : radius_from_quantile(emb, radius_q, sel_seed);
                sel = stratified_select(emb, r, sel_seed);
                write_file(out_path / "embedding.csv", embedding_csv(emb));
            }
            write_file(out_path / "selection.json", selection_to_json(sel));
            ReferencePointSet chosen;
            chosen.rp_pl = Matrix(sel.selected_indices.size(), instance.size());
            for (std::size_t i = 0; i < sel.selected_indices.size(); ++i) {
                const auto src = rps.rp_pl.row(sel.selected_indices[i]);
                std::copy(src.begin(), src.end(), chosen.rp_pl.row(i).begin());
                chosen.origin_ids.push_back(rps.origin_ids[sel.selected_indices[i]]);
            }
            save_rps_csv(out_path / "reference_points.csv", instance, chosen);
            std::cout << sel.selected_indices.size() << " of " << rps.size() << " reference points selected\n";
        } else if (optimize_cmd->parsed()) {
            const auto instance = topology_at(topology);
            const auto rps = load_rps_csv(rps_path, instance);
            PowerConfig best;
            if (algo == "ls") {
                SearchOptions opts{parse_trials(trials), time_cap, derive_seed(seed, "optimize")};
                const auto report = local_search_restarts(instance, rps, restarts, opts, cfg.utility);
                write_file(out_path / "search_report.json", search_report_to_json(instance, report));
                best = report.best_config;
            } else if (algo == "exhaustive") {
                best = exhaustive_search(instance, rps, cfg.utility).config;
            } else if (algo == "fullpower") {
                best = full_power(instance);
            } else {
                best = tpcv1_offline(instance, tpc_threshold);
            }
            write_file(out_path / "power_config.json", power_config_to_json(instance, best));
            std::cout << "utility " << network_utility(rps, best, instance, cfg.utility).total << '\n';
        } else if (baseline_cmd->parsed()) {
            const auto instance = topology_at(topology);
            write_file(out_path / "power_config_fullpower.json", power_config_to_json(instance, full_power(instance)));
            write_file(out_path / "power_config_tpcv1.json",
                       power_config_to_json(instance, tpcv1_offline(instance, tpc_threshold)));
        } else if (evaluate_cmd->parsed()) {
            const auto instance = topology_at(topology);
            const auto rps = load_rps_csv(rps_path, instance);
            std::vector<NamedConfig> configs;
            for (const auto& entry : config_files) {
                const auto eq = entry.find('=');
                if (eq == std::string::npos || eq == 0) {
                    throw ValidationError("--power expects name=path, got '" + entry + "'");
                }
                configs.push_back({entry.substr(0, eq), load_power_config(instance, entry.substr(eq + 1))});
            }
            for (const auto& nc : configs) {
                const auto b = network_utility(rps, nc.config, instance, cfg.utility);
                write_file(out_path / ("breakdown_" + nc.name + ".csv"), breakdown_csv(b, instance));
            }
            const auto csv = comparison_csv(compare_configs(rps, instance, configs, cfg.utility));
            write_file(out_path / "comparison.csv", csv);
            std::cout << csv;
        } else if (study_gap->parsed()) {
            gap.seed = seed;
            const auto r = study_optimality_gap(gap);
            write_gap_study(out_path, r);
            for (const auto& s : r.summary) {
                std::cout << s.variant << " gap median " << s.median << "% q3 " << s.q3 << "%\n";
            }
        } else if (study_imp->parsed()) {
            deg.seed = seed;
            const auto r = utility_degradation_study(deg);
            write_degradation_study(out_path, r);
            for (const auto& s : r.summary) {
                std::cout << "visible " << s.visible << ' ' << to_string(s.strategy) << " loss median " << s.median
                          << "%\n";
            }
        } else if (study_sel->parsed()) {
            sel_study.seed = seed;
            const auto r = study_selection_hotspots(sel_study);
            write_selection_study(out_path, r);
            for (const auto* m : {&r.coverage_friendly, &r.density_preserving}) {
                std::cout << m->method << " isolated " << m->isolated_fraction << " hotspot " << m->hotspot_fraction
                          << '\n';
            }
        } else if (pipeline_cmd->parsed()) {
            cfg.topology = topology;
            cfg.measurements = measurements;
            cfg.format = parse_format(format);
            cfg.output_dir = out_path;
            if (!model_path.empty()) {
                cfg.model_path = model_path;
            }
            cfg.min_visible = min_visible;
            cfg.train = train;
            cfg.selection = method == "uniform" ? SelectionMethod::uniform : SelectionMethod::stratified;
            cfg.projection = parse_projection(proj);
            cfg.k = k;
            cfg.radius = radius;
            cfg.radius_quantile = radius_q;
            cfg.search.trials = parse_trials(trials);
            cfg.search.time_cap_s = time_cap;
            cfg.restarts = restarts;
            cfg.tpc_threshold_dbm = tpc_threshold;
            cfg.seed = seed;
            if (cfg.topology.empty() || cfg.measurements.empty()) {
                throw ValidationError("pipeline needs --topology and --measurements (or a --config naming them)");
            }
            const auto manifest = run_pipeline(cfg);
            std::cout << "wrote " << manifest.files.size() << " artifacts to " << out_path.string() << '\n';
        }
    } catch (const StageError& e) {
        std::cerr << "error: stage " << e.stage() << ": " << e.what() << '\n';
        return 3;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
