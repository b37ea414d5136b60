#include "uatpc/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <memory>

#include <json.hpp>
#include <openssl/evp.h>

#include "uatpc/errors.hpp"
#include "uatpc/random.hpp"

namespace uatpc {

using nlohmann::json;

std::string sha256_hex(std::string_view content)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(content.data(), content.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 computation failed");
    }
    std::string hex;
    hex.reserve(2 * len);
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof(buf), "%02x", digest[i]);
        hex += buf;
    }
    return hex;
}

std::string run_config_to_json(const RunConfig& c)
{
    json j;
    j["topology"] = c.topology.string();
    j["measurements"] = c.measurements.string();
    j["format"] = c.format == MeasurementFormat::jsonl ? "jsonl" : "csv";
    j["output_dir"] = c.output_dir.string();
    j["imputation"] = {
        {"model_path", c.model_path ? json(c.model_path->string()) : json(nullptr)},
        {"min_visible", c.min_visible},
        {"epochs", c.train.epochs},
        {"learning_rate", c.train.learning_rate},
        {"batch_size", c.train.batch_size},
        {"patience", c.train.patience},
        {"hidden", c.train.hidden},
    };
    j["selection"] = {
        {"method", to_string(c.selection)},
        {"projection", to_string(c.projection)},
        {"k", c.k ? json(*c.k) : json(nullptr)},
        {"radius", c.radius ? json(*c.radius) : json(nullptr)},
        {"radius_quantile", c.radius_quantile},
        {"perplexity", c.tsne.perplexity},
        {"tsne_iterations", c.tsne.iterations},
    };
    j["optimizer"] = {
        {"trials", c.search.trials ? json(*c.search.trials) : json("nl")},
        {"time_cap_s", c.search.time_cap_s},
        {"restarts", c.restarts},
        {"tpc_threshold_dbm", c.tpc_threshold_dbm},
    };
    j["utility"] = {{"cs_threshold_dbm", c.utility.cs_threshold_dbm}, {"epsilon", c.utility.epsilon}};
    j["seed"] = c.seed;
    return j.dump(2);
}

RunConfig parse_run_config(const std::string& json_text, RunConfig c)
{
    try {
        auto j = json::parse(json_text);
        if (j.contains("topology")) {
            c.topology = j["topology"].get<std::string>();
        }
        if (j.contains("measurements")) {
            c.measurements = j["measurements"].get<std::string>();
        }
        if (j.contains("format")) {
            c.format = parse_format(j["format"].get<std::string>());
        }
        if (j.contains("output_dir")) {
            c.output_dir = j["output_dir"].get<std::string>();
        }
        if (j.contains("seed")) {
            c.seed = j["seed"].get<std::uint64_t>();
        }
        if (auto it = j.find("imputation"); it != j.end()) {
            const auto& ji = *it;
            if (ji.contains("model_path") && !ji["model_path"].is_null()) {
                c.model_path = ji["model_path"].get<std::string>();
            }
            c.min_visible = ji.value("min_visible", c.min_visible);
            c.train.epochs = ji.value("epochs", c.train.epochs);
            c.train.learning_rate = ji.value("learning_rate", c.train.learning_rate);
            c.train.batch_size = ji.value("batch_size", c.train.batch_size);
            c.train.patience = ji.value("patience", c.train.patience);
            if (ji.contains("hidden")) {
                c.train.hidden = ji["hidden"].get<std::vector<std::size_t>>();
            }
        }
        if (auto it = j.find("selection"); it != j.end()) {
            const auto& js = *it;
            if (js.contains("method")) {
                const auto m = js["method"].get<std::string>();
                if (m != "uniform" && m != "stratified") {
                    throw ValidationError("unknown selection method: " + m);
                }
                c.selection = m == "uniform" ? SelectionMethod::uniform : SelectionMethod::stratified;
            }
            if (js.contains("projection")) {
                c.projection = parse_projection(js["projection"].get<std::string>());
            }
            if (js.contains("k") && !js["k"].is_null()) {
                c.k = js["k"].get<std::size_t>();
            }
            if (js.contains("radius") && !js["radius"].is_null()) {
                c.radius = js["radius"].get<double>();
            }
            c.radius_quantile = js.value("radius_quantile", c.radius_quantile);
            c.tsne.perplexity = js.value("perplexity", c.tsne.perplexity);
            c.tsne.iterations = js.value("tsne_iterations", c.tsne.iterations);
        }
        if (auto it = j.find("optimizer"); it != j.end()) {
            const auto& jo = *it;
            if (jo.contains("trials")) {
                const auto& t = jo["trials"];
                if (t.is_string() && t.get<std::string>() == "nl") {
                    c.search.trials = std::nullopt;
                } else {
                    c.search.trials = t.get<int>();
                }
            }
            c.search.time_cap_s = jo.value("time_cap_s", c.search.time_cap_s);
            c.restarts = jo.value("restarts", c.restarts);
            c.tpc_threshold_dbm = jo.value("tpc_threshold_dbm", c.tpc_threshold_dbm);
        }
        if (auto it = j.find("utility"); it != j.end()) {
            c.utility.cs_threshold_dbm = it->value("cs_threshold_dbm", c.utility.cs_threshold_dbm);
            c.utility.epsilon = it->value("epsilon", c.utility.epsilon);
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("run config schema error: ") + e.what());
    }
    return c;
}

std::string manifest_to_json(const RunManifest& manifest)
{
    json files = json::array();
    for (const auto& f : manifest.files) {
        files.push_back({{"file", f.file}, {"sha256", f.sha256}, {"bytes", f.bytes}});
    }
    return json{{"seed", manifest.seed}, {"stages", manifest.stages}, {"files", files}}.dump(2);
}

std::vector<ConfigComparison> compare_configs(const ReferencePointSet& rps, const NetworkInstance& instance,
                                              const std::vector<NamedConfig>& configs, const UtilityParams& params)
{
    std::vector<ConfigComparison> out;
    for (const auto& [name, config] : configs) {
        const auto b = network_utility(rps, config, instance, params);
        std::vector<double> rssi;
        std::vector<double> interference;
        std::size_t good = 0;
        std::size_t bad = 0;
        for (const auto& u : b.per_rp) {
            rssi.push_back(u.rssi_dbm);
            interference.push_back(u.interference);
            good += u.rssi_dbm >= kGoodCoverageDbm ? 1 : 0;
            bad += u.rssi_dbm < kBadCoverageDbm ? 1 : 0;
        }
        ConfigComparison c;
        c.name = name;
        c.utility = b.total;
        c.rssi_q1 = quantile(rssi, 0.25);
        c.rssi_median = quantile(rssi, 0.5);
        c.rssi_q3 = quantile(rssi, 0.75);
        c.interference_q1 = quantile(interference, 0.25);
        c.interference_median = quantile(interference, 0.5);
        c.interference_q3 = quantile(interference, 0.75);
        double power = 0.0;
        for (int level : config.levels) {
            power += level;
        }
        c.mean_power_dbm = power / static_cast<double>(config.levels.size());
        const double n = static_cast<double>(rps.size());
        c.good_coverage = static_cast<double>(good) / n;
        c.bad_coverage = static_cast<double>(bad) / n;
        out.push_back(std::move(c));
    }
    return out;
}

std::string comparison_csv(const std::vector<ConfigComparison>& rows)
{
    std::string out = "config,utility,rssi_q1,rssi_median,rssi_q3,mean_power_dbm,interference_q1,"
                      "interference_median,interference_q3,good_coverage,bad_coverage\n";
    for (const auto& c : rows) {
        out += c.name;
        for (double v : {c.utility, c.rssi_q1, c.rssi_median, c.rssi_q3, c.mean_power_dbm, c.interference_q1,
                         c.interference_median, c.interference_q3, c.good_coverage, c.bad_coverage}) {
            out += ',' + format_double(v);
        }
        out += '\n';
    }
    return out;
}

namespace {

class ArtifactWriter {
public:
    explicit ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir)) {}

    void write(const std::string& name, std::string_view content)
    {
        write_file(dir_ / name, content);
        files_.push_back({name, sha256_hex(content), content.size()});
    }

    const std::vector<ManifestEntry>& files() const { return files_; }

private:
    std::filesystem::path dir_;
    std::vector<ManifestEntry> files_;
};

template <typename Fn>
auto run_stage(RunManifest& manifest, const std::string& name, Fn&& fn)
{
    manifest.stages.push_back(name);
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

} // namespace

std::string ingest_report_json(const ParseResult& parsed)
{
    json rejects = json::array();
    for (const auto& r : parsed.rejects) {
        rejects.push_back({{"line", r.line}, {"reason", r.reason}});
    }
    return json{{"lines_read", parsed.lines_read},
                {"lines_accepted", parsed.lines_accepted},
                {"records", parsed.records.size()},
                {"rejected", parsed.rejects.size()},
                {"rejects", rejects}}
        .dump(2);
}

RunManifest run_pipeline(const RunConfig& config)
{
    RunManifest manifest;
    manifest.seed = config.seed;
    ArtifactWriter out(config.output_dir);

    struct Ingested {
        NetworkInstance instance;
        ParseResult parsed;
    };
    auto ingested = run_stage(manifest, "ingest", [&] {
        if (!std::filesystem::exists(config.topology)) {
            throw ValidationError("topology file not found: " + config.topology.string());
        }
        if (!std::filesystem::exists(config.measurements)) {
            throw ValidationError("measurement file not found: " + config.measurements.string());
        }
        Ingested in{load_instance(config.topology), {}};
        in.parsed = parse_measurements(config.measurements, config.format, &in.instance);
        if (in.parsed.records.empty()) {
            throw ValidationError("no usable measurement records");
        }
        out.write("config.json", run_config_to_json(config));
        out.write("ingest_report.json", ingest_report_json(in.parsed));
        return in;
    });
    const auto& instance = ingested.instance;
    const auto ap_ids = instance.ids();
    const auto partial = to_partial_matrix(ingested.parsed.records, ap_ids);

    auto model = run_stage(manifest, "imputation-model", [&] {
        std::optional<ImputationModel> m;
        if (config.model_path) {
            m = load_model(*config.model_path);
            if (m->fingerprint() != ap_order_fingerprint(ap_ids)) {
                throw ValidationError("imputation model was trained on a different AP order");
            }
            return m;
        }
        const auto datasets = build_datasets(partial, config.min_visible, derive_seed(config.seed, "datasets"));
        const bool any = std::any_of(datasets.begin(), datasets.end(),
                                     [](const PerApDataset& d) { return d.count(Split::train) > 0; });
        if (!any) {
            std::clog << "warning: no record has " << config.min_visible
                      << " observed path losses; imputing with the median baseline\n";
            return m;
        }
        auto opts = config.train;
        opts.seed = derive_seed(config.seed, "train");
        m = train_model(datasets, ap_ids, opts);
        out.write("imputation_model.json", model_to_json(*m));
        return m;
    });

    const auto completed = run_stage(manifest, "impute", [&] {
        auto median = std::make_shared<MedianImputer>(MedianImputer::fit(partial));
        ReferencePointSet rps;
        if (model) {
            rps.rp_pl = LearnedImputer(*model, median).complete_all(partial);
        } else {
            rps.rp_pl = median->complete_all(partial);
        }
        for (const auto& r : ingested.parsed.records) {
            rps.origin_ids.push_back(r.sta_id + "@" + std::to_string(r.timestamp));
        }
        return rps;
    });

    const auto selected = run_stage(manifest, "select", [&] {
        const auto seed = derive_seed(config.seed, "select");
        SelectionResult sel;
        if (config.selection == SelectionMethod::uniform) {
            const auto k = std::min(config.k.value_or(completed.size()), completed.size());
            sel = uniform_select(completed.size(), k, seed);
        } else {
            Embedding emb;
            if (config.projection == ProjectionMethod::tsne) {
                auto opts = config.tsne;
                opts.seed = derive_seed(config.seed, "tsne");
                emb = tsne_project(completed.rp_pl, opts).embedding;
            } else {
                emb = pca_project(completed.rp_pl);
            }
            const double r = config.radius ? *config.radius
                                           : radius_from_quantile(emb, config.radius_quantile, seed);
            sel = stratified_select(emb, r, seed);
            out.write("embedding.csv", embedding_csv(emb));
        }
        out.write("selection.json", selection_to_json(sel));
        ReferencePointSet rps;
        rps.rp_pl = Matrix(sel.selected_indices.size(), instance.size());
        for (std::size_t i = 0; i < sel.selected_indices.size(); ++i) {
            const auto src = completed.rp_pl.row(sel.selected_indices[i]);
            std::copy(src.begin(), src.end(), rps.rp_pl.row(i).begin());
            rps.origin_ids.push_back(completed.origin_ids[sel.selected_indices[i]]);
        }
        if (rps.size() == 0) {
            throw ValidationError("selection produced no reference points");
        }
        out.write("reference_points.csv", rps_to_csv(instance, rps));
        return rps;
    });

    const auto report = run_stage(manifest, "optimize", [&] {
        auto opts = config.search;
        opts.seed = derive_seed(config.seed, "optimize");
        auto r = local_search_restarts(instance, selected, config.restarts, opts, config.utility);
        out.write("search_report.json", search_report_to_json(instance, r));
        out.write("power_config_ua.json", power_config_to_json(instance, r.best_config));
        return r;
    });

    run_stage(manifest, "evaluate", [&] {
        std::vector<NamedConfig> configs{
            {"ua", report.best_config},
            {"fullpower", full_power(instance)},
            {"tpcv1", tpcv1_offline(instance, config.tpc_threshold_dbm)},
        };
        out.write("power_config_fullpower.json", power_config_to_json(instance, configs[1].config));
        out.write("power_config_tpcv1.json", power_config_to_json(instance, configs[2].config));
        for (const auto& nc : configs) {
            const auto b = network_utility(selected, nc.config, instance, config.utility);
            out.write("breakdown_" + nc.name + ".csv", breakdown_csv(b, instance));
        }
        out.write("comparison.csv", comparison_csv(compare_configs(selected, instance, configs, config.utility)));
        return 0;
    });

    manifest.files = out.files();
    write_file(config.output_dir / "manifest.json", manifest_to_json(manifest));
    return manifest;
}

} // namespace uatpc
