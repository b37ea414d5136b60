#include "uatpc/imputation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "uatpc/io.hpp"
#include "uatpc/random.hpp"

namespace uatpc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kMinObserved = 3;

} // namespace

Matrix to_partial_matrix(const std::vector<MeasurementRecord>& records, const std::vector<std::string>& ap_ids)
{
    Matrix m(records.size(), ap_ids.size(), kNaN);
    for (std::size_t r = 0; r < records.size(); ++r) {
        for (const auto& [ap, value] : records[r].pl) {
            auto it = std::find(ap_ids.begin(), ap_ids.end(), ap);
            if (it == ap_ids.end()) {
                throw ValidationError("record " + records[r].sta_id + " names unknown AP " + ap);
            }
            m(r, static_cast<std::size_t>(it - ap_ids.begin())) = value;
        }
    }
    return m;
}

std::size_t count_present(std::span<const double> row)
{
    return static_cast<std::size_t>(std::count_if(row.begin(), row.end(), [](double v) { return !std::isnan(v); }));
}

std::size_t PerApDataset::count(Split s) const
{
    return static_cast<std::size_t>(std::count(split.begin(), split.end(), s));
}

std::vector<PerApDataset> build_datasets(const Matrix& partial, std::size_t min_visible, std::uint64_t seed,
                                         SplitFractions fractions)
{
    const auto n_aps = partial.cols();
    std::vector<std::vector<std::size_t>> rows_for(n_aps);
    for (std::size_t r = 0; r < partial.rows(); ++r) {
        const auto row = partial.row(r);
        if (count_present(row) < min_visible) {
            continue;
        }
        for (std::size_t a = 0; a < n_aps; ++a) {
            if (!std::isnan(row[a])) {
                rows_for[a].push_back(r);
            }
        }
    }

    std::vector<PerApDataset> out(n_aps);
    for (std::size_t a = 0; a < n_aps; ++a) {
        auto& ds = out[a];
        ds.ap_index = a;
        const auto n = rows_for[a].size();
        ds.inputs = Matrix(n, n_aps);
        ds.labels.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto src = partial.row(rows_for[a][i]);
            auto dst = ds.inputs.row(i);
            std::copy(src.begin(), src.end(), dst.begin());
            ds.labels[i] = src[a];
            dst[a] = kNaN;
        }

        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(a)));
        for (std::size_t i = n; i > 1; --i) {
            std::uniform_int_distribution<std::size_t> pick(0, i - 1);
            std::swap(order[i - 1], order[pick(rng)]);
        }
        auto n_train = static_cast<std::size_t>(std::llround(fractions.train * static_cast<double>(n)));
        auto n_val = static_cast<std::size_t>(std::llround(fractions.validation * static_cast<double>(n)));
        n_train = std::min(std::max<std::size_t>(n_train, n > 0 ? 1 : 0), n);
        n_val = std::min(n_val, n - n_train);
        ds.split.assign(n, Split::test);
        for (std::size_t i = 0; i < n; ++i) {
            ds.split[order[i]] = i < n_train ? Split::train : (i < n_train + n_val ? Split::validation : Split::test);
        }
    }
    return out;
}

std::vector<PerApDataset> build_datasets(const std::vector<MeasurementRecord>& records,
                                         const std::vector<std::string>& ap_ids, std::size_t min_visible,
                                         std::uint64_t seed, SplitFractions fractions)
{
    return build_datasets(to_partial_matrix(records, ap_ids), min_visible, seed, fractions);
}

Normalization fit_normalization(const std::vector<PerApDataset>& datasets)
{
    double sum = 0.0;
    double sq = 0.0;
    std::size_t n = 0;
    for (const auto& ds : datasets) {
        for (std::size_t i = 0; i < ds.size(); ++i) {
            if (ds.split[i] == Split::train) {
                sum += ds.labels[i];
                sq += ds.labels[i] * ds.labels[i];
                ++n;
            }
        }
    }
    if (n == 0) {
        throw ValidationError("no training samples to normalize");
    }
    Normalization norm;
    norm.mean = sum / static_cast<double>(n);
    const double var = sq / static_cast<double>(n) - norm.mean * norm.mean;
    norm.stddev = var > 1e-12 ? std::sqrt(var) : 1.0;
    return norm;
}

void encode_row(std::span<const double> partial, const Normalization& norm, std::span<double> out)
{
    const auto n = partial.size();
    for (std::size_t a = 0; a < n; ++a) {
        const bool present = !std::isnan(partial[a]);
        out[a] = present ? (partial[a] - norm.mean) / norm.stddev : 0.0;
        out[n + a] = present ? 1.0 : 0.0;
    }
}

Matrix encode(const Matrix& partial, const Normalization& norm)
{
    Matrix out(partial.rows(), 2 * partial.cols());
    for (std::size_t r = 0; r < partial.rows(); ++r) {
        encode_row(partial.row(r), norm, out.row(r));
    }
    return out;
}

namespace {

double mae_on(const Mlp& net, const Matrix& x, const std::vector<double>& labels_db,
              const std::vector<std::size_t>& rows, const Normalization& norm)
{
    if (rows.empty()) {
        return 0.0;
    }
    Matrix sub(rows.size(), x.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto src = x.row(rows[i]);
        std::copy(src.begin(), src.end(), sub.row(i).begin());
    }
    const auto pred = net.predict(sub);
    double total = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double db = std::clamp(pred[i] * norm.stddev + norm.mean, kPlFloorDb, kPlCeilDb);
        total += std::abs(db - labels_db[rows[i]]);
    }
    return total / static_cast<double>(rows.size());
}

std::vector<std::size_t> rows_in(const PerApDataset& ds, Split s)
{
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (ds.split[i] == s) {
            rows.push_back(i);
        }
    }
    return rows;
}

} // namespace

double split_mae(const Mlp& net, const PerApDataset& dataset, const Normalization& norm, Split which)
{
    return mae_on(net, encode(dataset.inputs, norm), dataset.labels, rows_in(dataset, which), norm);
}

TrainedRegressor train_regressor(const PerApDataset& dataset, const Normalization& norm,
                                 const TrainOptions& options)
{
    const auto train_rows = rows_in(dataset, Split::train);
    if (train_rows.empty()) {
        throw ValidationError("training split is empty for AP index " + std::to_string(dataset.ap_index));
    }
    const auto val_rows = rows_in(dataset, Split::validation);
    const auto test_rows = rows_in(dataset, Split::test);
    const Matrix x = encode(dataset.inputs, norm);
    std::vector<double> y(dataset.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] = (dataset.labels[i] - norm.mean) / norm.stddev;
    }

    std::vector<std::size_t> sizes{x.cols()};
    sizes.insert(sizes.end(), options.hidden.begin(), options.hidden.end());
    sizes.push_back(1);

    TrainedRegressor out;
    out.net = Mlp(sizes, derive_seed(options.seed, "init"));
    out.initial_train_mae = mae_on(out.net, x, dataset.labels, train_rows, norm);

    const auto& monitor_rows = val_rows.empty() ? train_rows : val_rows;
    AdamTrainer trainer(out.net, options.learning_rate);
    Rng rng(derive_seed(options.seed, "batches"));
    Mlp best = out.net;
    double best_monitor = mae_on(out.net, x, dataset.labels, monitor_rows, norm);
    int since_best = 0;
    auto order = train_rows;
    for (int epoch = 0; epoch < options.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i) {
            std::uniform_int_distribution<std::size_t> pick(0, i - 1);
            std::swap(order[i - 1], order[pick(rng)]);
        }
        for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
            const auto len = std::min(options.batch_size, order.size() - start);
            trainer.step(x, y, std::span<const std::size_t>(order.data() + start, len));
        }
        ++out.epochs_run;
        const double monitor = mae_on(out.net, x, dataset.labels, monitor_rows, norm);
        if (monitor < best_monitor) {
            best_monitor = monitor;
            best = out.net;
            since_best = 0;
        } else if (++since_best >= options.patience) {
            break;
        }
    }
    out.net = std::move(best);
    out.train_mae = mae_on(out.net, x, dataset.labels, train_rows, norm);
    out.validation_mae = mae_on(out.net, x, dataset.labels, val_rows, norm);
    out.test_mae = mae_on(out.net, x, dataset.labels, test_rows, norm);
    return out;
}

std::string ap_order_fingerprint(const std::vector<std::string>& ap_ids)
{
    std::string joined;
    for (const auto& id : ap_ids) {
        joined += id;
        joined += '\x1f';
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(joined)));
    return buf;
}

std::string ImputationModel::fingerprint() const
{
    return ap_order_fingerprint(ap_ids);
}

ImputationModel train_model(const std::vector<PerApDataset>& datasets, const std::vector<std::string>& ap_ids,
                            const TrainOptions& options)
{
    if (datasets.size() != ap_ids.size()) {
        throw ValidationError("need one dataset per AP");
    }
    ImputationModel model;
    model.ap_ids = ap_ids;
    model.norm = fit_normalization(datasets);

    std::vector<double> observed;
    for (const auto& ds : datasets) {
        for (std::size_t i = 0; i < ds.size(); ++i) {
            if (ds.split[i] == Split::train) {
                observed.push_back(ds.labels[i]);
            }
        }
    }
    const double fallback = quantile(observed, 0.5);

    for (const auto& ds : datasets) {
        ApRegressor reg;
        reg.fallback_db = fallback;
        if (ds.count(Split::train) > 0) {
            auto opts = options;
            opts.seed = derive_seed(options.seed, static_cast<std::uint64_t>(ds.ap_index));
            auto trained = train_regressor(ds, model.norm, opts);
            reg.trained = true;
            reg.net = std::move(trained.net);
            reg.train_mae = trained.train_mae;
            reg.validation_mae = trained.validation_mae;
            reg.test_mae = trained.test_mae;
        }
        model.per_ap.push_back(std::move(reg));
    }
    return model;
}

std::string model_to_json(const ImputationModel& model)
{
    using nlohmann::json;
    json j;
    j["format"] = "uatpc-imputation-model";
    j["version"] = 1;
    j["ap_ids"] = model.ap_ids;
    j["ap_order_fingerprint"] = model.fingerprint();
    j["normalization"] = {{"mean", model.norm.mean}, {"std", model.norm.stddev}};
    j["regressors"] = json::array();
    for (std::size_t a = 0; a < model.per_ap.size(); ++a) {
        const auto& reg = model.per_ap[a];
        json jr{{"ap_id", model.ap_ids[a]},
                {"trained", reg.trained},
                {"fallback_db", reg.fallback_db},
                {"train_mae", reg.train_mae},
                {"validation_mae", reg.validation_mae},
                {"test_mae", reg.test_mae}};
        jr["layers"] = json::array();
        for (const auto& l : reg.net.layers()) {
            jr["layers"].push_back({{"in", l.in}, {"out", l.out}, {"weights", l.weights}, {"bias", l.bias}});
        }
        j["regressors"].push_back(std::move(jr));
    }
    return j.dump();
}

ImputationModel parse_model(const std::string& json_text)
{
    using nlohmann::json;
    try {
        auto j = json::parse(json_text);
        if (j.at("format") != "uatpc-imputation-model") {
            throw ValidationError("not an imputation model file");
        }
        ImputationModel model;
        model.ap_ids = j.at("ap_ids").get<std::vector<std::string>>();
        if (j.at("ap_order_fingerprint").get<std::string>() != model.fingerprint()) {
            throw ValidationError("model AP-order fingerprint mismatch");
        }
        model.norm.mean = j.at("normalization").at("mean").get<double>();
        model.norm.stddev = j.at("normalization").at("std").get<double>();
        for (const auto& jr : j.at("regressors")) {
            ApRegressor reg;
            reg.trained = jr.at("trained").get<bool>();
            reg.fallback_db = jr.at("fallback_db").get<double>();
            reg.train_mae = jr.value("train_mae", 0.0);
            reg.validation_mae = jr.value("validation_mae", 0.0);
            reg.test_mae = jr.value("test_mae", 0.0);
            for (const auto& jl : jr.at("layers")) {
                Mlp::Layer l;
                l.in = jl.at("in").get<std::size_t>();
                l.out = jl.at("out").get<std::size_t>();
                l.weights = jl.at("weights").get<std::vector<double>>();
                l.bias = jl.at("bias").get<std::vector<double>>();
                if (l.weights.size() != l.in * l.out || l.bias.size() != l.out) {
                    throw ValidationError("layer shape mismatch in model file");
                }
                reg.net.layers().push_back(std::move(l));
            }
            model.per_ap.push_back(std::move(reg));
        }
        if (model.per_ap.size() != model.ap_ids.size()) {
            throw ValidationError("model must carry one regressor per AP");
        }
        return model;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("model schema error: ") + e.what());
    }
}

void save_model(const std::filesystem::path& path, const ImputationModel& model)
{
    write_file(path, model_to_json(model));
}

ImputationModel load_model(const std::filesystem::path& path)
{
    return parse_model(read_file(path));
}

std::vector<double> impute(std::span<const double> partial, const ImputationModel& model)
{
    const auto n = model.ap_ids.size();
    if (partial.size() != n) {
        throw ValidationError("vector width does not match the model's AP set");
    }
    const auto present = count_present(partial);
    if (present < kMinObserved) {
        throw NotImputableError("need at least 3 observed path losses, got " + std::to_string(present));
    }
    std::vector<double> out(partial.begin(), partial.end());
    if (present == n) {
        return out;
    }
    std::vector<double> features(2 * n);
    encode_row(partial, model.norm, features);
    for (std::size_t a = 0; a < n; ++a) {
        if (!std::isnan(partial[a])) {
            continue;
        }
        const auto& reg = model.per_ap[a];
        const double db = reg.trained ? reg.net.predict(features) * model.norm.stddev + model.norm.mean
                                      : reg.fallback_db;
        out[a] = std::clamp(db, kPlFloorDb, kPlCeilDb);
    }
    return out;
}

Matrix Imputer::complete_all(const Matrix& partial) const
{
    Matrix out(partial.rows(), partial.cols());
    for (std::size_t r = 0; r < partial.rows(); ++r) {
        auto filled = complete(partial.row(r), r);
        std::copy(filled.begin(), filled.end(), out.row(r).begin());
    }
    return out;
}

MedianImputer MedianImputer::fit(std::span<const double> observed)
{
    std::vector<double> values;
    for (double v : observed) {
        if (!std::isnan(v)) {
            values.push_back(v);
        }
    }
    if (values.empty()) {
        throw ValidationError("median imputer needs at least one observed path loss");
    }
    return MedianImputer(quantile(std::move(values), 0.5));
}

MedianImputer MedianImputer::fit(const Matrix& partial)
{
    return fit(partial.data());
}

std::vector<double> MedianImputer::complete(std::span<const double> partial, std::size_t) const
{
    std::vector<double> out(partial.begin(), partial.end());
    for (auto& v : out) {
        if (std::isnan(v)) {
            v = median_db_;
        }
    }
    return out;
}

std::vector<double> HighImputer::complete(std::span<const double> partial, std::size_t) const
{
    std::vector<double> out(partial.begin(), partial.end());
    for (auto& v : out) {
        if (std::isnan(v)) {
            v = pl_high_db_;
        }
    }
    return out;
}

NoisyOracleImputer::NoisyOracleImputer(Matrix ground_truth, double mean_abs_error_db, std::uint64_t seed)
    : noisy_(std::move(ground_truth))
{
    // E|N(0, s)| = s * sqrt(2 / pi)
    const double sigma = mean_abs_error_db * std::sqrt(std::acos(-1.0) / 2.0);
    Rng rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    for (auto& v : noisy_.data()) {
        v = std::clamp(v + noise(rng), kPlFloorDb, kPlCeilDb);
    }
}

std::vector<double> NoisyOracleImputer::complete(std::span<const double> partial, std::size_t row) const
{
    if (row >= noisy_.rows() || partial.size() != noisy_.cols()) {
        throw ValidationError("oracle imputer row out of range");
    }
    std::vector<double> out(partial.begin(), partial.end());
    const auto truth = noisy_.row(row);
    for (std::size_t a = 0; a < out.size(); ++a) {
        if (std::isnan(out[a])) {
            out[a] = truth[a];
        }
    }
    return out;
}

std::vector<double> LearnedImputer::complete(std::span<const double> partial, std::size_t row) const
{
    if (fallback_ && count_present(partial) < kMinObserved) {
        return fallback_->complete(partial, row);
    }
    return impute(partial, model_);
}

double quantile(std::vector<double> values, double q)
{
    if (values.empty()) {
        throw ValidationError("quantile of an empty sample");
    }
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

ErrorSummary hide_and_impute_eval(const Matrix& partial, std::size_t n_hidden, const ImputationModel& model,
                                  std::uint64_t seed)
{
    ErrorSummary out;
    out.n_hidden = n_hidden;
    Rng rng(seed);
    std::vector<std::size_t> present;
    std::vector<double> masked(partial.cols());
    for (std::size_t r = 0; r < partial.rows(); ++r) {
        const auto row = partial.row(r);
        present.clear();
        for (std::size_t a = 0; a < row.size(); ++a) {
            if (!std::isnan(row[a])) {
                present.push_back(a);
            }
        }
        if (present.size() < n_hidden + kMinObserved) {
            continue;
        }
        ++out.records;
        for (std::size_t i = 0; i < n_hidden; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, present.size() - 1);
            std::swap(present[i], present[pick(rng)]);
        }
        std::copy(row.begin(), row.end(), masked.begin());
        for (std::size_t i = 0; i < n_hidden; ++i) {
            masked[present[i]] = kNaN;
        }
        const auto filled = impute(masked, model);
        for (std::size_t i = 0; i < n_hidden; ++i) {
            out.errors.push_back(std::abs(filled[present[i]] - row[present[i]]));
        }
    }
    if (out.records == 0) {
        throw ValidationError("no record has at least " + std::to_string(n_hidden + kMinObserved) +
                              " observed path losses");
    }
    if (!out.errors.empty()) {
        out.median = quantile(out.errors, 0.5);
        out.q1 = quantile(out.errors, 0.25);
        out.q3 = quantile(out.errors, 0.75);
        out.p95 = quantile(out.errors, 0.95);
    }
    return out;
}

} // namespace uatpc
