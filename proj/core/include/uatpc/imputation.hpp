#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "uatpc/errors.hpp"
#include "uatpc/mlp.hpp"
#include "uatpc/optimizer.hpp"
#include "uatpc/synth.hpp"
#include "uatpc/types.hpp"

namespace uatpc {

inline constexpr double kPlFloorDb = 0.0;
inline constexpr double kPlCeilDb = 120.0;

/// Raised when a vector has too few observed entries for learned imputation.
class NotImputableError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Records laid out over a fixed AP order; NaN marks an unobserved entry.
Matrix to_partial_matrix(const std::vector<MeasurementRecord>& records, const std::vector<std::string>& ap_ids);

std::size_t count_present(std::span<const double> row);

enum class Split : unsigned char { train, validation, test };

struct SplitFractions {
    double train = 0.70;
    double validation = 0.15;
};

/// Labeled samples for one target AP: the target entry is hidden from the
/// input (NaN) and becomes the label.
struct PerApDataset {
    std::size_t ap_index = 0;
    Matrix inputs; // raw dB, NaN = absent
    std::vector<double> labels;
    std::vector<Split> split;

    std::size_t size() const noexcept { return labels.size(); }
    std::size_t count(Split s) const;
};

/// One dataset per AP. A row with v >= min_visible observed entries adds one
/// sample to each of its v APs' datasets; splits are a seeded shuffle per
/// dataset.
std::vector<PerApDataset> build_datasets(const Matrix& partial, std::size_t min_visible = 4, std::uint64_t seed = 0,
                                         SplitFractions fractions = {});

std::vector<PerApDataset> build_datasets(const std::vector<MeasurementRecord>& records,
                                         const std::vector<std::string>& ap_ids, std::size_t min_visible = 4,
                                         std::uint64_t seed = 0, SplitFractions fractions = {});

struct Normalization {
    double mean = 0.0;
    double stddev = 1.0;

    bool operator==(const Normalization&) const = default;
};

/// Mean/std of every training label across the datasets.
Normalization fit_normalization(const std::vector<PerApDataset>& datasets);

/// 2|AP| features: standardized PL (0 when absent) then a 0/1 presence flag per AP.
void encode_row(std::span<const double> partial, const Normalization& norm, std::span<double> out);
Matrix encode(const Matrix& partial, const Normalization& norm);

struct TrainOptions {
    int epochs = 200;
    std::uint64_t seed = 0;
    double learning_rate = 1e-3;
    std::size_t batch_size = 128;
    int patience = 10;
    std::vector<std::size_t> hidden = {200, 100, 40};
};

struct TrainedRegressor {
    Mlp net;
    double initial_train_mae = 0.0; // before the first update
    double train_mae = 0.0;
    double validation_mae = 0.0;
    double test_mae = 0.0;
    int epochs_run = 0;
};

/// Fits one per-AP regressor on standardized labels, early-stopping on
/// validation MAE and restoring the best epoch. MAEs are reported in dB.
TrainedRegressor train_regressor(const PerApDataset& dataset, const Normalization& norm,
                                 const TrainOptions& options = {});

/// Mean absolute error of the regressor over one split, in dB.
double split_mae(const Mlp& net, const PerApDataset& dataset, const Normalization& norm, Split which);

struct ApRegressor {
    bool trained = false;
    Mlp net;
    double fallback_db = 0.0; // used when no training data existed for this AP
    double train_mae = 0.0;
    double validation_mae = 0.0;
    double test_mae = 0.0;
};

struct ImputationModel {
    std::vector<std::string> ap_ids;
    Normalization norm;
    std::vector<ApRegressor> per_ap;

    /// Stable hash of the AP order the model was trained on.
    std::string fingerprint() const;
};

std::string ap_order_fingerprint(const std::vector<std::string>& ap_ids);

/// Trains every per-AP regressor.
ImputationModel train_model(const std::vector<PerApDataset>& datasets, const std::vector<std::string>& ap_ids,
                            const TrainOptions& options = {});

void save_model(const std::filesystem::path& path, const ImputationModel& model);
ImputationModel load_model(const std::filesystem::path& path);
std::string model_to_json(const ImputationModel& model);
ImputationModel parse_model(const std::string& json_text);

/// Completes a partial vector: observed entries are copied, each missing
/// entry is predicted by its AP's regressor from the observed ones and
/// clamped to [0, 120] dB. Throws NotImputableError with < 3 observed.
std::vector<double> impute(std::span<const double> partial, const ImputationModel& model);

/// Matrix completion interface shared by the learned and baseline imputers.
class Imputer {
public:
    virtual ~Imputer() = default;
    virtual std::string name() const = 0;

    /// `row` is the record index, for imputers that consult ground truth.
    virtual std::vector<double> complete(std::span<const double> partial, std::size_t row) const = 0;

    Matrix complete_all(const Matrix& partial) const;
};

/// Fills with the global median of observed path losses.
class MedianImputer : public Imputer {
public:
    explicit MedianImputer(double median_db) : median_db_(median_db) {}

    static MedianImputer fit(const Matrix& partial);
    static MedianImputer fit(std::span<const double> observed);

    double median_db() const noexcept { return median_db_; }
    std::string name() const override { return "median"; }
    std::vector<double> complete(std::span<const double> partial, std::size_t row) const override;

private:
    double median_db_;
};

/// Assumes unobserved APs are beyond interference range.
class HighImputer : public Imputer {
public:
    explicit HighImputer(double pl_high_db = 100.0) : pl_high_db_(pl_high_db) {}

    std::string name() const override { return "high"; }
    std::vector<double> complete(std::span<const double> partial, std::size_t row) const override;

private:
    double pl_high_db_;
};

/// Ground truth distorted by zero-mean Gaussian noise with the given mean
/// absolute error; stands in for an imperfect learned imputer.
class NoisyOracleImputer : public Imputer {
public:
    NoisyOracleImputer(Matrix ground_truth, double mean_abs_error_db, std::uint64_t seed);

    std::string name() const override { return "oracle5db"; }
    std::vector<double> complete(std::span<const double> partial, std::size_t row) const override;

private:
    Matrix noisy_;
};

class LearnedImputer : public Imputer {
public:
    explicit LearnedImputer(const ImputationModel& model, std::shared_ptr<const Imputer> fallback = nullptr)
        : model_(model), fallback_(std::move(fallback))
    {
    }

    std::string name() const override { return "learned"; }
    std::vector<double> complete(std::span<const double> partial, std::size_t row) const override;

private:
    const ImputationModel& model_;
    std::shared_ptr<const Imputer> fallback_;
};

struct ErrorSummary {
    std::size_t n_hidden = 0;
    std::size_t records = 0;
    std::vector<double> errors; // absolute, dB
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double p95 = 0.0;
};

double quantile(std::vector<double> values, double q);

/// Hides n_hidden uniformly chosen observed entries of every record with at
/// least n_hidden + 3 observed, imputes them, and collects absolute errors.
ErrorSummary hide_and_impute_eval(const Matrix& partial, std::size_t n_hidden, const ImputationModel& model,
                                  std::uint64_t seed);

enum class ImputeStrategy { high, median, oracle_5db };

std::string to_string(ImputeStrategy s);

struct DegradationParams {
    std::size_t n_topologies = 32;
    std::size_t n_aps = 33;
    std::size_t n_rps = 330;
    double side_m = 100.0;
    std::vector<int> levels = level_range(4, 32, 4);
    PathLossParams pl_params{};
    std::vector<std::size_t> visible_counts = {2, 6, 33};
    std::vector<ImputeStrategy> strategies = {ImputeStrategy::high, ImputeStrategy::median,
                                              ImputeStrategy::oracle_5db};
    SearchOptions search{5, 120.0, 0};
    int restarts = 1;
    double oracle_mae_db = 5.0;
    std::uint64_t seed = 0;
};

struct DegradationRow {
    std::size_t topology = 0;
    std::size_t visible = 0;
    ImputeStrategy strategy = ImputeStrategy::median;
    double reference_utility = 0.0;
    double achieved_utility = 0.0; // imputed-plan config scored on ground truth
    double loss_pct = 0.0;
};

struct DegradationSummary {
    std::size_t visible = 0;
    ImputeStrategy strategy = ImputeStrategy::median;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
};

struct DegradationReport {
    std::vector<DegradationRow> rows;
    std::vector<DegradationSummary> summary;

    const DegradationSummary& at(std::size_t visible, ImputeStrategy strategy) const;
};

/// Relative utility loss of a plan versus the full-visibility reference,
/// on the linear utility scale exp(U).
double relative_utility_loss(double achieved, double reference);

/// For each synthetic topology: optimize on the complete ground truth
/// (reference), then for each visibility level obfuscate nearest-first,
/// complete with each strategy, optimize on the completed matrix and score
/// that configuration on the ground truth.
DegradationReport utility_degradation_study(const DegradationParams& params);

} // namespace uatpc
