#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace uatpc {

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill)
    {
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

struct AccessPoint {
    std::string id;
    std::vector<int> allowed_levels; // dBm, strictly increasing
    int channel = 0;

    int max_level() const { return allowed_levels.back(); }
    int min_level() const { return allowed_levels.front(); }

    bool operator==(const AccessPoint&) const = default;
};

/// One 802.11k sample: the path losses a station reported at a point in time.
struct MeasurementRecord {
    std::int64_t timestamp = 0;
    std::string sta_id;
    std::string serving_ap;
    std::map<std::string, double> pl; // AP id -> path loss, dB

    bool operator==(const MeasurementRecord&) const = default;
};

class NetworkInstance {
public:
    NetworkInstance() = default;

    /// Validates every invariant; throws ValidationError.
    NetworkInstance(std::vector<AccessPoint> aps, Matrix ap_pl, std::vector<std::vector<bool>> overlap);

    /// Channel overlap derived from channel equality.
    NetworkInstance(std::vector<AccessPoint> aps, Matrix ap_pl);

    std::size_t size() const noexcept { return aps_.size(); }
    const std::vector<AccessPoint>& aps() const noexcept { return aps_; }
    const AccessPoint& ap(std::size_t a) const { return aps_[a]; }
    const Matrix& ap_pl() const noexcept { return ap_pl_; }
    bool overlaps(std::size_t a, std::size_t b) const { return overlap_[a][b]; }
    const std::vector<std::vector<bool>>& channel_overlap() const noexcept { return overlap_; }

    /// Index of the AP with the given id, or size() when absent.
    std::size_t index_of(const std::string& id) const;
    std::vector<std::string> ids() const;

    bool operator==(const NetworkInstance&) const = default;

private:
    std::vector<AccessPoint> aps_;
    Matrix ap_pl_;
    std::vector<std::vector<bool>> overlap_;
};

/// Complete RP x AP path-loss matrix.
struct ReferencePointSet {
    Matrix rp_pl;
    std::vector<std::string> origin_ids;

    std::size_t size() const noexcept { return rp_pl.rows(); }

    /// Throws ValidationError unless complete, finite, non-negative and |APs| wide.
    void validate(std::size_t n_aps) const;
};

/// One transmit power level per AP, in AP order.
struct PowerConfig {
    std::vector<int> levels;

    bool operator==(const PowerConfig&) const = default;
    auto operator<=>(const PowerConfig&) const = default;
};

/// Throws ValidationError when some level is outside its AP's allowed set.
void check_feasible(const NetworkInstance& instance, const PowerConfig& config);

struct UtilityParams {
    double cs_threshold_dbm = -82.0;
    double epsilon = 1e-9;
};

} // namespace uatpc
