#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "uatpc/types.hpp"

namespace uatpc {

/// Fully connected ReLU network with a linear scalar output.
class Mlp {
public:
    struct Layer {
        std::size_t in = 0;
        std::size_t out = 0;
        std::vector<double> weights; // out x in, row-major
        std::vector<double> bias;

        bool operator==(const Layer&) const = default;
    };

    Mlp() = default;

    /// `sizes` = {inputs, hidden..., 1}; He-uniform initialization from `seed`.
    Mlp(std::span<const std::size_t> sizes, std::uint64_t seed);

    std::size_t input_size() const { return layers_.empty() ? 0 : layers_.front().in; }
    std::size_t parameter_count() const;
    std::vector<std::size_t> sizes() const;

    double predict(std::span<const double> x) const;

    /// One prediction per row of `x`.
    std::vector<double> predict(const Matrix& x) const;

    std::vector<Layer>& layers() { return layers_; }
    const std::vector<Layer>& layers() const { return layers_; }

    bool operator==(const Mlp&) const = default;

private:
    std::vector<Layer> layers_;
};

/// Adam on mean squared error.
class AdamTrainer {
public:
    explicit AdamTrainer(Mlp& net, double learning_rate = 1e-3, double beta1 = 0.9, double beta2 = 0.999,
                         double eps = 1e-8);

    /// One update on the rows of `x` listed in `batch`; returns the batch MSE
    /// before the update.
    double step(const Matrix& x, std::span<const double> y, std::span<const std::size_t> batch);

private:
    Mlp& net_;
    double lr_;
    double beta1_;
    double beta2_;
    double eps_;
    long t_ = 0;
    std::vector<std::vector<double>> m_w_, v_w_, m_b_, v_b_;
};

} // namespace uatpc
