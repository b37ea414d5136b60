#include "uatpc/mlp.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "uatpc/errors.hpp"
#include "uatpc/random.hpp"

namespace uatpc {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using WeightMap = Eigen::Map<RowMatrix>;
using ConstWeightMap = Eigen::Map<const RowMatrix>;

ConstWeightMap weights_of(const Mlp::Layer& l)
{
    return {l.weights.data(), static_cast<Eigen::Index>(l.out), static_cast<Eigen::Index>(l.in)};
}

WeightMap weights_of(Mlp::Layer& l)
{
    return {l.weights.data(), static_cast<Eigen::Index>(l.out), static_cast<Eigen::Index>(l.in)};
}

} // namespace

Mlp::Mlp(std::span<const std::size_t> sizes, std::uint64_t seed)
{
    if (sizes.size() < 2 || sizes.back() != 1) {
        throw ValidationError("network needs an input width and a scalar output");
    }
    Rng rng(seed);
    for (std::size_t k = 0; k + 1 < sizes.size(); ++k) {
        Layer l;
        l.in = sizes[k];
        l.out = sizes[k + 1];
        const double bound = std::sqrt(6.0 / static_cast<double>(l.in));
        std::uniform_real_distribution<double> u(-bound, bound);
        l.weights.resize(l.in * l.out);
        for (auto& w : l.weights) {
            w = u(rng);
        }
        l.bias.assign(l.out, 0.0);
        layers_.push_back(std::move(l));
    }
}

std::size_t Mlp::parameter_count() const
{
    std::size_t n = 0;
    for (const auto& l : layers_) {
        n += l.weights.size() + l.bias.size();
    }
    return n;
}

std::vector<std::size_t> Mlp::sizes() const
{
    std::vector<std::size_t> s;
    if (layers_.empty()) {
        return s;
    }
    s.push_back(layers_.front().in);
    for (const auto& l : layers_) {
        s.push_back(l.out);
    }
    return s;
}

double Mlp::predict(std::span<const double> x) const
{
    Matrix m(1, x.size());
    std::copy(x.begin(), x.end(), m.row(0).begin());
    return predict(m).front();
}

std::vector<double> Mlp::predict(const Matrix& x) const
{
    if (x.cols() != input_size()) {
        throw ValidationError("network input width mismatch");
    }
    RowMatrix a = Eigen::Map<const RowMatrix>(x.data().data(), static_cast<Eigen::Index>(x.rows()),
                                              static_cast<Eigen::Index>(x.cols()));
    for (std::size_t k = 0; k < layers_.size(); ++k) {
        const auto& l = layers_[k];
        Eigen::Map<const Eigen::RowVectorXd> b(l.bias.data(), static_cast<Eigen::Index>(l.out));
        RowMatrix z = a * weights_of(l).transpose();
        z.rowwise() += b;
        if (k + 1 < layers_.size()) {
            z = z.cwiseMax(0.0);
        }
        a = std::move(z);
    }
    return {a.data(), a.data() + a.rows()};
}

AdamTrainer::AdamTrainer(Mlp& net, double learning_rate, double beta1, double beta2, double eps)
    : net_(net), lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(eps)
{
    for (const auto& l : net_.layers()) {
        m_w_.emplace_back(l.weights.size(), 0.0);
        v_w_.emplace_back(l.weights.size(), 0.0);
        m_b_.emplace_back(l.bias.size(), 0.0);
        v_b_.emplace_back(l.bias.size(), 0.0);
    }
}

double AdamTrainer::step(const Matrix& x, std::span<const double> y, std::span<const std::size_t> batch)
{
    auto& layers = net_.layers();
    const auto n = static_cast<Eigen::Index>(batch.size());
    if (n == 0) {
        return 0.0;
    }
    RowMatrix input(n, static_cast<Eigen::Index>(x.cols()));
    Eigen::VectorXd target(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto row = x.row(batch[static_cast<std::size_t>(i)]);
        for (Eigen::Index c = 0; c < input.cols(); ++c) {
            input(i, c) = row[static_cast<std::size_t>(c)];
        }
        target(i) = y[batch[static_cast<std::size_t>(i)]];
    }

    // Forward, keeping activations.
    std::vector<RowMatrix> acts{input};
    for (std::size_t k = 0; k < layers.size(); ++k) {
        const auto& l = layers[k];
        Eigen::Map<const Eigen::RowVectorXd> b(l.bias.data(), static_cast<Eigen::Index>(l.out));
        RowMatrix z = acts.back() * weights_of(l).transpose();
        z.rowwise() += b;
        if (k + 1 < layers.size()) {
            z = z.cwiseMax(0.0);
        }
        acts.push_back(std::move(z));
    }
    const Eigen::VectorXd residual = acts.back().col(0) - target;
    const double mse = residual.squaredNorm() / static_cast<double>(n);

    // Backward.
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    RowMatrix delta = (2.0 / static_cast<double>(n)) * residual;
    for (std::size_t kk = layers.size(); kk-- > 0;) {
        auto& l = layers[kk];
        const RowMatrix grad_w = delta.transpose() * acts[kk];
        const Eigen::RowVectorXd grad_b = delta.colwise().sum();
        if (kk > 0) {
            RowMatrix back = delta * weights_of(l);
            delta = back.cwiseProduct((acts[kk].array() > 0.0).cast<double>().matrix());
        }
        auto apply = [&](std::vector<double>& param, std::vector<double>& m, std::vector<double>& v,
                         const double* g) {
            for (std::size_t i = 0; i < param.size(); ++i) {
                m[i] = beta1_ * m[i] + (1.0 - beta1_) * g[i];
                v[i] = beta2_ * v[i] + (1.0 - beta2_) * g[i] * g[i];
                param[i] -= lr_ * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps_);
            }
        };
        apply(l.weights, m_w_[kk], v_w_[kk], grad_w.data());
        apply(l.bias, m_b_[kk], v_b_[kk], grad_b.data());
    }
    return mse;
}

} // namespace uatpc
