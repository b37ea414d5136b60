#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "uatpc/errors.hpp"
#include "uatpc/random.hpp"
#include "uatpc/selection.hpp"

namespace uatpc {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMatrix> as_eigen(const Matrix& m)
{
    return {m.data().data(), static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols())};
}

} // namespace

std::string to_string(ProjectionMethod m)
{
    switch (m) {
    case ProjectionMethod::pca:
        return "pca";
    case ProjectionMethod::tsne:
        return "tsne";
    case ProjectionMethod::identity:
        return "identity";
    }
    return "unknown";
}

ProjectionMethod parse_projection(const std::string& name)
{
    if (name == "pca") {
        return ProjectionMethod::pca;
    }
    if (name == "tsne") {
        return ProjectionMethod::tsne;
    }
    if (name == "identity") {
        return ProjectionMethod::identity;
    }
    throw ValidationError("unknown projection: " + name);
}

std::vector<Point3> Embedding::points() const
{
    std::vector<Point3> pts(coords.rows());
    for (std::size_t i = 0; i < coords.rows(); ++i) {
        for (std::size_t d = 0; d < 3; ++d) {
            pts[i][d] = d < coords.cols() ? coords(i, d) : 0.0;
        }
    }
    return pts;
}

PcaModel pca_fit(const Matrix& data, std::size_t dims)
{
    if (data.rows() < dims || data.rows() == 0) {
        throw ValidationError("PCA needs at least " + std::to_string(dims) + " rows");
    }
    for (double v : data.data()) {
        if (!std::isfinite(v)) {
            throw ValidationError("PCA input must be complete and finite");
        }
    }
    const auto x = as_eigen(data);
    const Eigen::RowVectorXd mean = x.colwise().mean();
    const Eigen::MatrixXd centered = x.rowwise() - mean;
    const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(data.rows());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) {
        throw Error("PCA eigendecomposition failed");
    }

    const auto d = static_cast<Eigen::Index>(data.cols());
    PcaModel model;
    model.mean.assign(mean.data(), mean.data() + d);
    model.eigenvalues.resize(data.cols());
    for (Eigen::Index k = 0; k < d; ++k) {
        model.eigenvalues[k] = std::max(solver.eigenvalues()(d - 1 - k), 0.0);
    }
    const double top = model.eigenvalues.empty() ? 0.0 : model.eigenvalues.front();
    const double tol = std::max(top, 1.0) * 1e-12 * static_cast<double>(std::max<Eigen::Index>(d, 1));

    model.components = Matrix(dims, data.cols());
    for (std::size_t k = 0; k < dims && static_cast<Eigen::Index>(k) < d; ++k) {
        if (model.eigenvalues[k] <= tol) {
            continue; // rank deficient: leave a zero direction
        }
        Eigen::VectorXd v = solver.eigenvectors().col(d - 1 - static_cast<Eigen::Index>(k));
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0.0) {
            v = -v;
        }
        for (Eigen::Index c = 0; c < d; ++c) {
            model.components(k, static_cast<std::size_t>(c)) = v(c);
        }
    }
    return model;
}

Embedding pca_project(const Matrix& pl_matrix, std::size_t dims)
{
    if (dims == 0 || dims > 3) {
        throw ValidationError("embedding dimension must be 1..3");
    }
    const auto model = pca_fit(pl_matrix, dims);
    Embedding emb;
    emb.method = ProjectionMethod::pca;
    emb.method_params = "dims=" + std::to_string(dims);
    emb.coords = Matrix(pl_matrix.rows(), 3);
    for (std::size_t i = 0; i < pl_matrix.rows(); ++i) {
        const auto row = pl_matrix.row(i);
        for (std::size_t k = 0; k < dims; ++k) {
            double acc = 0.0;
            for (std::size_t c = 0; c < row.size(); ++c) {
                acc += (row[c] - model.mean[c]) * model.components(k, c);
            }
            emb.coords(i, k) = acc;
        }
    }
    return emb;
}

Embedding embed_positions(const std::vector<std::array<double, 2>>& xy)
{
    Embedding emb;
    emb.method = ProjectionMethod::identity;
    emb.coords = Matrix(xy.size(), 3);
    for (std::size_t i = 0; i < xy.size(); ++i) {
        emb.coords(i, 0) = xy[i][0];
        emb.coords(i, 1) = xy[i][1];
    }
    return emb;
}

namespace {

// Row-conditional affinities calibrated to the target perplexity, then
// symmetrized and normalized to sum to one.
RowMatrix joint_probabilities(const Matrix& x, double perplexity)
{
    const auto n = static_cast<Eigen::Index>(x.rows());
    const auto xe = as_eigen(x);
    const Eigen::VectorXd sq = xe.rowwise().squaredNorm();
    RowMatrix dist = (-2.0 * xe * xe.transpose()).colwise() + sq;
    dist.rowwise() += sq.transpose();
    dist = dist.cwiseMax(0.0);

    RowMatrix p = RowMatrix::Zero(n, n);
    const double target = std::log(perplexity);
    for (Eigen::Index i = 0; i < n; ++i) {
        double min_d = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j != i) {
                min_d = std::min(min_d, dist(i, j));
            }
        }
        double beta = 1.0;
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
        for (int iter = 0; iter < 200; ++iter) {
            double sum = 0.0;
            double weighted = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == i) {
                    p(i, j) = 0.0;
                    continue;
                }
                const double dj = dist(i, j) - min_d;
                p(i, j) = std::exp(-beta * dj);
                sum += p(i, j);
                weighted += dj * p(i, j);
            }
            const double entropy = std::log(sum) + beta * weighted / sum;
            p.row(i) /= sum;
            const double diff = entropy - target;
            if (std::abs(diff) < 1e-5) {
                break;
            }
            if (diff > 0.0) {
                lo = beta;
                beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
            } else {
                hi = beta;
                beta = std::isinf(lo) ? beta / 2.0 : 0.5 * (beta + lo);
            }
        }
    }
    RowMatrix joint = (p + p.transpose()) / (2.0 * static_cast<double>(n));
    return joint.cwiseMax(1e-12);
}

// Student-t kernel values with a zero diagonal; returns their sum.
double student_kernel(const RowMatrix& y, RowMatrix& num)
{
    const Eigen::VectorXd sq = y.rowwise().squaredNorm();
    num = (-2.0 * y * y.transpose()).colwise() + sq;
    num.rowwise() += sq.transpose();
    num = (num.cwiseMax(0.0).array() + 1.0).inverse().matrix();
    num.diagonal().setZero();
    return num.sum();
}

double kl_divergence(const RowMatrix& p, const RowMatrix& y)
{
    RowMatrix num;
    const double sum = student_kernel(y, num);
    double kl = 0.0;
    const auto n = p.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) {
                continue;
            }
            const double q = std::max(num(i, j) / sum, 1e-300);
            kl += p(i, j) * std::log(p(i, j) / q);
        }
    }
    return kl;
}

} // namespace

TsneResult tsne_project(const Matrix& pl_matrix, const TsneOptions& options)
{
    const auto n = pl_matrix.rows();
    if (n > options.max_points) {
        throw ValidationError("exact t-SNE is capped at " + std::to_string(options.max_points) +
                              " points; downsample first or use PCA");
    }
    if (n < 4 || options.perplexity >= (static_cast<double>(n) - 1.0) / 3.0) {
        throw ValidationError("perplexity " + std::to_string(options.perplexity) + " too large for " +
                              std::to_string(n) + " points");
    }
    if (options.iterations < 1 || options.perplexity <= 0.0) {
        throw ValidationError("t-SNE needs positive perplexity and iterations");
    }

    const RowMatrix p = joint_probabilities(pl_matrix, options.perplexity);

    auto init = pca_project(pl_matrix, 3);
    const auto ne = static_cast<Eigen::Index>(n);
    RowMatrix y(ne, 3);
    for (Eigen::Index i = 0; i < ne; ++i) {
        for (Eigen::Index d = 0; d < 3; ++d) {
            y(i, d) = init.coords(static_cast<std::size_t>(i), static_cast<std::size_t>(d));
        }
    }
    const double first_std = std::sqrt(y.col(0).squaredNorm() / static_cast<double>(n));
    if (first_std > 0.0) {
        y *= 1e-4 / first_std;
    }
    Rng rng(options.seed);
    std::normal_distribution<double> jitter(0.0, 1e-8);
    for (Eigen::Index i = 0; i < ne; ++i) {
        for (Eigen::Index d = 0; d < 3; ++d) {
            y(i, d) += jitter(rng);
        }
    }

    TsneResult result;
    result.kl_initial = kl_divergence(p, y);

    RowMatrix update = RowMatrix::Zero(ne, 3);
    RowMatrix gains = RowMatrix::Ones(ne, 3);
    RowMatrix num;
    RowMatrix grad(ne, 3);
    for (int iter = 0; iter < options.iterations; ++iter) {
        const bool exaggerate = iter < options.exaggeration_iterations;
        const double exag = exaggerate ? options.early_exaggeration : 1.0;
        const double momentum = exaggerate ? 0.5 : 0.8;

        const double sum = student_kernel(y, num);
        // Force weights W = (exag * P - Q) .* num; grad_i = 4 sum_j W_ij (y_i - y_j).
        const RowMatrix w = ((exag * p).array() - num.array() / sum).matrix().cwiseProduct(num);
        const Eigen::VectorXd wsum = w.rowwise().sum();
        grad = 4.0 * (wsum.asDiagonal() * y - w * y);

        for (Eigen::Index i = 0; i < ne; ++i) {
            for (Eigen::Index d = 0; d < 3; ++d) {
                const bool same_sign = (grad(i, d) > 0.0) == (update(i, d) > 0.0);
                gains(i, d) = same_sign ? std::max(gains(i, d) * 0.8, 0.01) : gains(i, d) + 0.2;
            }
        }
        update = momentum * update - options.learning_rate * gains.cwiseProduct(grad);
        y += update;
        y.rowwise() -= y.colwise().mean();
    }
    result.kl_final = kl_divergence(p, y);

    result.embedding.method = ProjectionMethod::tsne;
    result.embedding.method_params = "perplexity=" + std::to_string(options.perplexity) +
                                     ";iterations=" + std::to_string(options.iterations) +
                                     ";seed=" + std::to_string(options.seed);
    result.embedding.coords = Matrix(n, 3);
    for (Eigen::Index i = 0; i < ne; ++i) {
        for (Eigen::Index d = 0; d < 3; ++d) {
            result.embedding.coords(static_cast<std::size_t>(i), static_cast<std::size_t>(d)) = y(i, d);
        }
    }
    return result;
}

} // namespace uatpc
