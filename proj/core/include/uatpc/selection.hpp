#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "uatpc/kdtree.hpp"
#include "uatpc/types.hpp"

namespace uatpc {

enum class ProjectionMethod { pca, tsne, identity };

std::string to_string(ProjectionMethod m);
ProjectionMethod parse_projection(const std::string& name);

/// N x 3 latent coordinates.
struct Embedding {
    Matrix coords;
    ProjectionMethod method = ProjectionMethod::pca;
    std::string method_params;

    std::size_t size() const noexcept { return coords.rows(); }
    std::vector<Point3> points() const;
};

struct PcaModel {
    std::vector<double> mean;
    Matrix components;                // dims x D, rows are unit principal directions
    std::vector<double> eigenvalues;  // all D covariance eigenvalues, descending
};

/// Principal axes of the row cloud; the largest-magnitude loading of each
/// component is made positive.
PcaModel pca_fit(const Matrix& data, std::size_t dims = 3);

/// Mean-centered projection onto the top principal directions. Directions
/// with (numerically) zero variance produce zero coordinates; the output is
/// always three columns wide.
Embedding pca_project(const Matrix& pl_matrix, std::size_t dims = 3);

struct TsneOptions {
    double perplexity = 40.0;
    int iterations = 2500;
    std::uint64_t seed = 0;
    double learning_rate = 200.0;
    double early_exaggeration = 12.0;
    int exaggeration_iterations = 250;
    std::size_t max_points = 10000;
};

struct TsneResult {
    Embedding embedding;
    double kl_initial = 0.0;
    double kl_final = 0.0;
};

/// Exact t-SNE into three dimensions, initialized from PCA.
TsneResult tsne_project(const Matrix& pl_matrix, const TsneOptions& options = {});

/// Points of a 2-D layout lifted into the embedding space (z = 0).
Embedding embed_positions(const std::vector<std::array<double, 2>>& xy);

enum class SelectionMethod { uniform, stratified };

std::string to_string(SelectionMethod m);

struct SelectionResult {
    std::vector<std::size_t> selected_indices; // ascending
    std::optional<double> radius;
    SelectionMethod method = SelectionMethod::uniform;
    std::uint64_t seed = 0;
};

/// k distinct indices drawn uniformly without replacement.
SelectionResult uniform_select(std::size_t n_total, std::size_t k, std::uint64_t seed);

/// Visits points in a seeded random order; an unmarked point is selected and
/// every unmarked point within distance r of it is discarded.
SelectionResult stratified_select(const Embedding& embedding, double r, std::uint64_t seed);

/// Number of other points within distance r of each point.
std::vector<std::size_t> neighbor_counts(const Embedding& embedding, double r);

/// q-quantile of pairwise embedded distances, estimated from at most
/// max_pairs seeded random pairs (all pairs when fewer exist).
double radius_from_quantile(const Embedding& embedding, double q, std::uint64_t seed,
                            std::size_t max_pairs = 200000);

std::string selection_to_json(const SelectionResult& result);
SelectionResult parse_selection(const std::string& json_text);

/// `index,x,y,z`
std::string embedding_csv(const Embedding& embedding);

} // namespace uatpc
