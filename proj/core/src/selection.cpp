#include "uatpc/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "uatpc/errors.hpp"
#include "uatpc/io.hpp"
#include "uatpc/random.hpp"

namespace uatpc {

std::string to_string(SelectionMethod m)
{
    return m == SelectionMethod::uniform ? "uniform" : "stratified";
}

namespace {

std::vector<std::size_t> seeded_permutation(std::size_t n, Rng& rng)
{
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = n; i > 1; --i) {
        std::uniform_int_distribution<std::size_t> pick(0, i - 1);
        std::swap(perm[i - 1], perm[pick(rng)]);
    }
    return perm;
}

} // namespace

SelectionResult uniform_select(std::size_t n_total, std::size_t k, std::uint64_t seed)
{
    if (k > n_total) {
        throw ValidationError("cannot select " + std::to_string(k) + " of " + std::to_string(n_total) + " points");
    }
    Rng rng(seed);
    std::vector<std::size_t> idx(n_total);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n_total - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return {std::move(idx), std::nullopt, SelectionMethod::uniform, seed};
}

SelectionResult stratified_select(const Embedding& embedding, double r, std::uint64_t seed)
{
    if (!(r > 0.0)) {
        throw ValidationError("selection radius must be positive");
    }
    const KdTree tree(embedding.points());
    Rng rng(seed);
    const auto order = seeded_permutation(tree.size(), rng);
    std::vector<unsigned char> marked(tree.size(), 0);

    SelectionResult result;
    result.method = SelectionMethod::stratified;
    result.radius = r;
    result.seed = seed;
    for (auto i : order) {
        if (marked[i]) {
            continue;
        }
        marked[i] = 1;
        result.selected_indices.push_back(i);
        tree.for_each_in_radius(tree.point(i), r, [&](std::size_t j) { marked[j] = 1; });
    }
    std::sort(result.selected_indices.begin(), result.selected_indices.end());
    return result;
}

std::vector<std::size_t> neighbor_counts(const Embedding& embedding, double r)
{
    if (!(r > 0.0)) {
        throw ValidationError("neighbor radius must be positive");
    }
    const KdTree tree(embedding.points());
    std::vector<std::size_t> counts(tree.size());
    for (std::size_t i = 0; i < tree.size(); ++i) {
        counts[i] = tree.radius_count(tree.point(i), r) - 1; // exclude self
    }
    return counts;
}

double radius_from_quantile(const Embedding& embedding, double q, std::uint64_t seed, std::size_t max_pairs)
{
    if (q <= 0.0 || q >= 1.0) {
        throw ValidationError("radius quantile must lie in (0, 1)");
    }
    const auto pts = embedding.points();
    const auto n = pts.size();
    if (n < 2) {
        throw ValidationError("radius quantile needs at least two points");
    }
    std::vector<double> d;
    const double all_pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    if (all_pairs <= static_cast<double>(max_pairs)) {
        d.reserve(static_cast<std::size_t>(all_pairs));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                d.push_back(std::sqrt(KdTree::squared_distance(pts[i], pts[j])));
            }
        }
    } else {
        Rng rng(seed);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        d.reserve(max_pairs);
        while (d.size() < max_pairs) {
            const auto i = pick(rng);
            const auto j = pick(rng);
            if (i != j) {
                d.push_back(std::sqrt(KdTree::squared_distance(pts[i], pts[j])));
            }
        }
    }
    const auto k = static_cast<std::size_t>(q * static_cast<double>(d.size() - 1));
    std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
    return d[k];
}

std::string selection_to_json(const SelectionResult& result)
{
    nlohmann::json j{
        {"method", to_string(result.method)},
        {"seed", result.seed},
        {"count", result.selected_indices.size()},
        {"selected_indices", result.selected_indices},
    };
    j["radius"] = result.radius ? nlohmann::json(*result.radius) : nlohmann::json(nullptr);
    return j.dump(2);
}

SelectionResult parse_selection(const std::string& json_text)
{
    try {
        auto j = nlohmann::json::parse(json_text);
        SelectionResult r;
        const auto method = j.at("method").get<std::string>();
        if (method != "uniform" && method != "stratified") {
            throw ValidationError("unknown selection method: " + method);
        }
        r.method = method == "uniform" ? SelectionMethod::uniform : SelectionMethod::stratified;
        r.seed = j.at("seed").get<std::uint64_t>();
        r.selected_indices = j.at("selected_indices").get<std::vector<std::size_t>>();
        if (j.contains("radius") && !j["radius"].is_null()) {
            r.radius = j["radius"].get<double>();
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("selection schema error: ") + e.what());
    }
}

std::string embedding_csv(const Embedding& embedding)
{
    std::string out = "index,x,y,z\n";
    for (std::size_t i = 0; i < embedding.size(); ++i) {
        out += std::to_string(i);
        for (std::size_t d = 0; d < 3; ++d) {
            out += ',' + format_double(d < embedding.coords.cols() ? embedding.coords(i, d) : 0.0);
        }
        out += '\n';
    }
    return out;
}

} // namespace uatpc
