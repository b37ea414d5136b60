#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "uatpc/errors.hpp"
#include "uatpc/selection.hpp"
#include "uatpc/synth.hpp"

using namespace uatpc;

namespace {

double dist(const Point3& a, const Point3& b)
{
    return std::sqrt(KdTree::squared_distance(a, b));
}

Embedding cloud(std::size_t n, std::uint64_t seed, double side = 10.0)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, side);
    Embedding e;
    e.coords = Matrix(n, 3);
    for (auto& v : e.coords.data()) {
        v = u(rng);
    }
    return e;
}

Matrix blobs(std::size_t per_blob, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 2.0);
    Matrix m(2 * per_blob, 10);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const double center = r < per_blob ? 60.0 : 90.0;
        for (std::size_t c = 0; c < 10; ++c) {
            m(r, c) = center + g(rng);
        }
    }
    return m;
}

// Purity of the best 2-means split of the embedding.
double two_means_purity(const Embedding& e, std::size_t per_blob)
{
    const auto pts = e.points();
    Point3 c0 = pts.front();
    Point3 c1 = pts.back();
    std::vector<int> label(pts.size());
    for (int it = 0; it < 50; ++it) {
        Point3 s0{}, s1{};
        std::size_t n0 = 0, n1 = 0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            label[i] = dist(pts[i], c0) <= dist(pts[i], c1) ? 0 : 1;
            auto& s = label[i] == 0 ? s0 : s1;
            for (int d = 0; d < 3; ++d) {
                s[d] += pts[i][d];
            }
            (label[i] == 0 ? n0 : n1)++;
        }
        for (int d = 0; d < 3; ++d) {
            if (n0) {
                c0[d] = s0[d] / static_cast<double>(n0);
            }
            if (n1) {
                c1[d] = s1[d] / static_cast<double>(n1);
            }
        }
    }
    std::size_t agree = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        agree += (label[i] == 0) == (i < per_blob) ? 1 : 0;
    }
    const double p = static_cast<double>(agree) / static_cast<double>(pts.size());
    return std::max(p, 1.0 - p);
}

} // namespace

TEST(Pca, SubspaceDistancesPreserved)
{
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g(0.0, 1.0);
    // 3-D latent points mapped affinely into 12 dimensions.
    Matrix basis(3, 12);
    for (auto& v : basis.data()) {
        v = g(rng);
    }
    Matrix data(60, 12);
    for (std::size_t r = 0; r < 60; ++r) {
        const double z[3] = {g(rng) * 5, g(rng) * 3, g(rng)};
        for (std::size_t c = 0; c < 12; ++c) {
            data(r, c) = 70.0 + z[0] * basis(0, c) + z[1] * basis(1, c) + z[2] * basis(2, c);
        }
    }
    auto e = pca_project(data);
    auto pts = e.points();
    for (std::size_t i = 0; i < 60; i += 7) {
        for (std::size_t j = i + 1; j < 60; j += 5) {
            double orig = 0.0;
            for (std::size_t c = 0; c < 12; ++c) {
                orig += (data(i, c) - data(j, c)) * (data(i, c) - data(j, c));
            }
            orig = std::sqrt(orig);
            EXPECT_NEAR(dist(pts[i], pts[j]), orig, 1e-6 * orig);
        }
    }
}

TEST(Pca, DuplicateRowsAndRankDeficiency)
{
    Matrix m(5, 4, 0.0);
    for (std::size_t r = 0; r < 5; ++r) {
        m(r, 0) = static_cast<double>(r);
        m(r, 1) = 2.0 * static_cast<double>(r);
    }
    m.row(4)[0] = m(3, 0);
    m.row(4)[1] = m(3, 1);
    auto e = pca_project(m);
    for (std::size_t d = 0; d < 3; ++d) {
        EXPECT_EQ(e.coords(3, d), e.coords(4, d));
    }
    // Only one direction has variance: trailing coordinates are zero.
    for (std::size_t r = 0; r < 5; ++r) {
        EXPECT_NEAR(e.coords(r, 1), 0.0, 1e-9);
        EXPECT_NEAR(e.coords(r, 2), 0.0, 1e-9);
    }
}

TEST(Pca, ReconstructionErrorEqualsDiscardedEigenvalues)
{
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(40.0, 110.0);
    Matrix m(100, 33);
    for (auto& v : m.data()) {
        v = u(rng);
    }
    auto model = pca_fit(m, 3);
    double err = 0.0;
    for (std::size_t r = 0; r < 100; ++r) {
        std::vector<double> centered(33);
        for (std::size_t c = 0; c < 33; ++c) {
            centered[c] = m(r, c) - model.mean[c];
        }
        std::vector<double> recon(33, 0.0);
        for (std::size_t k = 0; k < 3; ++k) {
            double proj = 0.0;
            for (std::size_t c = 0; c < 33; ++c) {
                proj += centered[c] * model.components(k, c);
            }
            for (std::size_t c = 0; c < 33; ++c) {
                recon[c] += proj * model.components(k, c);
            }
        }
        for (std::size_t c = 0; c < 33; ++c) {
            err += (centered[c] - recon[c]) * (centered[c] - recon[c]);
        }
    }
    double discarded = 0.0;
    for (std::size_t k = 3; k < model.eigenvalues.size(); ++k) {
        discarded += model.eigenvalues[k];
    }
    // Covariance uses the 1/n normalization.
    EXPECT_NEAR(err / 100.0, discarded, 1e-8 * discarded);
    // Sign convention: largest-magnitude loading is positive.
    for (std::size_t k = 0; k < 3; ++k) {
        double best = 0.0;
        for (std::size_t c = 0; c < 33; ++c) {
            if (std::abs(model.components(k, c)) > std::abs(best)) {
                best = model.components(k, c);
            }
        }
        EXPECT_GT(best, 0.0);
    }
}

TEST(Tsne, PreconditionsAndDeterminism)
{
    auto m = blobs(25, 1);
    TsneOptions o;
    o.perplexity = 40;
    EXPECT_THROW(tsne_project(m, o), ValidationError);
    o.perplexity = 5;
    o.iterations = 300;
    o.seed = 3;
    auto a = tsne_project(m, o);
    auto b = tsne_project(m, o);
    EXPECT_EQ(a.embedding.coords, b.embedding.coords);
    EXPECT_LT(a.kl_final, a.kl_initial);
}

TEST(Tsne, SeparatesTwoBlobs)
{
    auto m = blobs(60, 2);
    TsneOptions o;
    o.perplexity = 15;
    o.iterations = 500;
    o.seed = 1;
    auto r = tsne_project(m, o);
    EXPECT_LT(r.kl_final, r.kl_initial);
    EXPECT_GE(two_means_purity(r.embedding, 60), 0.95);
}

TEST(Uniform, Basics)
{
    auto all = uniform_select(10, 10, 1);
    EXPECT_EQ(all.selected_indices.size(), 10u);
    EXPECT_TRUE(uniform_select(10, 0, 1).selected_indices.empty());
    EXPECT_THROW(uniform_select(3, 4, 1), ValidationError);
    auto s = uniform_select(1000, 100, 7);
    EXPECT_EQ(std::set<std::size_t>(s.selected_indices.begin(), s.selected_indices.end()).size(), 100u);
    EXPECT_EQ(s.selected_indices, uniform_select(1000, 100, 7).selected_indices);
}

TEST(Uniform, PreservesHotspotFraction)
{
    HotspotParams h;
    h.n_aps = 1;
    h.seed = 3;
    auto sc = gen_hotspot_scenario(h);
    double total = 0.0;
    const int draws = 1000;
    for (int s = 0; s < draws; ++s) {
        auto sel = uniform_select(sc.sta_positions.size(), 200, static_cast<std::uint64_t>(s));
        std::size_t hot = 0;
        for (auto i : sel.selected_indices) {
            hot += sc.sta_hotspot[i] >= 0 ? 1 : 0;
        }
        total += static_cast<double>(hot) / 200.0;
    }
    EXPECT_NEAR(total / draws, 0.9, 0.03);
}

TEST(Stratified, SeparationCoverageAndPartition)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto e = cloud(1000, seed);
        const auto pts = e.points();
        for (double r : {0.3, 1.0, 2.0}) {
            auto sel = stratified_select(e, r, seed);
            std::vector<char> chosen(pts.size(), 0);
            for (auto i : sel.selected_indices) {
                chosen[i] = 1;
            }
            for (std::size_t a = 0; a < sel.selected_indices.size(); ++a) {
                for (std::size_t b = a + 1; b < sel.selected_indices.size(); ++b) {
                    ASSERT_GT(dist(pts[sel.selected_indices[a]], pts[sel.selected_indices[b]]), r);
                }
            }
            for (std::size_t i = 0; i < pts.size(); ++i) {
                if (chosen[i]) {
                    continue;
                }
                bool covered = false;
                for (auto s : sel.selected_indices) {
                    if (dist(pts[i], pts[s]) <= r) {
                        covered = true;
                        break;
                    }
                }
                ASSERT_TRUE(covered);
            }
        }
    }
}

TEST(Stratified, RadiusExtremes)
{
    auto e = cloud(200, 5);
    EXPECT_EQ(stratified_select(e, 1e-9, 1).selected_indices.size(), 200u);
    EXPECT_EQ(stratified_select(e, 1000.0, 1).selected_indices.size(), 1u);
    EXPECT_THROW(stratified_select(e, 0.0, 1), ValidationError);
}

TEST(Stratified, CountDecreasesWithRadiusOnHotspots)
{
    HotspotParams h;
    h.n_aps = 1;
    h.seed = 8;
    auto sc = gen_hotspot_scenario(h);
    std::vector<std::array<double, 2>> xy;
    for (const auto& p : sc.sta_positions) {
        xy.push_back({p.x, p.y});
    }
    auto e = embed_positions(xy);
    std::size_t prev = SIZE_MAX;
    // Radii are fractions of the 100 m side.
    for (double r : {0.05, 0.1, 0.2, 0.4}) {
        const auto n = stratified_select(e, r * 100.0 / 10.0, 1).selected_indices.size();
        EXPECT_LT(n, prev);
        prev = n;
    }
}

TEST(Neighbors, CountsMatchOracle)
{
    Embedding two;
    two.coords = Matrix(2, 3, 1.0);
    EXPECT_EQ(neighbor_counts(two, 0.1), (std::vector<std::size_t>{1, 1}));
    Embedding one;
    one.coords = Matrix(1, 3, 0.0);
    EXPECT_EQ(neighbor_counts(one, 5.0), (std::vector<std::size_t>{0}));

    Embedding five;
    five.coords = Matrix(5, 3, 0.0);
    const double xs[5] = {0.0, 1.0, 1.5, 4.0, 4.2};
    for (std::size_t i = 0; i < 5; ++i) {
        five.coords(i, 0) = xs[i];
    }
    // r = 1: 0-1, 1-1.5, 4-4.2 are neighbours; 0-1.5 is not.
    EXPECT_EQ(neighbor_counts(five, 1.0), (std::vector<std::size_t>{1, 2, 1, 1, 1}));
}

TEST(SelectionJson, RoundTrip)
{
    auto sel = stratified_select(cloud(50, 1), 1.0, 4);
    auto back = parse_selection(selection_to_json(sel));
    EXPECT_EQ(back.selected_indices, sel.selected_indices);
    EXPECT_EQ(back.radius, sel.radius);
    EXPECT_EQ(back.method, SelectionMethod::stratified);
    EXPECT_THROW(parse_selection(R"({"method":"magic","seed":1,"selected_indices":[]})"), ValidationError);
}

TEST(RadiusQuantile, MatchesSortedPairDistances)
{
    auto e = cloud(40, 2);
    const auto pts = e.points();
    std::vector<double> d;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            d.push_back(dist(pts[i], pts[j]));
        }
    }
    std::sort(d.begin(), d.end());
    const auto k = static_cast<std::size_t>(0.1 * static_cast<double>(d.size() - 1));
    EXPECT_DOUBLE_EQ(radius_from_quantile(e, 0.1, 1), d[k]);
}
