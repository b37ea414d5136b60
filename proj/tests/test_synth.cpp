#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "uatpc/io.hpp"
#include "uatpc/synth.hpp"

using namespace uatpc;

TEST(Pathloss, LogDistanceArithmetic)
{
    PathLossParams p;
    EXPECT_DOUBLE_EQ(pathloss(1.0, p), 40.0);
    EXPECT_DOUBLE_EQ(pathloss(10.0, p), 70.0);
    EXPECT_DOUBLE_EQ(pathloss(100.0, p), 100.0);
    EXPECT_DOUBLE_EQ(pathloss(0.2, p), 40.0); // inside the reference distance
}

TEST(Uniform, DeterministicPerSeed)
{
    ScenarioParams p;
    p.seed = 17;
    auto a = gen_uniform_scenario(p);
    auto b = gen_uniform_scenario(p);
    EXPECT_EQ(a.rp_pl, b.rp_pl);
    EXPECT_EQ(instance_to_json(a.instance), instance_to_json(b.instance));
    p.seed = 18;
    EXPECT_NE(gen_uniform_scenario(p).rp_pl, a.rp_pl);
}

TEST(Uniform, SingleApHasZeroApMatrix)
{
    ScenarioParams p;
    p.n_aps = 1;
    auto s = gen_uniform_scenario(p);
    ASSERT_EQ(s.instance.ap_pl().rows(), 1u);
    EXPECT_EQ(s.instance.ap_pl()(0, 0), 0.0);
}

TEST(Uniform, PathLossesReproduceFromPositions)
{
    ScenarioParams p;
    p.seed = 3;
    auto s = gen_uniform_scenario(p);
    ASSERT_EQ(s.rp_pl.rows(), 330u);
    ASSERT_EQ(s.rp_pl.cols(), 33u);
    for (std::size_t r = 0; r < s.rp_pl.rows(); ++r) {
        for (std::size_t a = 0; a < s.rp_pl.cols(); ++a) {
            const double d = std::hypot(s.sta_positions[r].x - s.ap_positions[a].x,
                                        s.sta_positions[r].y - s.ap_positions[a].y);
            EXPECT_NEAR(s.rp_pl(r, a), 40.0 + 30.0 * std::log10(std::max(d, 1.0)), 1e-9);
        }
    }
    for (std::size_t a = 0; a < 33; ++a) {
        for (std::size_t b = 0; b < 33; ++b) {
            EXPECT_EQ(s.instance.ap_pl()(a, b), s.instance.ap_pl()(b, a));
        }
    }
    for (const auto& pt : s.sta_positions) {
        EXPECT_GE(pt.x, 0.0);
        EXPECT_LE(pt.x, 100.0);
    }
}

TEST(Uniform, ChannelPlan)
{
    ScenarioParams p;
    p.n_aps = 3;
    p.channels = std::vector<int>{36, 40, 36};
    auto s = gen_uniform_scenario(p);
    EXPECT_TRUE(s.instance.overlaps(0, 2));
    EXPECT_FALSE(s.instance.overlaps(0, 1));
}

TEST(Hotspot, ZeroClusteringMatchesUniformPlacement)
{
    ScenarioParams u;
    u.n_stas = 200;
    u.seed = 5;
    HotspotParams h;
    h.n_stas = 200;
    h.clustered_fraction = 0.0;
    h.seed = 5;
    auto a = gen_uniform_scenario(u);
    auto b = gen_hotspot_scenario(h);
    ASSERT_EQ(a.sta_positions.size(), b.sta_positions.size());
    for (std::size_t i = 0; i < a.sta_positions.size(); ++i) {
        EXPECT_EQ(a.sta_positions[i].x, b.sta_positions[i].x);
        EXPECT_EQ(a.sta_positions[i].y, b.sta_positions[i].y);
    }
    EXPECT_EQ(a.rp_pl, b.rp_pl);
}

TEST(Hotspot, TightClustersSitOnCenters)
{
    HotspotParams h;
    h.n_stas = 500;
    h.clustered_fraction = 1.0;
    h.cluster_sigma_m = 1e-9;
    auto s = gen_hotspot_scenario(h);
    for (std::size_t i = 0; i < s.sta_positions.size(); ++i) {
        ASSERT_GE(s.sta_hotspot[i], 0);
        const auto& c = s.hotspot_centers[static_cast<std::size_t>(s.sta_hotspot[i])];
        EXPECT_NEAR(s.sta_positions[i].x, c.x, 1e-6);
        EXPECT_NEAR(s.sta_positions[i].y, c.y, 1e-6);
    }
}

TEST(Hotspot, DefaultsConcentrateAroundCenters)
{
    HotspotParams h;
    h.seed = 2;
    auto s = gen_hotspot_scenario(h);
    ASSERT_EQ(s.sta_positions.size(), 10000u);
    std::size_t near = 0;
    for (const auto& p : s.sta_positions) {
        for (const auto& c : s.hotspot_centers) {
            if (std::hypot(p.x - c.x, p.y - c.y) <= 3.0 * h.cluster_sigma_m) {
                ++near;
                break;
            }
        }
    }
    EXPECT_GE(static_cast<double>(near) / 10000.0, 0.85);
}

TEST(Obfuscate, HandBuiltRowKeepsNearest)
{
    auto inst = fixtures::instance(4, {4});
    Matrix gt(1, 4);
    gt(0, 0) = 70;
    gt(0, 1) = 50;
    gt(0, 2) = 80;
    gt(0, 3) = 60;
    auto recs = obfuscate(gt, inst, 2);
    ASSERT_EQ(recs.size(), 1u);
    EXPECT_EQ(recs[0].pl.size(), 2u);
    EXPECT_EQ(recs[0].pl.at("ap1"), 50);
    EXPECT_EQ(recs[0].pl.at("ap3"), 60);
    EXPECT_EQ(recs[0].serving_ap, "ap1");
    auto one = obfuscate(gt, inst, 1);
    EXPECT_EQ(one[0].pl.size(), 1u);
    EXPECT_EQ(one[0].pl.count(one[0].serving_ap), 1u);
}

TEST(Obfuscate, InvariantsOnScenario)
{
    ScenarioParams p;
    p.seed = 9;
    auto s = gen_uniform_scenario(p);
    auto full = obfuscate(s.rp_pl, s.instance, 33);
    for (std::size_t r = 0; r < full.size(); ++r) {
        ASSERT_EQ(full[r].pl.size(), 33u);
        for (std::size_t a = 0; a < 33; ++a) {
            EXPECT_EQ(full[r].pl.at(s.instance.ap(a).id), s.rp_pl(r, a));
        }
    }
    for (std::size_t k : {1u, 2u, 6u}) {
        auto recs = obfuscate(s.rp_pl, s.instance, k);
        for (std::size_t r = 0; r < recs.size(); ++r) {
            EXPECT_EQ(recs[r].pl.size(), k);
            EXPECT_EQ(recs[r].pl.count(recs[r].serving_ap), 1u);
            double kept_max = 0.0;
            for (const auto& [id, v] : recs[r].pl) {
                kept_max = std::max(kept_max, v);
            }
            std::size_t below = 0;
            for (std::size_t a = 0; a < 33; ++a) {
                below += s.rp_pl(r, a) < kept_max ? 1 : 0;
            }
            EXPECT_LT(below, k);
        }
    }
}
