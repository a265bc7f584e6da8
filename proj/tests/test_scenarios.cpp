#include <cmath>

#include <gtest/gtest.h>

#include "v2vpeb/scenarios.hpp"

using namespace v2vpeb;

TEST(Presets, LookupByName) {
    EXPECT_EQ(preset("cfg_3p5GHz")->rx_elements, 4u);
    EXPECT_EQ(preset("cfg_28GHz")->tx_elements, 25u);
    EXPECT_DOUBLE_EQ(preset("cfg_28GHz")->subcarrier_spacing, 240e3);
    EXPECT_FALSE(preset("cfg_60GHz").has_value());
}

TEST(Grids, OvertakingHas241Rows) {
    const Evaluator ev(preset_3p5ghz());
    const auto pts = overtaking_grid(ev);
    ASSERT_EQ(pts.size(), 241u);
    EXPECT_DOUBLE_EQ(pts.front().y(), -30.0);
    EXPECT_DOUBLE_EQ(pts.back().y(), 30.0);
    EXPECT_DOUBLE_EQ(pts[120].y(), 0.0);
    for (const auto& q : pts) EXPECT_DOUBLE_EQ(q.x(), -3.5);
}

TEST(Grids, PlatooningStartsOneStepBehind) {
    const Evaluator ev(preset_3p5ghz());
    const auto rows = platooning_sweep(ev);
    ASSERT_EQ(rows.size(), 102u);
    EXPECT_NEAR(rows.front().d_y, 0.25, 1e-12);
    EXPECT_NEAR(rows.back().d_y, 25.5, 1e-12);
    EXPECT_NEAR(rows.front().q_y, -4.75, 1e-12);
}

TEST(Grids, BadStepThrows) {
    const Evaluator ev(preset_3p5ghz());
    EXPECT_THROW(overtaking_grid(ev, -30.0, 30.0, 0.0), Error);
    EXPECT_THROW(overtaking_grid(ev, 5.0, -5.0), Error);
}

TEST(Evaluator, CalibratedPowerIsPositiveAndDeterministic) {
    const Evaluator a(preset_28ghz()), b(preset_28ghz());
    EXPECT_GT(a.total_power(), 0.0);
    EXPECT_EQ(a.total_power(), b.total_power());
    EXPECT_EQ(a.betas().size(), 4u);
}

TEST(Evaluator, RejectsInvalidConfig) {
    SystemConfig c = preset_3p5ghz();
    c.lane_width = 0.0;
    EXPECT_THROW(Evaluator{c}, Error);
    c = preset_3p5ghz();
    c.occupied_half = 1100;
    EXPECT_THROW(Evaluator{c}, Error);
}

TEST(Sweeps, HigherBandDominatesAtEveryRow) {
    const Evaluator lo(preset_3p5ghz()), hi(preset_28ghz());
    const auto a = overtaking_sweep(lo), b = overtaking_sweep(hi);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_LT(b[i].peb_lat_both, a[i].peb_lat_both);
        EXPECT_LT(b[i].peb_lon_both, a[i].peb_lon_both);
        EXPECT_LT(b[i].peb_lat_aoa, a[i].peb_lat_aoa);
        EXPECT_LT(b[i].peb_lon_aoa, a[i].peb_lon_aoa);
    }
}

TEST(Sweeps, OvertakingMirrorSymmetry) {
    const Evaluator ev(preset_3p5ghz());
    for (double y : {1.0, 4.75, 12.5, 27.0}) {
        const SweepRow a = ev.evaluate({-3.5, y}), b = ev.evaluate({-3.5, -y});
        EXPECT_EQ(a.n_links, b.n_links);
        EXPECT_NEAR(a.peb_lat_both / b.peb_lat_both, 1.0, 1e-12);
        EXPECT_NEAR(a.peb_lon_both / b.peb_lon_both, 1.0, 1e-12);
        EXPECT_NEAR(a.peb_lat_aoa / b.peb_lat_aoa, 1.0, 1e-12);
        EXPECT_NEAR(a.oeb_both / b.oeb_both, 1.0, 1e-12);
    }
}

TEST(Sweeps, PlatooningBoundsGrowWithGap) {
    for (const auto& cfg : {preset_3p5ghz(), preset_28ghz()}) {
        const auto rows = platooning_sweep(Evaluator(cfg));
        for (std::size_t i = 1; i < rows.size(); ++i) {
            EXPECT_GE(rows[i].peb_lat_both, rows[i - 1].peb_lat_both);
            EXPECT_GE(rows[i].peb_lon_both, rows[i - 1].peb_lon_both);
            EXPECT_GE(rows[i].peb_lat_aoa, rows[i - 1].peb_lat_aoa);
            EXPECT_GE(rows[i].peb_lon_aoa, rows[i - 1].peb_lon_aoa);
        }
    }
}

TEST(Sweeps, FarOvertakingBoundsGrowWithDistance) {
    const Evaluator ev(preset_3p5ghz());
    double prev_lat = 0.0, prev_lon = 0.0;
    for (double y = 10.0; y <= 30.0; y += 0.5) {
        const SweepRow r = ev.evaluate({-3.5, y});
        EXPECT_GT(r.peb_lat_both, prev_lat);
        EXPECT_GT(r.peb_lon_both, prev_lon);
        prev_lat = r.peb_lat_both;
        prev_lon = r.peb_lon_both;
    }
}

TEST(Crossing, BisectionOnLinearBound) {
    const Crossing c = requirement_crossing([](double x) { return x; }, 0.0, 10.0, 4.2, 1e-6);
    EXPECT_EQ(c.kind, Crossing::Kind::Crossing);
    EXPECT_NEAR(c.distance, 4.2, 1e-6);
}

TEST(Crossing, MetEverywhereAndNowhere) {
    EXPECT_EQ(requirement_crossing([](double) { return 0.0; }, 0.0, 1.0, 1.0).kind, Crossing::Kind::MetEverywhere);
    EXPECT_EQ(requirement_crossing([](double) { return 5.0; }, 0.0, 1.0, 1.0).kind, Crossing::Kind::MetNowhere);
    EXPECT_THROW(requirement_crossing([](double x) { return x; }, 1.0, 0.0, 0.5), Error);
}

TEST(Crossing, InfiniteBoundCountsAsNotMet) {
    const Crossing c =
        requirement_crossing([](double x) { return x < 2.0 ? 0.0 : INFINITY; }, 0.0, 10.0, 1.0, 1e-6);
    EXPECT_NEAR(c.distance, 2.0, 1e-6);
}

TEST(Crossing, OvertakingLateralAtThreePointFiveGhz) {
    const Evaluator ev(preset_3p5ghz());
    const Crossing c = overtaking_crossing(ev, Axis::Lateral, Measurement::AoaTdoa);
    ASSERT_EQ(c.kind, Crossing::Kind::Crossing);
    EXPECT_NEAR(c.distance, 24.53, 0.05);
    // The bound at the crossing agrees with the threshold.
    EXPECT_LE(ev.evaluate({-3.5, c.distance}).peb_lat_both, 0.1);
    EXPECT_GT(ev.evaluate({-3.5, c.distance + 0.02}).peb_lat_both, 0.1);
}
