#include <cmath>
#include <complex>

#include <gtest/gtest.h>

#include "v2vpeb/channel.hpp"
#include "v2vpeb/scenarios.hpp"

using namespace v2vpeb;

TEST(FreeSpaceGain, MagnitudeAndPhaseAtTenMeters) {
    const double lambda = kSpeedOfLight / 3.5e9;
    const std::complex<double> h = free_space_gain(10.0, lambda);
    EXPECT_NEAR(std::abs(h), 6.816e-4, 1e-7);
    const double phase = -2.0 * kPi * 10.0 / lambda;
    EXPECT_NEAR(std::arg(h), std::remainder(phase, 2.0 * kPi), 1e-9);
}

TEST(FreeSpaceGain, InverseDistance) {
    const double lambda = 0.01;
    EXPECT_NEAR(std::abs(free_space_gain(20.0, lambda)) * 2.0, std::abs(free_space_gain(10.0, lambda)), 1e-15);
}

TEST(FreeSpaceGain, ZeroDistanceThrows) {
    try {
        free_space_gain(0.0, 0.1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ZeroDistance);
    }
}

TEST(Calibration, ShortestSideBySideLinkHitsTargetSnr) {
    for (const auto& [cfg, target] : {std::pair{preset_3p5ghz(), 3981.07}, std::pair{preset_28ghz(), 1000.0}}) {
        const Evaluator ev(cfg);
        const Scene s = ev.scene_at({-cfg.lane_width, 0.0});
        const LinkSet links = active_links(s);
        const auto gains = link_gains(s, links);
        const std::size_t k = shortest_link(links);
        const double n_sub = static_cast<double>(s.allocation.sets[links[k].tx_panel].size());
        EXPECT_NEAR(gains[k].g / n_sub / target, 1.0, 1e-6);
        EXPECT_NEAR(gains[k].snr_after_bf_db, cfg.snr_db, 1e-9);
    }
}

TEST(Calibration, ShortestLinkIsTheFacingPair) {
    const Evaluator ev(preset_3p5ghz());
    const LinkSet links = active_links(ev.scene_at({-3.5, 0.0}));
    const Link& l = links[shortest_link(links)];
    EXPECT_NEAR(l.distance, 3.5 - 1.8, 1e-12);
}

TEST(InformationWeight, ProportionalToSymbolsAndPower) {
    const Evaluator ev(preset_3p5ghz());
    Scene s = ev.scene_at({-3.5, 10.0});
    const LinkSet links = active_links(s);
    const double g1 = information_weight(s, links[0], 1e-6);
    s.ofdm.n_symbols = 3;
    EXPECT_NEAR(information_weight(s, links[0], 1e-6) / g1, 3.0, 1e-12);
    s.ofdm.total_power *= 2.0;
    EXPECT_NEAR(information_weight(s, links[0], 1e-6) / g1, 6.0, 1e-12);
}

TEST(InformationWeight, DividesByPerPanelNoise) {
    const Evaluator ev(preset_3p5ghz());
    Scene s = ev.scene_at({-3.5, 10.0});
    const LinkSet links = active_links(s);
    const double g1 = information_weight(s, links[0], 1e-6);
    s.noise_variance[links[0].rx_panel] = 4.0;
    EXPECT_NEAR(information_weight(s, links[0], 1e-6) / g1, 0.25, 1e-12);
}

TEST(ShortestLink, EmptySetThrows) { EXPECT_THROW(shortest_link(LinkSet{}), Error); }
