#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "v2vpeb/fim_closed.hpp"
#include "v2vpeb/scenarios.hpp"
#include "v2vpeb/selfcheck.hpp"

using namespace v2vpeb;

namespace {

struct Eval {
    Scene scene;
    LinkSet links;
    std::vector<LinkGain> gains;
};

Eval at(const Evaluator& ev, const Vec2& q, double at = 0.0, double ar = 0.0) {
    Eval e;
    e.scene = ev.scene_at(q, at, ar);
    e.links = active_links(e.scene);
    e.gains = link_gains(e.scene, e.links);
    return e;
}

LinkSet first_links(const LinkSet& all, std::size_t n) {
    LinkSet s;
    s.links.assign(all.links.begin(), all.links.begin() + static_cast<long>(n));
    return s;
}

std::vector<LinkGain> first_gains(const std::vector<LinkGain>& all, std::size_t n) {
    return {all.begin(), all.begin() + static_cast<long>(n)};
}

double min_eigenvalue(const Eigen::Matrix3d& m) {
    return Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(m, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

}  // namespace

TEST(Saaf, TwoElementArray) {
    const double d = 0.3;
    ArrayPanel p;
    p.elements = {{d / 2.0, 0.0}, {d / 2.0, kPi}};
    for (double th : {0.0, 0.4, kPi / 2.0, -2.0})
        EXPECT_NEAR(saaf(p, th), d * d / 4.0 * std::sin(th) * std::sin(th), 1e-15);
}

TEST(Saaf, RotationalAverageIsHalfMeanSquaredOffset) {
    const ArrayPanel p = build_conformal_panel(25, kSpeedOfLight / 28e9, 2);
    double msq = 0.0;
    for (const auto& e : p.elements) msq += e.distance * e.distance;
    msq /= 2.0 * static_cast<double>(p.elements.size());
    const int n = 4096;
    double avg = 0.0;
    for (int k = 0; k < n; ++k) avg += saaf(p, 2.0 * kPi * k / n);
    EXPECT_NEAR(avg / n / msq, 1.0, 1e-12);
}

TEST(Saaf, SingleElementAndEmptyAreZero) {
    EXPECT_EQ(saaf(build_conformal_panel(1, 0.1, 1), 0.3), 0.0);
    EXPECT_EQ(saaf(ArrayPanel{}, 0.3), 0.0);
}

TEST(NumericalRank, CountsRelativeToLargestEigenvalue) {
    EXPECT_EQ(numerical_rank(Eigen::Matrix3d::Zero()), 0);
    EXPECT_EQ(numerical_rank(Eigen::Vector3d(1.0, 1e-12, 0.0).asDiagonal()), 1);
    EXPECT_EQ(numerical_rank(Eigen::Vector3d(1.0, 1e-9, 1.0).asDiagonal()), 3);
}

TEST(Bounds, DiagonalFim) {
    const FimResult r = make_fim_result(Eigen::Vector3d(4.0, 100.0, 1.0).asDiagonal());
    EXPECT_DOUBLE_EQ(r.peb_lat, 0.5);
    EXPECT_DOUBLE_EQ(r.peb_lon, 0.1);
    EXPECT_DOUBLE_EQ(r.oeb, 1.0);
    EXPECT_FALSE(r.singular);
}

TEST(Bounds, SingularGivesInfinity) {
    const FimResult r = make_fim_result(Eigen::Vector3d(4.0, 0.0, 1.0).asDiagonal());
    EXPECT_TRUE(r.singular);
    EXPECT_TRUE(std::isinf(r.peb_lat));
    EXPECT_TRUE(std::isinf(r.peb_lon));
    EXPECT_TRUE(std::isinf(r.oeb));
}

TEST(Rank, SingleLinkAoaTdoaIsRankDeficient) {
    const Evaluator ev(preset_3p5ghz());
    const Eval e = at(ev, {-3.5, 12.0});
    const LinkSet one = first_links(e.links, 1);
    const FimResult r = efim_aoa_tdoa(e.scene, one, first_gains(e.gains, 1), ev.betas());
    EXPECT_LE(r.rank, 2);
    EXPECT_TRUE(std::isinf(r.peb_lat));
}

TEST(Rank, TwoLinksAoaOnlyIsRankDeficient) {
    const Evaluator ev(preset_28ghz());
    const Eval e = at(ev, {-3.5, 12.0});
    const FimResult r = efim_aoa_only(e.scene, first_links(e.links, 2), first_gains(e.gains, 2));
    EXPECT_LE(r.rank, 2);
}

TEST(Rank, TwoLinksFromOneTxPanelLeaveRotationUnobservable) {
    // Rotating the Tx about the shared panel centroid changes no measured quantity.
    const Evaluator ev(preset_3p5ghz());
    const Eval e = at(ev, {-3.5, 12.0});
    ASSERT_EQ(e.links[0].tx_panel, e.links[1].tx_panel);
    const FimResult r =
        efim_aoa_tdoa(e.scene, first_links(e.links, 2), first_gains(e.gains, 2), ev.betas());
    EXPECT_LE(r.rank, 2);
}

TEST(Rank, TwoLinksFromDistinctTxPanelsAreFullRank) {
    const Evaluator ev(preset_3p5ghz());
    const Eval e = at(ev, {-3.5, 12.0});
    std::size_t k = 1;
    while (e.links[k].tx_panel == e.links[0].tx_panel) ++k;
    LinkSet two;
    two.links = {e.links[0], e.links[k]};
    const FimResult r = efim_aoa_tdoa(e.scene, two, {e.gains[0], e.gains[k]}, ev.betas());
    EXPECT_EQ(r.rank, 3);
}

TEST(Rank, SingleElementPanelsCarryNoAngleInformation) {
    SystemConfig cfg = preset_3p5ghz();
    cfg.rx_elements = 1;
    cfg.tx_elements = 1;
    const Evaluator ev(cfg);
    const Eval e = at(ev, {-3.5, 12.0});
    const FimResult r = efim_aoa_only(e.scene, e.links, e.gains);
    EXPECT_TRUE(r.j_po.isZero(0.0));
    EXPECT_EQ(r.rank, 0);
}

TEST(Loewner, TdoaNeverRemovesInformation) {
    SceneSampler sampler(11);
    for (int i = 0; i < 40; ++i) {
        const RandomScene rs = sampler.next();
        const FimResult both = efim_aoa_tdoa(rs.scene, rs.links, rs.gains, rs.betas);
        const FimResult aoa = efim_aoa_only(rs.scene, rs.links, rs.gains);
        const Eigen::Matrix3d diff = both.j_po - aoa.j_po;
        EXPECT_GE(min_eigenvalue(diff), -1e-9 * both.j_po.norm());
        if (!aoa.singular) {
            EXPECT_LE(both.peb_lat, aoa.peb_lat * (1.0 + 1e-9));
            EXPECT_LE(both.peb_lon, aoa.peb_lon * (1.0 + 1e-9));
        }
    }
}

TEST(ZeroBandwidth, AoaTdoaCollapsesToAoaOnly) {
    const Evaluator ev(preset_3p5ghz());
    const Eval e = at(ev, {-3.5, 8.0});
    const std::vector<double> zero(ev.betas().size(), 0.0);
    const FimResult both = efim_aoa_tdoa(e.scene, e.links, e.gains, zero);
    const FimResult aoa = efim_aoa_only(e.scene, e.links, e.gains);
    EXPECT_TRUE(both.j_po.isApprox(aoa.j_po, 1e-15));
}

TEST(Scaling, PebScalesWithInverseRootOfSymbolCount) {
    SystemConfig cfg = preset_3p5ghz();
    const Evaluator ev1(cfg);
    const Scene s1 = ev1.scene_at({-3.5, 10.0});
    Scene s4 = s1;
    s4.ofdm.n_symbols = 4;
    const LinkSet links = active_links(s1);
    const FimResult r1 = efim_aoa_tdoa(s1, links, link_gains(s1, links), ev1.betas());
    const FimResult r4 = efim_aoa_tdoa(s4, links, link_gains(s4, links), ev1.betas());
    EXPECT_NEAR(r4.peb_lat / r1.peb_lat, 0.5, 1e-10);
    EXPECT_NEAR(r4.peb_lon / r1.peb_lon, 0.5, 1e-10);
    EXPECT_NEAR(r4.oeb / r1.oeb, 0.5, 1e-10);
}

TEST(Scaling, PebScalesWithInverseRootOfPower) {
    const Evaluator ev(preset_28ghz());
    Scene s = ev.scene_at({-3.5, 10.0});
    const LinkSet links = active_links(s);
    const FimResult r1 = efim_aoa_only(s, links, link_gains(s, links));
    s.ofdm.total_power *= 9.0;
    const FimResult r9 = efim_aoa_only(s, links, link_gains(s, links));
    EXPECT_NEAR(r9.peb_lat / r1.peb_lat, 1.0 / 3.0, 1e-10);
}

TEST(Invariance, AoaOnlyIgnoresSubcarrierSpacing) {
    SystemConfig a = preset_3p5ghz();
    SystemConfig b = a;
    b.subcarrier_spacing = 15e3;
    const SweepRow ra = Evaluator(a).evaluate({-3.5, 14.0});
    const SweepRow rb = Evaluator(b).evaluate({-3.5, 14.0});
    EXPECT_EQ(ra.peb_lat_aoa, rb.peb_lat_aoa);
    EXPECT_EQ(ra.peb_lon_aoa, rb.peb_lon_aoa);
    EXPECT_EQ(ra.oeb_aoa, rb.oeb_aoa);
    EXPECT_NE(ra.peb_lon_both, rb.peb_lon_both);
}

TEST(Invariance, TranslationOfBothVehicles) {
    const Evaluator ev(preset_3p5ghz());
    const Eval e = at(ev, {-3.5, 9.0}, 0.2, -0.1);
    Scene moved = e.scene;
    const Vec2 shift{-250.0, 75.0};
    moved.tx_pose = Pose(e.scene.tx_pose.position() + shift, e.scene.tx_pose.orientation());
    moved.rx_pose = Pose(e.scene.rx_pose.position() + shift, e.scene.rx_pose.orientation());
    const LinkSet ml = active_links(moved);
    const FimResult a = efim_aoa_tdoa(e.scene, e.links, e.gains, ev.betas());
    const FimResult b = efim_aoa_tdoa(moved, ml, link_gains(moved, ml), ev.betas());
    EXPECT_LT(relative_frobenius(b.j_po, a.j_po), 1e-9);
}

TEST(Invariance, RotationOfTheWholeScene) {
    const Evaluator ev(preset_3p5ghz());
    const Eval e = at(ev, {-3.5, 9.0});
    const double phi = 0.9;
    Scene rot = e.scene;
    rot.tx_pose = Pose(e.scene.tx_pose.position().rotated(phi), e.scene.tx_pose.orientation() + phi);
    rot.rx_pose = Pose(e.scene.rx_pose.position().rotated(phi), e.scene.rx_pose.orientation() + phi);
    const LinkSet rl = active_links(rot);
    ASSERT_EQ(rl.size(), e.links.size());
    const FimResult a = efim_aoa_tdoa(e.scene, e.links, e.gains, ev.betas());
    const FimResult b = efim_aoa_tdoa(rot, rl, link_gains(rot, rl), ev.betas());
    Eigen::Matrix3d r = Eigen::Matrix3d::Identity();
    r.topLeftCorner<2, 2>() << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
    EXPECT_LT(relative_frobenius(b.j_po, r * a.j_po * r.transpose()), 1e-9);
}

TEST(Inputs, MismatchedGainsAndEmptyLinksThrow) {
    const Evaluator ev(preset_3p5ghz());
    const Eval e = at(ev, {-3.5, 9.0});
    EXPECT_THROW(efim_aoa_only(e.scene, e.links, {}), Error);
    EXPECT_THROW(efim_aoa_only(e.scene, LinkSet{}, {}), Error);
    EXPECT_THROW(efim_aoa_tdoa(e.scene, e.links, e.gains, {1.0}), Error);
}
