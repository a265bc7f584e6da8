#pragma once

// Closed-form position/orientation EFIM for AOA+TDOA and AOA-only
// measurements, the squared array aperture function, and error bounds.
//
// Parameter layout of every 3x3 EFIM: [q_x, q_y, alpha_T].

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "v2vpeb/channel.hpp"
#include "v2vpeb/errors.hpp"
#include "v2vpeb/scene.hpp"

namespace v2vpeb {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kRankTolerance = 1e-10;

struct ErrorBounds {
    double peb_lat = kInf;
    double peb_lon = kInf;
    double oeb = kInf;
};

struct FimResult {
    Eigen::Matrix3d j_po = Eigen::Matrix3d::Zero();
    double peb_lat = kInf;
    double peb_lon = kInf;
    double oeb = kInf;
    int rank = 0;
    bool singular = true;
};

/// #{lambda_i > tol * lambda_max}; zero for the zero matrix.
inline int numerical_rank(const Eigen::Matrix3d& j, double tol = kRankTolerance) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(j, Eigen::EigenvaluesOnly);
    const Eigen::Vector3d ev = es.eigenvalues();
    const double lmax = ev.cwiseAbs().maxCoeff();
    if (!(lmax > 0.0)) return 0;
    int r = 0;
    for (int i = 0; i < 3; ++i)
        if (ev(i) > tol * lmax) ++r;
    return r;
}

inline ErrorBounds bounds_from_fim(const Eigen::Matrix3d& j_po) {
    if (numerical_rank(j_po) < 3) return {};
    const Eigen::Matrix3d inv = j_po.ldlt().solve(Eigen::Matrix3d::Identity());
    return {std::sqrt(inv(0, 0)), std::sqrt(inv(1, 1)), std::sqrt(inv(2, 2))};
}

inline FimResult make_fim_result(const Eigen::Matrix3d& j) {
    FimResult r;
    r.j_po = 0.5 * (j + j.transpose());
    r.rank = numerical_rank(r.j_po);
    r.singular = r.rank < 3;
    const ErrorBounds b = bounds_from_fim(r.j_po);
    r.peb_lat = b.peb_lat;
    r.peb_lon = b.peb_lon;
    r.oeb = b.oeb;
    return r;
}

/// S(theta) = (1/N) sum_i (d_i u_perp(psi_i)^T u(theta))^2, in m^2.
inline double saaf(const ArrayPanel& panel, double theta_local) {
    if (panel.elements.empty()) return 0.0;
    const Vec2 u = unit_dir(theta_local);
    double s = 0.0;
    for (const auto& e : panel.elements) {
        const double proj = e.distance * unit_perp(e.angle).dot(u);
        s += proj * proj;
    }
    return s / static_cast<double>(panel.elements.size());
}

/// Direction of TDOA information for one link.
inline Eigen::Vector3d tdoa_direction(const Link& l) {
    const Vec2 u = unit_dir(l.theta_R);
    return {u.x(), u.y(), unit_perp(l.theta_T).dot(l.tx_arm)};
}

/// Direction of AOA information for one link. The position part is the
/// derivative of theta_R w.r.t. q times d, i.e. u_perp(theta_T).
inline Eigen::Vector3d aoa_direction(const Link& l) {
    const Vec2 up = unit_perp(l.theta_T);
    return {up.x(), up.y(), unit_dir(l.theta_T).dot(l.tx_arm)};
}

namespace detail {

inline void check_inputs(const Scene& scene, const LinkSet& links, const std::vector<LinkGain>& gains) {
    if (links.empty()) throw Error(ErrorCode::NoActiveLinks, "EFIM needs at least one active link");
    if (gains.size() != links.size())
        throw Error(ErrorCode::InvalidArgument, "one LinkGain per link required");
    for (const Link& l : links)
        if (l.rx_panel >= scene.rx_vehicle.panels.size() || l.tx_panel >= scene.tx_vehicle.panels.size())
            throw Error(ErrorCode::IndexOutOfRange, "link refers to a missing panel");
}

inline Eigen::Matrix3d aoa_information(const Scene& scene, const LinkSet& links,
                                       const std::vector<LinkGain>& gains) {
    const double wc = scene.ofdm.omega_c();
    const double c2 = kSpeedOfLight * kSpeedOfLight;
    Eigen::Matrix3d j = Eigen::Matrix3d::Zero();
    for (std::size_t k = 0; k < links.size(); ++k) {
        const Link& l = links[k];
        const double s = saaf(scene.rx_vehicle.panels[l.rx_panel], l.theta_R_local);
        const double w = gains[k].g * wc * wc * s / (c2 * l.distance * l.distance);
        const Eigen::Vector3d v = aoa_direction(l);
        j.noalias() += w * v * v.transpose();
    }
    return j;
}

}  // namespace detail

inline FimResult efim_aoa_only(const Scene& scene, const LinkSet& links, const std::vector<LinkGain>& gains) {
    detail::check_inputs(scene, links, gains);
    return make_fim_result(detail::aoa_information(scene, links, gains));
}

inline FimResult efim_aoa_tdoa(const Scene& scene, const LinkSet& links, const std::vector<LinkGain>& gains,
                               const std::vector<double>& betas) {
    detail::check_inputs(scene, links, gains);
    if (betas.size() != scene.tx_vehicle.panels.size())
        throw Error(ErrorCode::InvalidArgument, "one effective bandwidth per Tx panel required");

    const double c2 = kSpeedOfLight * kSpeedOfLight;
    Eigen::Matrix3d j = detail::aoa_information(scene, links, gains);
    std::vector<double> w(links.size());
    Eigen::Vector3d v_sum = Eigen::Vector3d::Zero();
    double w_sum = 0.0;
    for (std::size_t k = 0; k < links.size(); ++k) {
        const double b = betas[links[k].tx_panel];
        w[k] = gains[k].g * b * b / c2;
        v_sum += w[k] * tdoa_direction(links[k]);
        w_sum += w[k];
    }
    // sum w v v^T - v_sum v_sum^T / w_sum, evaluated as a weighted scatter
    // about the mean direction. All-zero weights (0/0 loss) give no TDOA term.
    if (w_sum > 0.0) {
        const Eigen::Vector3d mean = v_sum / w_sum;
        for (std::size_t k = 0; k < links.size(); ++k) {
            const Eigen::Vector3d dv = tdoa_direction(links[k]) - mean;
            j.noalias() += w[k] * dv * dv.transpose();
        }
    }
    return make_fim_result(j);
}

}  // namespace v2vpeb
