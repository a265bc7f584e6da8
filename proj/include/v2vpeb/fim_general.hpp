#pragma once

// Channel-parameter FIM assembled from the received-signal mean, its
// finite-difference counterpart, the Jacobians to the position/orientation
// parameterizations, and the Schur-complement EFIM.
//
// Channel parameter vector (length 4L over the active links):
//   slot 0 (reference link): [tau_s, theta_R_local, Re h, Im h]
//   slot s > 0:              [dtau,  theta_R_local, Re h, Im h]
// The reference link is the active link of minimum delay (ties -> smallest
// (t, r)); remaining links follow in LinkSet order.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "v2vpeb/channel.hpp"
#include "v2vpeb/errors.hpp"
#include "v2vpeb/fim_closed.hpp"
#include "v2vpeb/scene.hpp"

namespace v2vpeb {

enum class Variant { AoaTdoa, AoaOnly };

inline constexpr double kNuisanceConditionLimit = 1e12;

struct ChannelParamLayout {
    std::vector<std::size_t> order;  // link index per slot; order[0] is the reference
    std::vector<std::size_t> slot;   // inverse of order

    std::size_t links() const noexcept { return order.size(); }
    std::size_t size() const noexcept { return 4 * order.size(); }
    std::size_t reference() const { return order.front(); }

    static std::size_t delay(std::size_t s) { return 4 * s; }
    static std::size_t angle(std::size_t s) { return 4 * s + 1; }
    static std::size_t gain_re(std::size_t s) { return 4 * s + 2; }
    static std::size_t gain_im(std::size_t s) { return 4 * s + 3; }
};

inline ChannelParamLayout make_layout(const LinkSet& links, std::size_t reference_link) {
    if (links.empty()) throw Error(ErrorCode::NoActiveLinks, "no active links");
    if (reference_link >= links.size()) throw Error(ErrorCode::IndexOutOfRange, "reference link out of range");
    ChannelParamLayout lay;
    lay.order.push_back(reference_link);
    for (std::size_t i = 0; i < links.size(); ++i)
        if (i != reference_link) lay.order.push_back(i);
    lay.slot.resize(links.size());
    for (std::size_t s = 0; s < lay.order.size(); ++s) lay.slot[lay.order[s]] = s;
    return lay;
}

inline ChannelParamLayout make_layout(const LinkSet& links) {
    if (links.empty()) throw Error(ErrorCode::NoActiveLinks, "no active links");
    std::size_t ref = 0;
    for (std::size_t i = 1; i < links.size(); ++i)
        if (links[i].delay < links[ref].delay) ref = i;
    return make_layout(links, ref);
}

/// Nominal channel parameters; tau_s = 0 (the FIM only sees it through unit-modulus phases).
inline Eigen::VectorXd nominal_parameters(const LinkSet& links, const std::vector<LinkGain>& gains,
                                          const ChannelParamLayout& lay) {
    Eigen::VectorXd phi(static_cast<Eigen::Index>(lay.size()));
    const double tau_ref = links[lay.reference()].delay;
    for (std::size_t s = 0; s < lay.links(); ++s) {
        const std::size_t k = lay.order[s];
        phi(lay.delay(s)) = s == 0 ? 0.0 : links[k].delay - tau_ref;
        phi(lay.angle(s)) = links[k].theta_R_local;
        phi(lay.gain_re(s)) = gains[k].h.real();
        phi(lay.gain_im(s)) = gains[k].h.imag();
    }
    return phi;
}

struct LinkSignal {
    double delay = 0.0;        // tau_s + dtau
    double theta_local = 0.0;  // theta_R_local
    std::complex<double> gain;
};

inline LinkSignal link_signal(const Eigen::VectorXd& phi, const ChannelParamLayout& lay, std::size_t link) {
    const std::size_t s = lay.slot.at(link);
    LinkSignal sig;
    sig.delay = phi(0) + (s == 0 ? 0.0 : phi(lay.delay(s)));
    sig.theta_local = phi(lay.angle(s));
    sig.gain = {phi(lay.gain_re(s)), phi(lay.gain_im(s))};
    return sig;
}

inline Eigen::VectorXcd steering_vector(const ArrayPanel& rx, double theta_local, double omega_c) {
    const Vec2 u = unit_dir(theta_local);
    Eigen::VectorXcd a(static_cast<Eigen::Index>(rx.element_count()));
    for (std::size_t i = 0; i < rx.element_count(); ++i) {
        const auto& e = rx.elements[i];
        const double tau = e.distance * unit_dir(e.angle).dot(u) / kSpeedOfLight;
        a(static_cast<Eigen::Index>(i)) = std::polar(1.0, omega_c * tau);
    }
    return a;
}

inline Eigen::VectorXcd mean_vector(const ArrayPanel& rx, const LinkSignal& sig, double omega_c, double omega_p,
                                    std::complex<double> symbol) {
    const std::complex<double> phase = std::polar(1.0, -omega_p * sig.delay);
    return (phase * sig.gain * symbol) * steering_vector(rx, sig.theta_local, omega_c);
}

/// Per-symbol amplitude sqrt(gamma_t gamma_{t,p} P_T) of subcarrier slot i in P_t.
inline double symbol_amplitude(const Scene& scene, std::size_t t, std::size_t i) {
    return std::sqrt(scene.allocation.array_power[t] * scene.allocation.subcarrier_power[t][i] *
                     scene.ofdm.total_power);
}

/// Noiseless receive vector of link `link` on symbol b, subcarrier p.
inline Eigen::VectorXcd mean_vector(const Scene& scene, const LinkSet& links, const std::vector<LinkGain>& gains,
                                    std::size_t link, std::size_t b, int p) {
    if (link >= links.size()) throw Error(ErrorCode::IndexOutOfRange, "link index out of range");
    if (b >= scene.ofdm.n_symbols) throw Error(ErrorCode::IndexOutOfRange, "symbol index out of range");
    const Link& l = links[link];
    const std::size_t i = scene.allocation.find(l.tx_panel, p);
    if (i == Allocation::npos)
        throw Error(ErrorCode::SubcarrierNotAllocated,
                    "subcarrier " + std::to_string(p) + " is not used by Tx panel " + std::to_string(l.tx_panel));
    const ChannelParamLayout lay = make_layout(links);
    const Eigen::VectorXd phi = nominal_parameters(links, gains, lay);
    return mean_vector(scene.rx_vehicle.panels[l.rx_panel], link_signal(phi, lay, link), scene.ofdm.omega_c(),
                       scene.ofdm.omega(p), symbol_amplitude(scene, l.tx_panel, i));
}

namespace detail {

inline void check_channel_inputs(const Scene& scene, const LinkSet& links, const std::vector<LinkGain>& gains,
                                 const ChannelParamLayout& lay) {
    if (links.empty()) throw Error(ErrorCode::NoActiveLinks, "channel FIM needs at least one active link");
    if (gains.size() != links.size()) throw Error(ErrorCode::InvalidArgument, "one LinkGain per link required");
    if (lay.links() != links.size()) throw Error(ErrorCode::InvalidArgument, "layout does not match the link set");
    if (scene.allocation.arrays() != scene.tx_vehicle.panels.size())
        throw Error(ErrorCode::InvalidArgument, "allocation must have one entry per Tx panel");
}

}  // namespace detail

/// J_phi from the closed-form derivatives of the mean vector.
inline Eigen::MatrixXd fim_channel(const Scene& scene, const LinkSet& links, const std::vector<LinkGain>& gains,
                                   const ChannelParamLayout& lay) {
    detail::check_channel_inputs(scene, links, gains, lay);
    const auto n = static_cast<Eigen::Index>(lay.size());
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
    const Eigen::VectorXd phi = nominal_parameters(links, gains, lay);
    const double wc = scene.ofdm.omega_c();
    const std::complex<double> jj{0.0, 1.0};

    for (std::size_t k = 0; k < links.size(); ++k) {
        const Link& l = links[k];
        const ArrayPanel& rx = scene.rx_vehicle.panels[l.rx_panel];
        const std::size_t s = lay.slot[k];
        const LinkSignal sig = link_signal(phi, lay, k);
        const double w = 2.0 / scene.noise(l.rx_panel);

        // D = diag(-j wc d_i u(psi_i)^T u_perp(theta) / c)
        Eigen::VectorXcd dvec(static_cast<Eigen::Index>(rx.element_count()));
        const Vec2 up = unit_perp(sig.theta_local);
        for (std::size_t i = 0; i < rx.element_count(); ++i) {
            const auto& e = rx.elements[i];
            dvec(static_cast<Eigen::Index>(i)) = -jj * wc * e.distance * unit_dir(e.angle).dot(up) / kSpeedOfLight;
        }

        std::vector<Eigen::Index> idx{0};
        if (s != 0) idx.push_back(static_cast<Eigen::Index>(lay.delay(s)));
        const std::size_t n_delay = idx.size();
        idx.push_back(static_cast<Eigen::Index>(lay.angle(s)));
        idx.push_back(static_cast<Eigen::Index>(lay.gain_re(s)));
        idx.push_back(static_cast<Eigen::Index>(lay.gain_im(s)));

        const auto& set = scene.allocation.sets[l.tx_panel];
        Eigen::MatrixXcd d(static_cast<Eigen::Index>(rx.element_count()), static_cast<Eigen::Index>(idx.size()));
        for (std::size_t b = 0; b < scene.ofdm.n_symbols; ++b) {
            for (std::size_t i = 0; i < set.size(); ++i) {
                const double wp = scene.ofdm.omega(set[i]);
                const Eigen::VectorXcd m =
                    mean_vector(rx, sig, wc, wp, symbol_amplitude(scene, l.tx_panel, i));
                for (std::size_t c = 0; c < n_delay; ++c) d.col(static_cast<Eigen::Index>(c)) = -jj * wp * m;
                d.col(static_cast<Eigen::Index>(n_delay)) = dvec.cwiseProduct(m);
                d.col(static_cast<Eigen::Index>(n_delay + 1)) = m / sig.gain;
                d.col(static_cast<Eigen::Index>(n_delay + 2)) = jj * m / sig.gain;
                const Eigen::MatrixXd blk = w * (d.adjoint() * d).real();
                for (std::size_t a = 0; a < idx.size(); ++a)
                    for (std::size_t c = 0; c < idx.size(); ++c)
                        j(idx[a], idx[c]) += blk(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c));
            }
        }
    }
    return 0.5 * (j + j.transpose());
}

inline Eigen::MatrixXd fim_channel(const Scene& scene, const LinkSet& links, const std::vector<LinkGain>& gains) {
    return fim_channel(scene, links, gains, make_layout(links));
}

/// J_phi from central differences of the mean vector over every channel
/// parameter. Steps: rel_step rad for angles, rel_step/omega_c s for delays,
/// rel_step*|h| for gain components.
inline Eigen::MatrixXd fim_channel_fd(const Scene& scene, const LinkSet& links, const std::vector<LinkGain>& gains,
                                      const ChannelParamLayout& lay, double rel_step = 1e-7) {
    detail::check_channel_inputs(scene, links, gains, lay);
    if (!(rel_step > 0.0)) throw Error(ErrorCode::InvalidArgument, "finite-difference step must be positive");
    const auto n = static_cast<Eigen::Index>(lay.size());
    const Eigen::VectorXd phi0 = nominal_parameters(links, gains, lay);
    const double wc = scene.ofdm.omega_c();

    Eigen::VectorXd step(n);
    for (std::size_t s = 0; s < lay.links(); ++s) {
        const double habs = std::abs(gains[lay.order[s]].h);
        step(lay.delay(s)) = rel_step / wc;
        step(lay.angle(s)) = rel_step;
        step(lay.gain_re(s)) = rel_step * habs;
        step(lay.gain_im(s)) = rel_step * habs;
    }

    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t k = 0; k < links.size(); ++k) {
        const Link& l = links[k];
        const ArrayPanel& rx = scene.rx_vehicle.panels[l.rx_panel];
        const double w = 2.0 / scene.noise(l.rx_panel);
        const auto& set = scene.allocation.sets[l.tx_panel];
        Eigen::MatrixXcd d(static_cast<Eigen::Index>(rx.element_count()), n);
        for (std::size_t b = 0; b < scene.ofdm.n_symbols; ++b) {
            for (std::size_t i = 0; i < set.size(); ++i) {
                const double wp = scene.ofdm.omega(set[i]);
                const double x = symbol_amplitude(scene, l.tx_panel, i);
                for (Eigen::Index c = 0; c < n; ++c) {
                    Eigen::VectorXd plus = phi0, minus = phi0;
                    plus(c) += step(c);
                    minus(c) -= step(c);
                    d.col(c) = (mean_vector(rx, link_signal(plus, lay, k), wc, wp, x) -
                                mean_vector(rx, link_signal(minus, lay, k), wc, wp, x)) /
                               (2.0 * step(c));
                }
                j.noalias() += w * (d.adjoint() * d).real();
            }
        }
    }
    return 0.5 * (j + j.transpose());
}

struct TransformMatrix {
    Eigen::MatrixXd t;
    Variant variant = Variant::AoaTdoa;

    Eigen::Index rows() const { return t.rows(); }
    Eigen::Index cols() const { return t.cols(); }
};

/// T = d phi / d phi~ with phi~ = [q, alpha_T, nuisance...].
///   AoaTdoa nuisance: tau_s, (Re h, Im h) per slot                 -> (4 + 2L) x 4L
///   AoaOnly nuisance: tau_s, Re/Im h_ref, then (dtau, Re h, Im h)  -> (3 + 3L) x 4L
inline TransformMatrix transform_matrix(const LinkSet& links, const ChannelParamLayout& lay, Variant variant) {
    if (links.empty()) throw Error(ErrorCode::NoActiveLinks, "no active links");
    if (lay.links() != links.size()) throw Error(ErrorCode::InvalidArgument, "layout does not match the link set");
    const std::size_t L = lay.links();
    const std::size_t rows = variant == Variant::AoaTdoa ? 4 + 2 * L : 3 + 3 * L;
    TransformMatrix tm;
    tm.variant = variant;
    tm.t = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(lay.size()));
    auto& t = tm.t;

    const Link& ref = links[lay.reference()];
    const Eigen::Vector3d v_ref = tdoa_direction(ref);
    for (std::size_t s = 0; s < L; ++s) {
        const Link& l = links[lay.order[s]];
        const auto ca = static_cast<Eigen::Index>(lay.angle(s));
        t.block<3, 1>(0, ca) = aoa_direction(l) / l.distance;
        if (variant == Variant::AoaTdoa && s != 0)
            t.block<3, 1>(0, static_cast<Eigen::Index>(lay.delay(s))) =
                (tdoa_direction(l) - v_ref) / kSpeedOfLight;
    }

    t(3, 0) = 1.0;  // tau_s
    if (variant == Variant::AoaTdoa) {
        for (std::size_t s = 0; s < L; ++s) {
            t(static_cast<Eigen::Index>(4 + 2 * s), static_cast<Eigen::Index>(lay.gain_re(s))) = 1.0;
            t(static_cast<Eigen::Index>(5 + 2 * s), static_cast<Eigen::Index>(lay.gain_im(s))) = 1.0;
        }
    } else {
        t(4, static_cast<Eigen::Index>(lay.gain_re(0))) = 1.0;
        t(5, static_cast<Eigen::Index>(lay.gain_im(0))) = 1.0;
        for (std::size_t s = 1; s < L; ++s) {
            const auto r = static_cast<Eigen::Index>(3 + 3 * s);
            t(r, static_cast<Eigen::Index>(lay.delay(s))) = 1.0;
            t(r + 1, static_cast<Eigen::Index>(lay.gain_re(s))) = 1.0;
            t(r + 2, static_cast<Eigen::Index>(lay.gain_im(s))) = 1.0;
        }
    }
    return tm;
}

/// Schur complement of the nuisance block of T J_phi T^T.
inline FimResult efim_schur(const Eigen::MatrixXd& j_phi, const TransformMatrix& tm) {
    if (j_phi.rows() != j_phi.cols() || j_phi.cols() != tm.cols())
        throw Error(ErrorCode::InvalidArgument, "J_phi and T dimensions disagree");
    const Eigen::MatrixXd jt = tm.t * j_phi * tm.t.transpose();
    const Eigen::Index n = jt.rows() - 3;
    const Eigen::Matrix3d a = jt.topLeftCorner<3, 3>();
    const Eigen::MatrixXd b = jt.topRightCorner(3, n);
    const Eigen::MatrixXd c = jt.bottomRightCorner(n, n);

    // Jacobi equilibration: C = D Cs D with unit diagonal Cs.
    Eigen::VectorXd dscale(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(c(i, i) > 0.0))
            throw Error(ErrorCode::NuisanceSingular, "nuisance parameter " + std::to_string(i) + " carries no information");
        dscale(i) = 1.0 / std::sqrt(c(i, i));
    }
    Eigen::MatrixXd cs = dscale.asDiagonal() * c * dscale.asDiagonal();
    cs = 0.5 * (cs + cs.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cs, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    const double lmax = es.eigenvalues().maxCoeff();
    if (!(lmin > 0.0) || lmax / lmin > kNuisanceConditionLimit)
        throw Error(ErrorCode::NuisanceSingular,
                    "nuisance block condition " + std::to_string(lmin > 0.0 ? lmax / lmin : kInf) + " exceeds limit");

    const Eigen::MatrixXd bs = b * dscale.asDiagonal();
    const Eigen::MatrixXd x = cs.ldlt().solve(bs.transpose());
    const Eigen::Matrix3d loss = bs * x;
    return make_fim_result(a - loss);
}

/// Convenience: J_phi -> T -> Schur for one variant.
inline FimResult efim_general(const Scene& scene, const LinkSet& links, const std::vector<LinkGain>& gains,
                              Variant variant, const ChannelParamLayout& lay) {
    return efim_schur(fim_channel(scene, links, gains, lay), transform_matrix(links, lay, variant));
}

inline FimResult efim_general(const Scene& scene, const LinkSet& links, const std::vector<LinkGain>& gains,
                              Variant variant) {
    return efim_general(scene, links, gains, variant, make_layout(links));
}

}  // namespace v2vpeb
