#pragma once

// Oracle-equivalence checks on seeded random scenes: closed-form vs Schur
// EFIM, analytic vs finite-difference J_phi, and reference-link invariance.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "v2vpeb/fim_closed.hpp"
#include "v2vpeb/fim_general.hpp"
#include "v2vpeb/scenarios.hpp"

namespace v2vpeb {

inline constexpr std::uint64_t kSelfCheckSeed = 20190613;

inline double relative_frobenius(const Eigen::MatrixXd& a, const Eigen::MatrixXd& ref) {
    const double n = ref.norm();
    return n > 0.0 ? (a - ref).norm() / n : (a - ref).norm();
}

struct RandomScene {
    Scene scene;
    LinkSet links;
    std::vector<LinkGain> gains;
    std::vector<double> betas;
};

/// Rx reference point uniform in the annulus 5..40 m around the Tx, both
/// headings uniform; presets alternate. Scenes without LOS are redrawn.
class SceneSampler {
public:
    explicit SceneSampler(std::uint64_t seed = kSelfCheckSeed)
        : rng_(seed), presets_{Evaluator(preset_3p5ghz()), Evaluator(preset_28ghz())} {}

    RandomScene next() {
        std::uniform_real_distribution<double> radius2(5.0 * 5.0, 40.0 * 40.0);
        std::uniform_real_distribution<double> angle(-kPi, kPi);
        const Evaluator& ev = presets_[count_++ % presets_.size()];
        for (;;) {
            const double r = std::sqrt(radius2(rng_));
            const double phi = angle(rng_);
            const double alpha_t = angle(rng_);
            const double alpha_r = angle(rng_);
            RandomScene out;
            out.scene = ev.scene_at(r * unit_dir(phi), alpha_t, alpha_r);
            out.links = visible_links(out.scene);
            if (out.links.empty()) continue;
            out.gains = link_gains(out.scene, out.links);
            out.betas = ev.betas();
            return out;
        }
    }

private:
    std::mt19937_64 rng_;
    std::vector<Evaluator> presets_;
    std::size_t count_ = 0;
};

struct EquivalenceReport {
    double max_err_aoa_tdoa = 0.0;
    double max_err_aoa_only = 0.0;
    std::size_t scenes = 0;
};

inline EquivalenceReport check_closed_vs_schur(std::size_t n_scenes, std::uint64_t seed = kSelfCheckSeed) {
    SceneSampler sampler(seed);
    EquivalenceReport rep;
    for (std::size_t i = 0; i < n_scenes; ++i) {
        const RandomScene rs = sampler.next();
        const ChannelParamLayout lay = make_layout(rs.links);
        const Eigen::MatrixXd jphi = fim_channel(rs.scene, rs.links, rs.gains, lay);
        const FimResult schur_td = efim_schur(jphi, transform_matrix(rs.links, lay, Variant::AoaTdoa));
        const FimResult schur_ao = efim_schur(jphi, transform_matrix(rs.links, lay, Variant::AoaOnly));
        const FimResult closed_td = efim_aoa_tdoa(rs.scene, rs.links, rs.gains, rs.betas);
        const FimResult closed_ao = efim_aoa_only(rs.scene, rs.links, rs.gains);
        rep.max_err_aoa_tdoa = std::max(rep.max_err_aoa_tdoa, relative_frobenius(closed_td.j_po, schur_td.j_po));
        rep.max_err_aoa_only = std::max(rep.max_err_aoa_only, relative_frobenius(closed_ao.j_po, schur_ao.j_po));
        ++rep.scenes;
    }
    return rep;
}

struct FdReport {
    double max_err = 0.0;
    std::size_t scenes = 0;
};

inline FdReport check_fd_channel_fim(std::size_t n_scenes, std::uint64_t seed = kSelfCheckSeed,
                                     double rel_step = 1e-7) {
    SceneSampler sampler(seed);
    FdReport rep;
    for (std::size_t i = 0; i < n_scenes; ++i) {
        const RandomScene rs = sampler.next();
        const ChannelParamLayout lay = make_layout(rs.links);
        const Eigen::MatrixXd a = fim_channel(rs.scene, rs.links, rs.gains, lay);
        const Eigen::MatrixXd fd = fim_channel_fd(rs.scene, rs.links, rs.gains, lay, rel_step);
        rep.max_err = std::max(rep.max_err, relative_frobenius(fd, a));
        ++rep.scenes;
    }
    return rep;
}

/// Largest relative change of the Schur EFIM when each active link in turn is
/// forced to be the TDOA reference.
inline double check_reference_invariance(std::size_t n_scenes, std::uint64_t seed = kSelfCheckSeed) {
    SceneSampler sampler(seed);
    double worst = 0.0;
    for (std::size_t i = 0; i < n_scenes; ++i) {
        const RandomScene rs = sampler.next();
        for (Variant v : {Variant::AoaTdoa, Variant::AoaOnly}) {
            const Eigen::Matrix3d base = efim_general(rs.scene, rs.links, rs.gains, v).j_po;
            for (std::size_t ref = 0; ref < rs.links.size(); ++ref) {
                const auto lay = make_layout(rs.links, ref);
                worst = std::max(worst, relative_frobenius(efim_general(rs.scene, rs.links, rs.gains, v, lay).j_po, base));
            }
        }
    }
    return worst;
}

}  // namespace v2vpeb
