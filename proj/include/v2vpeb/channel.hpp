#pragma once

// Free-space link gains, transmit-power calibration and the per-link
// information weight g = 2 N_R N_B P_T gamma_t |h|^2 / sigma^2.
// Tx beamforming gain inside the field of view is taken as 1, so h = h'.

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "v2vpeb/errors.hpp"
#include "v2vpeb/scene.hpp"

namespace v2vpeb {

struct LinkGain {
    std::complex<double> h;
    double g = 0.0;
    double snr_after_bf_db = 0.0;
};

inline std::complex<double> free_space_gain(double distance, double wavelength) {
    if (!(distance > 0.0)) throw Error(ErrorCode::ZeroDistance, "free-space gain needs distance > 0");
    const double amp = wavelength / (4.0 * kPi * distance);
    return std::polar(amp, -2.0 * kPi * distance / wavelength);
}

/// g_{t,r} for the given |h|^2, using the scene's current total power.
inline double information_weight(const Scene& scene, const Link& link, double h_abs2) {
    const double n_rx = static_cast<double>(scene.rx_vehicle.panels.at(link.rx_panel).element_count());
    const double gamma_t = scene.allocation.array_power.at(link.tx_panel);
    return 2.0 * n_rx * static_cast<double>(scene.ofdm.n_symbols) * scene.ofdm.total_power * gamma_t *
           h_abs2 / scene.noise(link.rx_panel);
}

inline std::vector<LinkGain> link_gains(const Scene& scene, const LinkSet& links) {
    std::vector<LinkGain> out;
    out.reserve(links.size());
    const double lambda = scene.ofdm.wavelength();
    for (const Link& l : links) {
        LinkGain lg;
        lg.h = free_space_gain(l.distance, lambda);
        lg.g = information_weight(scene, l, std::norm(lg.h));
        const double n_sub = static_cast<double>(scene.allocation.sets.at(l.tx_panel).size());
        lg.snr_after_bf_db = 10.0 * std::log10(lg.g / n_sub);
        out.push_back(lg);
    }
    return out;
}

/// Index of the shortest active link; ties resolve to the smallest (t, r),
/// which is the first in LinkSet order.
inline std::size_t shortest_link(const LinkSet& links) {
    if (links.empty()) throw Error(ErrorCode::NoActiveLinks, "no active links");
    std::size_t best = 0;
    for (std::size_t i = 1; i < links.size(); ++i)
        if (links[i].distance < links[best].distance) best = i;
    return best;
}

/// Total power that puts the post-beamforming SNR g/|P_t| of the shortest
/// link of `reference` at `target_snr_db`.
inline double calibrate_power(const Scene& reference, double target_snr_db) {
    const LinkSet links = active_links(reference);
    const Link& l = links[shortest_link(links)];
    Scene unit = reference;
    unit.ofdm.total_power = 1.0;
    const double h2 = std::norm(free_space_gain(l.distance, reference.ofdm.wavelength()));
    const double g_per_watt = information_weight(unit, l, h2);
    const double n_sub = static_cast<double>(reference.allocation.sets.at(l.tx_panel).size());
    return std::pow(10.0, target_snr_db / 10.0) * n_sub / g_per_watt;
}

}  // namespace v2vpeb
