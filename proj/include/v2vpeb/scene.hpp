#pragma once

#include <cstddef>
#include <vector>

#include "v2vpeb/errors.hpp"
#include "v2vpeb/geometry.hpp"
#include "v2vpeb/waveform.hpp"

namespace v2vpeb {

/// Full evaluation context: two posed vehicles, the waveform and the noise.
struct Scene {
    VehicleSpec tx_vehicle;
    VehicleSpec rx_vehicle;
    Pose tx_pose;
    Pose rx_pose;
    OfdmSpec ofdm;
    Allocation allocation;
    std::vector<double> noise_variance;  // per Rx panel

    /// Relative position q = p_R - p_T.
    Vec2 relative_position() const { return rx_pose.position() - tx_pose.position(); }

    double noise(std::size_t rx_panel) const {
        return noise_variance.empty() ? 1.0 : noise_variance.at(rx_panel);
    }
};

inline void validate(const Scene& s) {
    validate(s.tx_vehicle);
    validate(s.rx_vehicle);
    validate(s.ofdm);
    validate(s.allocation, s.ofdm);
    if (s.allocation.arrays() != s.tx_vehicle.panels.size())
        throw Error(ErrorCode::InvalidArgument, "allocation must have one entry per Tx panel");
    if (!s.noise_variance.empty()) {
        if (s.noise_variance.size() != s.rx_vehicle.panels.size())
            throw Error(ErrorCode::InvalidArgument, "need one noise variance per Rx panel");
        for (double v : s.noise_variance)
            if (!(v > 0.0)) throw Error(ErrorCode::InvalidArgument, "noise variance must be positive");
    }
}

/// Active LOS links ordered by (tx_panel, rx_panel).
struct LinkSet {
    std::vector<Link> links;

    std::size_t size() const noexcept { return links.size(); }
    bool empty() const noexcept { return links.empty(); }
    const Link& operator[](std::size_t i) const { return links[i]; }
    auto begin() const { return links.begin(); }
    auto end() const { return links.end(); }
};

/// Same as active_links but returns an empty set instead of throwing.
inline LinkSet visible_links(const Scene& scene) {
    LinkSet out;
    const VehicleRect tx_rect = vehicle_rect(scene.tx_vehicle, scene.tx_pose);
    const VehicleRect rx_rect = vehicle_rect(scene.rx_vehicle, scene.rx_pose);
    std::vector<PanelWorldState> rx_states;
    for (std::size_t r = 0; r < scene.rx_vehicle.panels.size(); ++r)
        rx_states.push_back(panel_world_state(scene.rx_vehicle, scene.rx_pose, r));

    for (std::size_t t = 0; t < scene.tx_vehicle.panels.size(); ++t) {
        const PanelWorldState tx = panel_world_state(scene.tx_vehicle, scene.tx_pose, t);
        for (std::size_t r = 0; r < rx_states.size(); ++r) {
            if (!los_visible(tx, rx_states[r], tx_rect, rx_rect)) continue;
            Link l = link_geometry(tx.centroid, rx_states[r].centroid, scene.tx_pose.orientation(),
                                   scene.rx_pose.orientation());
            l.tx_panel = t;
            l.rx_panel = r;
            l.tx_arm = tx.centroid - scene.tx_pose.position();
            out.links.push_back(l);
        }
    }
    return out;
}

inline LinkSet active_links(const Scene& scene) {
    LinkSet out = visible_links(scene);
    if (out.empty()) throw Error(ErrorCode::NoActiveLinks, "no Tx-Rx panel pair has line of sight");
    return out;
}

}  // namespace v2vpeb
