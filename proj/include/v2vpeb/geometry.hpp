#pragma once

// Planar vehicle / panel / element geometry and line-of-sight rules.
//
// Frames: every vehicle frame has its long axis along +y and its width along
// +x. A pose rotates the vehicle frame into the world frame by `orientation`
// and translates it to `position` (the vehicle reference point). With both
// orientations at zero, world x is the lateral axis and world y the
// longitudinal one.

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "v2vpeb/errors.hpp"

namespace v2vpeb {

inline constexpr double kSpeedOfLight = 299'792'458.0;
inline constexpr double kPi = std::numbers::pi;

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
    double w = std::remainder(a, 2.0 * kPi);  // [-pi, pi]
    if (w <= -kPi) w += 2.0 * kPi;
    return w;
}

class Vec2 {
public:
    Vec2() = default;
    Vec2(double x, double y) : x_(x), y_(y) {
        if (!std::isfinite(x) || !std::isfinite(y))
            throw Error(ErrorCode::InvalidArgument, "Vec2 components must be finite");
    }

    double x() const noexcept { return x_; }
    double y() const noexcept { return y_; }

    double dot(const Vec2& o) const noexcept { return x_ * o.x_ + y_ * o.y_; }
    double norm() const noexcept { return std::hypot(x_, y_); }
    double angle() const noexcept { return std::atan2(y_, x_); }

    friend Vec2 operator+(const Vec2& a, const Vec2& b) { return {a.x_ + b.x_, a.y_ + b.y_}; }
    friend Vec2 operator-(const Vec2& a, const Vec2& b) { return {a.x_ - b.x_, a.y_ - b.y_}; }
    friend Vec2 operator-(const Vec2& a) { return {-a.x_, -a.y_}; }
    friend Vec2 operator*(double s, const Vec2& a) { return {s * a.x_, s * a.y_}; }
    friend Vec2 operator*(const Vec2& a, double s) { return s * a; }
    friend bool operator==(const Vec2&, const Vec2&) = default;

    /// Counter-clockwise rotation by `a` radians.
    Vec2 rotated(double a) const {
        const double c = std::cos(a), s = std::sin(a);
        return {c * x_ - s * y_, s * x_ + c * y_};
    }

private:
    double x_ = 0.0;
    double y_ = 0.0;
};

inline Vec2 unit_dir(double psi) { return {std::cos(psi), std::sin(psi)}; }

/// u(psi - pi/2): the direction orthogonal to unit_dir(psi), rotated clockwise.
inline Vec2 unit_perp(double psi) { return unit_dir(psi - kPi / 2.0); }

class Pose {
public:
    Pose() = default;
    Pose(Vec2 position, double orientation)
        : position_(position), orientation_(wrap_angle(orientation)) {
        if (!std::isfinite(orientation))
            throw Error(ErrorCode::InvalidArgument, "pose orientation must be finite");
    }

    const Vec2& position() const noexcept { return position_; }
    double orientation() const noexcept { return orientation_; }

private:
    Vec2 position_{};
    double orientation_ = 0.0;
};

/// Polar offset (d, psi) in the vehicle frame.
struct ElementOffset {
    double distance = 0.0;
    double angle = 0.0;

    Vec2 vec() const { return distance * unit_dir(angle); }
};

struct ArrayPanel {
    double mount_distance = 0.0;
    double mount_angle = 0.0;
    std::vector<ElementOffset> elements;
    double fov_blocked_center = 0.0;
    double fov_blocked_halfwidth = kPi / 4.0;

    std::size_t element_count() const noexcept { return elements.size(); }
    Vec2 mount_offset() const { return mount_distance * unit_dir(mount_angle); }
};

inline void validate(const ArrayPanel& panel) {
    if (panel.elements.empty())
        throw Error(ErrorCode::InvalidCount, "panel must have at least one element");
    if (!(panel.mount_distance >= 0.0))
        throw Error(ErrorCode::InvalidArgument, "panel mount distance must be >= 0");
    if (!(panel.fov_blocked_halfwidth >= 0.0 && panel.fov_blocked_halfwidth <= kPi))
        throw Error(ErrorCode::InvalidArgument, "blocked halfwidth must lie in [0, pi]");
    double sx = 0.0, sy = 0.0;
    for (const auto& e : panel.elements) {
        if (!(e.distance >= 0.0))
            throw Error(ErrorCode::InvalidArgument, "element distance must be >= 0");
        const Vec2 v = e.vec();
        sx += v.x();
        sy += v.y();
    }
    const double n = static_cast<double>(panel.elements.size());
    if (std::hypot(sx / n, sy / n) > 1e-12)
        throw Error(ErrorCode::InvalidArgument, "element offsets must be centered on the panel centroid");
}

struct VehicleSpec {
    double length = 4.5;
    double width = 1.8;
    std::vector<ArrayPanel> panels;
};

inline void validate(const VehicleSpec& v) {
    if (!(v.length > 0.0) || !(v.width > 0.0))
        throw Error(ErrorCode::InvalidArgument, "vehicle length and width must be positive");
    if (v.panels.empty())
        throw Error(ErrorCode::InvalidCount, "vehicle needs at least one panel");
    for (const auto& p : v.panels) validate(p);
}

/// Quarter-circle conformal panel for corner `corner_index` (1..4, numbered
/// counter-clockwise starting at the front-right corner). Elements are spaced
/// lambda/2 along the arc and re-centered on their centroid. The blocked
/// sector is the quadrant facing away from the arc.
inline ArrayPanel build_conformal_panel(std::size_t n_elements, double wavelength, int corner_index) {
    if (n_elements == 0) throw Error(ErrorCode::InvalidCount, "conformal panel needs >= 1 element");
    if (!(wavelength > 0.0)) throw Error(ErrorCode::InvalidArgument, "wavelength must be positive");
    if (corner_index < 1 || corner_index > 4)
        throw Error(ErrorCode::IndexOutOfRange, "corner index must be in 1..4");

    const double base = kPi / 2.0 * (corner_index - 1);
    ArrayPanel panel;
    panel.fov_blocked_center = wrap_angle(base + kPi / 4.0 + kPi);
    panel.fov_blocked_halfwidth = kPi / 4.0;

    if (n_elements == 1) {
        panel.elements.push_back({0.0, 0.0});
        return panel;
    }

    const double n1 = static_cast<double>(n_elements - 1);
    const double rho = wavelength / (4.0 * std::sin(kPi / (4.0 * n1)));
    std::vector<Vec2> pts;
    pts.reserve(n_elements);
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n_elements; ++i) {
        const double delta = kPi * static_cast<double>(i) / (2.0 * n1);
        pts.push_back(rho * unit_dir(delta + base));
        mx += pts.back().x();
        my += pts.back().y();
    }
    const Vec2 mean{mx / static_cast<double>(n_elements), my / static_cast<double>(n_elements)};
    for (const auto& p : pts) {
        const Vec2 off = p - mean;
        panel.elements.push_back({off.norm(), off.angle()});
    }
    return panel;
}

/// Polar mount (d, psi) of corner `corner_index` for a vehicle of the given size.
inline ElementOffset corner_mount(double length, double width, int corner_index) {
    static constexpr std::array<std::array<double, 2>, 4> sign{{{1, 1}, {-1, 1}, {-1, -1}, {1, -1}}};
    if (corner_index < 1 || corner_index > 4)
        throw Error(ErrorCode::IndexOutOfRange, "corner index must be in 1..4");
    const auto& s = sign[static_cast<std::size_t>(corner_index - 1)];
    const Vec2 p{s[0] * width / 2.0, s[1] * length / 2.0};
    return {p.norm(), p.angle()};
}

/// Vehicle with conformal panels on the listed corners (1..4).
inline VehicleSpec make_corner_vehicle(double length, double width, std::size_t n_elements,
                                       double wavelength,
                                       const std::vector<int>& corners = {1, 2, 3, 4}) {
    VehicleSpec v;
    v.length = length;
    v.width = width;
    for (int c : corners) {
        ArrayPanel p = build_conformal_panel(n_elements, wavelength, c);
        const ElementOffset m = corner_mount(length, width, c);
        p.mount_distance = m.distance;
        p.mount_angle = m.angle;
        v.panels.push_back(std::move(p));
    }
    validate(v);
    return v;
}

struct PanelWorldState {
    Vec2 centroid;
    std::vector<Vec2> elements;
    double fov_blocked_center = 0.0;
    double fov_blocked_halfwidth = 0.0;
};

inline PanelWorldState panel_world_state(const VehicleSpec& vehicle, const Pose& pose, std::size_t panel) {
    if (panel >= vehicle.panels.size())
        throw Error(ErrorCode::IndexOutOfRange, "panel index " + std::to_string(panel) + " out of range");
    const ArrayPanel& p = vehicle.panels[panel];
    const double a = pose.orientation();
    PanelWorldState s;
    s.centroid = pose.position() + p.mount_distance * unit_dir(p.mount_angle + a);
    s.elements.reserve(p.elements.size());
    for (const auto& e : p.elements) s.elements.push_back(s.centroid + e.distance * unit_dir(e.angle + a));
    s.fov_blocked_center = wrap_angle(p.fov_blocked_center + a);
    s.fov_blocked_halfwidth = p.fov_blocked_halfwidth;
    return s;
}

/// One Tx-panel -> Rx-panel propagation path. Panel indices are 0-based.
struct Link {
    std::size_t tx_panel = 0;
    std::size_t rx_panel = 0;
    double distance = 0.0;
    double theta_R = 0.0;        // world direction Tx centroid -> Rx centroid
    double theta_T = 0.0;        // theta_R + pi
    double theta_R_local = 0.0;  // theta_R - alpha_R
    double theta_T_local = 0.0;  // theta_T - alpha_T
    double delay = 0.0;          // seconds
    Vec2 tx_arm{};               // Tx panel centroid minus Tx reference point (world)
};

inline constexpr double kCoincidentTolerance = 1e-9;

inline Link link_geometry(const Vec2& tx_centroid, const Vec2& rx_centroid, double alpha_T, double alpha_R) {
    const Vec2 d = rx_centroid - tx_centroid;
    Link l;
    l.distance = d.norm();
    if (l.distance < kCoincidentTolerance)
        throw Error(ErrorCode::CoincidentPanels, "Tx and Rx panel centroids coincide");
    l.theta_R = d.angle();
    l.theta_T = wrap_angle(l.theta_R + kPi);
    l.theta_R_local = wrap_angle(l.theta_R - alpha_R);
    l.theta_T_local = wrap_angle(l.theta_T - alpha_T);
    l.delay = l.distance / kSpeedOfLight;
    return l;
}

/// Vehicle body footprint; length along the vehicle-frame y-axis.
struct VehicleRect {
    Vec2 center;
    double orientation = 0.0;
    double length = 0.0;
    double width = 0.0;
};

inline VehicleRect vehicle_rect(const VehicleSpec& v, const Pose& pose) {
    return {pose.position(), pose.orientation(), v.length, v.width};
}

/// True iff the open segment (a, b) meets the open rectangle. The rectangle is
/// shrunk by 1e-9 m so that segments lying on an edge count as outside.
inline bool segment_crosses_interior(const Vec2& a, const Vec2& b, const VehicleRect& rect) {
    constexpr double shrink = 1e-9;
    const Vec2 p = (a - rect.center).rotated(-rect.orientation);
    const Vec2 q = (b - rect.center).rotated(-rect.orientation);
    const std::array<double, 2> half{rect.width / 2.0 - shrink, rect.length / 2.0 - shrink};
    const std::array<double, 2> p0{p.x(), p.y()};
    const std::array<double, 2> dd{q.x() - p.x(), q.y() - p.y()};

    double t0 = 0.0, t1 = 1.0;
    for (std::size_t k = 0; k < 2; ++k) {
        if (std::abs(dd[k]) < 1e-15) {
            if (!(std::abs(p0[k]) < half[k])) return false;
            continue;
        }
        double ta = (-half[k] - p0[k]) / dd[k];
        double tb = (half[k] - p0[k]) / dd[k];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
    }
    return t1 - t0 > 1e-12;
}

/// Closed-sector test with a 1e-9 rad margin: directions on the sector edge are blocked.
inline bool in_blocked_sector(double direction, double center, double halfwidth) {
    return std::abs(wrap_angle(direction - center)) <= halfwidth + 1e-9;
}

inline bool los_visible(const PanelWorldState& tx, const PanelWorldState& rx,
                        const VehicleRect& tx_rect, const VehicleRect& rx_rect) {
    const Vec2 d = rx.centroid - tx.centroid;
    if (d.norm() < kCoincidentTolerance) return false;
    const double departure = d.angle();
    const double arrival_back = wrap_angle(departure + kPi);
    if (in_blocked_sector(departure, tx.fov_blocked_center, tx.fov_blocked_halfwidth)) return false;
    if (in_blocked_sector(arrival_back, rx.fov_blocked_center, rx.fov_blocked_halfwidth)) return false;
    if (segment_crosses_interior(tx.centroid, rx.centroid, tx_rect)) return false;
    if (segment_crosses_interior(tx.centroid, rx.centroid, rx_rect)) return false;
    return true;
}

}  // namespace v2vpeb
