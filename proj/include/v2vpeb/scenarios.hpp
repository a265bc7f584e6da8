#pragma once

// System presets, overtaking/platooning sweeps, and requirement-crossing search.

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "v2vpeb/channel.hpp"
#include "v2vpeb/errors.hpp"
#include "v2vpeb/fim_closed.hpp"
#include "v2vpeb/scene.hpp"
#include "v2vpeb/waveform.hpp"

namespace v2vpeb {

struct SystemConfig {
    std::string name = "cfg_3p5GHz";
    double carrier_frequency = 3.5e9;
    double subcarrier_spacing = 60e3;
    std::size_t n_fft = 2048;
    int occupied_half = 600;  // P = {-half..-1, 1..half}
    std::size_t n_symbols = 1;
    std::size_t rx_elements = 4;
    std::size_t tx_elements = 4;
    double snr_db = 36.0;     // post-beamforming SNR of the shortest side-by-side link
    double vehicle_length = 4.5;
    double vehicle_width = 1.8;
    double lane_width = 3.5;
    double noise_variance = 1.0;
    std::vector<int> tx_corners{1, 2, 3, 4};
    std::vector<int> rx_corners{1, 2, 3, 4};
};

inline SystemConfig preset_3p5ghz() { return {}; }

inline SystemConfig preset_28ghz() {
    SystemConfig c;
    c.name = "cfg_28GHz";
    c.carrier_frequency = 28e9;
    c.subcarrier_spacing = 240e3;
    c.rx_elements = 25;
    c.tx_elements = 25;
    c.snr_db = 30.0;
    return c;
}

inline std::optional<SystemConfig> preset(const std::string& name) {
    if (name == "cfg_3p5GHz") return preset_3p5ghz();
    if (name == "cfg_28GHz") return preset_28ghz();
    return std::nullopt;
}

struct Requirements {
    double lateral_max = 0.1;
    double longitudinal_max = 0.5;
};

struct SweepRow {
    double q_x = 0.0;
    double q_y = 0.0;
    double d_y = 0.0;  // |q_y| - vehicle length
    std::size_t n_links = 0;
    double peb_lat_both = kInf;
    double peb_lon_both = kInf;
    double peb_lat_aoa = kInf;
    double peb_lon_aoa = kInf;
    double oeb_both = kInf;
    double oeb_aoa = kInf;
};

enum class Axis { Lateral, Longitudinal };
enum class Measurement { AoaTdoa, AoaOnly };

inline double bound_of(const SweepRow& r, Axis axis, Measurement m) {
    if (axis == Axis::Lateral) return m == Measurement::AoaTdoa ? r.peb_lat_both : r.peb_lat_aoa;
    return m == Measurement::AoaTdoa ? r.peb_lon_both : r.peb_lon_aoa;
}

/// Calibrated scene factory for one system configuration. The Tx vehicle
/// sits at the origin; `scene_at(q)` places the Rx vehicle at q.
class Evaluator {
public:
    explicit Evaluator(SystemConfig cfg) : cfg_(std::move(cfg)) {
        if (!(cfg_.lane_width > 0.0)) throw Error(ErrorCode::InvalidArgument, "lane width must be positive");
        if (!(cfg_.noise_variance > 0.0)) throw Error(ErrorCode::InvalidArgument, "noise variance must be positive");
        if (cfg_.occupied_half < 1) throw Error(ErrorCode::EmptySet, "occupied_half must be >= 1");
        const double lambda = kSpeedOfLight / cfg_.carrier_frequency;
        base_.tx_vehicle = make_corner_vehicle(cfg_.vehicle_length, cfg_.vehicle_width, cfg_.tx_elements, lambda,
                                               cfg_.tx_corners);
        base_.rx_vehicle = make_corner_vehicle(cfg_.vehicle_length, cfg_.vehicle_width, cfg_.rx_elements, lambda,
                                               cfg_.rx_corners);
        base_.ofdm.n_fft = cfg_.n_fft;
        base_.ofdm.subcarrier_spacing = cfg_.subcarrier_spacing;
        base_.ofdm.carrier_frequency = cfg_.carrier_frequency;
        base_.ofdm.occupied = symmetric_occupied(cfg_.occupied_half);
        base_.ofdm.n_symbols = cfg_.n_symbols;
        base_.ofdm.total_power = 1.0;
        base_.allocation = interleaved_allocation(base_.ofdm.occupied, base_.tx_vehicle.panels.size());
        base_.noise_variance.assign(base_.rx_vehicle.panels.size(), cfg_.noise_variance);
        validate(base_);
        betas_ = effective_bandwidths(base_.allocation, base_.ofdm);
        base_.ofdm.total_power = calibrate_power(scene_at({-cfg_.lane_width, 0.0}), cfg_.snr_db);
    }

    const SystemConfig& config() const noexcept { return cfg_; }
    const std::vector<double>& betas() const noexcept { return betas_; }
    double total_power() const noexcept { return base_.ofdm.total_power; }
    const Scene& base_scene() const noexcept { return base_; }

    Scene scene_at(const Vec2& q, double alpha_T = 0.0, double alpha_R = 0.0) const {
        Scene s = base_;
        s.tx_pose = Pose({0.0, 0.0}, alpha_T);
        s.rx_pose = Pose(q, alpha_R);
        return s;
    }

    struct Evaluation {
        LinkSet links;
        std::vector<LinkGain> gains;
        FimResult both;
        FimResult aoa;
    };

    /// Both EFIMs at q; an empty link set yields singular (infinite-bound) results.
    Evaluation evaluate_full(const Vec2& q, double alpha_T = 0.0, double alpha_R = 0.0) const {
        const Scene s = scene_at(q, alpha_T, alpha_R);
        Evaluation e;
        e.links = visible_links(s);
        if (e.links.empty()) return e;
        e.gains = link_gains(s, e.links);
        e.both = efim_aoa_tdoa(s, e.links, e.gains, betas_);
        e.aoa = efim_aoa_only(s, e.links, e.gains);
        return e;
    }

    SweepRow evaluate(const Vec2& q) const {
        const Evaluation e = evaluate_full(q);
        SweepRow r;
        r.q_x = q.x();
        r.q_y = q.y();
        r.d_y = std::abs(q.y()) - cfg_.vehicle_length;
        r.n_links = e.links.size();
        r.peb_lat_both = e.both.peb_lat;
        r.peb_lon_both = e.both.peb_lon;
        r.oeb_both = e.both.oeb;
        r.peb_lat_aoa = e.aoa.peb_lat;
        r.peb_lon_aoa = e.aoa.peb_lon;
        r.oeb_aoa = e.aoa.oeb;
        return r;
    }

private:
    SystemConfig cfg_;
    Scene base_;
    std::vector<double> betas_;
};

inline constexpr double kDefaultStep = 0.25;
inline constexpr double kPlatooningMaxGap = 25.5;

inline std::size_t grid_count(double span, double step) {
    if (!(step > 0.0)) throw Error(ErrorCode::InvalidArgument, "sweep step must be positive");
    if (!(span >= 0.0)) throw Error(ErrorCode::InvalidArgument, "sweep range is empty");
    return static_cast<std::size_t>(std::floor(span / step + 1e-9));
}

/// Overtaking grid q = (q_x, q_y_min + i*step) up to q_y_max; q_x defaults to -lane width.
inline std::vector<Vec2> overtaking_grid(const Evaluator& ev, double q_y_min = -30.0, double q_y_max = 30.0,
                                         double step = kDefaultStep, std::optional<double> q_x = std::nullopt) {
    const double qx = q_x.value_or(-ev.config().lane_width);
    const std::size_t n = grid_count(q_y_max - q_y_min, step) + 1;
    std::vector<Vec2> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) pts.emplace_back(qx, q_y_min + static_cast<double>(i) * step);
    return pts;
}

/// Platooning grid behind the Tx vehicle at bumper gaps d_y = step, 2*step, ... up to d_y_max.
/// d_y = 0 is excluded: the Tx rear and Rx front panels would coincide.
inline std::vector<Vec2> platooning_grid(const Evaluator& ev, double d_y_max = kPlatooningMaxGap,
                                         double step = kDefaultStep) {
    const std::size_t n = grid_count(d_y_max, step);
    std::vector<Vec2> pts;
    pts.reserve(n);
    for (std::size_t i = 1; i <= n; ++i)
        pts.emplace_back(0.0, -(ev.config().vehicle_length + static_cast<double>(i) * step));
    return pts;
}

inline std::vector<SweepRow> sweep(const Evaluator& ev, const std::vector<Vec2>& points) {
    std::vector<SweepRow> rows;
    rows.reserve(points.size());
    for (const Vec2& q : points) rows.push_back(ev.evaluate(q));
    return rows;
}

inline std::vector<SweepRow> overtaking_sweep(const Evaluator& ev, double q_y_min = -30.0, double q_y_max = 30.0,
                                              double step = kDefaultStep, std::optional<double> q_x = std::nullopt) {
    return sweep(ev, overtaking_grid(ev, q_y_min, q_y_max, step, q_x));
}

inline std::vector<SweepRow> platooning_sweep(const Evaluator& ev, double d_y_max = kPlatooningMaxGap,
                                              double step = kDefaultStep) {
    return sweep(ev, platooning_grid(ev, d_y_max, step));
}

struct Crossing {
    enum class Kind { Crossing, MetEverywhere, MetNowhere };
    Kind kind = Kind::Crossing;
    double distance = 0.0;  // largest distance with bound <= threshold (Crossing only)
};

inline const char* to_string(Crossing::Kind k) {
    switch (k) {
    case Crossing::Kind::Crossing: return "crossing";
    case Crossing::Kind::MetEverywhere: return "met everywhere";
    case Crossing::Kind::MetNowhere: return "met nowhere";
    }
    return "?";
}

/// Bisection for the largest x in [lo, hi] with bound(x) <= threshold, assuming
/// a single crossing; `tol` is the absolute bracket width at termination.
inline Crossing requirement_crossing(const std::function<double(double)>& bound, double lo, double hi,
                                     double threshold, double tol = 0.01) {
    if (!(hi > lo) || !(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "invalid crossing search range");
    if (!(bound(lo) <= threshold)) return {Crossing::Kind::MetNowhere, lo};
    if (bound(hi) <= threshold) return {Crossing::Kind::MetEverywhere, hi};
    double a = lo, b = hi;
    while (b - a > tol) {
        const double mid = 0.5 * (a + b);
        (bound(mid) <= threshold ? a : b) = mid;
    }
    return {Crossing::Kind::Crossing, a};
}

inline double threshold_of(const Requirements& req, Axis axis) {
    return axis == Axis::Lateral ? req.lateral_max : req.longitudinal_max;
}

/// Crossing along |q_y| in the overtaking geometry (Rx ahead, q_y > 0).
inline Crossing overtaking_crossing(const Evaluator& ev, Axis axis, Measurement m, const Requirements& req = {},
                                    double max_offset = 30.0, double tol = 0.01,
                                    std::optional<double> q_x = std::nullopt) {
    const double qx = q_x.value_or(-ev.config().lane_width);
    return requirement_crossing(
        [&](double y) { return bound_of(ev.evaluate({qx, y}), axis, m); }, tol, max_offset,
        threshold_of(req, axis), tol);
}

/// Crossing along the platooning bumper gap d_y over [min_gap, max_gap]; the
/// search starts at the first sweep gap since the panels coincide at d_y = 0.
inline Crossing platooning_crossing(const Evaluator& ev, Axis axis, Measurement m, const Requirements& req = {},
                                    double max_gap = kPlatooningMaxGap, double tol = 0.01,
                                    double min_gap = kDefaultStep) {
    const double len = ev.config().vehicle_length;
    return requirement_crossing(
        [&](double dy) { return bound_of(ev.evaluate({0.0, -(len + dy)}), axis, m); }, min_gap, max_gap,
        threshold_of(req, axis), tol);
}

}  // namespace v2vpeb
