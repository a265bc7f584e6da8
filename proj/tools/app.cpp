#include "app.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "v2vpeb/csv.hpp"
#include "v2vpeb/selfcheck.hpp"

namespace v2vpeb::app {

namespace {

const std::set<std::string> kTopKeys{"scenario", "preset",       "measurements", "output",
                                     "sweep",    "requirements", "system",       "custom"};
const std::set<std::string> kSweepKeys{"step", "min", "max", "lateral_offset", "max_gap", "crossing_tolerance"};
const std::set<std::string> kRequirementKeys{"lateral", "longitudinal"};
const std::set<std::string> kSystemKeys{"carrier_frequency", "subcarrier_spacing", "n_fft",          "occupied_half",
                                        "n_symbols",         "rx_elements",        "tx_elements",    "snr_db",
                                        "vehicle_length",    "vehicle_width",      "lane_width",     "noise_variance",
                                        "tx_corners",        "rx_corners"};
const std::set<std::string> kCustomKeys{"points"};

void check_keys(const YAML::Node& node, const std::set<std::string>& allowed, const std::string& where) {
    if (!node.IsMap()) throw ConfigError(where + ": expected a mapping");
    for (const auto& kv : node) {
        const std::string key = kv.first.as<std::string>();
        if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

template <typename T>
T get(const YAML::Node& node, const std::string& path) {
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError(path + ": invalid value");
    }
}

template <typename T>
void assign(const YAML::Node& parent, const char* key, T& target, const std::string& where) {
    if (const YAML::Node n = parent[key]) target = get<T>(n, where + "." + key);
}

std::size_t get_count(const YAML::Node& node, const std::string& path) {
    const long long v = get<long long>(node, path);
    if (v < 0) throw ConfigError(path + ": must be non-negative");
    return static_cast<std::size_t>(v);
}

void apply_system(const YAML::Node& sys, SystemConfig& c) {
    check_keys(sys, kSystemKeys, "system");
    assign(sys, "carrier_frequency", c.carrier_frequency, "system");
    assign(sys, "subcarrier_spacing", c.subcarrier_spacing, "system");
    assign(sys, "occupied_half", c.occupied_half, "system");
    assign(sys, "snr_db", c.snr_db, "system");
    assign(sys, "vehicle_length", c.vehicle_length, "system");
    assign(sys, "vehicle_width", c.vehicle_width, "system");
    assign(sys, "lane_width", c.lane_width, "system");
    assign(sys, "noise_variance", c.noise_variance, "system");
    assign(sys, "tx_corners", c.tx_corners, "system");
    assign(sys, "rx_corners", c.rx_corners, "system");
    if (const YAML::Node n = sys["n_fft"]) c.n_fft = get_count(n, "system.n_fft");
    if (const YAML::Node n = sys["n_symbols"]) c.n_symbols = get_count(n, "system.n_symbols");
    if (const YAML::Node n = sys["rx_elements"]) c.rx_elements = get_count(n, "system.rx_elements");
    if (const YAML::Node n = sys["tx_elements"]) c.tx_elements = get_count(n, "system.tx_elements");
}

std::vector<Vec2> parse_points(const YAML::Node& node) {
    if (!node.IsSequence()) throw ConfigError("custom.points: expected a list of [x, y] pairs");
    std::vector<Vec2> pts;
    for (std::size_t i = 0; i < node.size(); ++i) {
        const std::string where = "custom.points[" + std::to_string(i) + "]";
        const auto xy = get<std::vector<double>>(node[i], where);
        if (xy.size() != 2) throw ConfigError(where + ": expected [x, y]");
        if (!std::isfinite(xy[0]) || !std::isfinite(xy[1])) throw ConfigError(where + ": not finite");
        pts.emplace_back(xy[0], xy[1]);
    }
    return pts;
}

SystemConfig base_system(const std::string& preset_name) {
    if (preset_name == "custom") {
        SystemConfig c = preset_3p5ghz();
        c.name = "custom";
        return c;
    }
    if (auto p = preset(preset_name)) return *p;
    throw ConfigError("unknown preset '" + preset_name + "' (expected cfg_3p5GHz, cfg_28GHz or custom)");
}

RunConfig build(const YAML::Node& root, const CliOptions& cli) {
    RunConfig cfg;
    const bool has_root = root && !root.IsNull();
    if (has_root) check_keys(root, kTopKeys, "config");

    std::string preset_name = cfg.preset;
    if (has_root && root["preset"]) preset_name = get<std::string>(root["preset"], "preset");
    if (cli.preset) preset_name = *cli.preset;
    cfg.preset = preset_name;
    cfg.system = base_system(preset_name);

    std::string scenario = "overtaking";
    std::string measurements = "both";
    if (has_root) {
        if (root["scenario"]) scenario = get<std::string>(root["scenario"], "scenario");
        if (root["measurements"]) measurements = get<std::string>(root["measurements"], "measurements");
        assign(root, "output", cfg.output, "config");
        if (const YAML::Node sys = root["system"]) apply_system(sys, cfg.system);
        if (const YAML::Node sw = root["sweep"]) {
            check_keys(sw, kSweepKeys, "sweep");
            assign(sw, "step", cfg.step, "sweep");
            assign(sw, "min", cfg.q_y_min, "sweep");
            assign(sw, "max", cfg.q_y_max, "sweep");
            assign(sw, "max_gap", cfg.max_gap, "sweep");
            assign(sw, "crossing_tolerance", cfg.crossing_tolerance, "sweep");
            if (sw["lateral_offset"]) cfg.lateral_offset = get<double>(sw["lateral_offset"], "sweep.lateral_offset");
        }
        if (const YAML::Node req = root["requirements"]) {
            check_keys(req, kRequirementKeys, "requirements");
            assign(req, "lateral", cfg.requirements.lateral_max, "requirements");
            assign(req, "longitudinal", cfg.requirements.longitudinal_max, "requirements");
        }
        if (const YAML::Node cu = root["custom"]) {
            check_keys(cu, kCustomKeys, "custom");
            if (cu["points"]) cfg.points = parse_points(cu["points"]);
        }
    }
    if (cli.scenario) scenario = *cli.scenario;
    if (cli.measurements) measurements = *cli.measurements;
    if (cli.out) cfg.output = *cli.out;
    if (cli.step) cfg.step = *cli.step;
    cfg.scenario = parse_scenario(scenario);
    cfg.measurements = parse_measurements(measurements);
    validate(cfg);
    return cfg;
}

std::string format_bound(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string describe(const Crossing& c, const char* unit_label) {
    char buf[96];
    switch (c.kind) {
    case Crossing::Kind::Crossing:
        std::snprintf(buf, sizeof buf, "met up to %s = %.2f m", unit_label, c.distance);
        return buf;
    case Crossing::Kind::MetEverywhere: return "met everywhere";
    case Crossing::Kind::MetNowhere: return "met nowhere";
    }
    return "?";
}

bool row_is_finite_or_sentinel(const SweepRow& r) {
    for (double v : {r.peb_lat_both, r.peb_lon_both, r.peb_lat_aoa, r.peb_lon_aoa, r.oeb_both, r.oeb_aoa})
        if (std::isnan(v)) return false;
    return true;
}

void print_summary(const Evaluator& ev, const RunConfig& cfg, std::ostream& out) {
    if (cfg.scenario == Scenario::Custom) return;
    const bool overtaking = cfg.scenario == Scenario::Overtaking;
    const char* var = overtaking ? "|q_y|" : "d_y";
    out << "\nrequirement crossings (" << to_string(cfg.scenario) << ", " << cfg.preset << ")\n";
    char line[160];
    std::snprintf(line, sizeof line, "%-10s %-13s %-9s %s\n", "measure", "axis", "limit_m", "result");
    out << line;
    std::vector<std::pair<Measurement, const char*>> ms;
    if (cfg.measurements.aoa_tdoa) ms.emplace_back(Measurement::AoaTdoa, "aoa+tdoa");
    if (cfg.measurements.aoa) ms.emplace_back(Measurement::AoaOnly, "aoa");
    for (const auto& [m, mname] : ms) {
        for (Axis axis : {Axis::Lateral, Axis::Longitudinal}) {
            const Crossing c =
                overtaking ? overtaking_crossing(ev, axis, m, cfg.requirements, cfg.q_y_max, cfg.crossing_tolerance,
                                                 cfg.lateral_offset)
                           : platooning_crossing(ev, axis, m, cfg.requirements, cfg.max_gap, cfg.crossing_tolerance,
                                                 cfg.step);
            std::snprintf(line, sizeof line, "%-10s %-13s %-9s %s\n", mname,
                          axis == Axis::Lateral ? "lateral" : "longitudinal",
                          format_bound(threshold_of(cfg.requirements, axis)).c_str(), describe(c, var).c_str());
            out << line;
        }
    }
}

}  // namespace

const char* to_string(Scenario s) {
    switch (s) {
    case Scenario::Overtaking: return "overtaking";
    case Scenario::Platooning: return "platooning";
    case Scenario::Custom: return "custom";
    }
    return "?";
}

Scenario parse_scenario(const std::string& name) {
    if (name == "overtaking") return Scenario::Overtaking;
    if (name == "platooning") return Scenario::Platooning;
    if (name == "custom") return Scenario::Custom;
    throw ConfigError("unknown scenario '" + name + "' (expected overtaking, platooning or custom)");
}

MeasurementSet parse_measurements(const std::string& name) {
    if (name == "aoa") return {true, false};
    if (name == "aoa+tdoa" || name == "aoa_tdoa") return {false, true};
    if (name == "both") return {true, true};
    throw ConfigError("unknown measurement set '" + name + "' (expected aoa, aoa+tdoa or both)");
}

RunConfig config_from_yaml(const std::string& yaml_text, const CliOptions& cli) {
    YAML::Node root;
    try {
        root = YAML::Load(yaml_text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("YAML parse error: ") + e.what());
    }
    return build(root, cli);
}

RunConfig resolve(const CliOptions& cli) {
    if (!cli.config) return build(YAML::Node(), cli);
    std::ifstream in(*cli.config);
    if (!in) throw ConfigError("cannot read config file '" + *cli.config + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return config_from_yaml(text.str(), cli);
}

void validate(const RunConfig& cfg) {
    const SystemConfig& s = cfg.system;
    auto positive = [](double v, const char* what) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(what) + " must be positive and finite");
    };
    positive(s.carrier_frequency, "system.carrier_frequency");
    positive(s.subcarrier_spacing, "system.subcarrier_spacing");
    positive(s.vehicle_length, "system.vehicle_length");
    positive(s.vehicle_width, "system.vehicle_width");
    positive(s.lane_width, "system.lane_width");
    positive(s.noise_variance, "system.noise_variance");
    if (!std::isfinite(s.snr_db)) throw ConfigError("system.snr_db must be finite");
    if (s.occupied_half < 1) throw ConfigError("system.occupied_half must be >= 1");
    if (s.n_fft < static_cast<std::size_t>(2 * s.occupied_half + 1))
        throw ConfigError("system.n_fft must exceed 2 * occupied_half");
    if (s.n_symbols < 1) throw ConfigError("system.n_symbols must be >= 1");
    if (s.rx_elements < 1 || s.tx_elements < 1) throw ConfigError("element counts must be >= 1");
    for (const auto* corners : {&s.tx_corners, &s.rx_corners}) {
        if (corners->empty()) throw ConfigError("corner lists must not be empty");
        std::set<int> seen;
        for (int c : *corners) {
            if (c < 1 || c > 4) throw ConfigError("corner indices must be in 1..4");
            if (!seen.insert(c).second) throw ConfigError("corner indices must be distinct");
        }
    }
    positive(cfg.step, "sweep.step");
    positive(cfg.crossing_tolerance, "sweep.crossing_tolerance");
    positive(cfg.requirements.lateral_max, "requirements.lateral");
    positive(cfg.requirements.longitudinal_max, "requirements.longitudinal");
    if (!cfg.measurements.aoa && !cfg.measurements.aoa_tdoa) throw ConfigError("no measurement set selected");
    switch (cfg.scenario) {
    case Scenario::Overtaking:
        if (!(cfg.q_y_max > cfg.q_y_min)) throw ConfigError("sweep.max must exceed sweep.min");
        if (!(cfg.q_y_max > cfg.crossing_tolerance)) throw ConfigError("sweep.max must be positive");
        if (cfg.lateral_offset && !std::isfinite(*cfg.lateral_offset))
            throw ConfigError("sweep.lateral_offset must be finite");
        break;
    case Scenario::Platooning:
        if (!(cfg.max_gap >= cfg.step)) throw ConfigError("sweep.max_gap must be at least one step");
        break;
    case Scenario::Custom:
        if (cfg.points.empty()) throw ConfigError("custom scenario needs custom.points");
        break;
    }
}

std::vector<std::string> config_warnings(const RunConfig& cfg) {
    std::vector<std::string> w;
    const double ratio = cfg.system.occupied_half * cfg.system.subcarrier_spacing / cfg.system.carrier_frequency;
    if (ratio > 0.05) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "narrowband assumption weak: highest subcarrier offset is %.3g of the carrier frequency", ratio);
        w.emplace_back(buf);
    }
    return w;
}

std::string output_path(const RunConfig& cfg) {
    if (!cfg.output.empty()) return cfg.output;
    return std::string(to_string(cfg.scenario)) + "_" + cfg.preset + ".csv";
}

std::vector<Vec2> scenario_points(const Evaluator& ev, const RunConfig& cfg) {
    switch (cfg.scenario) {
    case Scenario::Overtaking: return overtaking_grid(ev, cfg.q_y_min, cfg.q_y_max, cfg.step, cfg.lateral_offset);
    case Scenario::Platooning: return platooning_grid(ev, cfg.max_gap, cfg.step);
    case Scenario::Custom: return cfg.points;
    }
    return {};
}

int run_config(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    for (const auto& w : config_warnings(cfg)) err << "warning: " << w << "\n";

    std::optional<Evaluator> ev;
    try {
        ev.emplace(cfg.system);
    } catch (const Error& e) {
        err << "error: invalid system configuration: " << e.what() << "\n";
        return kExitConfig;
    }

    const std::vector<Vec2> points = scenario_points(*ev, cfg);
    std::vector<SweepRow> rows;
    rows.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Vec2& q = points[i];
        try {
            rows.push_back(ev->evaluate(q));
        } catch (const Error& e) {
            err << "error: numerical failure at row " << i << " (q_x=" << q.x() << ", q_y=" << q.y()
                << "): " << e.what() << "\n";
            return kExitNumerical;
        }
        if (!row_is_finite_or_sentinel(rows.back())) {
            err << "error: NaN bound at row " << i << " (q_x=" << q.x() << ", q_y=" << q.y() << ")\n";
            return kExitNumerical;
        }
    }

    const std::string path = output_path(cfg);
    try {
        emit_csv(path, rows);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    out << "scenario " << to_string(cfg.scenario) << ", preset " << cfg.preset << ": " << rows.size()
        << " rows written to " << path << "\n";
    try {
        print_summary(*ev, cfg, out);
    } catch (const Error& e) {
        err << "error: numerical failure in crossing search: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}

int run(const CliOptions& cli, std::ostream& out, std::ostream& err) {
    if (cli.selfcheck) return run_selfcheck(out);
    RunConfig cfg;
    try {
        cfg = resolve(cli);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    return run_config(cfg, out, err);
}

int run_selfcheck(std::ostream& out) {
    using clock = std::chrono::steady_clock;
    auto seconds = [](clock::time_point a) { return std::chrono::duration<double>(clock::now() - a).count(); };
    char line[160];
    bool ok = true;
    out << "self-check, seed " << kSelfCheckSeed << "\n";
    try {
        auto t0 = clock::now();
        const EquivalenceReport eq = check_closed_vs_schur(100);
        const bool eq_ok = eq.max_err_aoa_tdoa < 1e-8 && eq.max_err_aoa_only < 1e-8;
        std::snprintf(line, sizeof line,
                      "closed form vs Schur (%zu scenes): aoa+tdoa %.3e, aoa %.3e  [%s, %.2f s]\n", eq.scenes,
                      eq.max_err_aoa_tdoa, eq.max_err_aoa_only, eq_ok ? "ok" : "FAIL", seconds(t0));
        out << line;

        t0 = clock::now();
        const FdReport fd = check_fd_channel_fim(20);
        const bool fd_ok = fd.max_err < 1e-5;
        std::snprintf(line, sizeof line, "analytic vs finite-difference channel FIM (%zu scenes): %.3e  [%s, %.2f s]\n",
                      fd.scenes, fd.max_err, fd_ok ? "ok" : "FAIL", seconds(t0));
        out << line;

        t0 = clock::now();
        const double inv = check_reference_invariance(20);
        const bool inv_ok = inv < 1e-10;
        std::snprintf(line, sizeof line, "reference-link invariance (20 scenes): %.3e  [%s, %.2f s]\n", inv,
                      inv_ok ? "ok" : "FAIL", seconds(t0));
        out << line;
        ok = eq_ok && fd_ok && inv_ok;
    } catch (const Error& e) {
        out << "self-check aborted: " << e.what() << "\n";
        return kExitNumerical;
    }
    return ok ? kExitOk : kExitNumerical;
}

}  // namespace v2vpeb::app
