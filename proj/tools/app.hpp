#pragma once

// Command-line front end: run configuration, scenario execution and the
// self-check runner. Exit codes: 0 success, 2 bad configuration, 3 numerical failure.

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "v2vpeb/scenarios.hpp"

namespace v2vpeb::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

enum class Scenario { Overtaking, Platooning, Custom };

struct MeasurementSet {
    bool aoa = true;
    bool aoa_tdoa = true;
};

struct RunConfig {
    Scenario scenario = Scenario::Overtaking;
    std::string preset = "cfg_3p5GHz";
    SystemConfig system = preset_3p5ghz();
    MeasurementSet measurements;
    double step = kDefaultStep;
    double q_y_min = -30.0;                 // overtaking
    double q_y_max = 30.0;                  // overtaking
    std::optional<double> lateral_offset;   // overtaking q_x, defaults to -lane_width
    double max_gap = kPlatooningMaxGap;     // platooning
    std::vector<Vec2> points;               // custom
    std::string output;                     // empty: <scenario>_<preset>.csv
    Requirements requirements;
    double crossing_tolerance = 0.01;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Command-line values; each one set here overrides the config file.
struct CliOptions {
    std::optional<std::string> config;
    std::optional<std::string> scenario;
    std::optional<std::string> preset;
    std::optional<std::string> out;
    std::optional<std::string> measurements;
    std::optional<double> step;
    bool selfcheck = false;
};

const char* to_string(Scenario s);
Scenario parse_scenario(const std::string& name);
MeasurementSet parse_measurements(const std::string& name);

/// Builds a validated RunConfig from YAML text plus command-line overrides.
RunConfig config_from_yaml(const std::string& yaml_text, const CliOptions& cli = {});
RunConfig resolve(const CliOptions& cli);
void validate(const RunConfig& cfg);
std::vector<std::string> config_warnings(const RunConfig& cfg);
std::string output_path(const RunConfig& cfg);
std::vector<Vec2> scenario_points(const Evaluator& ev, const RunConfig& cfg);

int run(const CliOptions& cli, std::ostream& out, std::ostream& err);
int run_config(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int run_selfcheck(std::ostream& out);

}  // namespace v2vpeb::app
