#include <iostream>

#include <CLI11.hpp>

#include "app.hpp"

int main(int argc, char** argv) {
    using namespace v2vpeb::app;
    CLI::App cli_app{"CRB position/orientation error bounds for V2V multi-array relative positioning"};
    CliOptions opt;
    cli_app.add_option("--config", opt.config, "YAML run configuration")->check(CLI::ExistingFile);
    cli_app.add_option("--scenario", opt.scenario, "overtaking, platooning or custom");
    cli_app.add_option("--preset", opt.preset, "cfg_3p5GHz, cfg_28GHz or custom");
    cli_app.add_option("--out", opt.out, "CSV output path");
    cli_app.add_option("--measurements", opt.measurements, "aoa, aoa+tdoa or both");
    cli_app.add_option("--step", opt.step, "sweep step in meters");
    cli_app.add_flag("--selfcheck", opt.selfcheck, "run the oracle-equivalence checks and exit");
    try {
        cli_app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = cli_app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }
    return run(opt, std::cout, std::cerr);
}
