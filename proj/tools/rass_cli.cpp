// Command-line front end. Links only the C API of the shared library.
#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "rass.h"

namespace {

// exit codes: 0 success, 2 config/data error, 3 solver failure
int exit_code(rass_status status) {
    switch (status) {
    case RASS_OK: return 0;
    case RASS_EINVAL:
    case RASS_ESHAPE:
    case RASS_EIO: return 2;
    case RASS_ESOLVER:
    case RASS_EINTERNAL: return 3;
    }
    return 3;
}

int finish(rass_status status) {
    if (status != RASS_OK)
        std::fprintf(stderr, "rass: error: %s\n", rass_last_error());
    return exit_code(status);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Risk-averse self-scheduling of electricity storage"};
    app.set_version_flag("--version", std::string("rass ") + rass_version());
    app.require_subcommand(1);

    std::string config_path, out_dir;

    CLI::App* solve = app.add_subcommand("solve", "Static full-horizon solves over the sweep grid");
    solve->add_option("--config", config_path, "Experiment config (JSON)")->required();
    solve->add_option("--out", out_dir, "Output directory (overrides the config)");

    CLI::App* simulate =
        app.add_subcommand("simulate", "Shrinking-horizon rolling simulation over the sweep grid");
    simulate->add_option("--config", config_path, "Experiment config (JSON)")->required();
    simulate->add_option("--out", out_dir, "Output directory (overrides the config)");

    CLI::App* sweep = app.add_subcommand("sweep", "Run the sweep in the mode the config selects");
    sweep->add_option("--config", config_path, "Experiment config (JSON)")->required();
    sweep->add_option("--out", out_dir, "Output directory (overrides the config)");

    int horizon = 48, kappa = 30, num_obs = 1000;
    double sigma0 = 1.0, gamma = 0.5, rho = 0.0;
    std::uint64_t seed = 0;
    std::string synth_out;
    CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic forecast-error pool");
    synth->add_option("--K", horizon, "Number of intervals")->required();
    synth->add_option("--kappa", kappa, "Interval duration in minutes")->required();
    synth->add_option("--obs", num_obs, "Number of observations")->required();
    synth->add_option("--sigma0", sigma0, "Base standard deviation")->required();
    synth->add_option("--gamma", gamma, "Look-ahead variance growth exponent")->required();
    synth->add_option("--rho", rho, "Common-factor correlation across look-aheads (default 0)");
    synth->add_option("--seed", seed, "Generator seed")->required();
    synth->add_option("--out", synth_out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    const char* out = out_dir.empty() ? nullptr : out_dir.c_str();
    if (solve->parsed())
        return finish(rass_cmd_solve(config_path.c_str(), out));
    if (simulate->parsed())
        return finish(rass_cmd_simulate(config_path.c_str(), out));
    if (sweep->parsed())
        return finish(rass_cmd_sweep(config_path.c_str(), out));
    if (synth->parsed())
        return finish(
            rass_cmd_synth(horizon, kappa, num_obs, sigma0, gamma, rho, seed, synth_out.c_str()));
    return 2;
}
