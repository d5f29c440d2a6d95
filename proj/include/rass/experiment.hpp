#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rass/market.hpp"
#include "rass/rolling.hpp"
#include "rass/solver.hpp"
#include "rass/storage.hpp"

namespace rass {

/// Parameters of a synthetic error pool requested in a config instead of an
/// errors.csv path.
struct SynthErrorSpec {
    int num_obs = 0;
    double sigma0 = 0.0;
    double gamma = 0.0;
    double rho = 0.0; // common-factor correlation across look-ahead columns
    std::uint64_t seed = 0;
};

enum class RunMode { Static, Rolling };

/// Fully resolved experiment description: grid, resource, data, sweep axes,
/// solver settings. Grids are sorted ascending and deduplicated on load.
struct ExperimentConfig {
    TimeGrid grid;
    StorageSpec storage;
    PriceVector predispatch;
    std::optional<PriceVector> realized; // required in rolling mode
    ErrorPool pool;
    std::vector<double> beta_grid;
    std::vector<double> alpha_grid;
    std::vector<double> e_max_grid; // optional axis; empty = use storage.e_max
    int n_scenarios = 100;
    std::uint64_t seed = 0;
    bool resample_per_window = false;
    SolverConfig solver;
    RunMode mode = RunMode::Static;
    std::string output_dir;

    // source bookkeeping for the manifest
    std::string storage_path;    // empty when given inline
    std::string predispatch_path;
    std::string realized_path;
    std::string errors_path;     // empty when synthetic
    std::optional<SynthErrorSpec> synth_errors;
};

/// Loads and validates a JSON config; every relative path is resolved
/// against the config file's directory. A manifest written by emit_report is
/// itself a loadable config.
ExperimentConfig load_config(const std::string& path);

/// One sweep cell. In static mode net_discharge holds the per-interval
/// discharge-minus-charge series; in rolling mode trace holds the committed
/// schedule and realized_settlement its total cashflow.
struct CellResult {
    double beta = 0.0;
    double alpha = 0.0;
    double e_max = 0.0;
    double expected_profit = 0.0;
    double cvar_cost = 0.0;
    double objective = 0.0;
    double realized_settlement = 0.0;
    long nodes = 0;
    long lp_iterations = 0;
    std::vector<double> net_discharge;
    DispatchTrace trace;
};

struct SweepResult {
    RunMode mode = RunMode::Static;
    std::vector<double> beta_grid, alpha_grid, e_max_grid; // e_max_grid empty if unused
    std::vector<CellResult> cells; // lexicographic by (beta, alpha, e_max)
};

/// Sweep-cell parallelism: RASS_THREADS caps the worker count (default:
/// hardware concurrency). Output order never depends on scheduling.
int sweep_thread_count(int cells);

/// Full-horizon solves over the (beta, alpha, e_max) grid.
SweepResult run_static(const ExperimentConfig& config);

/// Rolling simulations over the grid; requires realized prices.
SweepResult run_rolling(const ExperimentConfig& config);

/// Writes results.csv, profit_table.csv, netdischarge*.csv (static),
/// trace_*.csv (rolling) and manifest.json into out_dir.
void emit_report(const SweepResult& result, const ExperimentConfig& config,
                 const std::string& out_dir);

/// CLI entry points; `out_override` empty keeps the config's output_dir.
/// Mode forced to static / rolling for solve / simulate, taken from the
/// config for sweep.
void cmd_solve(const std::string& config_path, const std::string& out_override);
void cmd_simulate(const std::string& config_path, const std::string& out_override);
void cmd_sweep(const std::string& config_path, const std::string& out_override);
void cmd_synth(int horizon, int kappa_minutes, int num_obs, double sigma0, double gamma,
               double rho, std::uint64_t seed, const std::string& out_dir);

const char* version_string();

} // namespace rass
