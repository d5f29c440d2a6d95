#include "rass/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "rass/csv.hpp"
#include "rass/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace rass {

namespace {

std::string key_fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string money_fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::string resolve_path(const fs::path& base_dir, const std::string& raw) {
    fs::path p(raw);
    if (p.is_absolute())
        return p.lexically_normal().string();
    return (base_dir / p).lexically_normal().string();
}

StorageSpec storage_from_json(const json& j, const std::string& context) {
    StorageSpec spec;
    try {
        spec.p_c_max = j.at("p_c_max").get<double>();
        spec.p_d_max = j.at("p_d_max").get<double>();
        spec.eta = j.at("eta").get<double>();
        spec.e_min = j.at("e_min").get<double>();
        spec.e_max = j.at("e_max").get<double>();
        spec.e_init = j.contains("e_init") ? j.at("e_init").get<double>() : spec.e_min;
    } catch (const json::exception& e) {
        throw ConfigError(context + ": " + e.what());
    }
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(context + ": " + e.what());
    }
    return spec;
}

std::vector<double> sorted_grid(const json& j, const std::string& name) {
    std::vector<double> grid;
    try {
        grid = j.get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw ConfigError(name + ": " + e.what());
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

struct CellKey {
    double beta, alpha, e_max;
};

std::vector<CellKey> cell_grid(const ExperimentConfig& config) {
    const std::vector<double> emax_axis =
        config.e_max_grid.empty() ? std::vector<double>{config.storage.e_max} : config.e_max_grid;
    std::vector<CellKey> cells;
    cells.reserve(config.beta_grid.size() * config.alpha_grid.size() * emax_axis.size());
    for (double beta : config.beta_grid)
        for (double alpha : config.alpha_grid)
            for (double e_max : emax_axis)
                cells.push_back({beta, alpha, e_max});
    return cells;
}

StorageSpec cell_storage(const StorageSpec& base, double e_max) {
    StorageSpec spec = base;
    spec.e_max = e_max;
    if (spec.e_min > e_max)
        throw ConfigError("e_max grid value " + key_fmt(e_max) + " lies below e_min " +
                          key_fmt(spec.e_min));
    spec.e_init = std::min(spec.e_init, e_max);
    spec.validate();
    return spec;
}

void run_cells(std::size_t count, const std::function<void(std::size_t)>& body) {
    const int threads = sweep_thread_count(static_cast<int>(count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex mutex;
    std::exception_ptr first_error;
    std::size_t first_error_cell = std::numeric_limits<std::size_t>::max();
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count)
                return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mutex);
                if (i < first_error_cell) {
                    first_error_cell = i;
                    first_error = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t)
        pool.emplace_back(worker);
    for (std::thread& t : pool)
        t.join();
    if (first_error)
        std::rethrow_exception(first_error);
}

void validate_config(const ExperimentConfig& config) {
    if (config.beta_grid.empty() || config.alpha_grid.empty())
        throw ConfigError("beta_grid and alpha_grid must be non-empty");
    for (double b : config.beta_grid)
        if (!(b >= 0.0))
            throw ConfigError("beta values must be nonnegative");
    for (double a : config.alpha_grid)
        if (!(a >= 0.0) || !(a < 1.0))
            throw ConfigError("alpha values must lie in [0,1)");
    if (config.n_scenarios < 1)
        throw ConfigError("n_scenarios must be positive");
    config.storage.validate();
    config.solver.validate();
    try {
        config.predispatch.validate(config.grid);
        config.pool.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (config.pool.horizon < config.grid.num_intervals)
        throw ConfigError("error pool has fewer look-ahead columns than the grid has intervals");
    if (config.n_scenarios > config.pool.num_obs)
        throw ConfigError("n_scenarios exceeds the number of pool observations");
    if (config.mode == RunMode::Rolling) {
        if (!config.realized)
            throw ConfigError("rolling mode requires realized prices");
        try {
            config.realized->validate(config.grid);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
}

} // namespace

const char* version_string() { return "0.1.0"; }

int sweep_thread_count(int cells) {
    if (cells <= 1)
        return 1;
    int threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1)
        threads = 1;
    if (const char* env = std::getenv("RASS_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1)
            threads = static_cast<int>(std::min<long>(v, 1024));
    }
    return std::min(threads, cells);
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    const fs::path base_dir = fs::absolute(fs::path(path)).parent_path();

    ExperimentConfig config;
    try {
        const json& grid = j.at("grid");
        config.grid = TimeGrid(grid.at("kappa_minutes").get<int>(), grid.at("K").get<int>());
    } catch (const json::exception& e) {
        throw ConfigError(path + ": grid: " + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path + ": grid: " + e.what());
    }

    if (!j.contains("storage"))
        throw ConfigError(path + ": missing 'storage'");
    if (j["storage"].is_string()) {
        config.storage_path = resolve_path(base_dir, j["storage"].get<std::string>());
        config.storage = load_storage_json(config.storage_path);
    } else {
        config.storage = storage_from_json(j["storage"], path + ": storage");
    }

    if (!j.contains("predispatch"))
        throw ConfigError(path + ": missing 'predispatch'");
    config.predispatch_path = resolve_path(base_dir, j["predispatch"].get<std::string>());
    config.predispatch = read_price_csv(config.predispatch_path);

    if (j.contains("realized")) {
        config.realized_path = resolve_path(base_dir, j["realized"].get<std::string>());
        config.realized = read_price_csv(config.realized_path);
    }

    const bool has_errors = j.contains("errors");
    const bool has_synth = j.contains("synthetic_errors");
    if (has_errors == has_synth)
        throw ConfigError(path + ": provide exactly one of 'errors' or 'synthetic_errors'");
    if (has_errors) {
        config.errors_path = resolve_path(base_dir, j["errors"].get<std::string>());
        config.pool = read_error_csv(config.errors_path);
    } else {
        const json& s = j["synthetic_errors"];
        SynthErrorSpec synth;
        try {
            synth.num_obs = s.at("num_obs").get<int>();
            synth.sigma0 = s.at("sigma0").get<double>();
            synth.gamma = s.at("gamma").get<double>();
            synth.rho = s.value("rho", 0.0);
            synth.seed = s.at("seed").get<std::uint64_t>();
        } catch (const json::exception& e) {
            throw ConfigError(path + ": synthetic_errors: " + e.what());
        }
        config.synth_errors = synth;
        try {
            config.pool = synth_pool(config.grid.num_intervals, synth.num_obs, synth.sigma0,
                                     synth.gamma, synth.seed, synth.rho);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(path + ": synthetic_errors: " + e.what());
        }
    }

    try {
        config.beta_grid = sorted_grid(j.at("beta_grid"), path + ": beta_grid");
        config.alpha_grid = sorted_grid(j.at("alpha_grid"), path + ": alpha_grid");
        if (j.contains("e_max_grid"))
            config.e_max_grid = sorted_grid(j["e_max_grid"], path + ": e_max_grid");
        config.n_scenarios = j.at("n_scenarios").get<int>();
        config.seed = j.at("seed").get<std::uint64_t>();
        config.resample_per_window = j.value("resample_per_window", false);
        if (j.contains("solver")) {
            const json& s = j["solver"];
            config.solver.feas_tol = s.value("feas_tol", config.solver.feas_tol);
            config.solver.int_tol = s.value("int_tol", config.solver.int_tol);
            config.solver.abs_gap = s.value("abs_gap", config.solver.abs_gap);
            config.solver.rel_gap = s.value("rel_gap", config.solver.rel_gap);
            config.solver.node_limit = s.value("node_limit", config.solver.node_limit);
            config.solver.time_limit_sec = s.value("time_limit_sec", config.solver.time_limit_sec);
        }
        const std::string mode = j.value("mode", std::string("static"));
        if (mode == "static")
            config.mode = RunMode::Static;
        else if (mode == "rolling")
            config.mode = RunMode::Rolling;
        else
            throw ConfigError(path + ": mode must be 'static' or 'rolling'");
        config.output_dir = resolve_path(base_dir, j.value("output_dir", std::string("out")));
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }

    validate_config(config);
    return config;
}

SweepResult run_static(const ExperimentConfig& config) {
    validate_config(config);
    const ScenarioSet scenarios =
        build_scenarios(config.predispatch, config.pool, config.n_scenarios, config.seed);
    const std::vector<CellKey> keys = cell_grid(config);

    SweepResult result;
    result.mode = RunMode::Static;
    result.beta_grid = config.beta_grid;
    result.alpha_grid = config.alpha_grid;
    result.e_max_grid = config.e_max_grid;
    result.cells.resize(keys.size());

    run_cells(keys.size(), [&](std::size_t i) {
        const CellKey& key = keys[i];
        const StorageSpec spec = cell_storage(config.storage, key.e_max);
        const RiskParams risk{key.alpha, key.beta};
        const MilpInstance instance = assemble_rass(spec, config.grid, scenarios, risk);
        const MilpSolution milp = solve_milp(instance, config.solver);
        if (milp.status != SolveStatus::Optimal)
            throw SolverError("cell beta=" + key_fmt(key.beta) + " alpha=" + key_fmt(key.alpha) +
                              " e_max=" + key_fmt(key.e_max) + " did not solve: " +
                              status_name(milp.status));
        const RassSolution sol = extract_solution(instance, milp, scenarios, config.grid, risk);

        CellResult& cell = result.cells[i];
        cell.beta = key.beta;
        cell.alpha = key.alpha;
        cell.e_max = key.e_max;
        cell.expected_profit = sol.expected_profit;
        cell.cvar_cost = sol.cvar_cost;
        cell.objective = sol.objective;
        cell.realized_settlement = std::numeric_limits<double>::quiet_NaN();
        cell.nodes = sol.nodes;
        cell.lp_iterations = sol.lp_iterations;
        cell.net_discharge.reserve(sol.dispatch.size());
        for (const DispatchPoint& pt : sol.dispatch)
            cell.net_discharge.push_back(pt.discharge_mw - pt.charge_mw);
    });
    return result;
}

SweepResult run_rolling(const ExperimentConfig& config) {
    validate_config(config);
    if (!config.realized)
        throw ConfigError("rolling mode requires realized prices");
    const std::vector<CellKey> keys = cell_grid(config);

    SweepResult result;
    result.mode = RunMode::Rolling;
    result.beta_grid = config.beta_grid;
    result.alpha_grid = config.alpha_grid;
    result.e_max_grid = config.e_max_grid;
    result.cells.resize(keys.size());

    run_cells(keys.size(), [&](std::size_t i) {
        const CellKey& key = keys[i];
        const StorageSpec spec = cell_storage(config.storage, key.e_max);
        const RiskParams risk{key.alpha, key.beta};
        const SimOptions options{config.n_scenarios, config.seed, config.resample_per_window};
        const DispatchTrace trace = simulate(spec, config.grid, config.predispatch, config.pool,
                                             *config.realized, risk, options, config.solver);

        CellResult& cell = result.cells[i];
        cell.beta = key.beta;
        cell.alpha = key.alpha;
        cell.e_max = key.e_max;
        // ex-ante view from the first window; realized settlement from the trace
        cell.expected_profit = trace.entries.front().window_expected_profit;
        cell.cvar_cost = trace.entries.front().window_cvar_cost;
        cell.objective = trace.entries.front().window_objective;
        cell.realized_settlement = settlement_total(trace);
        for (const TraceEntry& e : trace.entries) {
            cell.nodes += e.nodes;
            cell.lp_iterations += e.lp_iterations;
        }
        cell.trace = trace;
    });
    return result;
}

namespace {

void write_results_csv(const SweepResult& result, const fs::path& out_dir) {
    std::ofstream out(out_dir / "results.csv");
    if (!out)
        throw IoError("cannot write " + (out_dir / "results.csv").string());
    out << "beta,alpha,e_max,expected_profit,cvar_cost,objective,realized_settlement,nodes,lp_"
           "iterations\n";
    for (const CellResult& cell : result.cells) {
        out << key_fmt(cell.beta) << "," << key_fmt(cell.alpha) << "," << key_fmt(cell.e_max) << ","
            << money_fmt(cell.expected_profit) << "," << money_fmt(cell.cvar_cost) << ","
            << money_fmt(cell.objective) << ",";
        if (result.mode == RunMode::Rolling)
            out << money_fmt(cell.realized_settlement);
        out << "," << cell.nodes << "," << cell.lp_iterations << "\n";
    }
}

void write_profit_table(const SweepResult& result, const fs::path& out_dir) {
    std::ofstream out(out_dir / "profit_table.csv");
    if (!out)
        throw IoError("cannot write " + (out_dir / "profit_table.csv").string());
    const auto cell_at = [&](double beta, double alpha, double e_max) -> const CellResult& {
        for (const CellResult& c : result.cells)
            if (c.beta == beta && c.alpha == alpha && (result.e_max_grid.empty() || c.e_max == e_max))
                return c;
        throw IoError("profit table: missing sweep cell");
    };
    if (result.e_max_grid.empty()) {
        out << "beta";
        for (double alpha : result.alpha_grid)
            out << ",alpha=" << key_fmt(alpha);
        out << "\n";
        for (double beta : result.beta_grid) {
            out << key_fmt(beta);
            for (double alpha : result.alpha_grid)
                out << "," << money_fmt(cell_at(beta, alpha, 0.0).expected_profit);
            out << "\n";
        }
    } else {
        out << "beta,alpha";
        for (double e_max : result.e_max_grid)
            out << ",emax=" << key_fmt(e_max);
        out << "\n";
        for (double beta : result.beta_grid)
            for (double alpha : result.alpha_grid) {
                out << key_fmt(beta) << "," << key_fmt(alpha);
                for (double e_max : result.e_max_grid)
                    out << "," << money_fmt(cell_at(beta, alpha, e_max).expected_profit);
                out << "\n";
            }
    }
}

void write_netdischarge(const SweepResult& result, const fs::path& out_dir) {
    const std::vector<double> emax_axis =
        result.e_max_grid.empty() ? std::vector<double>{result.cells.front().e_max}
                                  : result.e_max_grid;
    const bool single = result.alpha_grid.size() == 1 && emax_axis.size() == 1;
    for (double alpha : result.alpha_grid) {
        for (double e_max : emax_axis) {
            std::vector<const CellResult*> columns;
            for (double beta : result.beta_grid)
                for (const CellResult& c : result.cells)
                    if (c.beta == beta && c.alpha == alpha && c.e_max == e_max)
                        columns.push_back(&c);
            if (columns.empty())
                continue;
            const std::string name =
                single ? "netdischarge.csv"
                       : "netdischarge_alpha" + key_fmt(alpha) + "_emax" + key_fmt(e_max) + ".csv";
            std::ofstream out(out_dir / name);
            if (!out)
                throw IoError("cannot write " + (out_dir / name).string());
            out << "period";
            for (const CellResult* c : columns)
                out << ",beta=" << key_fmt(c->beta);
            out << "\n";
            const std::size_t horizon = columns.front()->net_discharge.size();
            for (std::size_t k = 0; k < horizon; ++k) {
                out << (k + 1);
                for (const CellResult* c : columns)
                    out << "," << money_fmt(c->net_discharge[k]);
                out << "\n";
            }
        }
    }
}

json config_manifest(const ExperimentConfig& config) {
    json j;
    j["version"] = version_string();
    j["grid"] = {{"kappa_minutes", config.grid.kappa_minutes}, {"K", config.grid.num_intervals}};
    j["storage"] = {{"p_c_max", config.storage.p_c_max}, {"p_d_max", config.storage.p_d_max},
                    {"eta", config.storage.eta},         {"e_min", config.storage.e_min},
                    {"e_max", config.storage.e_max},     {"e_init", config.storage.e_init}};
    j["predispatch"] = config.predispatch_path;
    if (!config.realized_path.empty())
        j["realized"] = config.realized_path;
    if (config.synth_errors) {
        j["synthetic_errors"] = {{"num_obs", config.synth_errors->num_obs},
                                 {"sigma0", config.synth_errors->sigma0},
                                 {"gamma", config.synth_errors->gamma},
                                 {"rho", config.synth_errors->rho},
                                 {"seed", config.synth_errors->seed}};
    } else {
        j["errors"] = config.errors_path;
    }
    j["beta_grid"] = config.beta_grid;
    j["alpha_grid"] = config.alpha_grid;
    if (!config.e_max_grid.empty())
        j["e_max_grid"] = config.e_max_grid;
    j["n_scenarios"] = config.n_scenarios;
    j["seed"] = config.seed;
    j["resample_per_window"] = config.resample_per_window;
    j["solver"] = {{"feas_tol", config.solver.feas_tol},
                   {"int_tol", config.solver.int_tol},
                   {"abs_gap", config.solver.abs_gap},
                   {"rel_gap", config.solver.rel_gap},
                   {"node_limit", config.solver.node_limit},
                   {"time_limit_sec", config.solver.time_limit_sec}};
    j["mode"] = config.mode == RunMode::Static ? "static" : "rolling";
    j["output_dir"] = config.output_dir;
    return j;
}

} // namespace

void emit_report(const SweepResult& result, const ExperimentConfig& config,
                 const std::string& out_dir) {
    if (result.cells.empty())
        throw std::invalid_argument("emit_report: no sweep cells");
    const fs::path dir(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create output directory " + out_dir + ": " + ec.message());

    write_results_csv(result, dir);
    write_profit_table(result, dir);
    if (result.mode == RunMode::Static) {
        write_netdischarge(result, dir);
    } else {
        for (const CellResult& cell : result.cells) {
            const std::string name = "trace_beta" + key_fmt(cell.beta) + "_alpha" +
                                     key_fmt(cell.alpha) + "_emax" + key_fmt(cell.e_max) + ".csv";
            write_trace_csv((dir / name).string(), cell.trace);
        }
    }

    std::ofstream manifest(dir / "manifest.json");
    if (!manifest)
        throw IoError("cannot write " + (dir / "manifest.json").string());
    manifest << config_manifest(config).dump(2) << "\n";
}

namespace {

void run_and_emit(ExperimentConfig config, const std::string& out_override) {
    const std::string out = out_override.empty() ? config.output_dir : out_override;
    const SweepResult result =
        config.mode == RunMode::Static ? run_static(config) : run_rolling(config);
    emit_report(result, config, out);
}

} // namespace

void cmd_solve(const std::string& config_path, const std::string& out_override) {
    ExperimentConfig config = load_config(config_path);
    config.mode = RunMode::Static;
    run_and_emit(std::move(config), out_override);
}

void cmd_simulate(const std::string& config_path, const std::string& out_override) {
    ExperimentConfig config = load_config(config_path);
    config.mode = RunMode::Rolling;
    validate_config(config); // re-check: rolling now mandatory
    run_and_emit(std::move(config), out_override);
}

void cmd_sweep(const std::string& config_path, const std::string& out_override) {
    run_and_emit(load_config(config_path), out_override);
}

void cmd_synth(int horizon, int kappa_minutes, int num_obs, double sigma0, double gamma,
               double rho, std::uint64_t seed, const std::string& out_dir) {
    if (kappa_minutes < 1)
        throw ConfigError("synth: kappa must be a positive number of minutes");
    ErrorPool pool;
    try {
        pool = synth_pool(horizon, num_obs, sigma0, gamma, seed, rho);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("synth: ") + e.what());
    }
    const fs::path dir(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create output directory " + out_dir + ": " + ec.message());
    write_error_csv((dir / "errors.csv").string(), pool);
    json j{{"version", version_string()},
           {"K", horizon},
           {"kappa_minutes", kappa_minutes},
           {"num_obs", num_obs},
           {"sigma0", sigma0},
           {"gamma", gamma},
           {"rho", rho},
           {"seed", seed}};
    std::ofstream manifest(dir / "synth.json");
    if (!manifest)
        throw IoError("cannot write " + (dir / "synth.json").string());
    manifest << j.dump(2) << "\n";
}

} // namespace rass
