#include "rass.h"

#include <cstring>
#include <new>
#include <span>
#include <sstream>
#include <string>

#include "rass/csv.hpp"
#include "rass/errors.hpp"
#include "rass/experiment.hpp"
#include "rass/market.hpp"
#include "rass/model.hpp"
#include "rass/rolling.hpp"
#include "rass/solver.hpp"
#include "rass/storage.hpp"

struct rass_storage {
    rass::StorageSpec spec;
};
struct rass_pool {
    rass::ErrorPool pool;
};
struct rass_scenarios {
    rass::ScenarioSet set;
};
struct rass_solution {
    rass::RassSolution solution;
};
struct rass_trace {
    rass::DispatchTrace trace;
};

namespace {

thread_local std::string g_last_error;

rass_status fail(rass_status code, const char* what) {
    g_last_error = what ? what : "unknown error";
    return code;
}

template <class Fn> rass_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const rass::SolverError& e) {
        return fail(RASS_ESOLVER, e.what());
    } catch (const rass::ConfigError& e) {
        return fail(RASS_EIO, e.what());
    } catch (const rass::IoError& e) {
        return fail(RASS_EIO, e.what());
    } catch (const std::out_of_range& e) {
        return fail(RASS_ESHAPE, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(RASS_EINVAL, e.what());
    } catch (const std::bad_alloc&) {
        return fail(RASS_EINTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(RASS_EINTERNAL, e.what());
    }
}

rass_status require(bool ok, const char* what) {
    return ok ? RASS_OK : fail(RASS_EINVAL, what);
}

} // namespace

extern "C" {

const char* rass_version(void) { return rass::version_string(); }

const char* rass_last_error(void) { return g_last_error.c_str(); }

/* ---- storage ----------------------------------------------------------- */

rass_status rass_storage_create(double p_c_max, double p_d_max, double eta, double e_min,
                                double e_max, double e_init, rass_storage** out) {
    if (rass_status s = require(out != nullptr, "out must not be NULL"))
        return s;
    return guarded([&] {
        rass::StorageSpec spec{p_c_max, p_d_max, eta, e_min, e_max, e_init};
        spec.validate();
        *out = new rass_storage{spec};
        return RASS_OK;
    });
}

rass_status rass_storage_load_json(const char* path, rass_storage** out) {
    if (rass_status s = require(path && out, "path and out must not be NULL"))
        return s;
    return guarded([&] {
        *out = new rass_storage{rass::load_storage_json(path)};
        return RASS_OK;
    });
}

void rass_storage_free(rass_storage* storage) { delete storage; }

/* ---- pools -------------------------------------------------------------- */

rass_status rass_pool_synth(int horizon, int num_obs, double sigma0, double gamma, double rho,
                            uint64_t seed, rass_pool** out) {
    if (rass_status s = require(out != nullptr, "out must not be NULL"))
        return s;
    return guarded([&] {
        *out = new rass_pool{rass::synth_pool(horizon, num_obs, sigma0, gamma, seed, rho)};
        return RASS_OK;
    });
}

rass_status rass_pool_load_csv(const char* path, rass_pool** out) {
    if (rass_status s = require(path && out, "path and out must not be NULL"))
        return s;
    return guarded([&] {
        *out = new rass_pool{rass::read_error_csv(path)};
        return RASS_OK;
    });
}

rass_status rass_pool_dims(const rass_pool* pool, int* num_obs, int* horizon) {
    if (rass_status s = require(pool != nullptr, "pool must not be NULL"))
        return s;
    if (num_obs)
        *num_obs = pool->pool.num_obs;
    if (horizon)
        *horizon = pool->pool.horizon;
    return RASS_OK;
}

void rass_pool_free(rass_pool* pool) { delete pool; }

/* ---- scenarios ----------------------------------------------------------- */

rass_status rass_scenarios_build(const double* predispatch, int num_intervals,
                                 const rass_pool* pool, int n, uint64_t seed,
                                 rass_scenarios** out) {
    if (rass_status s =
            require(predispatch && pool && out, "predispatch, pool and out must not be NULL"))
        return s;
    if (rass_status s = require(num_intervals >= 1, "num_intervals must be positive"))
        return s;
    return guarded([&] {
        rass::PriceVector prices{std::vector<double>(predispatch, predispatch + num_intervals)};
        try {
            *out = new rass_scenarios{rass::build_scenarios(prices, pool->pool, n, seed)};
        } catch (const std::invalid_argument& e) {
            return fail(RASS_ESHAPE, e.what());
        }
        return RASS_OK;
    });
}

rass_status rass_scenarios_dims(const rass_scenarios* scenarios, int* count, int* num_intervals) {
    if (rass_status s = require(scenarios != nullptr, "scenarios must not be NULL"))
        return s;
    if (count)
        *count = scenarios->set.count();
    if (num_intervals)
        *num_intervals = scenarios->set.num_intervals;
    return RASS_OK;
}

rass_status rass_scenarios_price(const rass_scenarios* scenarios, int scenario, int interval,
                                 double* out) {
    if (rass_status s = require(scenarios && out, "scenarios and out must not be NULL"))
        return s;
    if (scenario < 0 || scenario >= scenarios->set.count() || interval < 0 ||
        interval >= scenarios->set.num_intervals)
        return fail(RASS_ESHAPE, "scenario or interval index out of range");
    *out = scenarios->set.price(scenario, interval);
    return RASS_OK;
}

rass_status rass_scenarios_probability(const rass_scenarios* scenarios, int scenario,
                                       double* out) {
    if (rass_status s = require(scenarios && out, "scenarios and out must not be NULL"))
        return s;
    if (scenario < 0 || scenario >= scenarios->set.count())
        return fail(RASS_ESHAPE, "scenario index out of range");
    *out = scenarios->set.probabilities[scenario];
    return RASS_OK;
}

void rass_scenarios_free(rass_scenarios* scenarios) { delete scenarios; }

/* ---- risk measure --------------------------------------------------------- */

rass_status rass_cvar(const double* costs, const double* probs, int n, double alpha, double* value,
                      double* threshold) {
    if (rass_status s = require(costs && probs, "costs and probs must not be NULL"))
        return s;
    if (rass_status s = require(n >= 1, "n must be positive"))
        return s;
    return guarded([&] {
        const rass::CvarResult r = rass::cvar_discrete(std::span(costs, static_cast<size_t>(n)),
                                                       std::span(probs, static_cast<size_t>(n)),
                                                       alpha);
        if (value)
            *value = r.value;
        if (threshold)
            *threshold = r.threshold;
        return RASS_OK;
    });
}

/* ---- static solve ---------------------------------------------------------- */

rass_status rass_solve_static(const rass_storage* storage, int kappa_minutes, int num_intervals,
                              const rass_scenarios* scenarios, double alpha, double beta,
                              rass_solution** out) {
    if (rass_status s =
            require(storage && scenarios && out, "storage, scenarios and out must not be NULL"))
        return s;
    return guarded([&] {
        const rass::TimeGrid grid(kappa_minutes, num_intervals);
        const rass::RiskParams risk{alpha, beta};
        const rass::MilpInstance instance =
            rass::assemble_rass(storage->spec, grid, scenarios->set, risk);
        const rass::MilpSolution milp = rass::solve_milp(instance, rass::SolverConfig{});
        if (milp.status != rass::SolveStatus::Optimal)
            throw rass::SolverError(std::string("static solve failed: ") +
                                    rass::status_name(milp.status));
        *out = new rass_solution{
            rass::extract_solution(instance, milp, scenarios->set, grid, risk)};
        return RASS_OK;
    });
}

rass_status rass_solution_objective(const rass_solution* solution, double* out) {
    if (rass_status s = require(solution && out, "solution and out must not be NULL"))
        return s;
    *out = solution->solution.objective;
    return RASS_OK;
}

rass_status rass_solution_expected_profit(const rass_solution* solution, double* out) {
    if (rass_status s = require(solution && out, "solution and out must not be NULL"))
        return s;
    *out = solution->solution.expected_profit;
    return RASS_OK;
}

rass_status rass_solution_cvar_cost(const rass_solution* solution, double* out) {
    if (rass_status s = require(solution && out, "solution and out must not be NULL"))
        return s;
    *out = solution->solution.cvar_cost;
    return RASS_OK;
}

rass_status rass_solution_dispatch(const rass_solution* solution, double* charge_mw,
                                   double* discharge_mw, double* energy_mwh, int* discharging) {
    if (rass_status s = require(solution != nullptr, "solution must not be NULL"))
        return s;
    const auto& dispatch = solution->solution.dispatch;
    for (size_t k = 0; k < dispatch.size(); ++k) {
        if (charge_mw)
            charge_mw[k] = dispatch[k].charge_mw;
        if (discharge_mw)
            discharge_mw[k] = dispatch[k].discharge_mw;
        if (energy_mwh)
            energy_mwh[k] = dispatch[k].energy_mwh;
        if (discharging)
            discharging[k] = dispatch[k].discharging ? 1 : 0;
    }
    return RASS_OK;
}

void rass_solution_free(rass_solution* solution) { delete solution; }

rass_status rass_static_instance_text(const rass_storage* storage, int kappa_minutes,
                                      int num_intervals, const rass_scenarios* scenarios,
                                      double alpha, double beta, int lp_format, char** out) {
    if (rass_status s =
            require(storage && scenarios && out, "storage, scenarios and out must not be NULL"))
        return s;
    return guarded([&] {
        const rass::TimeGrid grid(kappa_minutes, num_intervals);
        const rass::MilpInstance instance =
            rass::assemble_rass(storage->spec, grid, scenarios->set, rass::RiskParams{alpha, beta});
        std::string text;
        if (lp_format) {
            std::ostringstream os;
            instance.write_lp(os);
            text = os.str();
        } else {
            text = instance.dump_string();
        }
        char* buf = new char[text.size() + 1];
        std::memcpy(buf, text.c_str(), text.size() + 1);
        *out = buf;
        return RASS_OK;
    });
}

void rass_text_free(char* text) { delete[] text; }

/* ---- rolling simulation ------------------------------------------------------ */

rass_status rass_simulate(const rass_storage* storage, int kappa_minutes, int num_intervals,
                          const double* predispatch, const rass_pool* pool,
                          const double* realized, double alpha, double beta, int n_scenarios,
                          uint64_t seed, int resample_per_window, rass_trace** out) {
    if (rass_status s = require(storage && predispatch && pool && realized && out,
                                "storage, predispatch, pool, realized and out must not be NULL"))
        return s;
    return guarded([&] {
        const rass::TimeGrid grid(kappa_minutes, num_intervals);
        rass::PriceVector pd{std::vector<double>(predispatch, predispatch + num_intervals)};
        rass::PriceVector rt{std::vector<double>(realized, realized + num_intervals)};
        const rass::SimOptions options{n_scenarios, seed, resample_per_window != 0};
        *out = new rass_trace{rass::simulate(storage->spec, grid, pd, pool->pool, rt,
                                             rass::RiskParams{alpha, beta}, options,
                                             rass::SolverConfig{})};
        return RASS_OK;
    });
}

rass_status rass_trace_length(const rass_trace* trace, int* out) {
    if (rass_status s = require(trace && out, "trace and out must not be NULL"))
        return s;
    *out = static_cast<int>(trace->trace.entries.size());
    return RASS_OK;
}

rass_status rass_trace_series(const rass_trace* trace, double* charge_mw, double* discharge_mw,
                              double* energy_mwh, double* cashflow) {
    if (rass_status s = require(trace != nullptr, "trace must not be NULL"))
        return s;
    const auto& entries = trace->trace.entries;
    for (size_t k = 0; k < entries.size(); ++k) {
        if (charge_mw)
            charge_mw[k] = entries[k].charge_mw;
        if (discharge_mw)
            discharge_mw[k] = entries[k].discharge_mw;
        if (energy_mwh)
            energy_mwh[k] = entries[k].energy_mwh;
        if (cashflow)
            cashflow[k] = entries[k].cashflow;
    }
    return RASS_OK;
}

rass_status rass_trace_settlement(const rass_trace* trace, double* out) {
    if (rass_status s = require(trace && out, "trace and out must not be NULL"))
        return s;
    *out = rass::settlement_total(trace->trace);
    return RASS_OK;
}

rass_status rass_trace_write_csv(const rass_trace* trace, const char* path) {
    if (rass_status s = require(trace && path, "trace and path must not be NULL"))
        return s;
    return guarded([&] {
        rass::write_trace_csv(path, trace->trace);
        return RASS_OK;
    });
}

void rass_trace_free(rass_trace* trace) { delete trace; }

/* ---- experiment commands ------------------------------------------------------ */

rass_status rass_cmd_solve(const char* config_path, const char* out_dir) {
    if (rass_status s = require(config_path != nullptr, "config_path must not be NULL"))
        return s;
    return guarded([&] {
        rass::cmd_solve(config_path, out_dir ? out_dir : "");
        return RASS_OK;
    });
}

rass_status rass_cmd_simulate(const char* config_path, const char* out_dir) {
    if (rass_status s = require(config_path != nullptr, "config_path must not be NULL"))
        return s;
    return guarded([&] {
        rass::cmd_simulate(config_path, out_dir ? out_dir : "");
        return RASS_OK;
    });
}

rass_status rass_cmd_sweep(const char* config_path, const char* out_dir) {
    if (rass_status s = require(config_path != nullptr, "config_path must not be NULL"))
        return s;
    return guarded([&] {
        rass::cmd_sweep(config_path, out_dir ? out_dir : "");
        return RASS_OK;
    });
}

rass_status rass_cmd_synth(int num_intervals, int kappa_minutes, int num_obs, double sigma0,
                           double gamma, double rho, uint64_t seed, const char* out_dir) {
    if (rass_status s = require(out_dir != nullptr, "out_dir must not be NULL"))
        return s;
    return guarded([&] {
        rass::cmd_synth(num_intervals, kappa_minutes, num_obs, sigma0, gamma, rho, seed, out_dir);
        return RASS_OK;
    });
}

} // extern "C"
