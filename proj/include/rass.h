/* C API of the risk-averse storage self-scheduling library.
 *
 * Every object is an opaque handle created and destroyed through this
 * interface; every function returns a rass_status, with RASS_OK on success.
 * On failure, rass_last_error() returns a thread-local description of what
 * went wrong. Handles are immutable after creation and may be shared across
 * threads.
 */
#ifndef RASS_H
#define RASS_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rass_status {
    RASS_OK = 0,
    RASS_EINVAL = 1, /* invalid argument or parameter */
    RASS_ESHAPE = 2, /* dimension / sampling mismatch */
    RASS_EIO = 3,    /* file or config problem */
    RASS_ESOLVER = 4,/* solver failure (infeasible window, limits) */
    RASS_EINTERNAL = 5
} rass_status;

typedef struct rass_storage rass_storage;     /* physical storage description */
typedef struct rass_pool rass_pool;           /* forecast-error observations */
typedef struct rass_scenarios rass_scenarios; /* sampled price scenarios */
typedef struct rass_solution rass_solution;   /* static schedule solution */
typedef struct rass_trace rass_trace;         /* rolling simulation trace */

const char* rass_version(void);
/* Thread-local message for the most recent failing call on this thread. */
const char* rass_last_error(void);

/* ---- storage ---------------------------------------------------------- */

rass_status rass_storage_create(double p_c_max, double p_d_max, double eta, double e_min,
                                double e_max, double e_init, rass_storage** out);
rass_status rass_storage_load_json(const char* path, rass_storage** out);
void rass_storage_free(rass_storage* storage);

/* ---- forecast-error pools --------------------------------------------- */

/* rho in [0,1] correlates the look-ahead columns of each observation through
 * a common factor; 0 draws them independently. */
rass_status rass_pool_synth(int horizon, int num_obs, double sigma0, double gamma, double rho,
                            uint64_t seed, rass_pool** out);
rass_status rass_pool_load_csv(const char* path, rass_pool** out);
rass_status rass_pool_dims(const rass_pool* pool, int* num_obs, int* horizon);
void rass_pool_free(rass_pool* pool);

/* ---- scenarios --------------------------------------------------------- */

/* predispatch: K prices; samples n pool rows without replacement under seed. */
rass_status rass_scenarios_build(const double* predispatch, int num_intervals,
                                 const rass_pool* pool, int n, uint64_t seed,
                                 rass_scenarios** out);
rass_status rass_scenarios_dims(const rass_scenarios* scenarios, int* count, int* num_intervals);
rass_status rass_scenarios_price(const rass_scenarios* scenarios, int scenario, int interval,
                                 double* out);
rass_status rass_scenarios_probability(const rass_scenarios* scenarios, int scenario, double* out);
void rass_scenarios_free(rass_scenarios* scenarios);

/* ---- risk measure ------------------------------------------------------ */

/* Discrete CVaR at confidence alpha; threshold receives the minimizing
 * value-at-risk candidate. Either output pointer may be NULL. */
rass_status rass_cvar(const double* costs, const double* probs, int n, double alpha, double* value,
                      double* threshold);

/* ---- static solve ------------------------------------------------------ */

/* Solves the full-horizon self-scheduling problem. kappa_minutes and
 * num_intervals describe the grid; alpha/beta are the risk parameters. */
rass_status rass_solve_static(const rass_storage* storage, int kappa_minutes, int num_intervals,
                              const rass_scenarios* scenarios, double alpha, double beta,
                              rass_solution** out);
rass_status rass_solution_objective(const rass_solution* solution, double* out);
rass_status rass_solution_expected_profit(const rass_solution* solution, double* out);
rass_status rass_solution_cvar_cost(const rass_solution* solution, double* out);
/* Per-interval schedule, all arrays length num_intervals; any may be NULL. */
rass_status rass_solution_dispatch(const rass_solution* solution, double* charge_mw,
                                   double* discharge_mw, double* energy_mwh, int* discharging);
void rass_solution_free(rass_solution* solution);

/* Fixed-format text listing of the assembled instance (lp_format = 0) or an
 * LP-format export (lp_format = 1). Free the result with rass_text_free. */
rass_status rass_static_instance_text(const rass_storage* storage, int kappa_minutes,
                                      int num_intervals, const rass_scenarios* scenarios,
                                      double alpha, double beta, int lp_format, char** out);
void rass_text_free(char* text);

/* ---- rolling simulation ------------------------------------------------ */

rass_status rass_simulate(const rass_storage* storage, int kappa_minutes, int num_intervals,
                          const double* predispatch, const rass_pool* pool,
                          const double* realized, double alpha, double beta, int n_scenarios,
                          uint64_t seed, int resample_per_window, rass_trace** out);
rass_status rass_trace_length(const rass_trace* trace, int* out);
/* Arrays length num_intervals; any may be NULL. */
rass_status rass_trace_series(const rass_trace* trace, double* charge_mw, double* discharge_mw,
                              double* energy_mwh, double* cashflow);
rass_status rass_trace_settlement(const rass_trace* trace, double* out);
rass_status rass_trace_write_csv(const rass_trace* trace, const char* path);
void rass_trace_free(rass_trace* trace);

/* ---- experiment commands (the CLI surface) ----------------------------- */

/* out_dir NULL keeps the config's output_dir. */
rass_status rass_cmd_solve(const char* config_path, const char* out_dir);
rass_status rass_cmd_simulate(const char* config_path, const char* out_dir);
rass_status rass_cmd_sweep(const char* config_path, const char* out_dir);
rass_status rass_cmd_synth(int num_intervals, int kappa_minutes, int num_obs, double sigma0,
                           double gamma, double rho, uint64_t seed, const char* out_dir);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* RASS_H */
