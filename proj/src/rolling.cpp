#include "rass/rolling.hpp"

#include <stdexcept>
#include <string>

#include "rass/errors.hpp"
#include "rass/rng.hpp"

namespace rass {

std::vector<DispatchPoint> DispatchTrace::dispatch_points() const {
    std::vector<DispatchPoint> out;
    out.reserve(entries.size());
    for (const TraceEntry& e : entries)
        out.push_back({e.charge_mw, e.discharge_mw, e.discharging, e.energy_mwh});
    return out;
}

DispatchTrace simulate(const StorageSpec& spec, const TimeGrid& grid,
                       const PriceVector& predispatch, const ErrorPool& pool,
                       const PriceVector& realized, const RiskParams& risk,
                       const SimOptions& options, const SolverConfig& config) {
    spec.validate();
    risk.validate();
    config.validate();
    predispatch.validate(grid);
    realized.validate(grid);
    if (options.n_scenarios < 1)
        throw std::invalid_argument("simulate: n_scenarios must be positive");

    const double h = grid.hour_factor();
    const ScenarioSet shared = build_scenarios(predispatch, pool, options.n_scenarios, options.seed);

    DispatchTrace trace;
    trace.grid = grid;
    trace.entries.resize(static_cast<std::size_t>(grid.num_intervals));

    double carried = spec.e_init;
    for (int t = 1; t <= grid.num_intervals; ++t) {
        const ScenarioSet window =
            options.resample_per_window
                ? window_view(build_scenarios(predispatch, pool, options.n_scenarios,
                                              mix_seed(options.seed, static_cast<std::uint64_t>(t))),
                              predispatch, t)
                : window_view(shared, predispatch, t);

        const TimeGrid window_grid(grid.kappa_minutes, grid.num_intervals - t + 1);
        StorageSpec window_spec = spec;
        window_spec.e_init = carried;

        const MilpInstance instance = assemble_rass(window_spec, window_grid, window, risk);
        const MilpSolution milp = solve_milp(instance, config);
        if (milp.status != SolveStatus::Optimal)
            throw SolverError("rolling window " + std::to_string(t) + " did not solve: " +
                              status_name(milp.status));
        const RassSolution sol = extract_solution(instance, milp, window, window_grid, risk);

        const DispatchPoint& first = sol.dispatch.front();
        carried = carried - first.discharge_mw * h / spec.eta + spec.eta * first.charge_mw * h;
        // solver tolerances can leave the recursion a hair outside the band
        if (carried < spec.e_min)
            carried = spec.e_min;
        else if (carried > spec.e_max)
            carried = spec.e_max;

        TraceEntry& entry = trace.entries[static_cast<std::size_t>(t - 1)];
        entry.charge_mw = first.charge_mw;
        entry.discharge_mw = first.discharge_mw;
        entry.discharging = first.discharging;
        entry.energy_mwh = carried;
        entry.realized_price = realized[t - 1];
        entry.cashflow = realized[t - 1] * (first.discharge_mw - first.charge_mw) * h;
        entry.window_objective = sol.objective;
        entry.window_expected_profit = sol.expected_profit;
        entry.window_cvar_cost = sol.cvar_cost;
        entry.nodes = sol.nodes;
        entry.lp_iterations = sol.lp_iterations;
    }
    return trace;
}

double settlement_total(const DispatchTrace& trace) {
    double total = 0.0;
    for (const TraceEntry& e : trace.entries)
        total += e.cashflow;
    return total;
}

} // namespace rass
