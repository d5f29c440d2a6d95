#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rass/market.hpp"
#include "rass/model.hpp"
#include "rass/solver.hpp"
#include "rass/storage.hpp"

namespace rass {

/// One committed interval of the rolling simulation plus the solve metadata
/// of the window that committed it.
struct TraceEntry {
    double charge_mw = 0.0;
    double discharge_mw = 0.0;
    bool discharging = false;
    double energy_mwh = 0.0; // stored energy at the end of the interval
    double realized_price = 0.0;
    double cashflow = 0.0; // realized_price * (discharge - charge) * hour_factor
    double window_objective = 0.0;
    double window_expected_profit = 0.0;
    double window_cvar_cost = 0.0;
    long nodes = 0;
    long lp_iterations = 0;
};

struct DispatchTrace {
    TimeGrid grid;
    std::vector<TraceEntry> entries;

    std::vector<DispatchPoint> dispatch_points() const;
};

struct SimOptions {
    int n_scenarios = 100;
    std::uint64_t seed = 0;
    bool resample_per_window = false; // default: one draw shared by all windows
};

/// Shrinking-horizon rolling dispatch: solve the self-scheduling MILP over
/// the remaining intervals, commit only the first one, settle it at the
/// realized price, carry the stored energy forward, repeat to the end.
DispatchTrace simulate(const StorageSpec& spec, const TimeGrid& grid,
                       const PriceVector& predispatch, const ErrorPool& pool,
                       const PriceVector& realized, const RiskParams& risk,
                       const SimOptions& options, const SolverConfig& config);

double settlement_total(const DispatchTrace& trace);

} // namespace rass
