#pragma once

#include <string>
#include <vector>

#include "rass/market.hpp"

namespace rass {

/// Physical identity of the storage resource. Field names follow the
/// storage.json schema: power limits in MW, energy bounds in MWh, symmetric
/// charge/discharge efficiency eta in (0,1].
struct StorageSpec {
    double p_c_max = 0.0;
    double p_d_max = 0.0;
    double eta = 1.0;
    double e_min = 0.0;
    double e_max = 0.0;
    double e_init = 0.0;

    void validate() const;
};

/// storage.json round trip. e_init defaults to e_min when the file omits it.
StorageSpec load_storage_json(const std::string& path);
void save_storage_json(const std::string& path, const StorageSpec& spec);

/// Committed operation of one interval. `discharging` is the mode flag that
/// forbids simultaneous charge and discharge; energy_mwh is the stored level
/// at the end of the interval.
struct DispatchPoint {
    double charge_mw = 0.0;
    double discharge_mw = 0.0;
    bool discharging = false;
    double energy_mwh = 0.0;
};

enum class ConstraintKind {
    DischargeLimit, // discharge_mw <= p_d_max * u
    ChargeLimit,    // charge_mw <= p_c_max * (1 - u)
    PowerSign,      // charge_mw, discharge_mw >= 0
    EnergyBalance,  // stored-energy recursion
    EnergyBounds,   // e_min <= energy <= e_max
};

struct Violation {
    int interval = 0; // 1-based
    ConstraintKind kind{};
    double magnitude = 0.0;
    std::string detail;
};

const char* constraint_name(ConstraintKind kind);

/// Checks a full schedule against the power, mode, balance and energy-bound
/// constraints. Returns every violation exceeding `tol`; empty means feasible.
std::vector<Violation> check_feasible(const StorageSpec& spec, const TimeGrid& grid,
                                      const std::vector<DispatchPoint>& points, double tol);

} // namespace rass
