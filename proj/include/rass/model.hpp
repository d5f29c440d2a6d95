#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rass/market.hpp"
#include "rass/storage.hpp"

namespace rass {

/// CVaR confidence level alpha in [0,1) and risk weight beta >= 0.
/// beta = 0 is the risk-neutral profit maximizer; alpha = 1 is rejected.
struct RiskParams {
    double alpha = 0.95;
    double beta = 0.0;

    void validate() const;
};

enum class VarKind { Continuous, Binary };
enum class RowSense { LessEqual, Equal, GreaterEqual };

struct Column {
    std::string name;
    double lower = 0.0;
    double upper = 0.0;
    double objective = 0.0;
    VarKind kind = VarKind::Continuous;
};

struct Row {
    std::string name;
    std::vector<std::pair<int, double>> coeffs; // (column id, value)
    RowSense sense = RowSense::LessEqual;
    double rhs = 0.0;
};

/// Column ids of the named variable roles inside a RASS instance. Sized to
/// the instance horizon / scenario count; threshold is the free CVaR
/// threshold variable, excess[w] the per-scenario nonnegative tail excess.
struct VariableRoles {
    std::vector<int> charge;    // one per interval
    std::vector<int> discharge; // one per interval
    std::vector<int> energy;    // one per interval
    std::vector<int> mode;      // binary, one per interval
    std::vector<int> excess;    // one per scenario
    int threshold = -1;
};

/// Generic bounded-variable MILP, objective sense fixed to minimize.
struct MilpInstance {
    std::vector<Column> cols;
    std::vector<Row> rows;
    VariableRoles roles;

    int add_column(std::string name, double lower, double upper, double objective,
                   VarKind kind = VarKind::Continuous);
    void add_row(std::string name, std::vector<std::pair<int, double>> coeffs, RowSense sense,
                 double rhs);

    int num_cols() const { return static_cast<int>(cols.size()); }
    int num_rows() const { return static_cast<int>(rows.size()); }

    /// Fixed-format text listing (columns, bounds, objective, rows) with 12
    /// significant digits; identical instances dump byte-identically.
    void dump(std::ostream& os) const;
    std::string dump_string() const;

    /// CPLEX LP-format export for cross-checking against external tools.
    void write_lp(std::ostream& os) const;
};

struct CvarResult {
    double value = 0.0;     // the alpha-CVaR
    double threshold = 0.0; // minimizing threshold (the alpha-VaR candidate)
};

/// Rockafellar-Uryasev CVaR of a discrete cost distribution:
/// min over zeta of zeta + (1/(1-alpha)) * sum_w prob[w] * max(cost[w] - zeta, 0).
CvarResult cvar_discrete(std::span<const double> costs, std::span<const double> probs,
                         double alpha);

/// Probability-weighted settlement of a schedule against the scenario prices,
/// with the interval-duration factor applied: sum_w pi_w sum_k price * (p_d - p_c) * h.
double expected_profit(const std::vector<DispatchPoint>& dispatch, const ScenarioSet& scenarios,
                       const TimeGrid& grid);

/// Per-scenario charging cost sum_k price[w][k] * charge_mw[k] * h; the
/// quantity whose CVaR the risk term penalizes.
std::vector<double> scenario_charge_costs(const std::vector<DispatchPoint>& dispatch,
                                          const ScenarioSet& scenarios, const TimeGrid& grid);

/// Builds the full self-scheduling MILP: minimize -expected profit plus
/// beta times the CVaR of the charging cost, subject to the power-limit,
/// mode-exclusivity, energy-balance and energy-bound constraints and the
/// per-scenario CVaR epigraph rows. Layout: 4K + |scenarios| + 1 columns,
/// 3K + |scenarios| rows.
MilpInstance assemble_rass(const StorageSpec& spec, const TimeGrid& grid,
                           const ScenarioSet& scenarios, const RiskParams& risk);

struct MilpSolution; // solver.hpp

/// Solved schedule plus the risk bookkeeping recomputed from it.
struct RassSolution {
    std::vector<DispatchPoint> dispatch;
    double threshold = 0.0;          // CVaR threshold variable at the optimum
    std::vector<double> tail_excess; // per-scenario excess variables
    double objective = 0.0;
    double expected_profit = 0.0;
    double cvar_cost = 0.0; // recomputed via cvar_discrete from the dispatch
    long nodes = 0;
    long lp_iterations = 0;
};

RassSolution extract_solution(const MilpInstance& instance, const MilpSolution& solution,
                              const ScenarioSet& scenarios, const TimeGrid& grid,
                              const RiskParams& risk);

} // namespace rass
