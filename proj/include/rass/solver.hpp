#pragma once

#include <functional>
#include <vector>

#include "rass/model.hpp"

namespace rass {

struct SolverConfig {
    double feas_tol = 1e-7;
    double int_tol = 1e-6;
    double abs_gap = 1e-6;
    double rel_gap = 1e-6;
    long node_limit = 1'000'000;
    double time_limit_sec = 0.0; // 0 disables the limit
    enum class Backend { Native, External } backend = Backend::Native;

    void validate() const;
};

enum class SolveStatus { Optimal, Infeasible, NodeLimit, TimeLimit };

const char* status_name(SolveStatus status);

struct MilpSolution {
    SolveStatus status = SolveStatus::Infeasible;
    std::vector<double> values; // one per instance column
    double objective = 0.0;
    double bound = 0.0; // best dual bound
    long nodes = 0;
    long lp_iterations = 0;
};

/// Solves the LP relaxation (integrality dropped). Bounded-variable revised
/// simplex with a least-index anti-cycling fallback; deterministic for
/// identical input. Unbounded problems raise SolverError.
MilpSolution solve_lp(const MilpInstance& instance, const SolverConfig& config);

/// Depth-first branch and bound over the binary columns: branches on the most
/// fractional column (ties to the lowest index), floor child first, pruning
/// by incumbent bound. Bit-deterministic for identical input and config.
MilpSolution solve_milp(const MilpInstance& instance, const SolverConfig& config);

/// Test oracle: exhaustively fixes every binary pattern (at most 20 binaries)
/// and returns the best LP solution.
MilpSolution enumerate_oracle(const MilpInstance& instance, const SolverConfig& config);

/// Adapter hook for an external MILP backend sharing the solve contract.
/// Selected via SolverConfig::Backend::External; solving without a registered
/// adapter raises SolverError.
using ExternalBackend = std::function<MilpSolution(const MilpInstance&, const SolverConfig&)>;
void set_external_backend(ExternalBackend backend);
bool has_external_backend();

} // namespace rass
