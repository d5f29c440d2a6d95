#pragma once

#include <vector>

#include "rass/model.hpp"

namespace rass::detail {

/// Equality standard form: structural columns followed by one slack column
/// per row (slack bounds encode the row sense), A x = rhs.
struct LpForm {
    int nrows = 0;
    int nstruct = 0;
    int ncols = 0;                                         // nstruct + nrows
    std::vector<std::vector<std::pair<int, double>>> cols; // column-wise sparse (row, value)
    std::vector<double> lower, upper, cost;                // per column
    std::vector<double> rhs;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpOutcome {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> x; // per LpForm column (structural + slacks)
    double objective = 0.0;
    long iterations = 0;
};

LpForm standardize(const MilpInstance& instance);

/// Bounded-variable primal simplex with an explicit dense basis inverse,
/// artificial-variable phase 1 and a least-index fallback after stalls.
/// `lower`/`upper` must cover every LpForm column; they carry the node bound
/// overrides during branch and bound.
LpOutcome solve_bounded_lp(const LpForm& form, const std::vector<double>& lower,
                           const std::vector<double>& upper, double feas_tol);

} // namespace rass::detail
