#include "rass/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "rass/detail/simplex.hpp"
#include "rass/errors.hpp"

namespace rass {

namespace {

ExternalBackend& external_backend_slot() {
    static ExternalBackend backend;
    return backend;
}

std::vector<int> binary_columns(const MilpInstance& instance) {
    std::vector<int> out;
    for (int j = 0; j < instance.num_cols(); ++j)
        if (instance.cols[j].kind == VarKind::Binary)
            out.push_back(j);
    return out;
}

// Mode binaries couple the flows only through the two power-limit rows and
// carry no objective weight, so a relaxation point without simultaneous
// charge and discharge maps to an integral point of equal objective by
// setting the mode from the discharge flow. Fractional modes at intervals
// with one-sided flow are therefore never branched on.
constexpr double kFlowEps = 1e-9;

bool mode_roles_apply(const MilpInstance& instance) {
    const VariableRoles& roles = instance.roles;
    const std::size_t horizon = roles.mode.size();
    if (horizon == 0 || roles.charge.size() != horizon || roles.discharge.size() != horizon)
        return false;
    for (int col : roles.mode)
        if (instance.cols[col].objective != 0.0)
            return false;
    return true;
}

// true when charge and discharge are simultaneously active at interval k
bool mode_conflict(const MilpInstance& instance, const std::vector<double>& values,
                   std::size_t k) {
    return values[instance.roles.charge[k]] > kFlowEps &&
           values[instance.roles.discharge[k]] > kFlowEps;
}

bool snap_mode_columns(const MilpInstance& instance, std::vector<double>& values) {
    const VariableRoles& roles = instance.roles;
    for (std::size_t k = 0; k < roles.mode.size(); ++k)
        if (mode_conflict(instance, values, k))
            return false;
    for (std::size_t k = 0; k < roles.mode.size(); ++k)
        values[roles.mode[k]] = values[roles.discharge[k]] > kFlowEps ? 1.0 : 0.0;
    return true;
}

MilpSolution from_lp(const detail::LpOutcome& lp, int nstruct) {
    MilpSolution sol;
    sol.lp_iterations = lp.iterations;
    if (lp.status == detail::LpStatus::Infeasible) {
        sol.status = SolveStatus::Infeasible;
        sol.bound = std::numeric_limits<double>::infinity();
        return sol;
    }
    sol.status = SolveStatus::Optimal;
    sol.values.assign(lp.x.begin(), lp.x.begin() + nstruct);
    sol.objective = lp.objective;
    sol.bound = lp.objective;
    return sol;
}

} // namespace

void SolverConfig::validate() const {
    if (!(feas_tol > 0.0) || !(int_tol > 0.0) || !(abs_gap > 0.0) || !(rel_gap > 0.0))
        throw std::invalid_argument("SolverConfig: tolerances must be positive");
    if (node_limit < 1)
        throw std::invalid_argument("SolverConfig: node_limit must be positive");
    if (time_limit_sec < 0.0)
        throw std::invalid_argument("SolverConfig: time limit must be nonnegative");
}

const char* status_name(SolveStatus status) {
    switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::NodeLimit: return "node_limit";
    case SolveStatus::TimeLimit: return "time_limit";
    }
    return "unknown";
}

void set_external_backend(ExternalBackend backend) { external_backend_slot() = std::move(backend); }

bool has_external_backend() { return static_cast<bool>(external_backend_slot()); }

MilpSolution solve_lp(const MilpInstance& instance, const SolverConfig& config) {
    config.validate();
    const detail::LpForm form = detail::standardize(instance);
    const detail::LpOutcome lp =
        detail::solve_bounded_lp(form, form.lower, form.upper, config.feas_tol);
    if (lp.status == detail::LpStatus::Unbounded)
        throw SolverError("LP relaxation is unbounded; instance is malformed");
    return from_lp(lp, form.nstruct);
}

MilpSolution solve_milp(const MilpInstance& instance, const SolverConfig& config) {
    config.validate();
    if (config.backend == SolverConfig::Backend::External) {
        if (!has_external_backend())
            throw SolverError("external backend selected but none registered");
        return external_backend_slot()(instance, config);
    }

    const detail::LpForm form = detail::standardize(instance);
    const std::vector<int> binaries = binary_columns(instance);
    const bool use_mode_rounding = mode_roles_apply(instance);
    std::vector<int> mode_interval(static_cast<std::size_t>(instance.num_cols()), -1);
    if (use_mode_rounding)
        for (std::size_t k = 0; k < instance.roles.mode.size(); ++k)
            mode_interval[instance.roles.mode[k]] = static_cast<int>(k);
    const auto started = std::chrono::steady_clock::now();
    const auto out_of_time = [&] {
        if (config.time_limit_sec <= 0.0)
            return false;
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
        return elapsed.count() > config.time_limit_sec;
    };

    struct Node {
        std::vector<std::pair<int, double>> fixes; // (binary column, 0 or 1)
    };
    std::vector<Node> stack{Node{}};

    MilpSolution best;
    best.status = SolveStatus::Infeasible;
    best.bound = std::numeric_limits<double>::infinity();
    double incumbent = std::numeric_limits<double>::infinity();
    double lowest_pruned = std::numeric_limits<double>::infinity();
    long nodes = 0;
    long iterations = 0;
    bool hit_node_limit = false;
    bool hit_time_limit = false;

    std::vector<double> lower(form.lower), upper(form.upper);
    while (!stack.empty()) {
        if (nodes >= config.node_limit) {
            hit_node_limit = true;
            break;
        }
        if (out_of_time()) {
            hit_time_limit = true;
            break;
        }
        Node node = std::move(stack.back());
        stack.pop_back();
        ++nodes;

        std::copy(form.lower.begin(), form.lower.end(), lower.begin());
        std::copy(form.upper.begin(), form.upper.end(), upper.begin());
        for (const auto& [col, val] : node.fixes) {
            lower[col] = val;
            upper[col] = val;
        }

        const detail::LpOutcome lp = detail::solve_bounded_lp(form, lower, upper, config.feas_tol);
        iterations += lp.iterations;
        if (lp.status == detail::LpStatus::Unbounded)
            throw SolverError("node relaxation is unbounded; instance is malformed");
        if (lp.status == detail::LpStatus::Infeasible)
            continue;

        const double prune_eps = 1e-9 * (1.0 + std::abs(incumbent));
        if (lp.objective >= incumbent - prune_eps) {
            lowest_pruned = std::min(lowest_pruned, lp.objective);
            continue;
        }

        // most fractional binary, ties to the lowest index; mode columns only
        // count where charge and discharge genuinely collide
        int branch_col = -1;
        double branch_frac = 0.0;
        for (int col : binaries) {
            const double v = lp.x[col];
            const double frac = std::min(v - std::floor(v), std::ceil(v) - v);
            bool candidate;
            if (use_mode_rounding && mode_interval[col] >= 0)
                candidate = mode_conflict(instance, lp.x,
                                          static_cast<std::size_t>(mode_interval[col]));
            else
                candidate = frac > config.int_tol;
            if (candidate && frac > branch_frac) {
                branch_frac = frac;
                branch_col = col;
            }
        }

        if (branch_col < 0) {
            MilpSolution node_best = from_lp(lp, form.nstruct);
            if (use_mode_rounding && !snap_mode_columns(instance, node_best.values))
                throw SolverError("mode rounding failed on a conflict-free node");
            incumbent = lp.objective;
            best = std::move(node_best);
            best.status = SolveStatus::Optimal;
            continue;
        }

        Node ceil_child = node;
        ceil_child.fixes.push_back({branch_col, 1.0});
        Node floor_child = std::move(node);
        floor_child.fixes.push_back({branch_col, 0.0});
        stack.push_back(std::move(ceil_child));
        stack.push_back(std::move(floor_child)); // popped first: floor branch leads
    }

    best.nodes = nodes;
    best.lp_iterations = iterations;
    if (hit_node_limit || hit_time_limit) {
        // open nodes remain, so no trusted dual bound survives
        best.status = hit_node_limit ? SolveStatus::NodeLimit : SolveStatus::TimeLimit;
        best.bound = -std::numeric_limits<double>::infinity();
    } else if (best.status == SolveStatus::Optimal) {
        best.bound = std::min(incumbent, lowest_pruned);
    }
    return best;
}

MilpSolution enumerate_oracle(const MilpInstance& instance, const SolverConfig& config) {
    config.validate();
    const std::vector<int> binaries = binary_columns(instance);
    if (binaries.size() > 20)
        throw std::invalid_argument("enumerate_oracle: more than 20 binary columns");

    const detail::LpForm form = detail::standardize(instance);
    std::vector<double> lower(form.lower), upper(form.upper);

    MilpSolution best;
    best.status = SolveStatus::Infeasible;
    best.bound = std::numeric_limits<double>::infinity();
    long iterations = 0;
    const std::uint64_t patterns = 1ULL << binaries.size();
    for (std::uint64_t pattern = 0; pattern < patterns; ++pattern) {
        std::copy(form.lower.begin(), form.lower.end(), lower.begin());
        std::copy(form.upper.begin(), form.upper.end(), upper.begin());
        for (std::size_t b = 0; b < binaries.size(); ++b) {
            const double v = (pattern >> b) & 1ULL ? 1.0 : 0.0;
            lower[binaries[b]] = v;
            upper[binaries[b]] = v;
        }
        const detail::LpOutcome lp = detail::solve_bounded_lp(form, lower, upper, config.feas_tol);
        iterations += lp.iterations;
        if (lp.status == detail::LpStatus::Unbounded)
            throw SolverError("oracle relaxation is unbounded; instance is malformed");
        if (lp.status != detail::LpStatus::Optimal)
            continue;
        if (best.status != SolveStatus::Optimal || lp.objective < best.objective - 1e-12) {
            best = from_lp(lp, form.nstruct);
            best.status = SolveStatus::Optimal;
        }
    }
    best.nodes = static_cast<long>(patterns);
    best.lp_iterations = iterations;
    if (best.status == SolveStatus::Optimal)
        best.bound = best.objective;
    return best;
}

} // namespace rass
