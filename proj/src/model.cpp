#include "rass/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "rass/solver.hpp"

namespace rass {

void RiskParams::validate() const {
    if (!(alpha >= 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("RiskParams: alpha must lie in [0,1)");
    if (!(beta >= 0.0) || !std::isfinite(beta))
        throw std::invalid_argument("RiskParams: beta must be nonnegative and finite");
}

int MilpInstance::add_column(std::string name, double lower, double upper, double objective,
                             VarKind kind) {
    cols.push_back({std::move(name), lower, upper, objective, kind});
    return num_cols() - 1;
}

void MilpInstance::add_row(std::string name, std::vector<std::pair<int, double>> coeffs,
                           RowSense sense, double rhs) {
    rows.push_back({std::move(name), std::move(coeffs), sense, rhs});
}

namespace {

std::string fmt12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

const char* sense_text(RowSense s) {
    switch (s) {
    case RowSense::LessEqual: return "<=";
    case RowSense::Equal: return "=";
    case RowSense::GreaterEqual: return ">=";
    }
    return "?";
}

} // namespace

void MilpInstance::dump(std::ostream& os) const {
    os << "minimize\n";
    os << "columns " << num_cols() << "\n";
    for (int j = 0; j < num_cols(); ++j) {
        const Column& c = cols[j];
        os << "  " << j << " " << c.name << " lo " << fmt12(c.lower) << " up " << fmt12(c.upper)
           << " obj " << fmt12(c.objective) << " "
           << (c.kind == VarKind::Binary ? "bin" : "cont") << "\n";
    }
    os << "rows " << num_rows() << "\n";
    for (int i = 0; i < num_rows(); ++i) {
        const Row& r = rows[i];
        os << "  " << i << " " << r.name << " " << sense_text(r.sense) << " " << fmt12(r.rhs)
           << " :";
        for (const auto& [col, val] : r.coeffs)
            os << " " << cols[col].name << " " << fmt12(val);
        os << "\n";
    }
}

std::string MilpInstance::dump_string() const {
    std::ostringstream os;
    dump(os);
    return os.str();
}

void MilpInstance::write_lp(std::ostream& os) const {
    // LP-format identifiers cannot contain brackets
    const auto lp_name = [](const std::string& s) {
        std::string out = s;
        for (char& c : out)
            if (c == '[' || c == ']')
                c = '_';
        return out;
    };

    os << "Minimize\n obj:";
    for (int j = 0; j < num_cols(); ++j) {
        const double v = cols[j].objective;
        if (v == 0.0)
            continue;
        os << (v < 0 ? " - " : " + ") << fmt12(std::abs(v)) << " " << lp_name(cols[j].name);
    }
    os << "\nSubject To\n";
    for (int i = 0; i < num_rows(); ++i) {
        const Row& r = rows[i];
        os << " " << lp_name(r.name) << ":";
        for (const auto& [col, val] : r.coeffs)
            os << (val < 0 ? " - " : " + ") << fmt12(std::abs(val)) << " " << lp_name(cols[col].name);
        os << " " << sense_text(r.sense) << " " << fmt12(r.rhs) << "\n";
    }
    constexpr double inf = std::numeric_limits<double>::infinity();
    os << "Bounds\n";
    for (int j = 0; j < num_cols(); ++j) {
        const Column& c = cols[j];
        const std::string n = lp_name(c.name);
        if (c.lower == -inf && c.upper == inf)
            os << " " << n << " free\n";
        else if (c.upper == inf)
            os << " " << fmt12(c.lower) << " <= " << n << "\n";
        else if (c.lower == -inf)
            os << " " << n << " <= " << fmt12(c.upper) << "\n";
        else
            os << " " << fmt12(c.lower) << " <= " << n << " <= " << fmt12(c.upper) << "\n";
    }
    bool any_binary = false;
    for (const Column& c : cols)
        any_binary = any_binary || c.kind == VarKind::Binary;
    if (any_binary) {
        os << "Binaries\n";
        for (const Column& c : cols)
            if (c.kind == VarKind::Binary)
                os << " " << lp_name(c.name) << "\n";
    }
    os << "End\n";
}

CvarResult cvar_discrete(std::span<const double> costs, std::span<const double> probs,
                         double alpha) {
    if (costs.size() != probs.size() || costs.empty())
        throw std::invalid_argument("cvar_discrete: costs and probs must be nonempty, same length");
    if (!(alpha >= 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("cvar_discrete: alpha must lie in [0,1)");
    double total = 0.0;
    for (double p : probs) {
        if (!(p > 0.0))
            throw std::invalid_argument("cvar_discrete: probabilities must be positive");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("cvar_discrete: probabilities must sum to 1");

    // The objective is piecewise linear and convex in the threshold, so the
    // minimum sits at the smallest cost whose cumulative probability reaches
    // alpha (the empirical alpha-quantile).
    std::vector<std::size_t> order(costs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return costs[a] < costs[b]; });

    double cum = 0.0;
    double threshold = costs[order.back()];
    for (std::size_t i : order) {
        cum += probs[i];
        if (cum >= alpha) {
            threshold = costs[i];
            break;
        }
    }

    double excess = 0.0;
    for (std::size_t i = 0; i < costs.size(); ++i)
        excess += probs[i] * std::max(costs[i] - threshold, 0.0);
    return {threshold + excess / (1.0 - alpha), threshold};
}

double expected_profit(const std::vector<DispatchPoint>& dispatch, const ScenarioSet& scenarios,
                       const TimeGrid& grid) {
    scenarios.validate();
    if (static_cast<int>(dispatch.size()) != grid.num_intervals ||
        scenarios.num_intervals != grid.num_intervals)
        throw std::invalid_argument("expected_profit: dispatch/scenario/grid shape mismatch");

    const double h = grid.hour_factor();
    double profit = 0.0;
    for (int w = 0; w < scenarios.count(); ++w) {
        double path = 0.0;
        for (int k = 0; k < grid.num_intervals; ++k)
            path += scenarios.price(w, k) * (dispatch[k].discharge_mw - dispatch[k].charge_mw);
        profit += scenarios.probabilities[w] * path;
    }
    return profit * h;
}

std::vector<double> scenario_charge_costs(const std::vector<DispatchPoint>& dispatch,
                                          const ScenarioSet& scenarios, const TimeGrid& grid) {
    if (static_cast<int>(dispatch.size()) != grid.num_intervals ||
        scenarios.num_intervals != grid.num_intervals)
        throw std::invalid_argument("scenario_charge_costs: shape mismatch");
    const double h = grid.hour_factor();
    std::vector<double> costs(static_cast<std::size_t>(scenarios.count()), 0.0);
    for (int w = 0; w < scenarios.count(); ++w) {
        double c = 0.0;
        for (int k = 0; k < grid.num_intervals; ++k)
            c += scenarios.price(w, k) * dispatch[k].charge_mw;
        costs[w] = c * h;
    }
    return costs;
}

MilpInstance assemble_rass(const StorageSpec& spec, const TimeGrid& grid,
                           const ScenarioSet& scenarios, const RiskParams& risk) {
    spec.validate();
    risk.validate();
    scenarios.validate();
    if (scenarios.num_intervals != grid.num_intervals)
        throw std::invalid_argument("assemble_rass: scenario horizon does not match grid");

    const int horizon = grid.num_intervals;
    const int n_scen = scenarios.count();
    const double h = grid.hour_factor();
    const std::vector<double> mean = scenarios.mean_prices();
    constexpr double inf = std::numeric_limits<double>::infinity();

    MilpInstance inst;
    inst.roles.charge.reserve(horizon);
    inst.roles.discharge.reserve(horizon);
    inst.roles.energy.reserve(horizon);
    inst.roles.mode.reserve(horizon);
    inst.roles.excess.reserve(n_scen);

    for (int k = 0; k < horizon; ++k)
        inst.roles.charge.push_back(inst.add_column("pc[" + std::to_string(k + 1) + "]", 0.0,
                                                    spec.p_c_max, mean[k] * h));
    for (int k = 0; k < horizon; ++k)
        inst.roles.discharge.push_back(inst.add_column("pd[" + std::to_string(k + 1) + "]", 0.0,
                                                       spec.p_d_max, -mean[k] * h));
    for (int k = 0; k < horizon; ++k)
        inst.roles.energy.push_back(
            inst.add_column("e[" + std::to_string(k + 1) + "]", spec.e_min, spec.e_max, 0.0));
    for (int k = 0; k < horizon; ++k)
        inst.roles.mode.push_back(
            inst.add_column("u[" + std::to_string(k + 1) + "]", 0.0, 1.0, 0.0, VarKind::Binary));
    for (int w = 0; w < n_scen; ++w)
        inst.roles.excess.push_back(
            inst.add_column("z[" + std::to_string(w + 1) + "]", 0.0, inf,
                            risk.beta * scenarios.probabilities[w] / (1.0 - risk.alpha)));
    inst.roles.threshold = inst.add_column("zeta", -inf, inf, risk.beta);

    // discharge only in discharge mode: pd[k] - p_d_max * u[k] <= 0
    for (int k = 0; k < horizon; ++k)
        inst.add_row("dis_lim[" + std::to_string(k + 1) + "]",
                     {{inst.roles.discharge[k], 1.0}, {inst.roles.mode[k], -spec.p_d_max}},
                     RowSense::LessEqual, 0.0);
    // charge only out of discharge mode: pc[k] + p_c_max * u[k] <= p_c_max
    for (int k = 0; k < horizon; ++k)
        inst.add_row("chg_lim[" + std::to_string(k + 1) + "]",
                     {{inst.roles.charge[k], 1.0}, {inst.roles.mode[k], spec.p_c_max}},
                     RowSense::LessEqual, spec.p_c_max);
    // stored-energy recursion; the first interval anchors at e_init
    for (int k = 0; k < horizon; ++k) {
        std::vector<std::pair<int, double>> coeffs{{inst.roles.energy[k], 1.0},
                                                   {inst.roles.discharge[k], h / spec.eta},
                                                   {inst.roles.charge[k], -spec.eta * h}};
        double rhs = 0.0;
        if (k == 0)
            rhs = spec.e_init;
        else
            coeffs.push_back({inst.roles.energy[k - 1], -1.0});
        inst.add_row("balance[" + std::to_string(k + 1) + "]", std::move(coeffs), RowSense::Equal,
                     rhs);
    }
    // CVaR epigraph per scenario: sum_k price*h*pc[k] - zeta - z[w] <= 0
    for (int w = 0; w < n_scen; ++w) {
        std::vector<std::pair<int, double>> coeffs;
        coeffs.reserve(static_cast<std::size_t>(horizon) + 2);
        for (int k = 0; k < horizon; ++k)
            coeffs.push_back({inst.roles.charge[k], scenarios.price(w, k) * h});
        coeffs.push_back({inst.roles.threshold, -1.0});
        coeffs.push_back({inst.roles.excess[w], -1.0});
        inst.add_row("cvar[" + std::to_string(w + 1) + "]", std::move(coeffs), RowSense::LessEqual,
                     0.0);
    }
    return inst;
}

RassSolution extract_solution(const MilpInstance& instance, const MilpSolution& solution,
                              const ScenarioSet& scenarios, const TimeGrid& grid,
                              const RiskParams& risk) {
    const int horizon = grid.num_intervals;
    if (static_cast<int>(instance.roles.charge.size()) != horizon)
        throw std::invalid_argument("extract_solution: instance horizon does not match grid");
    if (solution.values.size() != instance.cols.size())
        throw std::invalid_argument("extract_solution: solution size does not match instance");

    RassSolution out;
    out.dispatch.resize(static_cast<std::size_t>(horizon));
    for (int k = 0; k < horizon; ++k) {
        DispatchPoint& pt = out.dispatch[static_cast<std::size_t>(k)];
        pt.charge_mw = solution.values[instance.roles.charge[k]];
        pt.discharge_mw = solution.values[instance.roles.discharge[k]];
        pt.discharging = solution.values[instance.roles.mode[k]] > 0.5;
        pt.energy_mwh = solution.values[instance.roles.energy[k]];
    }
    out.threshold = solution.values[instance.roles.threshold];
    out.tail_excess.resize(instance.roles.excess.size());
    for (std::size_t w = 0; w < instance.roles.excess.size(); ++w)
        out.tail_excess[w] = solution.values[instance.roles.excess[w]];
    out.objective = solution.objective;
    out.nodes = solution.nodes;
    out.lp_iterations = solution.lp_iterations;
    out.expected_profit = expected_profit(out.dispatch, scenarios, grid);
    const std::vector<double> costs = scenario_charge_costs(out.dispatch, scenarios, grid);
    out.cvar_cost = cvar_discrete(costs, scenarios.probabilities, risk.alpha).value;
    return out;
}

} // namespace rass
