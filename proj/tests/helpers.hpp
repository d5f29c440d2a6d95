#pragma once

#include <cstdint>
#include <vector>

#include "rass/market.hpp"
#include "rass/model.hpp"
#include "rass/rng.hpp"
#include "rass/storage.hpp"

namespace testing {

// Random but valid self-scheduling setup; prices span negative values.
struct RandomCase {
    rass::StorageSpec spec;
    rass::TimeGrid grid;
    rass::ScenarioSet scenarios;
    rass::RiskParams risk;
};

inline rass::ScenarioSet random_scenarios(rass::Rng& rng, int horizon, int count) {
    rass::ScenarioSet set;
    set.num_intervals = horizon;
    set.prices.resize(static_cast<std::size_t>(count) * horizon);
    std::vector<double> weights(static_cast<std::size_t>(count));
    double total = 0.0;
    for (int w = 0; w < count; ++w) {
        weights[w] = 0.05 + rng.next_double();
        total += weights[w];
    }
    set.probabilities.resize(static_cast<std::size_t>(count));
    double running = 0.0;
    for (int w = 0; w + 1 < count; ++w) {
        set.probabilities[w] = weights[w] / total;
        running += set.probabilities[w];
    }
    set.probabilities[count - 1] = 1.0 - running; // exact normalization
    for (int w = 0; w < count; ++w)
        for (int k = 0; k < horizon; ++k)
            set.prices[static_cast<std::size_t>(w) * horizon + k] =
                -20.0 + 120.0 * rng.next_double();
    return set;
}

inline RandomCase random_case(rass::Rng& rng, int max_horizon, int max_scenarios) {
    RandomCase c;
    const int horizon = 1 + static_cast<int>(rng.next_below(max_horizon));
    const int count = 1 + static_cast<int>(rng.next_below(max_scenarios));
    const int kappas[3] = {15, 30, 60};
    c.grid = rass::TimeGrid(kappas[rng.next_below(3)], horizon);

    c.spec.p_c_max = 0.5 + 4.5 * rng.next_double();
    c.spec.p_d_max = 0.5 + 4.5 * rng.next_double();
    c.spec.eta = 0.7 + 0.3 * rng.next_double();
    c.spec.e_min = 2.0 * rng.next_double();
    c.spec.e_max = c.spec.e_min + 0.5 + 6.0 * rng.next_double();
    c.spec.e_init = c.spec.e_min + (c.spec.e_max - c.spec.e_min) * rng.next_double();

    c.scenarios = random_scenarios(rng, horizon, count);
    const double alphas[4] = {0.0, 0.5, 0.8, 0.95};
    c.risk.alpha = alphas[rng.next_below(4)];
    c.risk.beta = rng.next_double();
    return c;
}

// Rockafellar-Uryasev LP with a fixed cost vector: minimize
// zeta + sum_w probs[w]/(1-alpha) z_w  s.t.  -zeta - z_w <= -costs[w], z_w >= 0.
inline rass::MilpInstance make_cvar_lp(const std::vector<double>& costs,
                                       const std::vector<double>& probs, double alpha) {
    rass::MilpInstance inst;
    constexpr double inf = std::numeric_limits<double>::infinity();
    const int zeta = inst.add_column("zeta", -inf, inf, 1.0);
    std::vector<int> z(costs.size());
    for (std::size_t w = 0; w < costs.size(); ++w)
        z[w] = inst.add_column("z[" + std::to_string(w + 1) + "]", 0.0, inf,
                               probs[w] / (1.0 - alpha));
    for (std::size_t w = 0; w < costs.size(); ++w)
        inst.add_row("tail[" + std::to_string(w + 1) + "]", {{zeta, -1.0}, {z[w], -1.0}},
                     rass::RowSense::LessEqual, -costs[w]);
    return inst;
}

// Feasible-by-construction schedule generator for property tests.
inline std::vector<rass::DispatchPoint> random_feasible_schedule(rass::Rng& rng,
                                                                 const rass::StorageSpec& spec,
                                                                 const rass::TimeGrid& grid) {
    std::vector<rass::DispatchPoint> points;
    points.reserve(static_cast<std::size_t>(grid.num_intervals));
    const double h = grid.hour_factor();
    double energy = spec.e_init;
    for (int k = 0; k < grid.num_intervals; ++k) {
        rass::DispatchPoint pt;
        pt.discharging = rng.next_below(2) == 1;
        if (pt.discharging) {
            const double headroom = spec.eta * (energy - spec.e_min) / h;
            pt.discharge_mw = std::min(spec.p_d_max, headroom) * rng.next_double();
        } else {
            const double headroom = (spec.e_max - energy) / (spec.eta * h);
            pt.charge_mw = std::min(spec.p_c_max, headroom) * rng.next_double();
        }
        energy = energy - pt.discharge_mw * h / spec.eta + spec.eta * pt.charge_mw * h;
        pt.energy_mwh = energy;
        points.push_back(pt);
    }
    return points;
}

} // namespace testing
