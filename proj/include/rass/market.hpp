#pragma once

#include <cstdint>
#include <vector>

namespace rass {

/// Time discretization: `num_intervals` market intervals of `kappa_minutes`
/// each. All energy and currency computations apply hour_factor() to convert
/// MW over one interval into MWh.
struct TimeGrid {
    int kappa_minutes = 0;
    int num_intervals = 0;

    TimeGrid() = default;
    TimeGrid(int kappa, int intervals);

    double hour_factor() const { return static_cast<double>(kappa_minutes) / 60.0; }
};

/// One price per interval, currency/MWh. Negative prices are legal.
struct PriceVector {
    std::vector<double> values;

    PriceVector() = default;
    explicit PriceVector(std::vector<double> v) : values(std::move(v)) {}

    int size() const { return static_cast<int>(values.size()); }
    double operator[](int k) const { return values[static_cast<std::size_t>(k)]; }

    void validate(const TimeGrid& grid) const; // length == K, all entries finite
};

/// Empirical forecast-error observations. Row = one historical observation,
/// column h (0-based) = error at look-ahead distance h+1 intervals from the
/// decision time.
struct ErrorPool {
    int num_obs = 0;
    int horizon = 0;
    std::vector<double> data; // row-major num_obs x horizon

    double at(int obs, int col) const { return data[static_cast<std::size_t>(obs) * horizon + col]; }
    void validate() const;
};

/// Discrete price scenarios over a horizon with realization probabilities.
struct ScenarioSet {
    int num_intervals = 0;
    std::vector<double> prices; // row-major count() x num_intervals
    std::vector<double> probabilities;

    int count() const { return static_cast<int>(probabilities.size()); }
    double price(int scenario, int k) const {
        return prices[static_cast<std::size_t>(scenario) * num_intervals + k];
    }
    // per-interval probability-weighted mean price
    std::vector<double> mean_prices() const;

    void validate() const; // probabilities positive, sum to 1 within 1e-12, row shape
};

/// Samples `n` error observations without replacement (deterministic under
/// `seed`) and adds each to the pre-dispatch vector: scenario prices are
/// predispatch[k] + error[k], each with probability 1/n.
ScenarioSet build_scenarios(const PriceVector& predispatch, const ErrorPool& pool, int n,
                            std::uint64_t seed);

/// Re-anchors a full-horizon scenario set to a window starting at interval
/// `start` (1-based): the error at look-ahead h lands on interval start+h-1.
/// window_view(set, pd, 1) == set.
ScenarioSet window_view(const ScenarioSet& full, const PriceVector& predispatch, int start);

/// Synthetic error pool: zero-mean Gaussian entries with per-column standard
/// deviation sigma0 * h^gamma at look-ahead h, deterministic under `seed`.
/// `rho` in [0,1] blends in a per-observation common factor (real pre-dispatch
/// errors move together within a day); the column marginals are unchanged.
ErrorPool synth_pool(int horizon, int num_obs, double sigma0, double gamma, std::uint64_t seed,
                     double rho = 0.0);

} // namespace rass
