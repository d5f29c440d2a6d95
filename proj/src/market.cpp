#include "rass/market.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "rass/rng.hpp"

namespace rass {

TimeGrid::TimeGrid(int kappa, int intervals) : kappa_minutes(kappa), num_intervals(intervals) {
    if (kappa < 1)
        throw std::invalid_argument("TimeGrid: kappa_minutes must be >= 1");
    if (intervals < 1)
        throw std::invalid_argument("TimeGrid: number of intervals must be >= 1");
}

void PriceVector::validate(const TimeGrid& grid) const {
    if (size() != grid.num_intervals)
        throw std::invalid_argument("PriceVector: length " + std::to_string(size()) +
                                    " does not match grid K=" + std::to_string(grid.num_intervals));
    for (double v : values)
        if (!std::isfinite(v))
            throw std::invalid_argument("PriceVector: non-finite price");
}

void ErrorPool::validate() const {
    if (num_obs < 1 || horizon < 1)
        throw std::invalid_argument("ErrorPool: needs at least one observation and one column");
    if (data.size() != static_cast<std::size_t>(num_obs) * horizon)
        throw std::invalid_argument("ErrorPool: data size does not match num_obs x horizon");
    for (double v : data)
        if (!std::isfinite(v))
            throw std::invalid_argument("ErrorPool: non-finite entry");
}

std::vector<double> ScenarioSet::mean_prices() const {
    std::vector<double> mean(static_cast<std::size_t>(num_intervals), 0.0);
    for (int w = 0; w < count(); ++w)
        for (int k = 0; k < num_intervals; ++k)
            mean[k] += probabilities[w] * price(w, k);
    return mean;
}

void ScenarioSet::validate() const {
    if (count() < 1)
        throw std::invalid_argument("ScenarioSet: empty");
    if (num_intervals < 1)
        throw std::invalid_argument("ScenarioSet: zero-width horizon");
    if (prices.size() != static_cast<std::size_t>(count()) * num_intervals)
        throw std::invalid_argument("ScenarioSet: price matrix shape mismatch");
    double total = 0.0;
    for (double p : probabilities) {
        if (!(p > 0.0))
            throw std::invalid_argument("ScenarioSet: probabilities must be positive");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("ScenarioSet: probabilities sum to " + std::to_string(total));
    for (double v : prices)
        if (!std::isfinite(v))
            throw std::invalid_argument("ScenarioSet: non-finite price");
}

ScenarioSet build_scenarios(const PriceVector& predispatch, const ErrorPool& pool, int n,
                            std::uint64_t seed) {
    pool.validate();
    const int horizon = predispatch.size();
    if (horizon < 1)
        throw std::invalid_argument("build_scenarios: empty pre-dispatch vector");
    if (n < 1)
        throw std::invalid_argument("build_scenarios: need at least one scenario");
    if (n > pool.num_obs)
        throw std::invalid_argument("build_scenarios: requested " + std::to_string(n) +
                                    " scenarios from a pool of " + std::to_string(pool.num_obs) +
                                    " observations");
    if (pool.horizon < horizon)
        throw std::invalid_argument("build_scenarios: pool horizon " + std::to_string(pool.horizon) +
                                    " shorter than grid K=" + std::to_string(horizon));

    // partial Fisher-Yates: first n entries are a uniform draw without replacement
    std::vector<int> idx(static_cast<std::size_t>(pool.num_obs));
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(seed);
    for (int i = 0; i < n; ++i) {
        const std::uint64_t j = i + rng.next_below(static_cast<std::uint64_t>(pool.num_obs - i));
        std::swap(idx[i], idx[j]);
    }

    ScenarioSet set;
    set.num_intervals = horizon;
    set.prices.resize(static_cast<std::size_t>(n) * horizon);
    set.probabilities.assign(static_cast<std::size_t>(n), 1.0 / n);
    for (int w = 0; w < n; ++w) {
        const int row = idx[w];
        for (int k = 0; k < horizon; ++k)
            set.prices[static_cast<std::size_t>(w) * horizon + k] = predispatch[k] + pool.at(row, k);
    }
    set.validate();
    return set;
}

ScenarioSet window_view(const ScenarioSet& full, const PriceVector& predispatch, int start) {
    full.validate();
    if (predispatch.size() != full.num_intervals)
        throw std::invalid_argument("window_view: pre-dispatch length does not match scenario set");
    if (start < 1 || start > full.num_intervals)
        throw std::out_of_range("window_view: start interval " + std::to_string(start) +
                                " outside 1.." + std::to_string(full.num_intervals));

    const int width = full.num_intervals - start + 1;
    ScenarioSet out;
    out.num_intervals = width;
    out.probabilities = full.probabilities;
    out.prices.resize(static_cast<std::size_t>(full.count()) * width);
    for (int w = 0; w < full.count(); ++w) {
        for (int i = 0; i < width; ++i) {
            // error at look-ahead i+1, re-anchored onto interval start+i
            const double err = full.price(w, i) - predispatch[i];
            out.prices[static_cast<std::size_t>(w) * width + i] = predispatch[start - 1 + i] + err;
        }
    }
    return out;
}

ErrorPool synth_pool(int horizon, int num_obs, double sigma0, double gamma, std::uint64_t seed,
                     double rho) {
    if (horizon < 1 || num_obs < 1)
        throw std::invalid_argument("synth_pool: horizon and num_obs must be >= 1");
    if (sigma0 < 0.0 || gamma < 0.0)
        throw std::invalid_argument("synth_pool: sigma0 and gamma must be nonnegative");
    if (!(rho >= 0.0) || !(rho <= 1.0))
        throw std::invalid_argument("synth_pool: rho must lie in [0,1]");

    std::vector<double> sigma(static_cast<std::size_t>(horizon));
    for (int h = 0; h < horizon; ++h)
        sigma[h] = sigma0 * std::pow(static_cast<double>(h + 1), gamma);

    ErrorPool pool;
    pool.num_obs = num_obs;
    pool.horizon = horizon;
    pool.data.resize(static_cast<std::size_t>(num_obs) * horizon);
    Rng rng(seed);
    const double common_w = std::sqrt(rho);
    const double own_w = std::sqrt(1.0 - rho);
    for (int r = 0; r < num_obs; ++r) {
        const double common = rho > 0.0 ? rng.next_gaussian() : 0.0;
        for (int h = 0; h < horizon; ++h) {
            const double own = rng.next_gaussian();
            pool.data[static_cast<std::size_t>(r) * horizon + h] =
                sigma[h] * (common_w * common + own_w * own);
        }
    }
    return pool;
}

} // namespace rass
