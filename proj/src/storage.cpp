#include "rass/storage.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "rass/errors.hpp"

namespace rass {

void StorageSpec::validate() const {
    if (!(eta > 0.0) || eta > 1.0)
        throw std::invalid_argument("StorageSpec: eta must lie in (0,1]");
    if (p_c_max < 0.0 || p_d_max < 0.0)
        throw std::invalid_argument("StorageSpec: power limits must be nonnegative");
    if (!(0.0 <= e_min && e_min <= e_init && e_init <= e_max))
        throw std::invalid_argument("StorageSpec: need 0 <= e_min <= e_init <= e_max");
    for (double v : {p_c_max, p_d_max, eta, e_min, e_max, e_init})
        if (!std::isfinite(v))
            throw std::invalid_argument("StorageSpec: non-finite field");
}

StorageSpec load_storage_json(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open storage file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("storage file " + path + ": " + e.what());
    }
    StorageSpec spec;
    try {
        spec.p_c_max = j.at("p_c_max").get<double>();
        spec.p_d_max = j.at("p_d_max").get<double>();
        spec.eta = j.at("eta").get<double>();
        spec.e_min = j.at("e_min").get<double>();
        spec.e_max = j.at("e_max").get<double>();
        spec.e_init = j.contains("e_init") ? j.at("e_init").get<double>() : spec.e_min;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("storage file " + path + ": " + e.what());
    }
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("storage file " + path + ": " + e.what());
    }
    return spec;
}

void save_storage_json(const std::string& path, const StorageSpec& spec) {
    nlohmann::json j{
        {"p_c_max", spec.p_c_max}, {"p_d_max", spec.p_d_max}, {"eta", spec.eta},
        {"e_min", spec.e_min},     {"e_max", spec.e_max},     {"e_init", spec.e_init},
    };
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write storage file: " + path);
    out << j.dump(2) << '\n';
}

const char* constraint_name(ConstraintKind kind) {
    switch (kind) {
    case ConstraintKind::DischargeLimit: return "discharge_limit";
    case ConstraintKind::ChargeLimit: return "charge_limit";
    case ConstraintKind::PowerSign: return "power_sign";
    case ConstraintKind::EnergyBalance: return "energy_balance";
    case ConstraintKind::EnergyBounds: return "energy_bounds";
    }
    return "unknown";
}

std::vector<Violation> check_feasible(const StorageSpec& spec, const TimeGrid& grid,
                                      const std::vector<DispatchPoint>& points, double tol) {
    spec.validate();
    if (tol < 0.0)
        throw std::invalid_argument("check_feasible: tol must be nonnegative");
    if (static_cast<int>(points.size()) != grid.num_intervals)
        throw std::invalid_argument("check_feasible: schedule length does not match grid");

    std::vector<Violation> out;
    const auto flag = [&](int k, ConstraintKind kind, double magnitude, std::string detail) {
        out.push_back({k, kind, magnitude, std::move(detail)});
    };

    const double h = grid.hour_factor();
    double prev_energy = spec.e_init;
    for (int k = 1; k <= grid.num_intervals; ++k) {
        const DispatchPoint& pt = points[static_cast<std::size_t>(k - 1)];
        const double u = pt.discharging ? 1.0 : 0.0;

        if (pt.charge_mw < -tol)
            flag(k, ConstraintKind::PowerSign, -pt.charge_mw, "charge_mw negative");
        if (pt.discharge_mw < -tol)
            flag(k, ConstraintKind::PowerSign, -pt.discharge_mw, "discharge_mw negative");

        const double dis_excess = pt.discharge_mw - spec.p_d_max * u;
        if (dis_excess > tol)
            flag(k, ConstraintKind::DischargeLimit, dis_excess,
                 pt.discharging ? "discharge above limit" : "discharge while not in discharge mode");
        const double chg_excess = pt.charge_mw - spec.p_c_max * (1.0 - u);
        if (chg_excess > tol)
            flag(k, ConstraintKind::ChargeLimit, chg_excess,
                 pt.discharging ? "charge while in discharge mode" : "charge above limit");

        const double expected =
            prev_energy - pt.discharge_mw * h / spec.eta + spec.eta * pt.charge_mw * h;
        const double residual = std::abs(pt.energy_mwh - expected);
        if (residual > tol)
            flag(k, ConstraintKind::EnergyBalance, residual, "stored-energy recursion violated");

        if (pt.energy_mwh < spec.e_min - tol)
            flag(k, ConstraintKind::EnergyBounds, spec.e_min - pt.energy_mwh, "below e_min");
        if (pt.energy_mwh > spec.e_max + tol)
            flag(k, ConstraintKind::EnergyBounds, pt.energy_mwh - spec.e_max, "above e_max");

        prev_energy = pt.energy_mwh;
    }
    return out;
}

} // namespace rass
