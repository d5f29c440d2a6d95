#pragma once

#include <string>

#include "rass/market.hpp"
#include "rass/rolling.hpp"

namespace rass {

/// `period,price` with periods 1..K in order.
PriceVector read_price_csv(const std::string& path);
void write_price_csv(const std::string& path, const PriceVector& prices);

/// `h1,h2,...,hH`, one row per historical observation.
ErrorPool read_error_csv(const std::string& path);
void write_error_csv(const std::string& path, const ErrorPool& pool);

/// `period,p_charge_mw,p_discharge_mw,e_end_mwh,realized_price,cashflow`,
/// six decimal places.
void write_trace_csv(const std::string& path, const DispatchTrace& trace);

} // namespace rass
