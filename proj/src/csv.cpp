#include "rass/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "rass/errors.hpp"

namespace rass {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ','))
        out.push_back(field);
    if (!line.empty() && line.back() == ',')
        out.push_back("");
    return out;
}

std::string strip(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos)
        return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& field, const std::string& path, int line_no) {
    const std::string s = strip(field);
    if (s.empty())
        throw ConfigError(path + ":" + std::to_string(line_no) + ": empty numeric field");
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE)
        throw ConfigError(path + ":" + std::to_string(line_no) + ": bad number '" + s + "'");
    return v;
}

long parse_long(const std::string& field, const std::string& path, int line_no) {
    const std::string s = strip(field);
    errno = 0;
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
        throw ConfigError(path + ":" + std::to_string(line_no) + ": bad integer '" + s + "'");
    return v;
}

std::string fmt6(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

} // namespace

PriceVector read_price_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open price file: " + path);
    std::string line;
    if (!std::getline(in, line) || strip(line) != "period,price")
        throw ConfigError(path + ": expected header 'period,price'");

    PriceVector prices;
    int line_no = 1;
    long expected = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (strip(line).empty())
            continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 2)
            throw ConfigError(path + ":" + std::to_string(line_no) + ": expected 2 fields");
        const long period = parse_long(fields[0], path, line_no);
        if (period != expected)
            throw ConfigError(path + ":" + std::to_string(line_no) + ": periods must run 1..K; got " +
                              std::to_string(period));
        prices.values.push_back(parse_double(fields[1], path, line_no));
        ++expected;
    }
    if (prices.values.empty())
        throw ConfigError(path + ": no price rows");
    return prices;
}

void write_price_csv(const std::string& path, const PriceVector& prices) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write price file: " + path);
    out << "period,price\n";
    for (int k = 0; k < prices.size(); ++k)
        out << (k + 1) << "," << fmt6(prices[k]) << "\n";
}

ErrorPool read_error_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open error file: " + path);
    std::string line;
    if (!std::getline(in, line))
        throw ConfigError(path + ": empty file");
    const auto header = split_csv_line(strip(line));
    for (std::size_t i = 0; i < header.size(); ++i)
        if (strip(header[i]) != "h" + std::to_string(i + 1))
            throw ConfigError(path + ": expected header 'h1,h2,...'; column " + std::to_string(i + 1) +
                              " is '" + strip(header[i]) + "'");

    ErrorPool pool;
    pool.horizon = static_cast<int>(header.size());
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (strip(line).empty())
            continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw ConfigError(path + ":" + std::to_string(line_no) + ": expected " +
                              std::to_string(header.size()) + " fields");
        for (const std::string& f : fields)
            pool.data.push_back(parse_double(f, path, line_no));
        ++pool.num_obs;
    }
    pool.validate();
    return pool;
}

void write_error_csv(const std::string& path, const ErrorPool& pool) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write error file: " + path);
    for (int h = 0; h < pool.horizon; ++h)
        out << (h == 0 ? "" : ",") << "h" << (h + 1);
    out << "\n";
    for (int r = 0; r < pool.num_obs; ++r) {
        for (int h = 0; h < pool.horizon; ++h)
            out << (h == 0 ? "" : ",") << fmt6(pool.at(r, h));
        out << "\n";
    }
}

void write_trace_csv(const std::string& path, const DispatchTrace& trace) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write trace file: " + path);
    out << "period,p_charge_mw,p_discharge_mw,e_end_mwh,realized_price,cashflow\n";
    for (std::size_t k = 0; k < trace.entries.size(); ++k) {
        const TraceEntry& e = trace.entries[k];
        out << (k + 1) << "," << fmt6(e.charge_mw) << "," << fmt6(e.discharge_mw) << ","
            << fmt6(e.energy_mwh) << "," << fmt6(e.realized_price) << "," << fmt6(e.cashflow)
            << "\n";
    }
}

} // namespace rass
