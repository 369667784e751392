/// \file io.hpp
/// \brief CSV series format (header `x,y`, one point per row) and input
///        checksumming for report provenance.
#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "odedisc/errors.hpp"
#include "odedisc/gensol.hpp"

namespace odedisc {

/// Shortest representation that round-trips a double exactly.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_series_csv(const TimeSeries& ts, std::ostream& os) {
    os << "x,y\n";
    for (std::size_t i = 0; i < ts.size(); ++i)
        os << format_double(ts.xs[i]) << ',' << format_double(ts.ys[i]) << '\n';
}

inline void write_series_csv(const TimeSeries& ts, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw InvalidInput("cannot open for writing: " + path);
    write_series_csv(ts, os);
}

inline TimeSeries read_series_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw InvalidInput("empty CSV input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "x,y") throw InvalidInput("CSV header must be `x,y`");
    TimeSeries ts;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw InvalidInput("CSV line " + std::to_string(line_no) +
                               ": expected `x,y`");
        std::size_t used_x = 0, used_y = 0;
        double x = 0.0, y = 0.0;
        try {
            x = std::stod(line.substr(0, comma), &used_x);
            y = std::stod(line.substr(comma + 1), &used_y);
        } catch (const std::exception&) {
            throw InvalidInput("CSV line " + std::to_string(line_no) +
                               ": malformed number");
        }
        ts.xs.push_back(x);
        ts.ys.push_back(y);
    }
    validate_series(ts);
    return ts;
}

inline TimeSeries read_series_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw InvalidInput("cannot open input: " + path);
    return read_series_csv(is);
}

/// FNV-1a 64-bit hash, hex-encoded; used as the input checksum in reports.
inline std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
}

/// Checksum of the canonical CSV serialization of a series.
inline std::string series_checksum(const TimeSeries& ts) {
    std::ostringstream os;
    write_series_csv(ts, os);
    return fnv1a_hex(os.str());
}

}  // namespace odedisc
