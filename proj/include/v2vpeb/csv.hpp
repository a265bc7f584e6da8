#pragma once

// Sweep CSV: fixed header, SI units, 9 significant digits, "inf" sentinels.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "v2vpeb/scenarios.hpp"

namespace v2vpeb {

inline constexpr const char* kCsvHeader =
    "q_x,q_y,d_y,n_links,peb_lat_both,peb_lon_both,peb_lat_aoa,peb_lon_aoa,oeb_both,oeb_aoa";

inline std::string format_value(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

inline void write_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << kCsvHeader << '\n';
    for (const auto& r : rows) {
        os << format_value(r.q_x) << ',' << format_value(r.q_y) << ',' << format_value(r.d_y) << ',' << r.n_links
           << ',' << format_value(r.peb_lat_both) << ',' << format_value(r.peb_lon_both) << ','
           << format_value(r.peb_lat_aoa) << ',' << format_value(r.peb_lon_aoa) << ',' << format_value(r.oeb_both)
           << ',' << format_value(r.oeb_aoa) << '\n';
    }
}

inline void emit_csv(const std::string& path, const std::vector<SweepRow>& rows) {
    if (rows.empty()) throw std::invalid_argument("emit_csv: no rows to write for " + path);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_csv(f, rows);
    f.flush();
    if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

inline std::vector<SweepRow> read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != kCsvHeader) throw std::runtime_error("unexpected CSV header");
    std::vector<SweepRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
        if (f.size() != 10) throw std::runtime_error("CSV row has " + std::to_string(f.size()) + " fields");
        SweepRow r;
        r.q_x = std::stod(f[0]);
        r.q_y = std::stod(f[1]);
        r.d_y = std::stod(f[2]);
        r.n_links = std::stoul(f[3]);
        r.peb_lat_both = std::stod(f[4]);
        r.peb_lon_both = std::stod(f[5]);
        r.peb_lat_aoa = std::stod(f[6]);
        r.peb_lon_aoa = std::stod(f[7]);
        r.oeb_both = std::stod(f[8]);
        r.oeb_aoa = std::stod(f[9]);
        rows.push_back(r);
    }
    return rows;
}

}  // namespace v2vpeb
