#pragma once

#include <cmath>
#include <cstdio>
#include <istream>
#include <iterator>
#include <limits>
#include <stdexcept>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nlwr/bounds.hpp"
#include "nlwr/errors.hpp"
#include "nlwr/solver.hpp"

namespace nlwr {

inline constexpr std::string_view kSnapshotHeader = "t,x,rho";
inline constexpr std::string_view kBoundsHeader = "t,L,Mt,K1,K2,a,int_b,c1,c2,int_c3,bound,empirical";

/// Shortest round-trippable text for a double; "inf", "-inf" and "nan" for
/// non-finite values.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_double(std::string_view s) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    const std::string str(s);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(str, &used);
    } catch (const std::exception&) {
        throw config_error("csv: cannot parse number '" + str + "'");
    }
    if (used != str.size()) throw config_error("csv: trailing characters in '" + str + "'");
    return v;
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.emplace_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

inline void write_snapshot_rows(std::ostream& out, const Grid1D& grid, double t, std::span<const double> rho) {
    const std::string ts = format_double(t);
    for (std::size_t j = 0; j < rho.size(); ++j)
        out << ts << ',' << format_double(grid.center(j)) << ',' << format_double(rho[j]) << '\n';
}

/// Every stored snapshot of a solution, long format.
inline void write_snapshot_csv(std::ostream& out, const Solution& sol) {
    out << kSnapshotHeader << '\n';
    for (std::size_t i = 0; i < sol.snapshots.size(); ++i) {
        const CellField& s = sol.snapshots[i];
        write_snapshot_rows(out, s.grid(), sol.times[i], s.values());
    }
}

struct SnapshotRecord {
    double t = 0.0;
    double x = 0.0;
    double rho = 0.0;
};

inline std::vector<SnapshotRecord> read_snapshot_csv(std::istream& in) {
    std::vector<SnapshotRecord> rows;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            if (line != kSnapshotHeader) throw config_error("snapshot csv: unexpected header '" + line + "'");
            header = true;
            continue;
        }
        const auto f = split_csv_line(line);
        if (f.size() != 3) throw config_error("snapshot csv: expected 3 fields in '" + line + "'");
        rows.push_back({parse_double(f[0]), parse_double(f[1]), parse_double(f[2])});
    }
    return rows;
}

inline void write_bounds_header(std::ostream& out) { out << kBoundsHeader << '\n'; }

/// One bounds row. Entries that do not apply to the report kind are 0.
inline void write_bounds_row(std::ostream& out, const BoundReport& r) {
    const double fields[] = {r.t, r.script_l, r.m_t, r.k1, r.k2, r.a_t, r.b_integral,
                             r.c1, r.c2, r.c3_integral, r.bound_value, r.empirical};
    for (std::size_t i = 0; i < std::size(fields); ++i) out << (i ? "," : "") << format_double(fields[i]);
    out << '\n';
}

inline void write_bounds_csv(std::ostream& out, std::span<const BoundReport> reports) {
    write_bounds_header(out);
    for (const auto& r : reports) write_bounds_row(out, r);
}

}  // namespace nlwr
