#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <exception>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "nlwr/config.hpp"
#include "nlwr/csv.hpp"
#include "nlwr/errors.hpp"
#include "nlwr/functionals.hpp"
#include "nlwr/parallel.hpp"
#include "nlwr/solver.hpp"

namespace nlwr {

inline constexpr std::string_view kSweepHeader = "param,value,J,Psi,steps,mass_drift,min_rho,seconds";

enum class SweepParam { eta, delta, m };

inline const char* to_string(SweepParam p) noexcept {
    switch (p) {
        case SweepParam::eta: return "eta";
        case SweepParam::delta: return "delta";
        case SweepParam::m: return "m";
    }
    return "?";
}

inline SweepParam parse_sweep_param(std::string_view name) {
    if (name == "eta") return SweepParam::eta;
    if (name == "delta") return SweepParam::delta;
    if (name == "m") return SweepParam::m;
    throw parameter_error("sweep: unknown parameter '" + std::string(name) + "' (expected eta, delta or m)");
}

/// Arithmetic grid from, from + step, ..., to. Nodes are rounded to 12
/// decimals so that 0.1:0.1:1 yields 0.3 rather than 0.30000000000000004.
inline std::vector<double> sweep_values(double from, double to, double step) {
    if (!(step > 0.0) || !std::isfinite(from) || !std::isfinite(to) || to < from)
        throw parameter_error("sweep: need from <= to and step > 0");
    const double span = (to - from) / step;
    const auto n = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = from + static_cast<double>(i) * step;
        v[i] = std::round(x * 1e12) / 1e12;
    }
    return v;
}

struct SweepSpec {
    SweepParam param = SweepParam::eta;
    std::vector<double> values;
    ExperimentConfig base;

    ExperimentConfig config_for(double value) const {
        ExperimentConfig c = base;
        switch (param) {
            case SweepParam::eta: c.eta = value; break;
            case SweepParam::delta: c.delta = value; break;
            case SweepParam::m: c.m = static_cast<int>(value); break;
        }
        return c;
    }

    void validate() const {
        if (values.empty()) throw parameter_error("sweep: no grid values");
        for (double v : values) {
            const ExperimentConfig c = config_for(v);
            std::ostringstream why;
            why.precision(17);
            if (param == SweepParam::m && (v != std::floor(v) || v < 1.0))
                why << "m=" << v << " is not an integer >= 1";
            else if (!(c.eta > 0.0 && c.eta <= 1.0))
                why << "eta=" << c.eta << " is outside ]0, 1]";
            else if (std::abs(c.delta) > c.eta)
                why << "delta=" << c.delta << " is outside [-eta, eta] with eta=" << c.eta;
            if (!why.str().empty()) throw parameter_error("sweep " + std::string(to_string(param)) + ": " + why.str());
        }
    }
};

struct SweepRow {
    SweepParam param = SweepParam::eta;
    double value = 0.0;
    double J = 0.0;
    double Psi = 0.0;
    std::size_t steps = 0;
    double mass_drift = 0.0;
    double min_rho = 0.0;
    double seconds = 0.0;
    std::optional<std::string> error;

    bool ok() const noexcept { return !error.has_value(); }
};

/// One solve per grid value, run concurrently; rows come back sorted by value.
/// A failing run yields a row carrying its error message instead of aborting
/// the sweep.
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec, std::size_t workers = worker_count()) {
    spec.validate();
    std::vector<double> values = spec.values;
    std::stable_sort(values.begin(), values.end());
    std::vector<SweepRow> rows(values.size());
    auto errors = parallel_for(
        values.size(),
        [&](std::size_t i) {
            SweepRow& row = rows[i];
            row.param = spec.param;
            row.value = values[i];
            ExperimentConfig cfg = spec.config_for(values[i]);
            cfg.snapshot_stride = std::numeric_limits<std::size_t>::max();
            const auto start = std::chrono::steady_clock::now();
            const Problem p = make_problem(cfg);
            const Solution sol = solve(p);
            row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            row.J = functional_j(sol);
            row.Psi = functional_psi(sol, cfg.queue_a, cfg.queue_b);
            row.steps = sol.n_steps();
            row.mass_drift = sol.max_mass_drift;
            row.min_rho = sol.min_rho;
        },
        workers);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!errors[i]) continue;
        SweepRow& row = rows[i];
        row.param = spec.param;
        row.value = values[i];
        try {
            std::rethrow_exception(errors[i]);
        } catch (const std::exception& e) {
            row.error = e.what();
        } catch (...) {
            row.error = "unknown failure";
        }
    }
    return rows;
}

/// Multi-line summary of failed rows, empty when every run succeeded.
inline std::string sweep_failures(const std::vector<SweepRow>& rows) {
    std::ostringstream o;
    o.precision(17);
    for (const auto& r : rows)
        if (r.error) o << to_string(r.param) << '=' << r.value << ": " << *r.error << '\n';
    return o.str();
}

/// Metadata comment naming the fixed parameters and the time-step policy.
inline std::string sweep_metadata(const SweepSpec& spec) {
    const ExperimentConfig& c = spec.base;
    std::ostringstream o;
    o << "# nlwr sweep param=" << to_string(spec.param) << " dx=" << format_double(c.dx)
      << " T=" << format_double(c.T) << " eta=" << format_double(c.eta) << " delta=" << format_double(c.delta)
      << " m=" << c.m << " kernel_orientation="
      << (c.orientation == KernelOrientation::forward ? "forward" : "convolution") << " rho0=" << format_double(c.rho0)
      << " speed_limit=" << (c.constant_speed ? "constant" : "piecewise")
      << " sigma=" << format_double(c.speed.sigma) << " cfl_safety=" << format_double(c.cfl_safety)
      << " alpha=" << (c.alpha ? format_double(*c.alpha) : std::string("auto"))
      << " queue=[" << format_double(c.queue_a) << ',' << format_double(c.queue_b) << ']';
    return o.str();
}

/// Writes the metadata line, the header and one row per run. Failed runs put
/// `error` in the J and Psi columns and their message in a trailing comment.
/// With `timing` off the seconds column is 0 so the output is reproducible
/// byte for byte.
inline void write_sweep_csv(std::ostream& out, const SweepSpec& spec, const std::vector<SweepRow>& rows,
                            bool timing = true) {
    out << sweep_metadata(spec) << '\n' << kSweepHeader << '\n';
    for (const auto& r : rows) {
        out << to_string(r.param) << ',' << format_double(r.value) << ',';
        if (r.error) out << "error,error,0,nan,nan,";
        else
            out << format_double(r.J) << ',' << format_double(r.Psi) << ',' << r.steps << ','
                << format_double(r.mass_drift) << ',' << format_double(r.min_rho) << ',';
        out << format_double(timing ? r.seconds : 0.0) << '\n';
    }
    for (const auto& r : rows) {
        if (!r.error) continue;
        std::string msg = *r.error;
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        out << "# error " << to_string(r.param) << '=' << format_double(r.value) << ": " << msg << '\n';
    }
}

struct SweepTable {
    std::string metadata;
    std::vector<SweepRow> rows;
};

inline SweepTable read_sweep_csv(std::istream& in) {
    SweepTable table;
    std::map<std::string, std::string> messages;
    std::vector<std::string> value_text;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.rfind("# error ", 0) == 0) {
                const auto eq = line.find('=');
                const auto colon = line.find(": ", eq);
                if (eq != std::string::npos && colon != std::string::npos)
                    messages[line.substr(eq + 1, colon - eq - 1)] = line.substr(colon + 2);
            } else if (table.metadata.empty()) {
                table.metadata = line;
            }
            continue;
        }
        if (!header) {
            if (line != kSweepHeader) throw config_error("sweep csv: unexpected header '" + line + "'");
            header = true;
            continue;
        }
        const auto f = split_csv_line(line);
        if (f.size() != 8) throw config_error("sweep csv: expected 8 fields in '" + line + "'");
        SweepRow r;
        r.param = parse_sweep_param(f[0]);
        r.value = parse_double(f[1]);
        if (f[2] == "error") {
            r.error = "";
        } else {
            r.J = parse_double(f[2]);
            r.Psi = parse_double(f[3]);
            r.steps = static_cast<std::size_t>(std::stoull(f[4]));
            r.mass_drift = parse_double(f[5]);
            r.min_rho = parse_double(f[6]);
        }
        r.seconds = parse_double(f[7]);
        value_text.push_back(f[1]);
        table.rows.push_back(std::move(r));
    }
    if (!header) throw config_error("sweep csv: missing header");
    for (std::size_t i = 0; i < table.rows.size(); ++i)
        if (table.rows[i].error)
            if (auto it = messages.find(value_text[i]); it != messages.end()) table.rows[i].error = it->second;
    return table;
}

enum class SweepMetric { J, Psi };

/// Index of the smallest (or largest) metric among successful rows; the first
/// occurrence wins ties. Empty when no row succeeded.
inline std::optional<std::size_t> sweep_extremum(const std::vector<SweepRow>& rows, SweepMetric metric, bool largest) {
    std::optional<std::size_t> best;
    auto value = [&](const SweepRow& r) { return metric == SweepMetric::J ? r.J : r.Psi; };
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].ok()) continue;
        if (!best || (largest ? value(rows[i]) > value(rows[*best]) : value(rows[i]) < value(rows[*best]))) best = i;
    }
    return best;
}

}  // namespace nlwr
