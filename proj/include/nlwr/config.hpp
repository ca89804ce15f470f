#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "nlwr/errors.hpp"
#include "nlwr/grid.hpp"
#include "nlwr/kernel.hpp"
#include "nlwr/solver.hpp"
#include "nlwr/speed_limit.hpp"
#include "nlwr/velocity.hpp"

namespace nlwr {

/// How the kernel offset enters the discrete average R_j.
///   forward:     R_j = dx sum_k rho_{j+k} w(k dx); delta > 0 weights cells ahead.
///   convolution: R_j = dx sum_k rho_{j-k} w(k dx) = (rho * w)(x_j); delta > 0
///                weights cells behind. Implemented by mirroring delta.
enum class KernelOrientation { forward, convolution };

/// Every knob of one experiment. Defaults reproduce the circular-road setup
/// with a constant initial density of 0.6.
struct ExperimentConfig {
    double x_min = -1.0;
    double x_max = 1.0;
    double dx = 0.005;
    double T = 0.5;
    double eta = 0.1;
    double delta = 0.0;
    KernelOrientation orientation = KernelOrientation::forward;
    int m = 3;
    double rho0 = 0.6;
    bool constant_speed = false;
    double vmax = 7.0;  ///< used when constant_speed
    SpeedLimitSpec speed;
    double cfl_safety = 0.9;
    std::optional<double> alpha;
    std::size_t snapshot_stride = 100;
    double queue_a = -0.8;
    double queue_b = -1.0 / 3.0;
};

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

/// Parses a decimal number or a ratio "p/q".
inline std::optional<double> parse_number(std::string_view tok) {
    const std::string s = trim(tok);
    if (s.empty()) return std::nullopt;
    if (auto slash = s.find('/'); slash != std::string::npos) {
        auto p = parse_number(std::string_view(s).substr(0, slash));
        auto q = parse_number(std::string_view(s).substr(slash + 1));
        if (!p || !q || *q == 0.0) return std::nullopt;
        return *p / *q;
    }
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || !std::isfinite(v)) return std::nullopt;
    return v;
}

inline std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

}  // namespace detail

/// Applies one `key = value` assignment; throws config_error with the key and
/// reason on failure.
inline void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& raw_value) {
    const std::string value = detail::trim(raw_value);
    auto fail = [&](const std::string& why) -> void {
        throw config_error("key '" + key + "': " + why + " (value '" + value + "')");
    };
    auto number = [&]() {
        auto v = detail::parse_number(value);
        if (!v) fail("expected a number");
        return *v;
    };
    auto numbers = [&](std::size_t expected) {
        std::vector<double> out;
        for (const auto& tok : detail::split_list(value)) {
            auto v = detail::parse_number(tok);
            if (!v) fail("expected a list of numbers");
            out.push_back(*v);
        }
        if (expected && out.size() != expected) fail("expected " + std::to_string(expected) + " numbers");
        return out;
    };
    auto integer = [&]() {
        const double v = number();
        if (v != std::floor(v)) fail("expected an integer");
        return v;
    };

    if (key == "domain") {
        auto v = numbers(2);
        cfg.x_min = v[0];
        cfg.x_max = v[1];
    } else if (key == "dx") {
        cfg.dx = number();
    } else if (key == "T") {
        cfg.T = number();
    } else if (key == "eta") {
        cfg.eta = number();
    } else if (key == "delta") {
        cfg.delta = number();
    } else if (key == "kernel_orientation") {
        if (value == "forward") cfg.orientation = KernelOrientation::forward;
        else if (value == "convolution") cfg.orientation = KernelOrientation::convolution;
        else fail("expected 'forward' or 'convolution'");
    } else if (key == "m") {
        cfg.m = static_cast<int>(integer());
    } else if (key == "rho0") {
        cfg.rho0 = number();
    } else if (key == "sigma") {
        cfg.speed.sigma = number();
    } else if (key == "speed_limit") {
        if (value == "piecewise") cfg.constant_speed = false;
        else if (value == "constant") cfg.constant_speed = true;
        else fail("expected 'piecewise' or 'constant'");
    } else if (key == "vmax") {
        cfg.vmax = number();
    } else if (key == "vmax_outer") {
        cfg.speed.outer = number();
    } else if (key == "vmax_inner") {
        cfg.speed.inner = numbers(0);
    } else if (key == "time_breaks") {
        cfg.speed.time_breaks = value.empty() ? std::vector<double>{} : numbers(0);
    } else if (key == "inner_segment") {
        auto v = numbers(2);
        cfg.speed.inner_lo = v[0];
        cfg.speed.inner_hi = v[1];
    } else if (key == "cfl_safety") {
        cfg.cfl_safety = number();
    } else if (key == "alpha") {
        if (value == "auto") cfg.alpha.reset();
        else cfg.alpha = number();
    } else if (key == "snapshot_stride") {
        const double v = integer();
        if (v < 1) fail("must be >= 1");
        cfg.snapshot_stride = static_cast<std::size_t>(v);
    } else if (key == "queue_a") {
        cfg.queue_a = number();
    } else if (key == "queue_b") {
        cfg.queue_b = number();
    } else {
        throw config_error("unknown key '" + key + "'");
    }
}

/// Parses "key = value" lines; '#' starts a comment. `origin` names the
/// source in error messages.
inline ExperimentConfig parse_config(std::istream& in, const std::string& origin, ExperimentConfig cfg = {}) {
    std::string line;
    std::size_t lineno = 0;
    std::map<std::string, std::size_t> seen;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = detail::trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        const std::string where = origin + ":" + std::to_string(lineno) + ": ";
        if (eq == std::string::npos) throw config_error(where + "expected 'key = value'");
        const std::string key = detail::trim(std::string_view(body).substr(0, eq));
        if (key.empty()) throw config_error(where + "missing key before '='");
        if (auto it = seen.find(key); it != seen.end())
            throw config_error(where + "key '" + key + "' already set on line " + std::to_string(it->second));
        seen[key] = lineno;
        try {
            apply_setting(cfg, key, body.substr(eq + 1));
        } catch (const config_error& e) {
            throw config_error(where + e.what());
        }
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error(path + ": cannot open config file");
    return parse_config(in, path);
}

/// `key=value` override, as given on the command line.
inline void apply_override(ExperimentConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw config_error("override '" + assignment + "': expected key=value");
    apply_setting(cfg, detail::trim(std::string_view(assignment).substr(0, eq)), assignment.substr(eq + 1));
}

inline std::string format_config(const ExperimentConfig& c) {
    std::ostringstream o;
    o.precision(17);
    auto list = [&](const std::vector<double>& v) {
        std::ostringstream s;
        s.precision(17);
        for (std::size_t i = 0; i < v.size(); ++i) s << (i ? " " : "") << v[i];
        return s.str();
    };
    o << "domain = " << c.x_min << ' ' << c.x_max << '\n'
      << "dx = " << c.dx << '\n'
      << "T = " << c.T << '\n'
      << "eta = " << c.eta << '\n'
      << "delta = " << c.delta << '\n'
      << "kernel_orientation = " << (c.orientation == KernelOrientation::forward ? "forward" : "convolution") << '\n'
      << "m = " << c.m << '\n'
      << "rho0 = " << c.rho0 << '\n'
      << "speed_limit = " << (c.constant_speed ? "constant" : "piecewise") << '\n'
      << "vmax = " << c.vmax << '\n'
      << "sigma = " << c.speed.sigma << '\n'
      << "vmax_outer = " << c.speed.outer << '\n'
      << "vmax_inner = " << list(c.speed.inner) << '\n'
      << "time_breaks = " << list(c.speed.time_breaks) << '\n'
      << "inner_segment = " << c.speed.inner_lo << ' ' << c.speed.inner_hi << '\n'
      << "cfl_safety = " << c.cfl_safety << '\n'
      << "alpha = ";
    if (c.alpha) o << *c.alpha;
    else o << "auto";
    o << '\n'
      << "snapshot_stride = " << c.snapshot_stride << '\n'
      << "queue_a = " << c.queue_a << '\n'
      << "queue_b = " << c.queue_b << '\n';
    return o.str();
}

inline Problem make_problem(const ExperimentConfig& c) {
    Grid1D grid = Grid1D::with_spacing(c.x_min, c.x_max, c.dx);
    SpeedLimitSpec spec = c.constant_speed ? SpeedLimitSpec::constant(c.vmax) : c.speed;
    SolverConfig sc;
    sc.T = c.T;
    sc.cfl_safety = c.cfl_safety;
    sc.alpha = c.alpha;
    sc.snapshot_stride = c.snapshot_stride;
    Problem p{.grid = grid,
              .kernel = build_kernel(c.eta, c.orientation == KernelOrientation::forward ? c.delta : -c.delta,
                                     grid.dx()),
              .velocity = VelocityLaw(c.m),
              .flux = FluxModel(SpeedLimitField(spec, grid)),
              .rho0 = CellField(grid, c.rho0),
              .config = sc};
    p.validate();
    window_cells(grid, c.queue_a, c.queue_b);
    return p;
}

}  // namespace nlwr
