#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "nlwr/errors.hpp"
#include "nlwr/grid.hpp"

namespace nlwr {

/// Speed-limit layout: an outer value on the whole ring, an inner segment
/// ]inner_lo, inner_hi] whose value switches at the time breaks. Slab k covers
/// ]break_{k-1}, break_k] (slab 0 includes t = 0); the last slab extends forever.
struct SpeedLimitSpec {
    double sigma = 10.0;
    double outer = 7.0;
    double inner_lo = -1.0 / 3.0;
    double inner_hi = 1.0 / 3.0;
    std::vector<double> inner{3.0, 1.5, 3.0};
    std::vector<double> time_breaks{1.0 / 6.0, 1.0 / 3.0};
    /// Skip the Gaussian smoothing (used for the constant field).
    bool smooth = true;

    static SpeedLimitSpec constant(double value) {
        SpeedLimitSpec s;
        s.outer = value;
        s.inner = {value};
        s.time_breaks = {};
        s.smooth = false;
        return s;
    }

    void validate() const {
        if (smooth && !(sigma > 0.0)) throw parameter_error("speed limit: sigma must be positive");
        if (inner.size() != time_breaks.size() + 1)
            throw parameter_error("speed limit: need one inner value per time slab (breaks + 1)");
        if (!std::is_sorted(time_breaks.begin(), time_breaks.end()))
            throw parameter_error("speed limit: time breaks must be increasing");
        if (!(inner_hi > inner_lo)) throw parameter_error("speed limit: empty inner segment");
        if (outer < 0.0 || std::any_of(inner.begin(), inner.end(), [](double v) { return v < 0.0; }))
            throw parameter_error("speed limit: values must be non-negative");
    }
};

/// Periodic discrete convolution with the Gaussian N(0, sigma^2), the samples
/// taken at minimum-image distances and renormalised to unit discrete mass.
inline std::vector<double> gaussian_smooth_periodic(std::span<const double> raw, const Grid1D& grid, double sigma) {
    const std::size_t n = grid.size();
    std::vector<double> g(n);
    double mass = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
        const double d = static_cast<double>(m <= n / 2 ? static_cast<std::ptrdiff_t>(m)
                                                        : static_cast<std::ptrdiff_t>(m) - static_cast<std::ptrdiff_t>(n)) *
                         grid.dx();
        g[m] = std::exp(-0.5 * (d / sigma) * (d / sigma)) / (sigma * std::sqrt(2.0 * std::numbers::pi));
        mass += g[m];
    }
    for (double& v : g) v /= mass;
    std::vector<double> out(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += g[(j + n - i) % n] * raw[i];
        out[j] = s;
    }
    return out;
}

class SpeedLimitField {
public:
    SpeedLimitField(const SpeedLimitSpec& spec, const Grid1D& grid) : spec_{spec}, grid_{grid} {
        spec.validate();
        for (double v : spec.inner) {
            auto it = std::find(levels_.begin(), levels_.end(), v);
            if (it == levels_.end()) {
                slab_profile_.push_back(levels_.size());
                levels_.push_back(v);
                std::vector<double> raw(grid.size());
                for (std::size_t j = 0; j < grid.size(); ++j) {
                    const double x = grid.center(j);
                    raw[j] = (x > spec.inner_lo && x <= spec.inner_hi) ? v : spec.outer;
                }
                smoothed_.push_back(spec.smooth ? gaussian_smooth_periodic(raw, grid, spec.sigma) : raw);
                raw_.push_back(std::move(raw));
            } else {
                slab_profile_.push_back(static_cast<std::size_t>(it - levels_.begin()));
            }
        }
    }

    const SpeedLimitSpec& spec() const noexcept { return spec_; }
    const Grid1D& grid() const noexcept { return grid_; }
    std::span<const double> time_breaks() const noexcept { return spec_.time_breaks; }
    std::size_t slab_count() const noexcept { return slab_profile_.size(); }

    /// Slab containing time t; a break belongs to the slab it closes.
    std::size_t slab_at(double t) const noexcept {
        std::size_t k = 0;
        for (double b : spec_.time_breaks)
            if (t > b) ++k;
        return k;
    }

    /// Slab governing the open-closed step interval ]t0, t1].
    std::size_t slab_for_step(double t0, double t1) const noexcept { return slab_at(0.5 * (t0 + t1)); }

    /// First break strictly after t, or +inf.
    double next_break(double t) const noexcept {
        for (double b : spec_.time_breaks)
            if (b > t) return b;
        return std::numeric_limits<double>::infinity();
    }

    std::span<const double> profile(std::size_t slab) const noexcept { return smoothed_[slab_profile_[slab]]; }
    std::span<const double> raw_profile(std::size_t slab) const noexcept { return raw_[slab_profile_[slab]]; }
    std::size_t distinct_profiles() const noexcept { return smoothed_.size(); }
    std::span<const double> distinct_profile(std::size_t i) const noexcept { return smoothed_[i]; }

    double operator()(double t, std::size_t j) const noexcept { return profile(slab_at(t))[j]; }

    /// Slabs that intersect [0, t].
    std::size_t slabs_through(double t) const noexcept {
        std::size_t k = 1;
        for (double b : spec_.time_breaks)
            if (b < t) ++k;
        return std::min(k, slab_count());
    }

private:
    SpeedLimitSpec spec_;
    Grid1D grid_;
    std::vector<double> levels_;
    std::vector<std::size_t> slab_profile_;
    std::vector<std::vector<double>> raw_;
    std::vector<std::vector<double>> smoothed_;
};

inline SpeedLimitField build_speed_limit(double sigma, const Grid1D& grid) {
    SpeedLimitSpec s;
    s.sigma = sigma;
    return SpeedLimitField(s, grid);
}

/// Flux norms over the slab [0, t] x ring x [0, rho_max].
struct FluxNorms {
    double f_sup = 0.0;           ///< ||f||
    double df_drho_sup = 0.0;     ///< ||d_rho f||
    double dxf_sup = 0.0;         ///< ||d_x f||
    double dxf_drho_cross = 0.0;  ///< ||d^2_{rho x} f||
    double C = 0.0;               ///< sup |d_x f| / |rho| and sup |d_xx f| / |rho|
    double vmax_sup = 0.0;
    double dx_vmax_sup = 0.0;
    double dxx_vmax_sup = 0.0;
    double rho_max = 0.0;
};

/// f(t, x, rho) = V_max(t, x) rho (1 - rho)
class FluxModel {
public:
    explicit FluxModel(SpeedLimitField field) : field_{std::move(field)} {}

    const SpeedLimitField& speed_limit() const noexcept { return field_; }

    double operator()(double t, std::size_t j, double rho) const noexcept { return field_(t, j) * rho * (1.0 - rho); }

private:
    SpeedLimitField field_;
};

inline double flux_eval(const FluxModel& fm, double t, std::size_t j, double rho) noexcept { return fm(t, j, rho); }

/// Product with 0 * inf := 0, for norms of vanishing fields over unbounded ranges.
inline double norm_product(double a, double b) noexcept { return (a == 0.0 || b == 0.0) ? 0.0 : a * b; }

/// max |r (1 - r)| over [0, rho_max]
inline double logistic_sup(double rho_max) noexcept {
    if (!std::isfinite(rho_max)) return rho_max;
    const double interior = rho_max >= 0.5 ? 0.25 : rho_max * (1.0 - rho_max);
    const double beyond = rho_max > 1.0 ? rho_max * (rho_max - 1.0) : 0.0;
    return std::max(interior, beyond);
}

/// max |1 - 2 r| over [0, rho_max]
inline double logistic_slope_sup(double rho_max) noexcept { return std::max(1.0, 2.0 * rho_max - 1.0); }

inline FluxNorms flux_norms(const FluxModel& fm, double t, double rho_max) {
    if (!(rho_max >= 0.0)) throw parameter_error("flux_norms: rho_max must be non-negative");
    const SpeedLimitField& field = fm.speed_limit();
    const Grid1D& grid = field.grid();
    const std::size_t n = grid.size();
    const double dx = grid.dx();
    FluxNorms out;
    out.rho_max = rho_max;
    for (std::size_t s = 0; s < field.slabs_through(t); ++s) {
        const auto v = field.profile(s);
        for (std::size_t j = 0; j < n; ++j) {
            const double vl = v[(j + n - 1) % n], vc = v[j], vr = v[(j + 1) % n];
            out.vmax_sup = std::max(out.vmax_sup, std::abs(vc));
            out.dx_vmax_sup = std::max(out.dx_vmax_sup, std::abs(vr - vl) / (2.0 * dx));
            out.dxx_vmax_sup = std::max(out.dxx_vmax_sup, std::abs(vr - 2.0 * vc + vl) / (dx * dx));
        }
    }
    const double shape = logistic_sup(rho_max);
    const double slope = logistic_slope_sup(rho_max);
    out.f_sup = norm_product(out.vmax_sup, shape);
    out.df_drho_sup = norm_product(out.vmax_sup, slope);
    out.dxf_sup = norm_product(out.dx_vmax_sup, shape);
    out.dxf_drho_cross = norm_product(out.dx_vmax_sup, slope);
    out.C = norm_product(1.0 + rho_max, std::max(out.dx_vmax_sup, out.dxx_vmax_sup));
    return out;
}

}  // namespace nlwr
