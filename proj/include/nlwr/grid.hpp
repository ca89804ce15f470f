#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "nlwr/errors.hpp"

namespace nlwr {

/// Uniform periodic grid on [x_min, x_max). Cell j (0-based) has center
/// x_min + (j + 1/2) dx and right interface x_min + (j + 1) dx.
class Grid1D {
public:
    Grid1D(double x_min, double x_max, std::size_t n_cells)
        : x_min_{x_min}, x_max_{x_max}, n_cells_{n_cells} {
        if (!(x_max > x_min) || !std::isfinite(x_min) || !std::isfinite(x_max))
            throw parameter_error("Grid1D: require finite x_min < x_max");
        if (n_cells == 0) throw parameter_error("Grid1D: n_cells must be positive");
        dx_ = (x_max - x_min) / static_cast<double>(n_cells);
    }

    /// Grid whose cell count is the nearest integer to (x_max - x_min) / dx.
    static Grid1D with_spacing(double x_min, double x_max, double dx) {
        if (!(dx > 0.0)) throw parameter_error("Grid1D: dx must be positive");
        const double n = std::round((x_max - x_min) / dx);
        if (n < 1.0) throw parameter_error("Grid1D: dx larger than the domain");
        return Grid1D(x_min, x_max, static_cast<std::size_t>(n));
    }

    double x_min() const noexcept { return x_min_; }
    double x_max() const noexcept { return x_max_; }
    double length() const noexcept { return x_max_ - x_min_; }
    std::size_t size() const noexcept { return n_cells_; }
    double dx() const noexcept { return dx_; }

    double center(std::size_t j) const noexcept {
        return x_min_ + (static_cast<double>(j) + 0.5) * dx_;
    }
    double right_interface(std::size_t j) const noexcept {
        return x_min_ + static_cast<double>(j + 1) * dx_;
    }

    /// Periodic index wrap for any signed offset.
    std::size_t wrap(std::ptrdiff_t j) const noexcept {
        const auto n = static_cast<std::ptrdiff_t>(n_cells_);
        std::ptrdiff_t r = j % n;
        return static_cast<std::size_t>(r < 0 ? r + n : r);
    }

    friend bool operator==(const Grid1D& a, const Grid1D& b) noexcept {
        return a.n_cells_ == b.n_cells_ && a.x_min_ == b.x_min_ && a.x_max_ == b.x_max_;
    }

private:
    double x_min_;
    double x_max_;
    std::size_t n_cells_;
    double dx_;
};

/// Cell averages on a Grid1D.
class CellField {
public:
    explicit CellField(Grid1D grid, double value = 0.0)
        : grid_{grid}, values_(grid.size(), value) {}

    CellField(Grid1D grid, std::vector<double> values) : grid_{grid}, values_{std::move(values)} {
        if (values_.size() != grid_.size())
            throw grid_mismatch_error("CellField: value count " + std::to_string(values_.size()) +
                                      " does not match grid size " + std::to_string(grid_.size()));
    }

    template <class F>
    static CellField from_function(const Grid1D& grid, F&& f) {
        CellField out(grid);
        for (std::size_t j = 0; j < grid.size(); ++j) out[j] = f(grid.center(j));
        return out;
    }

    const Grid1D& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }

    double& operator[](std::size_t j) noexcept { return values_[j]; }
    double operator[](std::size_t j) const noexcept { return values_[j]; }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    bool all_finite() const noexcept {
        return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
    }

    double min() const noexcept { return *std::min_element(values_.begin(), values_.end()); }
    double max() const noexcept { return *std::max_element(values_.begin(), values_.end()); }

private:
    Grid1D grid_;
    std::vector<double> values_;
};

inline void require_same_grid(const CellField& f, const CellField& g) {
    if (!(f.grid() == g.grid())) throw grid_mismatch_error("fields live on different grids");
}

/// dx * sum |f_j|
inline double l1_norm(const CellField& f) noexcept {
    double s = 0.0;
    for (double v : f.values()) s += std::abs(v);
    return f.grid().dx() * s;
}

inline double linf_norm(const CellField& f) noexcept {
    double m = 0.0;
    for (double v : f.values()) m = std::max(m, std::abs(v));
    return m;
}

/// Periodic total variation; includes the wrap-around jump |f_0 - f_{n-1}|.
inline double tv(std::span<const double> f) noexcept {
    const std::size_t n = f.size();
    if (n < 2) return 0.0;
    double s = std::abs(f[0] - f[n - 1]);
    for (std::size_t j = 0; j + 1 < n; ++j) s += std::abs(f[j + 1] - f[j]);
    return s;
}

inline double tv(const CellField& f) noexcept { return tv(f.values()); }

inline double l1_distance(const CellField& f, const CellField& g) {
    require_same_grid(f, g);
    double s = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) s += std::abs(f[j] - g[j]);
    return f.grid().dx() * s;
}

/// Conservative restriction of a field onto a grid that is `factor` times coarser.
inline CellField restrict_average(const CellField& fine, std::size_t factor) {
    const Grid1D& g = fine.grid();
    if (factor == 0 || g.size() % factor != 0)
        throw grid_mismatch_error("restrict_average: cell count not divisible by factor");
    Grid1D coarse(g.x_min(), g.x_max(), g.size() / factor);
    CellField out(coarse);
    for (std::size_t j = 0; j < coarse.size(); ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < factor; ++k) s += fine[j * factor + k];
        out[j] = s / static_cast<double>(factor);
    }
    return out;
}

}  // namespace nlwr
