#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nlwr/errors.hpp"
#include "nlwr/grid.hpp"

namespace nlwr {

/// Queue weight: 0 below `lower`, linear ramp `slope * r - offset` on
/// [lower, upper], 1 above `upper`.
struct QueueWeight {
    double lower = 0.75;
    double upper = 0.85;
    double slope = 10.0;
    double offset = 7.5;

    double operator()(double r) const noexcept {
        if (r < lower) return 0.0;
        if (r <= upper) return slope * r - offset;
        return 1.0;
    }
};

/// Cells whose center lies in [a, b].
inline std::pair<std::size_t, std::size_t> window_cells(const Grid1D& grid, double a, double b) {
    const double tol = 1e-12 * grid.length();
    if (!(a <= b) || a < grid.x_min() - tol || b > grid.x_max() + tol)
        throw parameter_error("queue window [" + std::to_string(a) + ", " + std::to_string(b) +
                              "] is not inside the domain");
    std::size_t first = grid.size(), last = 0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double x = grid.center(j);
        if (x >= a && x <= b) {
            first = std::min(first, j);
            last = j + 1;
        }
    }
    if (first >= last) return {0, 0};
    return {first, last};
}

/// Left-endpoint time quadrature of the congestion integrands, fed once per
/// accepted step with the state at the start of that step.
class CongestionAccumulator {
public:
    CongestionAccumulator(Grid1D grid, QueueWeight weight)
        : grid_{grid}, weight_{weight}, queue_(grid.size(), 0.0) {}

    void add(std::span<const double> rho, double dt) {
        tv_integral_ += dt * tv(rho);
        for (std::size_t j = 0; j < rho.size(); ++j) queue_[j] += dt * weight_(rho[j]);
    }

    double tv_integral() const noexcept { return tv_integral_; }

    /// Time-integrated queue weight per cell.
    std::span<const double> queue_profile() const noexcept { return queue_; }

    double queue_integral(double a, double b) const {
        const auto [first, last] = window_cells(grid_, a, b);
        double s = 0.0;
        for (std::size_t j = first; j < last; ++j) s += queue_[j];
        return grid_.dx() * s;
    }

    const QueueWeight& weight() const noexcept { return weight_; }

private:
    Grid1D grid_;
    QueueWeight weight_;
    double tv_integral_ = 0.0;
    std::vector<double> queue_;
};

}  // namespace nlwr
