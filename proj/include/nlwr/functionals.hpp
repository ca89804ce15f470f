#pragma once

#include <cstddef>
#include <span>

#include "nlwr/congestion.hpp"
#include "nlwr/errors.hpp"
#include "nlwr/grid.hpp"
#include "nlwr/solver.hpp"

namespace nlwr {

/// J(T): time integral of the periodic total variation, accumulated online
/// over every accepted step (left-endpoint rule).
inline double functional_j(const Solution& sol) noexcept { return sol.congestion.tv_integral(); }

/// Psi(T; a, b): time-space integral of the queue weight over the cells whose
/// center lies in [a, b].
inline double functional_psi(const Solution& sol, double a, double b) { return sol.congestion.queue_integral(a, b); }

/// J over an explicit state sequence: states[n] holds during dts[n].
inline double functional_j(std::span<const CellField> states, std::span<const double> dts) {
    if (states.size() != dts.size()) throw parameter_error("functional_j: one time step per state required");
    double s = 0.0;
    for (std::size_t n = 0; n < states.size(); ++n) s += dts[n] * tv(states[n]);
    return s;
}

inline double functional_psi(std::span<const CellField> states, std::span<const double> dts, double a, double b,
                             const QueueWeight& weight = {}) {
    if (states.size() != dts.size()) throw parameter_error("functional_psi: one time step per state required");
    if (states.empty()) return 0.0;
    const Grid1D& grid = states.front().grid();
    const auto [first, last] = window_cells(grid, a, b);
    double s = 0.0;
    for (std::size_t n = 0; n < states.size(); ++n) {
        require_same_grid(states[n], states.front());
        double row = 0.0;
        for (std::size_t j = first; j < last; ++j) row += weight(states[n][j]);
        s += dts[n] * row;
    }
    return grid.dx() * s;
}

}  // namespace nlwr
