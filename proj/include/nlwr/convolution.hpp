#pragma once

#include <cstddef>
#include <span>

#include "nlwr/errors.hpp"
#include "nlwr/grid.hpp"
#include "nlwr/kernel.hpp"

namespace nlwr {

inline void require_kernel_fits(const Grid1D& grid, const Kernel& k) {
    if (2.0 * k.eta() > grid.length() * (1.0 + 1e-12))
        throw grid_mismatch_error("convolve: kernel support is wider than the periodic domain");
    if (std::abs(k.dx() - grid.dx()) > 1e-12 * grid.dx())
        throw grid_mismatch_error("convolve: kernel sampled with a different step than the grid");
}

/// R_j = dx * sum_k rho_{j+k} w_k, periodic in j + k. Direct O(n * K) sum.
inline void convolve_into(std::span<const double> rho, const Kernel& k, double dx, std::span<double> out) noexcept {
    const auto n = static_cast<std::ptrdiff_t>(rho.size());
    const auto w = k.weights();
    const std::ptrdiff_t k_lo = k.k_lo();
    const auto kw = static_cast<std::ptrdiff_t>(w.size());
    for (std::ptrdiff_t j = 0; j < n; ++j) {
        double s = 0.0;
        std::ptrdiff_t idx = (j + k_lo) % n;
        if (idx < 0) idx += n;
        for (std::ptrdiff_t i = 0; i < kw; ++i) {
            s += rho[static_cast<std::size_t>(idx)] * w[static_cast<std::size_t>(i)];
            if (++idx == n) idx = 0;
        }
        out[static_cast<std::size_t>(j)] = dx * s;
    }
}

inline CellField convolve(const CellField& rho, const Kernel& k) {
    require_kernel_fits(rho.grid(), k);
    CellField out(rho.grid());
    convolve_into(rho.values(), k, rho.grid().dx(), out.values());
    return out;
}

}  // namespace nlwr
