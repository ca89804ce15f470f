#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "nlwr/errors.hpp"

namespace nlwr {

namespace quad {

/// Composite Simpson rule on [a, b] with an even number of panels.
template <class F>
double simpson(F&& f, double a, double b, std::size_t panels) {
    if (panels % 2) ++panels;
    const double h = (b - a) / static_cast<double>(panels);
    double s = f(a) + f(b);
    for (std::size_t i = 1; i < panels; ++i) s += f(a + h * static_cast<double>(i)) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

}  // namespace quad

/// Norms of the convolution kernel consumed by the stability bounds.
struct KernelNorms {
    double w_l1 = 0.0;
    double w_linf = 0.0;
    double dw_l1 = 0.0;
    double dw_linf = 0.0;
    double ddw_linf = 0.0;
    double w_w11 = 0.0;     ///< ||w||_L1 + ||w'||_L1
    double dw_w1inf = 0.0;  ///< max(||w'||_inf, ||w''||_inf)
};

/// Compactly supported look-ahead kernel
///   w(x) = 16 / (5 pi eta^6) (eta^2 - (x - delta)^2)^{5/2}  on |x - delta| <= eta,
/// sampled at the integer offsets k dx that fall inside the support.
class Kernel {
public:
    Kernel(double eta, double delta, double dx) : eta_{eta}, delta_{delta}, dx_{dx} {
        if (!(eta > 0.0 && eta <= 1.0))
            throw parameter_error("kernel: eta must lie in ]0, 1], got " + std::to_string(eta));
        if (!(std::abs(delta) <= eta * (1.0 + 1e-12)))
            throw parameter_error("kernel: delta must lie in [-eta, eta], got " + std::to_string(delta));
        if (!(dx > 0.0) || !(dx < eta))
            throw parameter_error("kernel: need 0 < dx < eta, got dx=" + std::to_string(dx));
        k_lo_ = static_cast<std::ptrdiff_t>(std::ceil((delta - eta) / dx - 1e-9));
        const auto k_hi = static_cast<std::ptrdiff_t>(std::floor((delta + eta) / dx + 1e-9));
        weights_.reserve(static_cast<std::size_t>(k_hi - k_lo_ + 1));
        for (std::ptrdiff_t k = k_lo_; k <= k_hi; ++k) weights_.push_back(value(static_cast<double>(k) * dx));
    }

    double eta() const noexcept { return eta_; }
    double delta() const noexcept { return delta_; }
    double dx() const noexcept { return dx_; }

    /// Smallest sampled offset index; weights()[i] belongs to offset k_lo() + i.
    std::ptrdiff_t k_lo() const noexcept { return k_lo_; }
    std::ptrdiff_t k_hi() const noexcept { return k_lo_ + static_cast<std::ptrdiff_t>(weights_.size()) - 1; }
    std::span<const double> weights() const noexcept { return weights_; }

    double weight(std::ptrdiff_t k) const noexcept {
        if (k < k_lo_ || k > k_hi()) return 0.0;
        return weights_[static_cast<std::size_t>(k - k_lo_)];
    }

    /// dx * sum_k w_k; equals 1 up to O(dx^2).
    double discrete_mass() const noexcept {
        double s = 0.0;
        for (double w : weights_) s += w;
        return s * dx_;
    }

    double support_min() const noexcept { return delta_ - eta_; }
    double support_max() const noexcept { return delta_ + eta_; }

    double value(double x) const noexcept {
        const double q = eta_ * eta_ - (x - delta_) * (x - delta_);
        if (q <= 0.0) return 0.0;
        return scale() / 5.0 * q * q * std::sqrt(q);
    }

    double derivative(double x) const noexcept {
        const double y = x - delta_;
        const double q = eta_ * eta_ - y * y;
        if (q <= 0.0) return 0.0;
        return -scale() * y * q * std::sqrt(q);
    }

    double second_derivative(double x) const noexcept {
        const double y = x - delta_;
        const double q = eta_ * eta_ - y * y;
        if (q <= 0.0) return 0.0;
        return -scale() * std::sqrt(q) * (eta_ * eta_ - 4.0 * y * y);
    }

    /// Peak value 16 / (5 pi eta), attained at x = delta.
    double peak() const noexcept { return 16.0 / (5.0 * std::numbers::pi * eta_); }

private:
    /// 16 / (pi eta^6)
    double scale() const noexcept { return 16.0 / (std::numbers::pi * std::pow(eta_, 6)); }

    double eta_;
    double delta_;
    double dx_;
    std::ptrdiff_t k_lo_ = 0;
    std::vector<double> weights_;
};

inline Kernel build_kernel(double eta, double delta, double dx) { return Kernel(eta, delta, dx); }

/// L-infinity norms from closed forms; L1 norms by Simpson quadrature of the
/// analytic samples, split at the peak where |w'| has its kink.
inline KernelNorms kernel_norms(const Kernel& k, std::size_t panels = 4096) {
    const double pi = std::numbers::pi;
    const double eta = k.eta();
    const double a = k.support_min(), c = k.delta(), b = k.support_max();
    KernelNorms n;
    auto w = [&](double x) { return k.value(x); };
    auto dw = [&](double x) { return std::abs(k.derivative(x)); };
    n.w_l1 = quad::simpson(w, a, c, panels) + quad::simpson(w, c, b, panels);
    n.dw_l1 = quad::simpson(dw, a, c, panels) + quad::simpson(dw, c, b, panels);
    n.w_linf = k.peak();
    n.dw_linf = 3.0 * std::sqrt(3.0) / (pi * eta * eta);
    n.ddw_linf = 16.0 / (pi * eta * eta * eta);
    n.w_w11 = n.w_l1 + n.dw_l1;
    n.dw_w1inf = std::max(n.dw_linf, n.ddw_linf);
    return n;
}

/// Distances between two kernels measured by the continuous closed forms.
struct KernelDistance {
    double l1 = 0.0;
    double dx_l1 = 0.0;
    double w11() const noexcept { return l1 + dx_l1; }
};

inline KernelDistance kernel_distance(const Kernel& k1, const Kernel& k2, std::size_t nodes = 200000) {
    const double a = std::min(k1.support_min(), k2.support_min());
    const double b = std::max(k1.support_max(), k2.support_max());
    const double h = (b - a) / static_cast<double>(nodes);
    KernelDistance d;
    for (std::size_t i = 0; i < nodes; ++i) {
        const double x = a + (static_cast<double>(i) + 0.5) * h;
        d.l1 += std::abs(k1.value(x) - k2.value(x));
        d.dx_l1 += std::abs(k1.derivative(x) - k2.derivative(x));
    }
    d.l1 *= h;
    d.dx_l1 *= h;
    return d;
}

}  // namespace nlwr
