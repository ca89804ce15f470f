#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "nlwr/errors.hpp"

namespace nlwr {

/// Dense polynomial in monomial basis, coefficient i multiplies x^i.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<double> coeffs) : c_{std::move(coeffs)} {
        if (c_.empty()) c_.push_back(0.0);
    }

    double operator()(double x) const noexcept {
        double s = 0.0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) s = s * x + *it;
        return s;
    }

    Polynomial derivative() const {
        if (c_.size() <= 1) return Polynomial({0.0});
        std::vector<double> d(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<double>(i);
        return Polynomial(std::move(d));
    }

    Polynomial operator*(const Polynomial& o) const {
        std::vector<double> r(c_.size() + o.c_.size() - 1, 0.0);
        for (std::size_t i = 0; i < c_.size(); ++i)
            for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
        return Polynomial(std::move(r));
    }

    Polynomial operator-(const Polynomial& o) const {
        std::vector<double> r(std::max(c_.size(), o.c_.size()), 0.0);
        for (std::size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
        for (std::size_t i = 0; i < o.c_.size(); ++i) r[i] -= o.c_[i];
        return Polynomial(std::move(r));
    }

    const std::vector<double>& coefficients() const noexcept { return c_; }

    bool is_zero() const noexcept {
        return std::all_of(c_.begin(), c_.end(), [](double v) { return v == 0.0; });
    }

private:
    std::vector<double> c_{0.0};
};

/// sup |p| over [a, b]: dense sampling followed by golden-section refinement
/// around the best sample.
inline double sup_abs(const Polynomial& p, double a, double b, std::size_t samples = 20000) {
    if (!(b > a)) return std::abs(p(a));
    const double h = (b - a) / static_cast<double>(samples);
    std::size_t best = 0;
    double best_val = -1.0;
    for (std::size_t i = 0; i <= samples; ++i) {
        const double v = std::abs(p(a + h * static_cast<double>(i)));
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    double lo = std::max(a, a + h * (static_cast<double>(best) - 1.0));
    double hi = std::min(b, a + h * (static_cast<double>(best) + 1.0));
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = std::abs(p(x1)), f2 = std::abs(p(x2));
    for (int it = 0; it < 80; ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = std::abs(p(x2));
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = std::abs(p(x1));
        }
    }
    return std::max({best_val, f1, f2});
}

struct VelocityNorms {
    double v_sup = 0.0;
    double v_lip = 0.0;     ///< ||v'||_inf
    double v_second = 0.0;  ///< ||v''||_inf
    double v_w2inf = 0.0;   ///< max of the three
    double rho_ref = 1.0;   ///< upper end of the density range the sups are taken over
};

/// v(rho) = (1 - rho)^(m-1) (1 + rho)^m
class VelocityLaw {
public:
    explicit VelocityLaw(int m) : m_{m} {
        if (m < 1) throw parameter_error("velocity law: exponent m must be >= 1, got " + std::to_string(m));
        Polynomial p({1.0});
        for (int i = 0; i < m - 1; ++i) p = p * Polynomial({1.0, -1.0});
        for (int i = 0; i < m; ++i) p = p * Polynomial({1.0, 1.0});
        poly_ = std::move(p);
    }

    int m() const noexcept { return m_; }

    /// Factored evaluation; exact zero at rho = 1 for m >= 2.
    double operator()(double rho) const noexcept {
        const double a = 1.0 - rho, b = 1.0 + rho;
        double r = 1.0;
        for (int i = 0; i < m_ - 1; ++i) r *= a;
        for (int i = 0; i < m_; ++i) r *= b;
        return r;
    }

    const Polynomial& polynomial() const noexcept { return poly_; }
    double derivative(double rho) const { return poly_.derivative()(rho); }
    double second_derivative(double rho) const { return poly_.derivative().derivative()(rho); }

    friend bool operator==(const VelocityLaw& a, const VelocityLaw& b) noexcept { return a.m_ == b.m_; }

private:
    int m_;
    Polynomial poly_;
};

inline double velocity_eval(const VelocityLaw& law, double rho) noexcept { return law(rho); }

inline VelocityNorms velocity_norms(const VelocityLaw& law, double rho_ref) {
    if (!(rho_ref >= 1.0)) throw parameter_error("velocity_norms: rho_ref must be >= 1");
    const Polynomial& p = law.polynomial();
    const Polynomial dp = p.derivative();
    VelocityNorms n;
    n.rho_ref = rho_ref;
    n.v_sup = sup_abs(p, 0.0, rho_ref);
    n.v_lip = sup_abs(dp, 0.0, rho_ref);
    n.v_second = sup_abs(dp.derivative(), 0.0, rho_ref);
    n.v_w2inf = std::max({n.v_sup, n.v_lip, n.v_second});
    return n;
}

/// ||v - v~||_inf and ||v' - v~'||_inf over [0, rho_max].
struct VelocityDistance {
    double sup = 0.0;
    double lip = 0.0;
};

inline VelocityDistance velocity_distance(const VelocityLaw& a, const VelocityLaw& b, double rho_max) {
    const Polynomial diff = a.polynomial() - b.polynomial();
    if (diff.is_zero()) return {};
    if (!std::isfinite(rho_max)) {
        const double inf = std::numeric_limits<double>::infinity();
        return {inf, inf};
    }
    return {sup_abs(diff, 0.0, rho_max), sup_abs(diff.derivative(), 0.0, rho_max)};
}

}  // namespace nlwr
