#pragma once

// A-priori estimates and L1 stability bounds for the nonlocal model:
//   * L-infinity ceiling  M_t = ||rho_o||_inf exp(L t)
//   * total variation     TV(rho(t)) <= (K2 t + TV(rho_o)) exp(K1 t)
//   * kernel/datum stability   (||rho_o - rho~_o|| + a(t) ||w - w~||_W11) exp(int b)
//   * velocity stability       (c1 ||v - v~|| + c2 ||v' - v~'||) exp(int c3)
//
// Conventions:
//   * v-norms are sups over [0, rho_ref], rho_ref = max(1, ||rho_o||_inf);
//   * C and the rate L use the flux over [0, t] x ring x [0, rho_ref];
//   * every other flux norm is taken over Sigma_s = [0, s] x ring x [0, M_s];
//   * W^{k,inf} norms are the max over derivative orders;
//   * time integrals use the composite trapezoid rule with the Sigma_s norms
//     refreshed at every node, refined until the integral settles.
// The constants grow like exp(exp(.)) with the kernel sharpness, so values
// overflow to +inf for narrow kernels; 0 * inf is taken as 0 throughout.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "nlwr/errors.hpp"
#include "nlwr/grid.hpp"
#include "nlwr/kernel.hpp"
#include "nlwr/parallel.hpp"
#include "nlwr/solver.hpp"
#include "nlwr/speed_limit.hpp"
#include "nlwr/velocity.hpp"

namespace nlwr {

enum class BoundKind { kernel, velocity };

struct BoundReport {
    BoundKind kind = BoundKind::kernel;
    double t = 0.0;
    double script_l = 0.0;
    double m_t = 0.0;
    double k1 = 0.0;
    double k2 = 0.0;
    double tv_bound = 0.0;
    double a_t = 0.0;
    double b_integral = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double c3_integral = 0.0;
    /// ||rho_o - rho~_o||_L1 + a(t) ||w - w~||_W11, or c1 ||v - v~|| + c2 ||v' - v~'||
    double prefactor = 0.0;
    double bound_value = 0.0;
    /// log10 of bound_value, finite whenever prefactor and the exponent are.
    double log10_bound = -std::numeric_limits<double>::infinity();
    std::size_t quadrature_nodes = 0;  ///< trapezoid nodes used for the time integral
    double empirical = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline double mul(double a, double b) noexcept { return norm_product(a, b); }

inline double safe_exp(double x) noexcept { return x == 0.0 ? 1.0 : std::exp(x); }

inline double finish_bound(BoundReport& r, double exponent) {
    if (r.prefactor == 0.0) {
        r.bound_value = 0.0;
        r.log10_bound = -std::numeric_limits<double>::infinity();
    } else {
        r.bound_value = r.prefactor * safe_exp(exponent);
        r.log10_bound = std::log10(r.prefactor) + exponent / std::log(10.0);
    }
    return r.bound_value;
}

struct Integral {
    double value = 0.0;
    std::size_t nodes = 0;
};

/// Composite trapezoid on [0, t], starting from `nodes` points and halving the
/// spacing until two successive values differ by at most `tol` (absolute) or
/// `max_nodes` is reached. The integrals sit in an exponent, so an absolute
/// error in the integral is a relative error in the bound.
template <class F>
Integral trapezoid(F&& f, double t, std::size_t nodes, double tol = 1e-6, std::size_t max_nodes = 1u << 16) {
    if (t <= 0.0) return {0.0, 1};
    std::size_t intervals = std::max<std::size_t>(nodes, 2) - 1;
    double h = t / static_cast<double>(intervals);
    double sum = 0.5 * (f(0.0) + f(t));
    for (std::size_t i = 1; i < intervals; ++i) sum += f(h * static_cast<double>(i));
    Integral out{sum * h, intervals + 1};
    while (std::isfinite(out.value) && 2 * intervals + 1 <= max_nodes) {
        double mid = 0.0;
        for (std::size_t i = 0; i < intervals; ++i) mid += f(h * (static_cast<double>(i) + 0.5));
        sum += mid;
        intervals *= 2;
        h *= 0.5;
        const double next = sum * h;
        const bool converged = std::abs(next - out.value) <= tol;
        out = {next, intervals + 1};
        if (converged) break;
    }
    return out;
}

}  // namespace detail

/// Problem-level quantities the bound formulas consume.
struct BoundInputs {
    double rho0_l1 = 0.0;
    double rho0_linf = 0.0;
    double rho0_tv = 0.0;
    double rho_ref = 1.0;
    KernelNorms kernel;
    VelocityNorms velocity;
    double C = 0.0;
};

inline BoundInputs bound_inputs(const Problem& p) {
    BoundInputs in;
    in.rho0_l1 = l1_norm(p.rho0);
    in.rho0_linf = linf_norm(p.rho0);
    in.rho0_tv = tv(p.rho0);
    in.rho_ref = std::max(1.0, in.rho0_linf);
    in.kernel = kernel_norms(p.kernel);
    in.velocity = velocity_norms(p.velocity, in.rho_ref);
    in.C = flux_norms(p.flux, p.config.T, in.rho_ref).C;
    return in;
}

struct LinfBound {
    double m_t = 0.0;
    double script_l = 0.0;
};

/// M_t = ||rho_o||_inf exp(L t),
/// L = C ||v|| + ||d_rho f|| ||v'|| ||rho_o||_L1 ||w'||_inf.
inline LinfBound linf_bound(const Problem& p, const BoundInputs& in, double t) {
    const FluxNorms fl = flux_norms(p.flux, t, in.rho_ref);
    LinfBound r;
    r.script_l = detail::mul(fl.C, in.velocity.v_sup) +
                 detail::mul(detail::mul(fl.df_drho_sup, in.velocity.v_lip), detail::mul(in.rho0_l1, in.kernel.dw_linf));
    r.m_t = detail::mul(in.rho0_linf, detail::safe_exp(detail::mul(r.script_l, t)));
    return r;
}

inline LinfBound linf_bound(const Problem& p, double t) { return linf_bound(p, bound_inputs(p), t); }

struct TvBound {
    double k1 = 0.0;
    double k2 = 0.0;
    double bound = 0.0;
    double m_t = 0.0;
};

/// TV(rho(t)) <= (K2 t + TV(rho_o)) exp(K1 t) with
///   K1 = ||d2_{rho x} f|| ||v||,
///   K2 = [3/2 C + (||d_rho f|| + C) ||w'||_W1inf ||rho_o||_1
///         + 1/2 (C + ||d_rho f|| (2 + ||rho_o||_1 ||w'||_inf)) ||w'||_W1inf] ||v||_W2inf ||rho_o||_1.
inline TvBound tv_bound(const Problem& p, const BoundInputs& in, double t) {
    using detail::mul;
    TvBound r;
    r.m_t = linf_bound(p, in, t).m_t;
    const FluxNorms fl = flux_norms(p.flux, t, r.m_t);
    const double C = in.C;
    const double df = fl.df_drho_sup;
    const double l1 = in.rho0_l1;
    const double w1inf = in.kernel.dw_w1inf;
    r.k1 = mul(fl.dxf_drho_cross, in.velocity.v_sup);
    const double bracket = 1.5 * C + mul(mul(df + C, w1inf), l1) +
                           0.5 * mul(C + mul(df, 2.0 + l1 * in.kernel.dw_linf), w1inf);
    r.k2 = mul(mul(bracket, in.velocity.v_w2inf), l1);
    r.bound = mul(mul(r.k2, t) + in.rho0_tv, detail::safe_exp(mul(r.k1, t)));
    return r;
}

inline TvBound tv_bound(const Problem& p, double t) { return tv_bound(p, bound_inputs(p), t); }

inline bool same_flux(const Problem& a, const Problem& b) {
    const auto& sa = a.flux.speed_limit();
    const auto& sb = b.flux.speed_limit();
    if (!(sa.grid() == sb.grid()) || sa.slab_count() != sb.slab_count()) return false;
    if (!std::equal(sa.time_breaks().begin(), sa.time_breaks().end(), sb.time_breaks().begin(), sb.time_breaks().end()))
        return false;
    for (std::size_t s = 0; s < sa.slab_count(); ++s) {
        const auto pa = sa.profile(s), pb = sb.profile(s);
        if (!std::equal(pa.begin(), pa.end(), pb.begin(), pb.end())) return false;
    }
    return true;
}

/// Kernel and initial-datum stability estimate between p and p~ sharing f and v.
inline BoundReport stability_bound_kernel(const Problem& p, const Problem& pt, double t, std::size_t nodes = 256) {
    using detail::mul;
    if (!same_flux(p, pt)) throw parameter_error("stability_bound_kernel: the two problems use different fluxes");
    if (!(p.velocity == pt.velocity))
        throw parameter_error("stability_bound_kernel: the two problems use different velocity laws");
    if (!(p.grid == pt.grid)) throw grid_mismatch_error("stability_bound_kernel: problems on different grids");
    if (nodes < 200) nodes = 200;

    const BoundInputs in = bound_inputs(p);
    const BoundInputs it = bound_inputs(pt);
    const double datum_dist = l1_distance(p.rho0, pt.rho0);
    const double kernel_dist = kernel_distance(p.kernel, pt.kernel).w11();
    const double min_l1 = std::min(in.rho0_l1, it.rho0_l1);
    const double v1 = in.velocity.v_lip;
    const double v2 = in.velocity.v_second;
    const double curvature = v1 + mul(v2, std::min(in.rho0_l1 * in.kernel.dw_linf, it.rho0_l1 * it.kernel.dw_linf));

    struct Slice {
        FluxNorms flux;
        TvBound tv;
        double m, mt;
    };
    auto slice = [&](double s) {
        Slice sl;
        sl.m = linf_bound(p, in, s).m_t;
        sl.mt = linf_bound(pt, it, s).m_t;
        sl.flux = flux_norms(p.flux, s, std::max(sl.m, sl.mt));
        sl.tv = tv_bound(p, in, s);
        return sl;
    };
    auto b = [&](double s) {
        const Slice sl = slice(s);
        return mul(mul(sl.flux.f_sup, std::min(in.kernel.w_w11, it.kernel.w_w11)), curvature) +
               mul(mul(sl.flux.dxf_sup, v1), std::min(in.kernel.w_l1, it.kernel.w_l1)) +
               mul(mul(mul(sl.flux.df_drho_sup, sl.tv.bound), v1), std::min(in.kernel.w_linf, it.kernel.w_linf));
    };

    const Slice end = slice(t);
    BoundReport r;
    r.kind = BoundKind::kernel;
    r.t = t;
    r.script_l = linf_bound(p, in, t).script_l;
    r.m_t = end.m;
    r.k1 = end.tv.k1;
    r.k2 = end.tv.k2;
    r.tv_bound = end.tv.bound;
    const double bracket = mul(mul(min_l1, end.flux.f_sup), curvature) + mul(mul(min_l1, end.flux.dxf_sup), v1) +
                           mul(mul(mul(end.flux.df_drho_sup, end.tv.bound), v1), std::min(end.m, end.mt));
    r.a_t = mul(t, bracket);
    const auto integral = detail::trapezoid(b, t, nodes);
    r.b_integral = integral.value;
    r.quadrature_nodes = integral.nodes;
    r.c1 = r.c2 = r.c3_integral = 0.0;
    r.prefactor = datum_dist + mul(r.a_t, kernel_dist);
    detail::finish_bound(r, r.b_integral);
    return r;
}

/// Velocity stability estimate between p and p~ sharing f, w and rho_o.
inline BoundReport stability_bound_velocity(const Problem& p, const Problem& pt, double t, std::size_t nodes = 256) {
    using detail::mul;
    if (!same_flux(p, pt)) throw parameter_error("stability_bound_velocity: the two problems use different fluxes");
    if (p.kernel.eta() != pt.kernel.eta() || p.kernel.delta() != pt.kernel.delta() || !(p.grid == pt.grid))
        throw parameter_error("stability_bound_velocity: the two problems use different kernels");
    if (!std::equal(p.rho0.values().begin(), p.rho0.values().end(), pt.rho0.values().begin(), pt.rho0.values().end()))
        throw parameter_error("stability_bound_velocity: the two problems use different initial data");
    if (nodes < 200) nodes = 200;

    const BoundInputs in = bound_inputs(p);
    const BoundInputs it = bound_inputs(pt);
    const double l1 = in.rho0_l1;
    const double min_vlip = std::min(in.velocity.v_lip, it.velocity.v_lip);

    // G_s = ||rho_o||_inf exp(max(L, L~) s) = max(M_s, M~_s)
    auto ceiling = [&](double s) { return std::max(linf_bound(p, in, s).m_t, linf_bound(pt, it, s).m_t); };
    auto transport = [&](double s, const FluxNorms& fl) {
        return mul(in.C, l1) + mul(tv_bound(p, in, s).bound, fl.df_drho_sup);
    };
    auto c3 = [&](double s) {
        const FluxNorms fl = flux_norms(p.flux, s, ceiling(s));
        return mul(mul(fl.f_sup, min_vlip), in.kernel.dw_l1) + mul(mul(transport(s, fl), min_vlip), in.kernel.w_linf);
    };

    const double g_t = ceiling(t);
    const FluxNorms fl = flux_norms(p.flux, t, g_t);
    const TvBound tvb = tv_bound(p, in, t);
    const VelocityDistance dv = velocity_distance(p.velocity, pt.velocity, g_t);

    BoundReport r;
    r.kind = BoundKind::velocity;
    r.t = t;
    r.script_l = linf_bound(p, in, t).script_l;
    r.m_t = g_t;
    r.k1 = tvb.k1;
    r.k2 = tvb.k2;
    r.tv_bound = tvb.bound;
    r.a_t = r.b_integral = 0.0;
    r.c1 = mul(t, transport(t, fl));
    r.c2 = mul(t, mul(mul(fl.f_sup, in.kernel.dw_l1), l1));
    const auto integral = detail::trapezoid(c3, t, nodes);
    r.c3_integral = integral.value;
    r.quadrature_nodes = integral.nodes;
    r.prefactor = mul(r.c1, dv.sup) + mul(r.c2, dv.lip);
    detail::finish_bound(r, r.c3_integral);
    return r;
}

/// A perturbed pair of problems for the empirical comparison.
struct StabilityPair {
    Problem base;
    Problem perturbed;
    BoundKind kind = BoundKind::kernel;
    std::string label;
};

enum class DominanceStatus { dominated, within_slack, violated };

inline const char* to_string(DominanceStatus s) noexcept {
    switch (s) {
        case DominanceStatus::dominated: return "dominated";
        case DominanceStatus::within_slack: return "within_slack";
        case DominanceStatus::violated: return "violated";
    }
    return "?";
}

struct StabilityRow {
    std::string label;
    BoundKind kind = BoundKind::kernel;
    double perturbation = 0.0;
    double distance = 0.0;
    double bound = 0.0;
    double log10_bound = 0.0;
    double ratio = 0.0;
    DominanceStatus status = DominanceStatus::dominated;
    BoundReport report;
};

/// Size of the perturbation in the norm the matching estimate is linear in.
inline double perturbation_size(const StabilityPair& pair) {
    if (pair.kind == BoundKind::kernel)
        return l1_distance(pair.base.rho0, pair.perturbed.rho0) +
               kernel_distance(pair.base.kernel, pair.perturbed.kernel).w11();
    const double ref = std::max({1.0, linf_norm(pair.base.rho0), linf_norm(pair.perturbed.rho0)});
    const VelocityDistance d = velocity_distance(pair.base.velocity, pair.perturbed.velocity, ref);
    return d.sup + d.lip;
}

inline DominanceStatus classify(double distance, double bound, double slack) noexcept {
    if (distance <= bound) return DominanceStatus::dominated;
    if (distance - bound <= 2.0 * slack) return DominanceStatus::within_slack;
    return DominanceStatus::violated;
}

/// Solves every pair up to time t (pairs run concurrently), compares the L1
/// distance with the matching estimate. `discretization_error` is the
/// solver's estimated L1 error; excesses up to twice that are flagged, not
/// failed. Rows are sorted by perturbation size.
inline std::vector<StabilityRow> empirical_stability_ratio(const std::vector<StabilityPair>& pairs, double t,
                                                           double discretization_error = 0.0) {
    std::vector<StabilityRow> rows(pairs.size());
    auto errors = parallel_for(pairs.size(), [&](std::size_t i) {
        const StabilityPair& pr = pairs[i];
        Problem a = pr.base, b = pr.perturbed;
        a.config.T = t;
        b.config.T = t;
        a.config.snapshot_stride = b.config.snapshot_stride = std::numeric_limits<std::size_t>::max();
        const Solution sa = solve(a);
        const Solution sb = solve(b);
        StabilityRow& row = rows[i];
        row.label = pr.label;
        row.kind = pr.kind;
        row.perturbation = perturbation_size(pr);
        row.distance = l1_distance(sa.final_state(), sb.final_state());
        row.report = pr.kind == BoundKind::kernel ? stability_bound_kernel(pr.base, pr.perturbed, t)
                                                  : stability_bound_velocity(pr.base, pr.perturbed, t);
        row.report.empirical = row.distance;
        row.bound = row.report.bound_value;
        row.log10_bound = row.report.log10_bound;
        row.ratio = row.perturbation > 0.0 ? row.distance / row.perturbation : 0.0;
        row.status = classify(row.distance, row.bound, discretization_error);
    });
    for (std::size_t i = 0; i < errors.size(); ++i)
        if (errors[i]) {
            try {
                std::rethrow_exception(errors[i]);
            } catch (const std::exception& e) {
                throw std::runtime_error("empirical_stability_ratio: pair " + std::to_string(i) + " (" +
                                         pairs[i].label + "): " + e.what());
            }
        }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const StabilityRow& x, const StabilityRow& y) { return x.perturbation < y.perturbation; });
    return rows;
}

/// Human-readable listing of every constant in a report.
inline std::string format_report(const BoundReport& r) {
    std::ostringstream o;
    o.precision(10);
    o << (r.kind == BoundKind::kernel ? "kernel/datum stability" : "velocity stability") << " at t = " << r.t << '\n'
      << "  L (growth rate of M_t)   " << r.script_l << '\n'
      << "  M_t                      " << r.m_t << '\n'
      << "  K1                       " << r.k1 << '\n'
      << "  K2                       " << r.k2 << '\n'
      << "  TV bound                 " << r.tv_bound << '\n';
    if (r.kind == BoundKind::kernel)
        o << "  a(t)                     " << r.a_t << '\n' << "  int_0^t b                 " << r.b_integral << '\n';
    else
        o << "  c1(t)                    " << r.c1 << '\n'
          << "  c2(t)                    " << r.c2 << '\n'
          << "  int_0^t c3               " << r.c3_integral << '\n';
    o << "  prefactor                " << r.prefactor << '\n'
      << "  bound                    " << r.bound_value << '\n'
      << "  log10(bound)             " << r.log10_bound << '\n'
      << "  quadrature nodes         " << r.quadrature_nodes << '\n';
    if (!std::isnan(r.empirical)) o << "  empirical L1 distance    " << r.empirical << '\n';
    return o.str();
}

}  // namespace nlwr
