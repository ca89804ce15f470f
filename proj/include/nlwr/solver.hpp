#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "nlwr/congestion.hpp"
#include "nlwr/convolution.hpp"
#include "nlwr/errors.hpp"
#include "nlwr/grid.hpp"
#include "nlwr/kernel.hpp"
#include "nlwr/speed_limit.hpp"
#include "nlwr/velocity.hpp"

namespace nlwr {

struct SolverConfig {
    double T = 0.5;
    double cfl_safety = 0.9;
    /// Lax-Friedrichs viscosity; empty means the smallest admissible value
    /// ||d_rho f|| ||v||.
    std::optional<double> alpha;
    std::size_t snapshot_stride = 1;
    QueueWeight queue;

    void validate() const {
        if (!(T > 0.0) || !std::isfinite(T)) throw parameter_error("solver: horizon T must be positive");
        if (!(cfl_safety > 0.0 && cfl_safety < 1.0)) throw parameter_error("solver: cfl_safety must lie in (0, 1)");
        if (alpha && !(*alpha >= 0.0)) throw parameter_error("solver: alpha must be non-negative");
        if (snapshot_stride == 0) throw parameter_error("solver: snapshot_stride must be positive");
    }
};

struct Problem {
    Grid1D grid;
    Kernel kernel;
    VelocityLaw velocity;
    FluxModel flux;
    CellField rho0;
    SolverConfig config;

    void validate() const {
        config.validate();
        if (!(rho0.grid() == grid)) throw grid_mismatch_error("problem: initial datum is on a different grid");
        if (!(flux.speed_limit().grid() == grid)) throw grid_mismatch_error("problem: speed limit on a different grid");
        require_kernel_fits(grid, kernel);
        for (double v : rho0.values())
            if (!(v >= 0.0 && v <= 1.0)) throw parameter_error("problem: initial density must lie in [0, 1]");
    }
};

/// Norms used by the scheme: flux over [0, T] x ring x [0, 1], velocity over
/// the range reachable by R = rho * w when 0 <= rho <= 1.
struct NormBundle {
    KernelNorms kernel;
    VelocityNorms velocity;
    FluxNorms flux;
};

inline NormBundle solver_norms(const Problem& p) {
    NormBundle n;
    n.kernel = kernel_norms(p.kernel);
    n.velocity = velocity_norms(p.velocity, std::max(1.0, p.kernel.discrete_mass()));
    n.flux = flux_norms(p.flux, p.config.T, 1.0);
    return n;
}

/// Viscosity floor ||d_rho f|| ||v|| that keeps the scheme positive.
inline double alpha_floor(const NormBundle& n) noexcept { return n.flux.df_drho_sup * n.velocity.v_sup; }

inline double resolve_alpha(const Problem& p, const NormBundle& n) {
    const double floor = alpha_floor(n);
    if (!p.config.alpha) return floor;
    if (*p.config.alpha < floor * (1.0 - 1e-12))
        throw parameter_error("solver: alpha=" + std::to_string(*p.config.alpha) +
                              " is below the positivity floor " + std::to_string(floor));
    return *p.config.alpha;
}

/// safety * dx / (alpha + (C dx + 2 ||d_rho f||) ||v||); +inf when nothing moves.
inline double cfl_dt(double dx, double alpha, double C, double df_drho_sup, double v_sup, double safety) noexcept {
    const double denom = alpha + (C * dx + 2.0 * df_drho_sup) * v_sup;
    if (denom <= 0.0) return std::numeric_limits<double>::infinity();
    return safety * dx / denom;
}

inline double cfl_dt(const Problem& p, const NormBundle& n, double alpha) noexcept {
    return cfl_dt(p.grid.dx(), alpha, n.flux.C, n.flux.df_drho_sup, n.velocity.v_sup, p.config.cfl_safety);
}

/// One Lax-Friedrichs update with reusable work buffers.
class Stepper {
public:
    explicit Stepper(const Problem& p) : p_{&p}, norms_{solver_norms(p)} {
        p.validate();
        alpha_ = resolve_alpha(p, norms_);
        dt_max_ = cfl_dt(p, norms_, alpha_);
        const std::size_t n = p.grid.size();
        conv_.resize(n);
        cell_flux_.resize(n);
        iface_.resize(n);
    }

    double alpha() const noexcept { return alpha_; }
    double dt_max() const noexcept { return dt_max_; }
    const NormBundle& norms() const noexcept { return norms_; }

    /// Advance rho in place over ]t, t + dt].
    void advance(std::span<double> rho, double t, double dt) {
        if (dt > dt_max_ * (1.0 + 1e-12))
            throw cfl_violation_error("step: dt=" + std::to_string(dt) + " exceeds the CFL bound " +
                                      std::to_string(dt_max_));
        const Problem& p = *p_;
        const std::size_t n = rho.size();
        const double dx = p.grid.dx();
        const double lambda = dt / dx;
        convolve_into(rho, p.kernel, dx, conv_);
        const auto vmax = p.flux.speed_limit().profile(p.flux.speed_limit().slab_for_step(t, t + dt));
        for (std::size_t j = 0; j < n; ++j)
            cell_flux_[j] = vmax[j] * rho[j] * (1.0 - rho[j]) * p.velocity(conv_[j]);
        // iface_[j] is F_{j+1/2}
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t r = j + 1 == n ? 0 : j + 1;
            iface_[j] = 0.5 * (cell_flux_[j] + cell_flux_[r]) - 0.5 * alpha_ * (rho[r] - rho[j]);
        }
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t l = j == 0 ? n - 1 : j - 1;
            rho[j] -= lambda * (iface_[j] - iface_[l]);
        }
    }

    std::span<const double> last_convolution() const noexcept { return conv_; }

private:
    const Problem* p_;
    NormBundle norms_;
    double alpha_ = 0.0;
    double dt_max_ = 0.0;
    std::vector<double> conv_, cell_flux_, iface_;
};

inline CellField step(const CellField& rho, double t, double dt, const Problem& p, double alpha) {
    Problem q = p;
    q.config.alpha = alpha;
    Stepper s(q);
    CellField out = rho;
    s.advance(out.values(), t, dt);
    return out;
}

struct Solution {
    std::vector<double> times;
    std::vector<CellField> snapshots;
    std::vector<double> dt_history;
    double alpha = 0.0;
    double mass0 = 0.0;
    double max_mass_drift = 0.0;
    double min_rho = 0.0;
    double max_rho = 0.0;
    CongestionAccumulator congestion;

    std::size_t n_steps() const noexcept { return dt_history.size(); }
    const CellField& final_state() const { return snapshots.back(); }
};

/// Called before each accepted step with the state at its start.
using StepObserver = std::function<void(double t, double dt, std::span<const double> rho)>;

/// Admissible density band enforced after every step.
inline constexpr double kDensityFloor = -1e-12;
inline constexpr double kDensityCeiling = 1.0 + 1e-10;

inline Solution solve(const Problem& p, const StepObserver& observer = {}) {
    Stepper stepper(p);
    const SpeedLimitField& field = p.flux.speed_limit();
    const double T = p.config.T;
    const std::size_t stride = p.config.snapshot_stride;

    Solution sol{.times = {0.0},
                 .snapshots = {p.rho0},
                 .dt_history = {},
                 .alpha = stepper.alpha(),
                 .mass0 = l1_norm(p.rho0),
                 .max_mass_drift = 0.0,
                 .min_rho = p.rho0.min(),
                 .max_rho = p.rho0.max(),
                 .congestion = CongestionAccumulator(p.grid, p.config.queue)};

    CellField rho = p.rho0;
    double t = 0.0;
    std::size_t n = 0;
    const double eps = 1e-13 * T;
    while (t < T) {
        const double target = std::min(T, field.next_break(t));
        double dt = std::min(stepper.dt_max(), target - t);
        const bool lands = t + dt >= target - eps;
        if (lands) dt = target - t;

        sol.congestion.add(rho.values(), dt);
        if (observer) observer(t, dt, rho.values());
        stepper.advance(rho.values(), t, dt);
        t = lands ? target : t + dt;
        sol.dt_history.push_back(dt);
        ++n;

        double mass = 0.0;
        for (double v : rho.values()) {
            if (!std::isfinite(v) || v < kDensityFloor || v > kDensityCeiling) {
                std::ostringstream msg;
                msg.precision(17);
                msg << "solve: density " << v << " left the admissible band at t=" << t;
                throw non_finite_state_error(msg.str());
            }
            mass += v;
        }
        mass *= p.grid.dx();
        sol.max_mass_drift = std::max(sol.max_mass_drift, std::abs(mass - sol.mass0));
        sol.min_rho = std::min(sol.min_rho, rho.min());
        sol.max_rho = std::max(sol.max_rho, rho.max());

        if (n % stride == 0 || t >= T) {
            sol.times.push_back(t);
            sol.snapshots.push_back(rho);
        }
    }
    return sol;
}

}  // namespace nlwr
