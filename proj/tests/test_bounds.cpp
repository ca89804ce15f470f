#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "support.hpp"

using namespace nlwr;
using testing_support::finite_config;

namespace {

Problem finite(double T = 0.05) { return make_problem(finite_config(T)); }

Problem finite_with(double delta, double eta = 1.0, double rho0 = 0.6, int m = 3) {
    auto c = finite_config();
    c.delta = delta;
    c.eta = eta;
    c.rho0 = rho0;
    c.m = m;
    return make_problem(c);
}

Problem bump(Problem p) {
    p.rho0 = CellField::from_function(p.grid, [](double x) { return 0.4 + 0.3 * std::exp(-20.0 * x * x); });
    return p;
}

bool finite_non_negative(const BoundReport& r) {
    for (double v : {r.script_l, r.m_t, r.k1, r.k2, r.tv_bound, r.a_t, r.b_integral, r.c1, r.c2, r.c3_integral,
                     r.bound_value})
        if (!(std::isfinite(v) && v >= 0.0)) return false;
    return true;
}

}  // namespace

TEST(LinfBound, EqualsInitialSupAtTimeZero) {
    const Problem p = bump(finite());
    EXPECT_DOUBLE_EQ(linf_bound(p, 0.0).m_t, linf_norm(p.rho0));
}

TEST(LinfBound, GrowthRateForConstantSpeedLimit) {
    auto c = finite_config();
    c.constant_speed = true;
    c.m = 1;
    c.eta = 0.5;
    const Problem p = make_problem(c);
    const double dw_inf = 3.0 * std::sqrt(3.0) / (std::numbers::pi * 0.25);
    const double want = 7.0 * 1.0 * 1.2 * dw_inf;  // ||d_rho f|| ||v'|| ||rho_o||_1 ||w'||_inf, C = 0
    const auto b = linf_bound(p, 0.3);
    EXPECT_NEAR(b.script_l, want, 1e-9 * want);
    EXPECT_NEAR(b.m_t, 0.6 * std::exp(want * 0.3), 1e-9 * b.m_t);
}

TEST(LinfBound, EmptyRoadHasNoGrowth) {
    auto c = finite_config();
    c.constant_speed = true;
    c.rho0 = 0.0;
    const Problem p = make_problem(c);
    EXPECT_EQ(linf_bound(p, 0.4).script_l, 0.0);
    EXPECT_EQ(linf_bound(p, 0.4).m_t, 0.0);
}

TEST(LinfBound, DominatesTheSolverSup) {
    for (const Problem& p : {finite(), testing_support::reference_problem(0.01, 0.5)}) {
        Problem q = p;
        q.config.snapshot_stride = 5;
        const Solution sol = solve(q);
        for (std::size_t i = 0; i < sol.times.size(); ++i)
            EXPECT_GE(linf_bound(q, sol.times[i]).m_t, linf_norm(sol.snapshots[i]));
    }
}

TEST(TvBound, EqualsInitialVariationAtTimeZero) {
    const Problem p = bump(finite());
    EXPECT_DOUBLE_EQ(tv_bound(p, 0.0).bound, tv(p.rho0));
}

TEST(TvBound, ConstantSpeedConstantDatumStaysFlat) {
    auto c = finite_config();
    c.constant_speed = true;
    const Problem p = make_problem(c);
    const Solution sol = solve(p);
    for (double t : {0.0, 0.01, 0.05}) EXPECT_GE(tv_bound(p, t).bound, 0.0);
    EXPECT_NEAR(tv(sol.final_state()), 0.0, 1e-12);
}

TEST(TvBound, DominatesTheSolverVariation) {
    const Problem p = bump(finite());
    const Solution sol = solve(p);
    for (std::size_t i = 0; i < sol.times.size(); ++i) EXPECT_GE(tv_bound(p, sol.times[i]).bound, tv(sol.snapshots[i]));
}

TEST(KernelStability, TimeZeroGivesTheDatumDistance) {
    const Problem p = finite_with(0.0);
    const Problem q = bump(finite_with(0.3));
    const auto r = stability_bound_kernel(p, q, 0.0);
    EXPECT_EQ(r.a_t, 0.0);
    EXPECT_EQ(r.b_integral, 0.0);
    EXPECT_EQ(r.bound_value, l1_distance(p.rho0, q.rho0));
}

TEST(KernelStability, IdenticalProblemsHaveZeroBoundAndDistance) {
    const Problem p = finite();
    EXPECT_EQ(stability_bound_kernel(p, p, 0.0).bound_value, 0.0);
    const auto sa = solve(p), sb = solve(p);
    EXPECT_EQ(l1_distance(sa.final_state(), sb.final_state()), 0.0);
}

TEST(KernelStability, CoefficientsGrowFromZero) {
    const Problem p = bump(finite_with(0.0)), q = bump(finite_with(0.2));
    double prev_a = 0.0, prev_b = 0.0;
    for (double t : {0.0, 0.01, 0.02, 0.03, 0.05}) {
        const auto r = stability_bound_kernel(p, q, t);
        EXPECT_TRUE(finite_non_negative(r)) << "t=" << t;
        EXPECT_GE(r.a_t, prev_a);
        EXPECT_GE(r.b_integral, prev_b);
        prev_a = r.a_t;
        prev_b = r.b_integral;
    }
    EXPECT_GT(prev_a, 0.0);
}

TEST(KernelStability, MonotoneInTheKernelDistance) {
    const Problem p = finite_with(0.0);
    double prev = 0.0;
    for (double d : {0.01, 0.02, 0.04, 0.08}) {
        const double b = stability_bound_kernel(p, finite_with(d), 0.03).bound_value;
        EXPECT_GT(b, prev);
        prev = b;
    }
}

TEST(KernelStability, QuadratureIsConverged) {
    const Problem p = finite_with(0.0), q = finite_with(0.05);
    const double coarse = stability_bound_kernel(p, q, 0.05, 256).bound_value;
    const double fine = stability_bound_kernel(p, q, 0.05, 512).bound_value;
    EXPECT_LT(std::abs(fine - coarse), 1e-3 * fine);
}

TEST(KernelStability, DominatesTheEmpiricalDistance) {
    const Problem p = finite_with(0.0), q = finite_with(0.1);
    const auto r = stability_bound_kernel(p, q, 0.05);
    EXPECT_GE(r.bound_value, l1_distance(solve(p).final_state(), solve(q).final_state()));
}

TEST(KernelStability, RejectsDifferentVelocityOrFlux) {
    const Problem p = finite();
    EXPECT_THROW(stability_bound_kernel(p, finite_with(0.0, 1.0, 0.6, 4), 0.01), parameter_error);
    auto c = finite_config();
    c.constant_speed = true;
    EXPECT_THROW(stability_bound_kernel(p, make_problem(c), 0.01), parameter_error);
}

TEST(VelocityStability, SameLawGivesZero) {
    const Problem p = finite();
    for (double t : {0.0, 0.02, 0.05}) EXPECT_EQ(stability_bound_velocity(p, p, t).bound_value, 0.0);
}

TEST(VelocityStability, CoefficientsGrowFromZero) {
    const Problem p = finite_with(0.0, 1.0, 0.6, 3), q = finite_with(0.0, 1.0, 0.6, 4);
    const auto r0 = stability_bound_velocity(p, q, 0.0);
    EXPECT_EQ(r0.c1, 0.0);
    EXPECT_EQ(r0.c2, 0.0);
    EXPECT_EQ(r0.bound_value, 0.0);
    double prev1 = 0.0, prev2 = 0.0, prev3 = 0.0;
    for (double t : {0.01, 0.02, 0.03, 0.05}) {
        const auto r = stability_bound_velocity(p, q, t);
        EXPECT_TRUE(finite_non_negative(r)) << "t=" << t;
        EXPECT_GE(r.c1, prev1);
        EXPECT_GE(r.c2, prev2);
        EXPECT_GE(r.c3_integral, prev3);
        prev1 = r.c1;
        prev2 = r.c2;
        prev3 = r.c3_integral;
    }
}

TEST(VelocityStability, QuadratureIsConvergedAndDominates) {
    const Problem p = finite_with(0.0, 1.0, 0.6, 3), q = finite_with(0.0, 1.0, 0.6, 5);
    const auto coarse = stability_bound_velocity(p, q, 0.05, 256);
    const auto fine = stability_bound_velocity(p, q, 0.05, 512);
    EXPECT_LT(std::abs(fine.bound_value - coarse.bound_value), 1e-3 * fine.bound_value);
    EXPECT_GE(coarse.bound_value, l1_distance(solve(p).final_state(), solve(q).final_state()));
}

TEST(VelocityStability, RejectsDifferentKernelOrDatum) {
    const Problem p = finite();
    EXPECT_THROW(stability_bound_velocity(p, finite_with(0.1), 0.01), parameter_error);
    EXPECT_THROW(stability_bound_velocity(p, bump(finite()), 0.01), parameter_error);
}

TEST(ReferenceInstance, NarrowKernelBoundsOverflowButStillDominate) {
    const Problem p = testing_support::reference_problem(0.01, 0.5);
    auto c = testing_support::reference_config(0.01, 0.5);
    c.delta = 0.02;
    const Problem q = make_problem(c);
    const auto r = stability_bound_kernel(p, q, 0.5);
    EXPECT_GT(r.script_l, 1000.0);
    EXPECT_TRUE(std::isinf(r.bound_value));
    EXPECT_GE(r.bound_value, l1_distance(solve(p).final_state(), solve(q).final_state()));
}

TEST(Dominance, SlackPolicy) {
    EXPECT_EQ(classify(1.0, 2.0, 0.0), DominanceStatus::dominated);
    EXPECT_EQ(classify(2.1, 2.0, 0.1), DominanceStatus::within_slack);
    EXPECT_EQ(classify(2.3, 2.0, 0.1), DominanceStatus::violated);
}

TEST(EmpiricalRatio, ZeroPerturbationAndOrdering) {
    const Problem p = finite();
    std::vector<StabilityPair> pairs;
    pairs.push_back({p, finite_with(0.04), BoundKind::kernel, "d4"});
    pairs.push_back({p, p, BoundKind::kernel, "same"});
    pairs.push_back({p, finite_with(0.01), BoundKind::kernel, "d1"});
    pairs.push_back({p, finite_with(0.0, 1.0, 0.6, 4), BoundKind::velocity, "m4"});
    const auto rows = empirical_stability_ratio(pairs, 0.03);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0].label, "same");
    EXPECT_EQ(rows[0].distance, 0.0);
    EXPECT_EQ(rows[0].ratio, 0.0);
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_GE(rows[i].perturbation, rows[i - 1].perturbation);
    for (const auto& r : rows) {
        EXPECT_EQ(r.status, DominanceStatus::dominated) << r.label;
        EXPECT_EQ(r.report.empirical, r.distance);
    }
}

TEST(Report, ListsEveryConstant) {
    const auto r = stability_bound_kernel(finite_with(0.0), finite_with(0.05), 0.02);
    const auto text = format_report(r);
    for (const char* key : {"M_t", "K1", "K2", "a(t)", "int_0^t b", "bound"})
        EXPECT_NE(text.find(key), std::string::npos) << key;
}
