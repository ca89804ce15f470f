#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nlwr/kernel.hpp"
#include "oracles/oracles.hpp"

using namespace nlwr;
using std::numbers::pi;

TEST(Kernel, DiscreteMassMatchesQuadrature) {
    const Kernel k(0.1, 0.0, 0.001);
    const double oracle_mass =
        oracle::gauss_legendre([](double x) { return oracle::kernel(0.1, 0.0, x); }, -0.1, 0.1, 2000);
    EXPECT_NEAR(oracle_mass, 1.0, 1e-10);
    EXPECT_NEAR(k.discrete_mass(), oracle_mass, 1e-4);
}

TEST(Kernel, PeakValueMatchesClosedFormAndOracleMaximum) {
    for (double eta : {0.05, 0.1, 0.37, 1.0}) {
        for (double delta : {-eta, -0.3 * eta, 0.0, 0.6 * eta}) {
            const Kernel k(eta, delta, eta / 20.0);
            const double closed = 16.0 / (5.0 * pi * eta);
            EXPECT_NEAR(k.value(delta), closed, 1e-12 * closed);
            const double sampled = oracle::dense_sup([&](double x) { return oracle::kernel(eta, delta, x); },
                                                     delta - eta, delta + eta, 200000);
            EXPECT_NEAR(k.peak(), sampled, 1e-9 * closed);
        }
    }
}

TEST(Kernel, WeightsVanishOutsideTheShiftedSupport) {
    const double dx = 0.001;
    const Kernel k(0.1, 0.05, dx);
    for (std::ptrdiff_t i = -300; i <= 300; ++i) {
        const double x = static_cast<double>(i) * dx;
        if (std::abs(x - 0.05) > 0.1 + 1e-12) EXPECT_EQ(k.weight(i), 0.0) << "offset " << x;
        if (std::abs(x - 0.05) < 0.1 - 1e-12) EXPECT_GT(k.weight(i), 0.0) << "offset " << x;
    }
    for (double w : k.weights()) EXPECT_GE(w, 0.0);
}

TEST(Kernel, SamplesMatchTheOracleFormula) {
    const Kernel k(0.23, -0.07, 0.004);
    for (std::ptrdiff_t i = k.k_lo(); i <= k.k_hi(); ++i) {
        const double want = oracle::kernel(0.23, -0.07, static_cast<double>(i) * 0.004);
        EXPECT_NEAR(k.weight(i), want, 1e-12 * k.peak());
    }
}

TEST(Kernel, CenteredWeightsAreEven) {
    const Kernel k(0.1, 0.0, 0.003);
    ASSERT_EQ(k.k_lo(), -k.k_hi());
    for (std::ptrdiff_t i = 0; i <= k.k_hi(); ++i) EXPECT_DOUBLE_EQ(k.weight(i), k.weight(-i));
}

TEST(Kernel, LargestWeightIsNearestToTheOffset) {
    const Kernel k(0.2, 0.0731, 0.01);
    std::ptrdiff_t best = k.k_lo();
    for (std::ptrdiff_t i = k.k_lo(); i <= k.k_hi(); ++i)
        if (k.weight(i) > k.weight(best)) best = i;
    EXPECT_EQ(best, static_cast<std::ptrdiff_t>(std::lround(0.0731 / 0.01)));
}

TEST(Kernel, RejectsInvalidParameters) {
    EXPECT_THROW(Kernel(0.0, 0.0, 0.001), parameter_error);
    EXPECT_THROW(Kernel(1.5, 0.0, 0.001), parameter_error);
    EXPECT_THROW(Kernel(0.1, 0.11, 0.001), parameter_error);
    EXPECT_THROW(Kernel(0.1, 0.0, 0.1), parameter_error);
    EXPECT_THROW(Kernel(0.1, 0.0, -0.001), parameter_error);
}

TEST(KernelNorms, UnitMassAndDerivativeMass) {
    const auto n = kernel_norms(Kernel(0.1, 0.0, 0.001));
    EXPECT_NEAR(n.w_l1, 1.0, 1e-4);
    EXPECT_NEAR(n.dw_l1, 32.0 / (5.0 * pi * 0.1), 1e-3);
    EXPECT_DOUBLE_EQ(n.w_w11, n.w_l1 + n.dw_l1);
    EXPECT_GE(n.w_w11, n.w_l1);
}

TEST(KernelNorms, PeakOfTheWidestKernel) {
    for (double delta : {-1.0, -0.2, 0.0, 0.5}) {
        const auto n = kernel_norms(Kernel(1.0, delta, 0.01));
        EXPECT_NEAR(n.w_linf, 16.0 / (5.0 * pi), 1e-6);
    }
}

TEST(KernelNorms, DerivativeSupremaMatchDenseSampling) {
    for (double eta : {0.1, 0.5, 1.0}) {
        const double delta = 0.3 * eta;
        const auto n = kernel_norms(Kernel(eta, delta, eta / 50.0));
        const double d1 = oracle::dense_sup([&](double x) { return oracle::kernel_dx(eta, delta, x); },
                                            delta - eta, delta + eta);
        const double d2 = oracle::dense_sup([&](double x) { return oracle::kernel_dxx(eta, delta, x); },
                                            delta - eta, delta + eta);
        EXPECT_NEAR(n.dw_linf, d1, 1e-6 * d1);
        EXPECT_NEAR(n.ddw_linf, d2, 1e-9 * d2);
        EXPECT_DOUBLE_EQ(n.dw_w1inf, std::max(n.dw_linf, n.ddw_linf));
    }
}

TEST(KernelNorms, L1NormsMatchGaussLegendre) {
    for (double eta : {0.05, 0.3, 1.0}) {
        const double delta = -0.4 * eta;
        const auto n = kernel_norms(Kernel(eta, delta, eta / 10.0));
        auto abs_dw = [&](double x) { return std::abs(oracle::kernel_dx(eta, delta, x)); };
        const double dw_l1 = oracle::gauss_legendre(abs_dw, delta - eta, delta, 4000) +
                             oracle::gauss_legendre(abs_dw, delta, delta + eta, 4000);
        EXPECT_NEAR(n.dw_l1, dw_l1, 1e-8 * dw_l1);
    }
}

TEST(KernelProperty, RandomKernelsHaveUnitMassAndAnalyticNorms) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double dx = 0.005;
    for (int i = 0; i < 100; ++i) {
        const double eta = 0.05 + 0.95 * u(rng);
        const double delta = eta * (2.0 * u(rng) - 1.0);
        const Kernel k(eta, delta, dx);
        EXPECT_LE(std::abs(k.discrete_mass() - 1.0), 5.0 * dx * dx) << "eta=" << eta << " delta=" << delta;
        const auto n = kernel_norms(k);
        EXPECT_NEAR(n.dw_l1, 32.0 / (5.0 * pi * eta), 0.01 * 32.0 / (5.0 * pi * eta));
        EXPECT_NEAR(n.w_linf, 16.0 / (5.0 * pi * eta), 1e-6);
    }
}

TEST(KernelDistance, VanishesForEqualKernelsAndIsSymmetric) {
    const Kernel a(0.1, 0.0, 0.005), b(0.1, 0.02, 0.005);
    EXPECT_EQ(kernel_distance(a, a).w11(), 0.0);
    EXPECT_NEAR(kernel_distance(a, b).w11(), kernel_distance(b, a).w11(), 1e-12);
}

TEST(KernelDistance, MatchesQuadratureOracle) {
    const Kernel a(0.1, 0.0, 0.005), b(0.12, 0.03, 0.005);
    const auto d = kernel_distance(a, b);
    auto dw = [](double x) { return std::abs(oracle::kernel(0.1, 0.0, x) - oracle::kernel(0.12, 0.03, x)); };
    auto ddw = [](double x) { return std::abs(oracle::kernel_dx(0.1, 0.0, x) - oracle::kernel_dx(0.12, 0.03, x)); };
    EXPECT_NEAR(d.l1, oracle::gauss_legendre(dw, -0.1, 0.15, 20000), 1e-6);
    EXPECT_NEAR(d.dx_l1, oracle::gauss_legendre(ddw, -0.1, 0.15, 20000), 1e-5);
}
