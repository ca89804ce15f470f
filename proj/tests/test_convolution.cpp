#include <gtest/gtest.h>

#include <random>

#include "nlwr/convolution.hpp"
#include "oracles/oracles.hpp"

using namespace nlwr;

TEST(Convolution, ConstantFieldScalesByDiscreteMass) {
    const Grid1D g(-1.0, 1.0, 400);
    for (double delta : {-0.1, 0.0, 0.05}) {
        const Kernel k(0.1, delta, g.dx());
        const auto R = convolve(CellField(g, 0.6), k);
        for (double r : R.values()) {
            EXPECT_NEAR(r, 0.6 * k.discrete_mass(), 1e-14);
            EXPECT_NEAR(r, 0.6, 1e-4);
        }
    }
}

TEST(Convolution, DiscreteDeltaReproducesKernelSamples) {
    const Grid1D g(-1.0, 1.0, 200);
    const std::size_t source = 57;
    CellField rho(g);
    rho[source] = 1.0 / g.dx();
    const Kernel k(0.1, 0.0, g.dx());
    const auto R = convolve(rho, k);
    for (std::size_t j = 0; j < g.size(); ++j) {
        double d = g.center(j) - g.center(source);
        if (d > 1.0) d -= 2.0;
        if (d < -1.0) d += 2.0;
        EXPECT_NEAR(R[j], oracle::kernel(0.1, 0.0, d), 1e-12) << "cell " << j;
    }
}

TEST(Convolution, ForwardOffsetReadsAhead) {
    const Grid1D g(-1.0, 1.0, 400);
    const auto rho = CellField::from_function(g, [](double x) { return (x > 0.0 && x <= 0.5) ? 1.0 : 0.0; });
    auto rising_edge = [&](const CellField& R) {
        for (std::size_t j = 1; j < g.size(); ++j)
            if (R[j - 1] < 0.5 && R[j] >= 0.5 && g.center(j) > -0.5 && g.center(j) < 0.3) return j;
        return g.size();
    };
    const auto centered = rising_edge(convolve(rho, Kernel(0.1, 0.0, g.dx())));
    const auto ahead = rising_edge(convolve(rho, Kernel(0.1, 0.05, g.dx())));
    ASSERT_LT(centered, g.size());
    ASSERT_LT(ahead, g.size());
    EXPECT_LT(ahead, centered);
    EXPECT_NEAR(static_cast<double>(centered - ahead), 0.05 / g.dx(), 1.0);
}

TEST(Convolution, MatchesBruteForceSum) {
    const Grid1D g(-1.0, 1.0, 100);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    CellField rho(g);
    for (double& v : rho.values()) v = u(rng);
    const Kernel k(0.3, -0.12, g.dx());
    const auto R = convolve(rho, k);
    for (std::size_t j = 0; j < g.size(); ++j) {
        double s = 0.0;
        for (std::ptrdiff_t i = -40; i <= 40; ++i)
            s += rho[g.wrap(static_cast<std::ptrdiff_t>(j) + i)] * oracle::kernel(0.3, -0.12, static_cast<double>(i) * g.dx());
        EXPECT_NEAR(R[j], g.dx() * s, 1e-13);
    }
}

TEST(Convolution, LinearPositiveAndBounded) {
    const Grid1D g(-1.0, 1.0, 160);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Kernel k(0.2, 0.07, g.dx());
    for (int trial = 0; trial < 50; ++trial) {
        CellField a(g), b(g), mix(g);
        for (std::size_t j = 0; j < g.size(); ++j) {
            a[j] = u(rng);
            b[j] = u(rng);
        }
        const double alpha = 2.0 * u(rng) - 1.0, beta = 2.0 * u(rng) - 1.0;
        for (std::size_t j = 0; j < g.size(); ++j) mix[j] = alpha * a[j] + beta * b[j];
        const auto Ra = convolve(a, k), Rb = convolve(b, k), Rm = convolve(mix, k);
        for (std::size_t j = 0; j < g.size(); ++j) {
            EXPECT_NEAR(Rm[j], alpha * Ra[j] + beta * Rb[j], 1e-14);
            EXPECT_GE(Ra[j], 0.0);
            EXPECT_LE(Ra[j], a.max() * k.discrete_mass() + 1e-15);
        }
    }
}

TEST(Convolution, RejectsKernelsWiderThanTheDomain) {
    const Grid1D g(-0.1, 0.1, 40);
    EXPECT_THROW(convolve(CellField(g, 0.5), Kernel(0.2, 0.0, g.dx())), grid_mismatch_error);
    EXPECT_THROW(convolve(CellField(Grid1D(-1.0, 1.0, 40), 0.5), Kernel(0.2, 0.0, 0.01)), grid_mismatch_error);
}
