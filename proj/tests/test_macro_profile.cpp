#include <gtest/gtest.h>

#include <cmath>

#include "common.hpp"
#include "uphill/macro_profile.hpp"

using namespace uphill;

namespace {
constexpr double beta = 1.25;

// RK4 for dM/dx = -j / (1 - chi(M)) on [0, length]
double integrate_macro(double j, double m0, int steps, double length = 1.0) {
    const auto f = [&](double m) { return -j / (1.0 - beta * (1.0 - m * m)); };
    double m = m0;
    const double h = length / steps;
    for (int k = 0; k < steps; ++k) {
        const double k1 = f(m);
        const double k2 = f(m + 0.5 * h * k1);
        const double k3 = f(m + 0.5 * h * k2);
        const double k4 = f(m + h * k3);
        m += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    return m;
}
}  // namespace

TEST(MacroCurrent, Values) {
    EXPECT_EQ(macro_current(beta, 0.6, 0.6), 0.0);
    EXPECT_NEAR(macro_current(beta, 0.710412, 0.6), 0.031786, 1e-6);
    EXPECT_LT(macro_current(beta, 0.6, 0.7), 0.0);
}

TEST(MacroCurrent, OdeOracle) {
    const double j = macro_current(beta, 0.710412, 0.6);
    EXPECT_NEAR(integrate_macro(j, 0.710412, 20000), 0.6, 1e-6);
}

TEST(MacroCurrent, RejectsNonMetastable) {
    EXPECT_THROW(macro_current(beta, 0.4, 0.6), DomainError);
    EXPECT_THROW(macro_current(beta, 0.6, 0.8), DomainError);
}

TEST(MacroProfile, BoundaryValues) {
    const MacroSpec s = make_macro_spec(beta, 0.710412, 0.6);
    EXPECT_EQ(solve_macro_profile(s, 0.0), 0.710412);
    EXPECT_EQ(solve_macro_profile(s, 1.0), 0.6);
    EXPECT_THROW(solve_macro_profile(s, 1.2), DomainError);
}

TEST(MacroProfile, Midpoint) {
    const MacroSpec s = make_macro_spec(beta, 0.710412, 0.6);
    EXPECT_NEAR(solve_macro_profile(s, 0.5), 0.6636, 5e-4);
    EXPECT_NEAR(solve_macro_profile(s, 0.5), integrate_macro(s.j_M, 0.710412, 10000, 0.5), 1e-8);
}

TEST(MacroProfile, Decreasing) {
    const MacroSpec s = make_macro_spec(beta, 0.710412, 0.6);
    EXPECT_GT(solve_macro_profile(s, 0.25), solve_macro_profile(s, 0.5));
    EXPECT_GT(solve_macro_profile(s, 0.5), solve_macro_profile(s, 0.75));
}

TEST(MacroProfile, OdeResidual) {
    const MacroSpec s = make_macro_spec(beta, 0.710412, 0.6);
    const double dx = 0.01;
    for (double x = 0.1; x <= 0.9 + 1e-12; x += dx) {
        const double m = solve_macro_profile(s, x);
        const double d = (solve_macro_profile(s, x + dx) - solve_macro_profile(s, x - dx)) / (2 * dx);
        EXPECT_LT(std::abs(s.j_M + (1.0 - beta * (1.0 - m * m)) * d), 10 * dx * dx) << x;
    }
}

TEST(MacroProfile, FieldAtLeftEnd) {
    const MacroSpec s = make_macro_spec(beta, 0.710412, 0.6);
    EXPECT_NEAR(macro_field(s, 0.0), std::atanh(0.710412) / beta - 0.710412, 1e-10);
}
