#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "uphill/grid_kernel.hpp"
#include "uphill/instanton.hpp"
#include "uphill/newton_solver.hpp"
#include "uphill/seed_profile.hpp"
#include "uphill/thermo.hpp"

namespace fixtures {

inline constexpr double beta = 1.25;
inline constexpr double dx = 0.05;

inline const uphill::ThermoParams& params() {
    static const uphill::ThermoParams p = uphill::make_thermo(beta);
    return p;
}

struct Setup {
    double epsilon;
    uphill::GridSpec grid;
    uphill::KernelTable kernel;
    uphill::Instanton instanton;
};

inline Setup make_setup(double epsilon) {
    const uphill::GridSpec g = uphill::build_grid(epsilon, dx);
    return Setup{epsilon, g, uphill::build_kernel(g),
                 uphill::solve_instanton(params(), uphill::default_instanton_half_length(epsilon, dx), dx, 1e-13)};
}

inline const Setup& eps40() {
    static const Setup s = make_setup(1.0 / 40.0);
    return s;
}

// converged pair at mu0 = 0.6 with the seed current
inline const uphill::Solution& bump() {
    static const uphill::Solution s = [] {
        const Setup& e = eps40();
        const double mu0 = 0.6;
        const double j = uphill::seed_current(params(), mu0, uphill::build_seed(params(), e.grid, e.instanton, mu0).m_glue);
        return uphill::outer_solve(params(), e.kernel, e.instanton, mu0, j);
    }();
    return s;
}

inline uphill::Profile random_antisymmetric(const uphill::GridSpec& g, std::mt19937_64& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    std::vector<double> v(g.n_points);
    for (double& x : v) x = u(rng);
    uphill::Profile p(g, std::move(v), uphill::Symmetry::antisymmetric);
    uphill::antisymmetrize(p);
    return p;
}

}  // namespace fixtures
