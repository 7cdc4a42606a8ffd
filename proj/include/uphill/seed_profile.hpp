#pragma once

// Seed pair (m0, h0): the interface on [0, eps^{-1/2}] glued to the rescaled
// macroscopic profile on [eps^{-1/2}, 1/eps], extended as an odd function,
// and the field map H(m)(x) = -j eps int_0^x dy / chi_beta(m(y)).

#include <cmath>
#include <string>

#include "uphill/errors.hpp"
#include "uphill/grid_kernel.hpp"
#include "uphill/instanton.hpp"
#include "uphill/macro_profile.hpp"
#include "uphill/thermo.hpp"

namespace uphill {

inline Profile apply_H(const ThermoParams& params, const Profile& m, double j) {
    const GridSpec& g = m.grid;
    std::vector<double> inv_chi(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        const double chi = params.beta * (1.0 - m[i] * m[i]);
        if (!(chi >= 1e-10)) {
            throw DomainError("seed_profile", "mobility degenerates (chi = " + std::to_string(chi) +
                                                  ") at x = " + std::to_string(g.x(i)));
        }
        inv_chi[i] = 1.0 / chi;
    }
    const double scale = j * g.epsilon * 0.5 * g.dx;
    std::vector<double> h(m.size(), 0.0);
    const std::size_t mid = g.mid();
    for (std::size_t i = mid + 1; i < m.size(); ++i) h[i] = h[i - 1] - scale * (inv_chi[i - 1] + inv_chi[i]);
    for (std::size_t i = mid; i-- > 0;) h[i] = h[i + 1] + scale * (inv_chi[i + 1] + inv_chi[i]);
    return Profile(g, std::move(h), m.symmetry);
}

// j = g(mu0) - g(m_glue): current carried by the macroscopic branch from m_glue down to mu0.
inline double seed_current(const ThermoParams& params, double mu0, double m_glue) {
    if (!(mu0 > params.m_star) || !(mu0 <= m_glue) || m_glue > params.m_beta + 1e-12) {
        throw DomainError("seed_profile", "need m*(beta) < mu0 <= m_glue <= m_beta, got mu0 = " +
                                              std::to_string(mu0) + ", m_glue = " + std::to_string(m_glue));
    }
    return macro_potential(params.beta, mu0) - macro_potential(params.beta, m_glue);
}

// Inverse of seed_current in mu0 on (m*, m_glue].
inline double seed_boundary_for_current(const ThermoParams& params, double j, double m_glue) {
    const double j_max = macro_potential(params.beta, params.m_star) - macro_potential(params.beta, m_glue);
    if (!(j >= 0.0) || !(j < j_max)) {
        throw DomainError("seed_profile", "current " + std::to_string(j) + " outside [0, " +
                                              std::to_string(j_max) + ") for this glue value");
    }
    const double target = macro_potential(params.beta, m_glue) + j;
    double lo = params.m_star;  // g(lo) - target > 0
    double hi = m_glue;         // g(hi) - target <= 0
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        (macro_potential(params.beta, mid) - target > 0.0 ? lo : hi) = mid;
    }
    return hi;
}

struct Seed {
    Profile m0;
    std::size_t glue_index = 0;  // node nearest eps^{-1/2}
    double x_glue = 0.0;
    double m_glue = 0.0;         // interface value at the glue node
    double delta = 0.0;          // m_beta - interface value at eps^{-1/2}/2
    MacroSpec macro;
};

inline Seed build_seed(const ThermoParams& params, const GridSpec& grid, const Instanton& instanton,
                       double mu0) {
    if (!(mu0 > params.m_star && mu0 < params.m_beta)) {
        throw DomainError("seed_profile", "mu0 = " + std::to_string(mu0) +
                                              " outside the metastable interval (" +
                                              std::to_string(params.m_star) + ", " +
                                              std::to_string(params.m_beta) + ")");
    }
    if (instanton.profile.grid.dx != grid.dx) {
        throw DimensionError("seed_profile", "interface and seed grids use different spacings");
    }
    const std::size_t mid = grid.mid();
    const std::size_t glue = grid.nearest(1.0 / std::sqrt(grid.epsilon));
    const double x_glue = grid.x(glue);
    const GridSpec& ig = instanton.profile.grid;
    if (x_glue > ig.x(ig.last()) + 1e-12) {
        throw ConfigError("seed_profile", "interface half length " + std::to_string(ig.x(ig.last())) +
                                              " shorter than eps^{-1/2} = " + std::to_string(x_glue));
    }
    const auto inst_at = [&](std::size_t k) { return instanton.profile[ig.mid() + k]; };
    const std::size_t k_glue = glue - mid;
    const double m_glue = inst_at(k_glue);
    if (!(m_glue >= mu0)) {
        throw DomainError("seed_profile", "interface value " + std::to_string(m_glue) +
                                              " at eps^{-1/2} is below mu0 = " + std::to_string(mu0) +
                                              "; epsilon too large for this boundary value");
    }

    Seed seed;
    seed.glue_index = glue;
    seed.x_glue = x_glue;
    seed.m_glue = m_glue;
    seed.delta = params.m_beta - inst_at(static_cast<std::size_t>(std::llround(0.5 * static_cast<double>(k_glue))));
    seed.macro = MacroSpec{params.beta, m_glue, mu0, macro_potential(params.beta, mu0) - macro_potential(params.beta, m_glue)};

    std::vector<double> v(grid.n_points, 0.0);
    const double span = grid.x(grid.last()) - x_glue;
    for (std::size_t i = mid; i < grid.n_points; ++i) {
        const std::size_t k = i - mid;
        double value;
        if (i <= glue) {
            value = inst_at(k);
        } else if (i == grid.last()) {
            value = mu0;
        } else {
            value = solve_macro_profile(seed.macro, (grid.x(i) - x_glue) / span);
        }
        v[i] = value;
        v[grid.mirror(i)] = -value;
    }
    v[mid] = 0.0;
    seed.m0 = Profile(grid, std::move(v), Symmetry::antisymmetric);
    return seed;
}

}  // namespace uphill
