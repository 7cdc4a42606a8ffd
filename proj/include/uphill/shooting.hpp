#pragma once

// Shooting on the current: the boundary value of the converged profile is a
// continuous function of j, so bisection between two currents whose boundary
// values straddle the target finds a solution with the prescribed Dirichlet data.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "uphill/errors.hpp"
#include "uphill/instanton.hpp"
#include "uphill/macro_profile.hpp"
#include "uphill/newton_solver.hpp"
#include "uphill/seed_profile.hpp"

namespace uphill {

// Seed boundary value for a trial current: the macroscopic branch from the
// interface value at the glue point that carries exactly j.
inline double seed_boundary(const ThermoParams& params, const KernelTable& kernel, const Instanton& instanton,
                            double j) {
    const GridSpec& g = kernel.grid;
    const GridSpec& ig = instanton.profile.grid;
    const std::size_t k = g.nearest(1.0 / std::sqrt(g.epsilon)) - g.mid();
    if (ig.mid() + k > ig.last()) throw ConfigError("shooting", "interface shorter than eps^{-1/2}");
    return seed_boundary_for_current(params, j, instanton.profile[ig.mid() + k]);
}

inline Solution solve_for_current(const ThermoParams& params, const KernelTable& kernel, const Instanton& instanton,
                                  double j, const SolverConfig& config = {}) {
    return outer_solve(params, kernel, instanton, seed_boundary(params, kernel, instanton, j), j, config);
}

inline double boundary_of_current(const ThermoParams& params, const KernelTable& kernel, const Instanton& instanton,
                                  double mu0, double j, const SolverConfig& config = {}) {
    return outer_solve(params, kernel, instanton, mu0, j, config).report.mu_final;
}

inline double default_eta(const ThermoParams& params) { return 0.05 * (params.m_beta - params.m_star); }

struct ShotPoint {
    double j = 0.0;
    double mu0 = 0.0;
    double mu_final = 0.0;
};

struct ShootResult {
    double j = 0.0;
    Solution solution;
    std::vector<ShotPoint> history;  // bracket endpoints first, then bisection midpoints
    bool monotone = true;            // mu_final non-increasing in j over the history
    double eta = 0.0;
};

inline bool history_monotone(std::vector<ShotPoint> pts) {
    std::sort(pts.begin(), pts.end(), [](const ShotPoint& a, const ShotPoint& b) { return a.j < b.j; });
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (pts[i].mu_final > pts[i - 1].mu_final) return false;
    }
    return true;
}

inline ShootResult shoot(const ThermoParams& params, const KernelTable& kernel, const Instanton& instanton,
                         double mu_target, double eta, const SolverConfig& config = {}, double mu_tol = 1e-6,
                         std::size_t max_bisections = 200) {
    if (!(mu_target > params.m_star && mu_target < params.m_beta)) {
        throw DomainError("shooting", "target " + std::to_string(mu_target) + " outside the metastable interval (" +
                                          std::to_string(params.m_star) + ", " + std::to_string(params.m_beta) + ")");
    }
    if (!(eta > 0.0)) throw ConfigError("shooting", "eta must be positive");
    // keep both bracket values strictly metastable
    const double room = std::min(mu_target - params.m_star, params.m_beta - mu_target);
    eta = std::min(eta, 0.999 * room);

    const GridSpec& g = kernel.grid;
    const GridSpec& ig = instanton.profile.grid;
    const std::size_t k = g.nearest(1.0 / std::sqrt(g.epsilon)) - g.mid();
    if (ig.mid() + k > ig.last()) throw ConfigError("shooting", "interface shorter than eps^{-1/2}");
    const double m_glue = instanton.profile[ig.mid() + k];
    if (!(mu_target + eta < m_glue)) {
        throw DomainError("shooting", "bracket top " + std::to_string(mu_target + eta) +
                                          " reaches the interface value at the glue point");
    }

    ShootResult out;
    out.eta = eta;
    const auto run = [&](double j) {
        const double mu0 = seed_boundary_for_current(params, j, m_glue);
        Solution s = outer_solve(params, kernel, instanton, mu0, j, config);
        out.history.push_back({j, mu0, s.report.mu_final});
        return s;
    };

    // j decreases as the boundary value increases
    double j_lo = seed_current(params, mu_target + eta, m_glue);
    double j_hi = seed_current(params, mu_target - eta, m_glue);
    Solution s_lo = run(j_lo);
    Solution s_hi = run(j_hi);
    const double f_lo = s_lo.report.mu_final - mu_target;
    const double f_hi = s_hi.report.mu_final - mu_target;
    const auto finish = [&](double j, Solution&& s) {
        out.j = j;
        out.solution = std::move(s);
        out.monotone = history_monotone(out.history);
        return std::move(out);
    };
    if (std::abs(f_lo) < mu_tol) return finish(j_lo, std::move(s_lo));
    if (std::abs(f_hi) < mu_tol) return finish(j_hi, std::move(s_hi));
    if (!(f_lo > 0.0 && f_hi < 0.0)) {
        throw BracketError("shooting",
                           "boundary values " + std::to_string(s_lo.report.mu_final) + " (j = " +
                               std::to_string(j_lo) + ") and " + std::to_string(s_hi.report.mu_final) + " (j = " +
                               std::to_string(j_hi) + ") do not straddle the target " + std::to_string(mu_target),
                           s_lo.report.mu_final, s_hi.report.mu_final);
    }
    for (std::size_t it = 0; it < max_bisections; ++it) {
        const double j_mid = 0.5 * (j_lo + j_hi);
        Solution s = run(j_mid);
        const double f = s.report.mu_final - mu_target;
        if (std::abs(f) < mu_tol) return finish(j_mid, std::move(s));
        (f > 0.0 ? j_lo : j_hi) = j_mid;
        if (j_hi - j_lo <= 4.0 * std::numeric_limits<double>::epsilon() * j_hi) break;
    }
    throw IterationLimitError("shooting", "bisection did not reach the boundary tolerance",
                              out.history.back().mu_final - mu_target);
}

// Empirical Lipschitz constant of j -> mu_final from a symmetric difference.
inline double lipschitz_ratio(const ThermoParams& params, const KernelTable& kernel, const Instanton& instanton,
                              double j, double gap, const SolverConfig& config = {}) {
    const double a = solve_for_current(params, kernel, instanton, j - 0.5 * gap, config).report.mu_final;
    const double b = solve_for_current(params, kernel, instanton, j + 0.5 * gap, config).report.mu_final;
    return std::abs(b - a) / gap;
}

}  // namespace uphill
