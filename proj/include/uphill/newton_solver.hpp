#pragma once

// Constructive solver for the stationary pair (m, h):
//     m = tanh(beta (J*m + h)),   h = H(m) = -j eps int_0^x dy / chi_beta(m).
// The inner loop is Newton's method in m at fixed h; the outer loop alternates
// h_n = H(m_n) and m_{n+1} = inner(m_n, h_n) until h settles. Reservoirs follow
// the current edge values throughout, so the boundary value is an output.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "uphill/errors.hpp"
#include "uphill/grid_kernel.hpp"
#include "uphill/instanton.hpp"
#include "uphill/linearized.hpp"
#include "uphill/seed_profile.hpp"
#include "uphill/thermo.hpp"

namespace uphill {

struct SolverConfig {
    double inner_tol = 1e-12;
    double outer_tol = 1e-10;
    std::size_t max_inner = 50;
    std::size_t max_outer = 200;
    double alpha = 1.0;        // weight of the exponential norm
    double delta_prime = 0.1;  // admissible radius of h around h0
    bool check_every_inner = false;  // spectral check on every inner solve, not only the first

    void validate() const {
        if (!(inner_tol > 0.0) || !(outer_tol > 0.0)) throw ConfigError("newton_solver", "tolerances must be positive");
        if (max_inner < 1 || max_outer < 1) throw ConfigError("newton_solver", "iteration caps must be at least 1");
        if (!(alpha > 0.0)) throw ConfigError("newton_solver", "alpha must be positive");
        if (!(delta_prime > 0.0)) throw ConfigError("newton_solver", "delta_prime must be positive");
    }
};

// sup_x exp(-alpha eps |x|) |f(x)|
inline double alpha_norm(const GridSpec& grid, const Profile& f, double alpha) {
    require_same_grid(grid, f.grid, "newton_solver");
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        s = std::max(s, std::exp(-alpha * grid.epsilon * std::abs(grid.x(i))) * std::abs(f[i]));
    }
    return s;
}

inline double alpha_distance(const Profile& a, const Profile& b, double alpha) {
    require_same_grid(a.grid, b.grid, "newton_solver");
    Profile d = a;
    for (std::size_t i = 0; i < d.size(); ++i) d[i] -= b[i];
    return alpha_norm(a.grid, d, alpha);
}

// sup |m - tanh(beta (J*m + h))| with reservoirs at the edge values of m
inline double stationary_residual(const ThermoParams& params, const KernelTable& kernel, const Profile& m,
                                  const Profile& h) {
    const Profile c = convolve_tracking(kernel, m);
    double r = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) r = std::max(r, std::abs(std::tanh(params.beta * (c[i] + h[i])) - m[i]));
    return r;
}

// corrections below this size are at roundoff and say nothing about the
// quadratic constant
inline constexpr double correction_noise_floor = 1e-13;

struct InnerResult {
    Profile m;
    std::vector<double> corrections;  // sup norms of the Newton corrections
    double residual = 0.0;
    double tau_estimate = 0.0;        // max |phi_n| / |phi_{n-1}|^2 above the noise floor
    double gamma = std::numeric_limits<double>::quiet_NaN();  // spectral radius at the start, if checked
};

inline InnerResult inner_solve(const ThermoParams& params, const KernelTable& kernel, const Profile& m_start,
                               const Profile& h, const SolverConfig& config, bool check_contraction = true) {
    require_same_grid(kernel.grid, m_start.grid, "newton_solver");
    require_same_grid(m_start.grid, h.grid, "newton_solver");
    const bool anti = h.symmetry == Symmetry::antisymmetric;
    InnerResult out;
    out.m = m_start;
    if (anti) antisymmetrize(out.m);
    Profile& m = out.m;
    const std::size_t n = m.size();
    Profile arg(m.grid, std::vector<double>(n), anti ? Symmetry::antisymmetric : Symmetry::none);
    Profile defect(m.grid, std::vector<double>(n), arg.symmetry);

    for (std::size_t step = 0;; ++step) {
        const Profile c = convolve_tracking(kernel, m);
        double r = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            arg[i] = c[i] + h[i];
            defect[i] = std::tanh(params.beta * arg[i]) - m[i];
            r = std::max(r, std::abs(defect[i]));
        }
        out.residual = r;
        if (r < config.inner_tol) return out;
        if (step == config.max_inner) {
            throw IterationLimitError("newton_solver",
                                      "inner Newton iteration did not converge in " +
                                          std::to_string(config.max_inner) + " steps",
                                      r);
        }
        const LinearOperator a = linearize_from_argument(params, kernel, arg, arg.symmetry);
        if (check_contraction && (step == 0 || config.check_every_inner)) {
            const double gamma = anti ? spectral_radius_antisym(a) : std::numeric_limits<double>::quiet_NaN();
            if (step == 0) out.gamma = gamma;
            if (gamma >= 1.0) {
                throw NonContractiveError("newton_solver",
                                          "linearization is not contractive on odd functions (gamma = " +
                                              std::to_string(gamma) + ")",
                                          gamma);
            }
        }
        const Profile phi = solve_second_kind(a, defect);
        const double size = sup_norm(phi);
        if (!out.corrections.empty() && size > correction_noise_floor) {
            const double prev = out.corrections.back();
            out.tau_estimate = std::max(out.tau_estimate, size / (prev * prev));
        }
        out.corrections.push_back(size);
        for (std::size_t i = 0; i < n; ++i) m[i] += phi[i];
        if (anti) antisymmetrize(m);
    }
}

struct SolverReport {
    std::vector<std::vector<double>> inner_norms;  // Newton corrections per outer step
    std::vector<double> outer_norms;               // |h_n - h_{n-1}| in the alpha-norm
    std::vector<double> outer_sup_norms;           // same, sup norm
    double rho_estimate = 0.0;
    double gamma = std::numeric_limits<double>::quiet_NaN();       // at convergence
    double seed_gamma = std::numeric_limits<double>::quiet_NaN();  // at (m0, h0)
    double residual = 0.0;
    double h_consistency = 0.0;
    double j = 0.0;
    double mu0 = 0.0;
    double mu_final = 0.0;
    double delta_seed = 0.0;
    double tau_estimate = 0.0;
    double tau_bound = 0.0;   // beta / (1 - gamma)
    double h_drift = 0.0;     // max_n |h_n - h_0|
    double x_glue = 0.0;
    double m_glue = 0.0;
    std::size_t outer_iterations = 0;
};

struct Solution {
    Profile m;
    Profile h;
    Seed seed;
    Profile h0;
    SolverReport report;
};

// Seed only: (m0, h0 = H(m0)) with the residual of the first equation.
inline Solution seed_solution(const ThermoParams& params, const KernelTable& kernel, const Instanton& instanton,
                              double mu0, double j) {
    Solution s;
    s.seed = build_seed(params, kernel.grid, instanton, mu0);
    s.m = s.seed.m0;
    s.h0 = apply_H(params, s.m, j);
    s.h = s.h0;
    s.report.j = j;
    s.report.mu0 = mu0;
    s.report.mu_final = s.m.back();
    s.report.delta_seed = s.seed.delta;
    s.report.x_glue = s.seed.x_glue;
    s.report.m_glue = s.seed.m_glue;
    s.report.residual = stationary_residual(params, kernel, s.m, s.h);
    return s;
}

inline Solution outer_solve(const ThermoParams& params, const KernelTable& kernel, const Instanton& instanton,
                            double mu0, double j, const SolverConfig& config = {}) {
    config.validate();
    if (!(j >= 0.0)) throw DomainError("newton_solver", "current must be non-negative, got " + std::to_string(j));
    Solution s = seed_solution(params, kernel, instanton, mu0, j);
    SolverReport& rep = s.report;

    Profile m = s.seed.m0;
    Profile h_prev = s.h0;
    double last_norm = std::numeric_limits<double>::quiet_NaN();
    std::size_t non_contracting = 0;
    for (std::size_t n = 1; n <= config.max_outer; ++n) {
        InnerResult inner = inner_solve(params, kernel, m, h_prev, config, n == 1 || config.check_every_inner);
        if (n == 1) rep.seed_gamma = inner.gamma;
        rep.tau_estimate = std::max(rep.tau_estimate, inner.tau_estimate);
        rep.inner_norms.push_back(inner.corrections);
        m = std::move(inner.m);
        Profile h = apply_H(params, m, j);
        const double d_alpha = alpha_distance(h, h_prev, config.alpha);
        const double d_sup = sup_distance(h, h_prev);
        rep.outer_norms.push_back(d_alpha);
        rep.outer_sup_norms.push_back(d_sup);
        rep.h_drift = std::max(rep.h_drift, sup_distance(h, s.h0));
        if (n >= 2 && last_norm > 0.0) {
            const double ratio = d_alpha / last_norm;
            rep.rho_estimate = std::max(rep.rho_estimate, ratio);
            non_contracting = ratio >= 1.0 ? non_contracting + 1 : 0;
            if (non_contracting >= 5) {
                throw NonContractiveError("newton_solver",
                                          "outer iteration failed to contract for 5 consecutive steps", ratio);
            }
        }
        last_norm = d_alpha;
        rep.outer_iterations = n;
        if (d_sup < config.outer_tol) {
            // m solves the first equation with h_prev; h_prev matches H(m) to outer_tol
            s.m = std::move(m);
            s.h = std::move(h_prev);
            rep.mu_final = s.m.back();
            rep.residual = stationary_residual(params, kernel, s.m, s.h);
            rep.h_consistency = sup_distance(s.h, apply_H(params, s.m, j));
            const LinearOperator a = linearize(params, kernel, s.m, s.h, {s.m.front(), s.m.back()});
            rep.gamma = spectral_radius_antisym(a);
            rep.tau_bound = rep.gamma < 1.0 ? params.beta / (1.0 - rep.gamma)
                                            : std::numeric_limits<double>::infinity();
            return s;
        }
        h_prev = std::move(h);
    }
    throw IterationLimitError("newton_solver",
                              "outer iteration did not converge in " + std::to_string(config.max_outer) + " steps",
                              rep.outer_sup_norms.empty() ? 0.0 : rep.outer_sup_norms.back());
}

// I(x) = -chi_beta(m) d/dx [atanh(m)/beta - J*m], central differences inside,
// second-order one-sided differences at the two edges.
inline Profile current_profile(const ThermoParams& params, const KernelTable& kernel, const Profile& m) {
    const Profile mu = first_variation(params, kernel, m, {m.front(), m.back()});
    const std::size_t n = m.size();
    const double dx = m.grid.dx;
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double d;
        if (n < 3) {
            d = 0.0;
        } else if (i == 0) {
            d = (-3.0 * mu[0] + 4.0 * mu[1] - mu[2]) / (2.0 * dx);
        } else if (i == n - 1) {
            d = (3.0 * mu[n - 1] - 4.0 * mu[n - 2] + mu[n - 3]) / (2.0 * dx);
        } else {
            d = (mu[i + 1] - mu[i - 1]) / (2.0 * dx);
        }
        out[i] = -mobility(params, m[i]) * d;
    }
    return Profile(m.grid, std::move(out), Symmetry::none);
}

struct ShapeSummary {
    bool single_bump = false;     // increasing on [0, x*], decreasing on [x*, L]
    std::size_t peak_index = 0;
    double x_peak = 0.0;
    double m_peak = 0.0;
};

inline ShapeSummary bump_shape(const Profile& m) {
    const GridSpec& g = m.grid;
    ShapeSummary s;
    s.peak_index = g.mid();
    for (std::size_t i = g.mid(); i < m.size(); ++i) {
        if (m[i] > m[s.peak_index]) s.peak_index = i;
    }
    s.x_peak = g.x(s.peak_index);
    s.m_peak = m[s.peak_index];
    bool ok = s.peak_index > g.mid() && s.peak_index < g.last();
    for (std::size_t i = g.mid(); i < s.peak_index && ok; ++i) ok = m[i + 1] > m[i];
    for (std::size_t i = s.peak_index; i < g.last() && ok; ++i) ok = m[i + 1] < m[i];
    s.single_bump = ok;
    return s;
}

}  // namespace uphill
