#pragma once

// Zero-current interface m = tanh(beta J*m) on a truncated line [-R, R],
// with reservoirs -m_beta / +m_beta beyond the ends.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "uphill/errors.hpp"
#include "uphill/grid_kernel.hpp"
#include "uphill/thermo.hpp"

namespace uphill {

enum class InstantonStart { step, smooth };  // m_beta sign(x) or m_beta tanh(x)

struct InstantonOptions {
    double omega = 1.0;  // damping of the fixed-point map
    std::size_t max_sweeps = 200000;
    InstantonStart start = InstantonStart::step;
    double relative_tol = 1e-10;  // on the gap, node by node
};

struct Instanton {
    Profile profile;
    KernelTable kernel;
    std::vector<double> residuals;  // sup-norm residual before each sweep
    double residual = 0.0;          // residual of the returned profile
    // m_beta - |m|, carried separately: near the ends m rounds to m_beta long
    // before the gap itself loses relative accuracy
    Profile gap;

    std::size_t sweeps() const { return residuals.size(); }
};

// half length used when slicing the interface for a seed on [-1/eps, 1/eps]
inline double default_instanton_half_length(double epsilon, double dx) {
    const double r = std::max(20.0, 1.0 / std::sqrt(epsilon) + 2.0);
    return std::ceil(r / dx - 1e-9) * dx;
}

inline double instanton_residual(const ThermoParams& p, const KernelTable& kernel, const Profile& m) {
    const Profile c = convolve(kernel, m, -p.m_beta, p.m_beta);
    double r = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) r = std::max(r, std::abs(std::tanh(p.beta * c[i]) - m[i]));
    return r;
}

// The iteration runs on the gap g = m_beta - m over x >= 0. With c = m_beta - J*m
// (partition of unity folds the reservoirs and the mirrored half into c) the
// map m -> tanh(beta J*m) becomes
//     g -> tanh(a) - tanh(a - beta c) = sinh(beta c) / (cosh(a) cosh(a - beta c)),  a = beta m_beta,
// which keeps full relative precision as g decays.
template <class Shape = PolynomialKernel>
Instanton solve_instanton(const ThermoParams& params, double half_length, double dx, double tol,
                          const InstantonOptions& opts = {}, const Shape& shape = {}) {
    if (!(params.beta > 1.0)) throw DomainError("instanton", "beta must exceed 1");
    if (!(half_length >= 5.0)) {
        throw ConfigError("instanton", "half length must be at least 5 kernel ranges, got " +
                                           std::to_string(half_length));
    }
    if (!(opts.omega > 0.0 && opts.omega <= 1.0)) throw ConfigError("instanton", "omega must lie in (0, 1]");
    if (!(opts.relative_tol > 0.0)) throw ConfigError("instanton", "relative tolerance must be positive");
    const GridSpec grid = build_grid_half_length(half_length, dx);
    Instanton out{Profile(), build_kernel(grid, shape), {}, 0.0, Profile()};
    const KernelTable& k = out.kernel;
    const double mb = params.m_beta;
    const double a = params.beta * mb;
    const double cosh_a = std::cosh(a);
    const std::size_t mid = grid.mid();
    const std::size_t n = grid.n_points;

    std::vector<double> g(n - mid);  // g[k] at node mid + k
    for (std::size_t q = 0; q < g.size(); ++q) {
        const double x = grid.x(mid + q);
        g[q] = opts.start == InstantonStart::smooth ? mb * (1.0 - std::tanh(x)) : (q == 0 ? mb : 0.0);
    }
    const auto big_gap = [&](std::size_t j) {  // m_beta - m_j over the whole grid
        return j >= mid ? g[j - mid] : 2.0 * mb - g[mid - j];
    };
    std::vector<double> next(g.size());
    for (std::size_t sweep = 0; sweep < opts.max_sweeps; ++sweep) {
        double r = 0.0;
        double rel = 0.0;
        next[0] = mb;  // m(0) = 0 by antisymmetry
        for (std::size_t q = 1; q < g.size(); ++q) {
            const std::size_t i = mid + q;
            const auto [lo, hi] = k.row_range(i);
            double c = 2.0 * mb * k.b_left[i];
            for (std::size_t j = lo; j <= hi; ++j) c += k.weight(i, j) * big_gap(j);
            const double d = params.beta * c;
            const double target = std::sinh(d) / (cosh_a * std::cosh(a - d));
            const double change = std::abs(target - g[q]);
            r = std::max(r, change);
            if (target > 0.0) rel = std::max(rel, change / target);
            next[q] = (1.0 - opts.omega) * g[q] + opts.omega * target;
        }
        out.residuals.push_back(r);
        g.swap(next);
        if (r < tol && rel < opts.relative_tol) {
            std::vector<double> m(n);
            std::vector<double> gap(n);
            for (std::size_t q = 0; q < g.size(); ++q) {
                m[mid + q] = q == 0 ? 0.0 : mb - g[q];
                m[mid - q] = -m[mid + q];
                gap[mid + q] = g[q];
                gap[mid - q] = g[q];
            }
            out.profile = Profile(grid, std::move(m), Symmetry::antisymmetric);
            out.gap = Profile(grid, std::move(gap), Symmetry::none);
            out.residual = instanton_residual(params, k, out.profile);
            if (out.residual < std::max(tol, 1e-14)) return out;
        }
    }
    throw IterationLimitError("instanton",
                              "fixed point not reached in " + std::to_string(opts.max_sweeps) + " sweeps",
                              out.residuals.empty() ? 0.0 : out.residuals.back());
}

// Smallest node-to-node increment of the interface on [0, R], read off the gap.
inline double min_increment(const Instanton& inst) {
    const GridSpec& g = inst.gap.grid;
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = g.mid() + 1; i < g.n_points; ++i) d = std::min(d, inst.gap[i - 1] - inst.gap[i]);
    return d;
}

namespace detail {
inline double fit_decay(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() < 3) throw DiagnosticError("instanton", "no resolved exponential tail to fit");
    const auto [lo, hi] = std::minmax_element(ys.begin(), ys.end());
    if (*hi - *lo < 1e-12 * std::max(1.0, std::abs(*hi))) throw DiagnosticError("instanton", "tail is flat");
    const double n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        sx += xs[k];
        sy += ys[k];
        sxx += xs[k] * xs[k];
        sxy += xs[k] * ys[k];
    }
    const double a = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
    if (!(a > 0.0)) throw DiagnosticError("instanton", "fitted tail rate is not positive");
    return a;
}
}  // namespace detail

// Least-squares decay rate a of m_beta - m(x) ~ C exp(-a x) over the part of
// the right tail where the gap is resolved above gap_floor.
inline double tail_rate(const Profile& profile, const ThermoParams& params, double gap_floor = 1e-9) {
    const GridSpec& g = profile.grid;
    std::vector<double> xs;
    std::vector<double> ys;
    double prev = -1.0;
    for (std::size_t i = g.mid(); i < g.n_points; ++i) {
        const double x = g.x(i);
        if (prev > -1.0 && profile[i] < prev) {
            throw DiagnosticError("instanton", "tail is not monotone at x = " + std::to_string(x));
        }
        prev = profile[i];
        const double gap = params.m_beta - profile[i];
        if (x < 1.0) continue;
        if (!(gap > gap_floor)) break;
        xs.push_back(x);
        ys.push_back(std::log(gap));
    }
    return detail::fit_decay(xs, ys);
}

// Same fit on the carried gap, over [x_from, R - margin]: the last kernel
// ranges feel the truncation and are left out.
inline double tail_rate(const Instanton& inst, double x_from = 1.0, double margin = 2.0) {
    const GridSpec& g = inst.gap.grid;
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = g.mid(); i < g.n_points; ++i) {
        const double x = g.x(i);
        if (x < x_from || x > g.half_length() - margin) continue;
        if (!(inst.gap[i] > 0.0)) throw DiagnosticError("instanton", "gap vanishes at x = " + std::to_string(x));
        xs.push_back(x);
        ys.push_back(std::log(inst.gap[i]));
    }
    return detail::fit_decay(xs, ys);
}

}  // namespace uphill
