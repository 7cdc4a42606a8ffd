#pragma once

// Mean-field thermodynamics and the Lebowitz-Penrose functional on [-L, L]
// with reservoirs of fixed magnetization beyond the edges.

#include <cmath>
#include <iostream>
#include <string>
#include <utility>

#include "uphill/errors.hpp"
#include "uphill/grid_kernel.hpp"

namespace uphill {

inline double solve_mbeta(double beta) {
    if (!(beta > 1.0)) {
        throw DomainError("thermo", "beta must exceed 1 (no positive root of m = tanh(beta m)), got " +
                                        std::to_string(beta));
    }
    // q(m) = 1 - tanh(beta m)/m changes sign on (0, 1]: q(0+) = 1 - beta < 0
    auto q = [beta](double m) { return 1.0 - std::tanh(beta * m) / m; };
    double lo = 0.0;
    double hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= 0.0) break;
        (q(mid) < 0.0 ? lo : hi) = mid;
    }
    double m = 0.5 * (lo + hi);
    // Newton polish on m - tanh(beta m), kept inside the bracket
    for (int it = 0; it < 5; ++it) {
        const double t = std::tanh(beta * m);
        const double f = m - t;
        const double df = 1.0 - beta * (1.0 - t * t);
        if (df == 0.0) break;
        const double next = m - f / df;
        if (!(next > lo && next < hi)) break;
        m = next;
    }
    return m;
}

inline double spinodal(double beta) {
    if (!(beta > 1.0)) {
        throw DomainError("thermo", "beta must exceed 1, got " + std::to_string(beta));
    }
    return std::sqrt(1.0 - 1.0 / beta);
}

struct ThermoParams {
    double beta = 0.0;
    double m_beta = 0.0;  // positive root of m = tanh(beta m)
    double m_star = 0.0;  // spinodal point sqrt(1 - 1/beta)
};

inline ThermoParams make_thermo(double beta) {
    return ThermoParams{beta, solve_mbeta(beta), spinodal(beta)};
}

namespace detail {
inline void require_magnetization(double m, const char* module) {
    if (!(std::abs(m) <= 1.0)) {
        throw DomainError(module, "magnetization " + std::to_string(m) + " outside [-1, 1]");
    }
}

inline double xlogx(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }
}  // namespace detail

inline double entropy(double m) {
    detail::require_magnetization(m, "thermo");
    const double up = 0.5 * (1.0 + m);
    const double down = 0.5 * (1.0 - m);
    return -detail::xlogx(up) - detail::xlogx(down);
}

inline double phi_beta(const ThermoParams& p, double m) {
    return -0.5 * m * m - entropy(m) / p.beta;
}

inline double mobility(const ThermoParams& p, double m) {
    detail::require_magnetization(m, "thermo");
    return p.beta * (1.0 - m * m);
}

// Guarded arctanh: |m| = 1 is an error, values within 1e-14 of it are clamped.
inline double safe_atanh(double m) {
    if (!(std::abs(m) < 1.0)) {
        throw DomainError("thermo", "arctanh singular at m = " + std::to_string(m));
    }
    constexpr double guard = 1e-14;
    if (std::abs(m) > 1.0 - guard) {
        std::clog << "uphill[thermo]: warning: clamping m = " << m << " away from +-1\n";
        m = std::copysign(1.0 - guard, m);
    }
    return std::atanh(m);
}

// phi_beta'(m) = -m + atanh(m)/beta
inline double phi_beta_prime(const ThermoParams& p, double m) {
    return -m + safe_atanh(m) / p.beta;
}

using Reservoirs = std::pair<double, double>;  // (left, right) magnetization

// F[m | mu] = int phi_beta(m) + 1/4 int int J (m(x) - m(y))^2
//           + 1/2 int_Lambda int_{Lambda^c} J (m(x) - mu(y))^2
inline double lp_free_energy(const ThermoParams& p, const KernelTable& kernel, const Profile& m,
                             const Reservoirs& reservoirs) {
    require_same_grid(kernel.grid, m.grid, "thermo");
    const GridSpec& g = m.grid;
    const double dx = g.dx;
    const std::size_t last = g.last();
    double local = 0.0;
    double interaction = 0.0;
    double coupling = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const double wi = g.weight(i);
        local += wi * phi_beta(p, m[i]);
        const auto [lo, hi] = kernel.row_range(i);
        double row = 0.0;
        for (std::size_t j = lo; j <= hi; ++j) {
            double w;
            if (j == 0) {
                w = kernel.edge_left[i];
            } else if (j == last) {
                w = kernel.edge_right[i];
            } else {
                w = dx * kernel.sample(static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(i));
            }
            const double d = m[i] - m[j];
            row += w * d * d;
        }
        interaction += wi * row;
        const double dl = m[i] - reservoirs.first;
        const double dr = m[i] - reservoirs.second;
        coupling += wi * (kernel.b_left[i] * dl * dl + kernel.b_right[i] * dr * dr);
    }
    return local + 0.25 * interaction + 0.5 * coupling;
}

// dF/dm(x) = atanh(m(x))/beta - (J*m)(x)
inline Profile first_variation(const ThermoParams& p, const KernelTable& kernel, const Profile& m,
                               const Reservoirs& reservoirs) {
    Profile out = convolve(kernel, m, reservoirs.first, reservoirs.second);
    for (std::size_t i = 0; i < m.size(); ++i) out[i] = safe_atanh(m[i]) / p.beta - out[i];
    return out;
}

}  // namespace uphill
