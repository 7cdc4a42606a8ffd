#pragma once

// Macroscopic boundary-value problem on [0, 1]:
//     j_M = -(1 - chi_beta(M)) M',   M(0) = mu_minus,  M(1) = mu_plus,
// solved through its first integral g(M(x)) = g(mu_minus) + j_M x with
// g(M) = (beta - 1) M - (beta/3) M^3.

#include <cmath>
#include <string>

#include "uphill/errors.hpp"
#include "uphill/thermo.hpp"

namespace uphill {

inline double macro_potential(double beta, double m) {
    return (beta - 1.0) * m - (beta / 3.0) * m * m * m;
}

namespace detail {
// m_beta itself is admissible; values quoted to six digits may exceed it by
// rounding, so the upper end carries a 1e-6 allowance
inline constexpr double m_beta_allowance = 1e-6;

inline void require_metastable(double beta, double mu, const char* module, const char* what) {
    const double m_star = spinodal(beta);
    const double m_beta = solve_mbeta(beta);
    if (!(mu > m_star) || mu > m_beta + m_beta_allowance) {
        throw DomainError(module, std::string(what) + " = " + std::to_string(mu) +
                                      " violates metastability: need m*(beta) = " +
                                      std::to_string(m_star) + " < value <= m_beta = " +
                                      std::to_string(m_beta));
    }
}
}  // namespace detail

struct MacroSpec {
    double beta = 0.0;
    double mu_minus = 0.0;  // M(0)
    double mu_plus = 0.0;   // M(1)
    double j_M = 0.0;
};

inline double macro_current(double beta, double mu_minus, double mu_plus) {
    detail::require_metastable(beta, mu_minus, "macro_profile", "mu_minus");
    detail::require_metastable(beta, mu_plus, "macro_profile", "mu_plus");
    return macro_potential(beta, mu_plus) - macro_potential(beta, mu_minus);
}

inline MacroSpec make_macro_spec(double beta, double mu_minus, double mu_plus) {
    return MacroSpec{beta, mu_minus, mu_plus, macro_current(beta, mu_minus, mu_plus)};
}

inline double solve_macro_profile(const MacroSpec& spec, double x) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw DomainError("macro_profile", "x = " + std::to_string(x) + " outside [0, 1]");
    }
    if (spec.mu_minus == spec.mu_plus || x == 0.0) return spec.mu_minus;
    if (x == 1.0) return spec.mu_plus;
    const double beta = spec.beta;
    const double target = macro_potential(beta, spec.mu_minus) + spec.j_M * x;
    // g is monotone on the metastable interval, decreasing for M > m*
    double lo = std::min(spec.mu_plus, spec.mu_minus);
    double hi = std::max(spec.mu_plus, spec.mu_minus);
    double f_lo = macro_potential(beta, lo) - target;
    const double f_hi = macro_potential(beta, hi) - target;
    const double scale = 1e-12 * std::max(1.0, std::abs(target));
    if (f_lo * f_hi > 0.0 && std::abs(f_lo) > scale && std::abs(f_hi) > scale) {
        throw Error("macro_profile", "root of the first integral is not bracketed at x = " + std::to_string(x));
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = macro_potential(beta, mid) - target;
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// H(x) = atanh(M(x))/beta - M(x), the field that makes M a local mean-field equilibrium.
inline double macro_field(const MacroSpec& spec, double x) {
    const double m = solve_macro_profile(spec, x);
    return safe_atanh(m) / spec.beta - m;
}

}  // namespace uphill
