#pragma once

// Linearization of m -> tanh(beta (J*m + h)) around (m, h):
//     p(x)  = beta sech^2(beta (J*m + h)),   p'(x) = p(x) tanh(beta (J*m + h)),
//     (A f)(x) = p(x) (J*f)(x).
// Perturbations move the reservoirs together with the edge values, so A uses
// the kernel with the reservoir mass folded onto the edge columns and each
// row of A sums to p(x).

#include <lapacke.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "uphill/errors.hpp"
#include "uphill/grid_kernel.hpp"
#include "uphill/thermo.hpp"

namespace uphill {

struct LinearOperator {
    Profile p;
    Profile p_prime;
    KernelTable kernel;

    const GridSpec& grid() const { return p.grid; }
    std::size_t size() const { return p.size(); }

    double entry(std::size_t i, std::size_t j) const { return p[i] * kernel.tracking_weight(i, j); }

    // row-major dense copy, for diagnostics and tests
    std::vector<double> dense() const {
        const std::size_t n = size();
        std::vector<double> a(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto [lo, hi] = kernel.row_range(i);
            for (std::size_t j = lo; j <= hi; ++j) a[i * n + j] = entry(i, j);
        }
        return a;
    }
};

// Builds p and p' from the field argument beta (J*m + h) already evaluated.
inline LinearOperator linearize_from_argument(const ThermoParams& params, const KernelTable& kernel,
                                              const Profile& argument, Symmetry symmetry) {
    std::vector<double> p(argument.size());
    std::vector<double> pp(argument.size());
    for (std::size_t i = 0; i < argument.size(); ++i) {
        const double t = std::tanh(params.beta * argument[i]);
        p[i] = params.beta * (1.0 - t * t);
        pp[i] = p[i] * t;
    }
    return LinearOperator{Profile(argument.grid, std::move(p), Symmetry::none),
                          Profile(argument.grid, std::move(pp), symmetry), kernel};
}

inline LinearOperator linearize(const ThermoParams& params, const KernelTable& kernel, const Profile& m,
                                const Profile& h, const Reservoirs& reservoirs) {
    require_same_grid(kernel.grid, m.grid, "linearized");
    require_same_grid(m.grid, h.grid, "linearized");
    Profile arg = convolve(kernel, m, reservoirs.first, reservoirs.second);
    for (std::size_t i = 0; i < arg.size(); ++i) arg[i] += h[i];
    const bool anti = m.symmetry == Symmetry::antisymmetric && h.symmetry == Symmetry::antisymmetric &&
                      reservoirs.first == -reservoirs.second;
    return linearize_from_argument(params, kernel, arg, anti ? Symmetry::antisymmetric : Symmetry::none);
}

inline void apply(const LinearOperator& a, std::span<const double> f, std::span<double> out) {
    const KernelTable& k = a.kernel;
    const std::size_t last = k.grid.last();
    const double dx = k.grid.dx;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto [lo, hi] = k.row_range(i);
        double s = 0.0;
        for (std::size_t j = lo; j <= hi; ++j) {
            double w;
            if (j == 0) {
                w = k.edge_left[i] + k.b_left[i];
            } else if (j == last) {
                w = k.edge_right[i] + k.b_right[i];
            } else {
                w = dx * k.sample(static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(i));
            }
            s += w * f[j];
        }
        out[i] = a.p[i] * s;
    }
}

inline Profile apply(const LinearOperator& a, const Profile& f) {
    require_same_grid(a.grid(), f.grid, "linearized");
    Profile out(f.grid, std::vector<double>(f.size()), f.symmetry);
    apply(a, f.values, out.values);
    return out;
}

struct SpectralEstimate {
    double value = 0.0;
    std::size_t iterations = 0;
};

// Power iteration on the antisymmetric subspace. The restricted operator is
// entrywise nonnegative (the kernel decreases with distance), so its Perron
// root is the dominant eigenvalue. The stopping rule extrapolates the
// remaining error from the observed geometric rate of the estimates.
inline SpectralEstimate spectral_radius_antisym_detail(const LinearOperator& a, double rel_tol = 1e-6,
                                                       std::size_t max_iter = 400000) {
    const std::size_t n = a.size();
    if (sup_norm(a.p) == 0.0) return {0.0, 0};
    std::vector<double> psi(n);
    std::vector<double> next(n);
    for (std::size_t i = 0; i < n; ++i) psi[i] = a.grid().x(i);
    antisymmetrize(std::span<double>(psi));
    auto normalize = [](std::vector<double>& v) {
        const double s = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
        for (double& x : v) x /= s;
        return s;
    };
    normalize(psi);
    double lambda = 0.0;
    double prev_delta = std::numeric_limits<double>::infinity();
    std::size_t settled = 0;
    for (std::size_t it = 1; it <= max_iter; ++it) {
        apply(a, psi, next);
        antisymmetrize(std::span<double>(next));
        const double est = std::sqrt(std::inner_product(next.begin(), next.end(), next.begin(), 0.0));
        if (est == 0.0) return {0.0, it};
        const double delta = std::abs(est - lambda);
        const double rate = std::min(delta / prev_delta, 0.999999);
        const double remaining = rate < 1.0 ? delta * rate / (1.0 - rate) : delta;
        lambda = est;
        prev_delta = delta;
        for (std::size_t i = 0; i < n; ++i) psi[i] = next[i] / est;
        if (it > 10 && remaining <= 0.01 * rel_tol * lambda && delta <= 0.01 * rel_tol * lambda) {
            if (++settled >= 5) return {lambda, it};
        } else {
            settled = 0;
        }
    }
    throw DiagnosticError("linearized", "power iteration did not converge in " + std::to_string(max_iter) +
                                            " steps (last estimate " + std::to_string(lambda) + ")");
}

inline double spectral_radius_antisym(const LinearOperator& a) { return spectral_radius_antisym_detail(a).value; }

// Solves (I - A) phi = F by banded LU with partial pivoting (LAPACK dgbsv).
inline Profile solve_second_kind(const LinearOperator& a, const Profile& f) {
    require_same_grid(a.grid(), f.grid, "linearized");
    const auto n = static_cast<lapack_int>(a.size());
    const auto band = static_cast<lapack_int>(std::min<std::size_t>(a.kernel.support, a.size() - 1));
    const lapack_int kl = band;
    const lapack_int ku = band;
    const lapack_int ldab = 2 * kl + ku + 1;
    std::vector<double> ab(static_cast<std::size_t>(ldab) * static_cast<std::size_t>(n), 0.0);
    // column-major band storage: AB(kl + ku + i - j, j) = M(i, j)
    for (lapack_int i = 0; i < n; ++i) {
        const auto [lo, hi] = a.kernel.row_range(static_cast<std::size_t>(i));
        for (std::size_t jj = lo; jj <= hi; ++jj) {
            const auto j = static_cast<lapack_int>(jj);
            double v = -a.entry(static_cast<std::size_t>(i), jj);
            if (i == j) v += 1.0;
            ab[static_cast<std::size_t>(kl + ku + i - j) + static_cast<std::size_t>(j) * static_cast<std::size_t>(ldab)] = v;
        }
    }
    std::vector<lapack_int> ipiv(static_cast<std::size_t>(n));
    std::vector<double> x = f.values;
    const lapack_int info = LAPACKE_dgbsv(LAPACK_COL_MAJOR, n, kl, ku, 1, ab.data(), ldab, ipiv.data(), x.data(), n);
    if (info != 0) {
        double gamma = std::numeric_limits<double>::quiet_NaN();
        try {
            gamma = spectral_radius_antisym(a);
        } catch (const DiagnosticError&) {
        }
        throw NonContractiveError("linearized",
                                  "I - A is singular (LAPACK info " + std::to_string(info) +
                                      "), antisymmetric spectral radius estimate " + std::to_string(gamma),
                                  gamma);
    }
    Profile phi(f.grid, std::move(x), f.symmetry);
    if (f.symmetry == Symmetry::antisymmetric) antisymmetrize(phi);
    return phi;
}

// sup |phi - A phi - F|
inline double second_kind_residual(const LinearOperator& a, const Profile& phi, const Profile& f) {
    const Profile ap = apply(a, phi);
    double r = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) r = std::max(r, std::abs(phi[i] - ap[i] - f[i]));
    return r;
}

}  // namespace uphill
