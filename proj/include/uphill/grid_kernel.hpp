#pragma once

// Uniform grid on [-L, L] (L = 1/epsilon), grid functions, and the
// boundary-corrected convolution kernel.
//
//   (J*m)(x_i) = sum_j W_ij m_j + b_left(x_i) mu_left + b_right(x_i) mu_right
//
// W_ij is the trapezoidal rule applied to the sampled kernel, with the
// weights of the two edge nodes corrected row by row so that the in-domain
// part of each half of the kernel reproduces the exact mass of the continuous
// kernel on that half. The reservoir masses b_left / b_right are the exact
// continuous masses falling outside [-L, L]. Every row therefore sums to one.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "uphill/errors.hpp"

namespace uphill {

struct GridSpec {
    double epsilon = 0.0;
    double dx = 0.0;
    std::size_t n_points = 0;

    double half_length() const { return 1.0 / epsilon; }
    std::size_t mid() const { return n_points / 2; }
    std::size_t last() const { return n_points - 1; }

    // x_i = (i - mid) dx, so that x_{mid+k} = -x_{mid-k} bit for bit
    double x(std::size_t i) const {
        return (static_cast<double>(i) - static_cast<double>(mid())) * dx;
    }

    std::size_t mirror(std::size_t i) const { return last() - i; }

    // nearest node to a coordinate, clamped to the grid
    std::size_t nearest(double xv) const {
        const double k = std::round(xv / dx) + static_cast<double>(mid());
        return static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(last())));
    }

    // trapezoidal weight of node i over [-L, L]
    double weight(std::size_t i) const { return (i == 0 || i == last()) ? 0.5 * dx : dx; }

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

inline GridSpec build_grid(double epsilon, double dx) {
    if (!(epsilon > 0.0) || epsilon > 1.0) {
        throw ConfigError("grid_kernel", "epsilon must lie in (0, 1], got " + std::to_string(epsilon));
    }
    if (!(dx > 0.0) || dx > 1.0) {
        throw ConfigError("grid_kernel", "dx must lie in (0, 1], got " + std::to_string(dx));
    }
    const double cells = (1.0 / epsilon) / dx;
    const double rounded = std::round(cells);
    if (rounded < 1.0 || std::abs(cells - rounded) > 1e-12 * std::max(1.0, cells)) {
        throw ConfigError("grid_kernel", "dx = " + std::to_string(dx) +
                                             " does not divide 1/epsilon = " +
                                             std::to_string(1.0 / epsilon));
    }
    const auto half = static_cast<std::size_t>(rounded);
    return GridSpec{epsilon, dx, 2 * half + 1};
}

// Grid over [-half_length, half_length].
inline GridSpec build_grid_half_length(double half_length, double dx) {
    if (!(half_length >= 1.0)) {
        throw ConfigError("grid_kernel", "half length must be at least 1, got " + std::to_string(half_length));
    }
    return build_grid(1.0 / half_length, dx);
}

enum class Symmetry { none, antisymmetric };

// A grid function: magnetization, auxiliary field or current.
struct Profile {
    GridSpec grid;
    std::vector<double> values;
    Symmetry symmetry = Symmetry::none;

    Profile() = default;
    Profile(GridSpec g, std::vector<double> v, Symmetry s = Symmetry::none)
        : grid(g), values(std::move(v)), symmetry(s) {
        if (values.size() != grid.n_points) {
            throw DimensionError("grid_kernel", "profile has " + std::to_string(values.size()) +
                                                    " values for a grid of " +
                                                    std::to_string(grid.n_points) + " nodes");
        }
    }

    static Profile constant(const GridSpec& g, double c) {
        return Profile(g, std::vector<double>(g.n_points, c), c == 0.0 ? Symmetry::antisymmetric : Symmetry::none);
    }

    template <class F>
    static Profile from_function(const GridSpec& g, F&& f, Symmetry s = Symmetry::none) {
        std::vector<double> v(g.n_points);
        for (std::size_t i = 0; i < g.n_points; ++i) v[i] = f(g.x(i));
        return Profile(g, std::move(v), s);
    }

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }
    double front() const { return values.front(); }
    double back() const { return values.back(); }
    double at_x(double xv) const { return values[grid.nearest(xv)]; }
};

inline void require_same_grid(const GridSpec& a, const GridSpec& b, const char* module) {
    if (!(a == b)) {
        throw DimensionError(module, "grid mismatch (" + std::to_string(a.n_points) + " vs " +
                                         std::to_string(b.n_points) + " nodes)");
    }
}

inline double sup_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

inline double sup_norm(const Profile& p) { return sup_norm(p.values); }

inline double sup_distance(const Profile& a, const Profile& b) {
    require_same_grid(a.grid, b.grid, "grid_kernel");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
    return s;
}

// largest |f(x) + f(-x)| over the grid
inline double antisymmetry_defect(const Profile& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s = std::max(s, std::abs(f[i] + f[f.grid.mirror(i)]));
    return s;
}

// f(x) <- (f(x) - f(-x)) / 2, with f(0) = 0 exactly
inline void antisymmetrize(Profile& f) {
    const std::size_t n = f.size();
    for (std::size_t i = 0; i < n / 2; ++i) {
        const double a = 0.5 * (f[i] - f[n - 1 - i]);
        f[i] = a;
        f[n - 1 - i] = -a;
    }
    f[f.grid.mid()] = 0.0;
    f.symmetry = Symmetry::antisymmetric;
}

inline void antisymmetrize(std::span<double> f) {
    const std::size_t n = f.size();
    for (std::size_t i = 0; i < n / 2; ++i) {
        const double a = 0.5 * (f[i] - f[n - 1 - i]);
        f[i] = a;
        f[n - 1 - i] = -a;
    }
    f[n / 2] = 0.0;
}

// Default kernel shape J(r) = (35/32)(1 - r^2)^3 on |r| <= 1.
struct PolynomialKernel {
    static constexpr const char* name = "poly6: (35/32)(1-r^2)^3";

    double operator()(double r) const {
        const double a = std::abs(r);
        if (a >= 1.0) return 0.0;
        const double s = 1.0 - a * a;
        return (35.0 / 32.0) * s * s * s;
    }

    // integral of J over [0, d], d >= 0
    double half_mass(double d) const {
        const double t = std::min(d, 1.0);
        const double t2 = t * t;
        return (35.0 / 32.0) * t * (1.0 - t2 + 0.6 * t2 * t2 - t2 * t2 * t2 / 7.0);
    }
};

struct KernelTable {
    GridSpec grid;
    std::string name;
    std::size_t support = 0;            // kernel offsets 0..support sampled
    std::vector<double> samples;        // samples[k] = normalized J(k dx)
    std::vector<double> b_left;         // reservoir mass beyond -L, per node
    std::vector<double> b_right;        // reservoir mass beyond +L, per node
    std::vector<double> edge_left;      // W_{i,0}
    std::vector<double> edge_right;     // W_{i,N}

    double sample(std::ptrdiff_t offset) const {
        const auto k = static_cast<std::size_t>(offset < 0 ? -offset : offset);
        return k <= support ? samples[k] : 0.0;
    }

    // column range of row i
    std::pair<std::size_t, std::size_t> row_range(std::size_t i) const {
        const std::size_t lo = i > support ? i - support : 0;
        const std::size_t hi = std::min(grid.last(), i + support);
        return {lo, hi};
    }

    // in-domain quadrature weight W_ij (zero outside the band)
    double weight(std::size_t i, std::size_t j) const {
        const auto off = static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(i);
        if (static_cast<std::size_t>(off < 0 ? -off : off) > support) return 0.0;
        double w = 0.0;
        if (j == 0) w += edge_left[i];
        if (j == grid.last()) w += edge_right[i];
        if (j != 0 && j != grid.last()) w = grid.dx * sample(off);
        return w;
    }

    // W_ij plus the reservoir mass folded onto the edge columns; this is the
    // kernel seen when the reservoirs equal the current edge values.
    double tracking_weight(std::size_t i, std::size_t j) const {
        double w = weight(i, j);
        if (j == 0) w += b_left[i];
        if (j == grid.last()) w += b_right[i];
        return w;
    }
};

template <class Shape = PolynomialKernel>
KernelTable build_kernel(const GridSpec& grid, const Shape& shape = {}) {
    const double dx = grid.dx;
    if (!(dx <= 1.0)) {
        throw ConfigError("grid_kernel", "kernel under-resolved: dx = " + std::to_string(dx) + " > 1");
    }
    KernelTable k;
    k.grid = grid;
    k.name = Shape::name;
    k.support = static_cast<std::size_t>(std::floor(1.0 / dx + 1e-9));

    std::vector<double> raw(k.support + 1);
    for (std::size_t s = 0; s <= k.support; ++s) raw[s] = shape(static_cast<double>(s) * dx);
    double mass = raw[0];
    for (std::size_t s = 1; s <= k.support; ++s) mass += 2.0 * raw[s];
    mass *= dx;
    k.samples.resize(raw.size());
    for (std::size_t s = 0; s < raw.size(); ++s) k.samples[s] = raw[s] / mass;

    const std::size_t n = grid.n_points;
    const std::size_t last = grid.last();
    const double half_len = static_cast<double>(grid.mid()) * dx;
    k.b_left.assign(n, 0.0);
    k.b_right.assign(n, 0.0);
    k.edge_left.assign(n, 0.0);
    k.edge_right.assign(n, 0.0);

    for (std::size_t i = 0; i < n; ++i) {
        const double xi = grid.x(i);
        // right half [x_i, L]: trapezoid on the nodes i..last, then edge correction
        const double d_right = half_len - xi;
        if (d_right < 1.0) {
            double trap = 0.0;
            for (std::size_t j = i; j <= last; ++j) {
                const double w = (j == i || j == last) ? 0.5 * dx : dx;
                trap += (i == last) ? 0.0 : w * k.sample(static_cast<std::ptrdiff_t>(j - i));
            }
            const double exact = shape.half_mass(d_right);
            k.b_right[i] = 0.5 - exact;
            const double base = (i == last) ? 0.0 : 0.5 * dx * k.sample(static_cast<std::ptrdiff_t>(last - i));
            k.edge_right[i] = base + (exact - trap);
        }
        const double d_left = xi + half_len;
        if (d_left < 1.0) {
            double trap = 0.0;
            for (std::size_t j = 0; j <= i; ++j) {
                const double w = (j == i || j == 0) ? 0.5 * dx : dx;
                trap += (i == 0) ? 0.0 : w * k.sample(static_cast<std::ptrdiff_t>(i - j));
            }
            const double exact = shape.half_mass(d_left);
            k.b_left[i] = 0.5 - exact;
            const double base = (i == 0) ? 0.0 : 0.5 * dx * k.sample(static_cast<std::ptrdiff_t>(i));
            k.edge_left[i] = base + (exact - trap);
        }
    }
    // the edge node's own half sample comes from the opposite half-interval
    k.edge_right[last] += 0.5 * dx * k.samples[0];
    k.edge_left[0] += 0.5 * dx * k.samples[0];
    return k;
}

// J*m with explicit reservoir values beyond -L and +L.
inline Profile convolve(const KernelTable& kernel, const Profile& m, double reservoir_left,
                        double reservoir_right) {
    require_same_grid(kernel.grid, m.grid, "grid_kernel");
    if (!(std::abs(reservoir_left) <= 1.0) || !(std::abs(reservoir_right) <= 1.0)) {
        throw DomainError("grid_kernel", "reservoir values must lie in [-1, 1]");
    }
    const std::size_t n = m.size();
    const std::size_t last = kernel.grid.last();
    const double dx = kernel.grid.dx;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto [lo, hi] = kernel.row_range(i);
        double s = 0.0;
        for (std::size_t j = lo; j <= hi; ++j) {
            double w;
            if (j == 0) {
                w = kernel.edge_left[i];
            } else if (j == last) {
                w = kernel.edge_right[i];
            } else {
                w = dx * kernel.sample(static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(i));
            }
            s += w * m[j];
        }
        out[i] = s + kernel.b_left[i] * reservoir_left + kernel.b_right[i] * reservoir_right;
    }
    const bool anti = m.symmetry == Symmetry::antisymmetric && reservoir_left == -reservoir_right;
    return Profile(m.grid, std::move(out), anti ? Symmetry::antisymmetric : Symmetry::none);
}

// Reservoirs pinned to the current edge values of m.
inline Profile convolve_tracking(const KernelTable& kernel, const Profile& m) {
    return convolve(kernel, m, m.front(), m.back());
}

}  // namespace uphill
