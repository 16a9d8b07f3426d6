#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "ctwave/errors.hpp"

namespace ctwave {

/// Thomas elimination for a tridiagonal system.
///
/// lower[i] multiplies x[i-1] in row i (lower[0] unused), diag[i] multiplies
/// x[i], upper[i] multiplies x[i+1] (upper[n-1] unused). Overwrites rhs with
/// the solution. The systems assembled in this project are strictly
/// diagonally dominant, so no pivoting is required.
inline void solve_tridiagonal(std::span<const double> lower,
                              std::span<double> diag,
                              std::span<const double> upper,
                              std::span<double> rhs) {
    const std::size_t n = diag.size();
    if (n == 0) return;
    for (std::size_t i = 1; i < n; ++i) {
        if (diag[i - 1] == 0.0) throw solver_error("tridiagonal solve: zero pivot");
        const double m = lower[i] / diag[i - 1];
        diag[i] -= m * upper[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    if (diag[n - 1] == 0.0) throw solver_error("tridiagonal solve: zero pivot");
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
        rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
    }
}

/// Reusable tridiagonal workspace: keeps the factorization buffers alive so
/// time steppers do not allocate per step.
class TridiagonalScratch {
public:
    void solve(std::span<const double> lower, std::span<const double> diag,
               std::span<const double> upper, std::span<double> rhs) {
        diag_.assign(diag.begin(), diag.end());
        solve_tridiagonal(lower, diag_, upper, rhs);
    }

private:
    std::vector<double> diag_;
};

inline double sup_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline double sup_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

/// Piecewise-linear evaluation of samples on a uniform grid, with constant
/// continuation beyond both ends.
inline double interp_uniform(double x, double x_min, double dx,
                             std::span<const double> values) {
    const std::size_t n = values.size();
    const double s = (x - x_min) / dx;
    if (s <= 0.0) return values.front();
    if (s >= static_cast<double>(n - 1)) return values.back();
    const auto i = static_cast<std::size_t>(s);
    const double w = s - static_cast<double>(i);
    return (1.0 - w) * values[i] + w * values[i + 1];
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Ordinary least squares y ~ slope*x + intercept.
inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n < 2) throw domain_error("fit_line: need at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double den = n * sxx - sx * sx;
    if (den == 0.0) throw domain_error("fit_line: degenerate abscissae");
    LineFit f;
    f.slope = (n * sxy - sx * sy) / den;
    f.intercept = (sy - f.slope * sx) / n;
    return f;
}

/// First derivative of uniform-grid samples: fourth-order centered stencils
/// in the interior, second-order centered next to the boundary, one-sided
/// second-order at the ends.
inline std::vector<double> derivative_samples(std::span<const double> f, double dx) {
    const std::size_t n = f.size();
    std::vector<double> d(n, 0.0);
    if (n < 3) throw domain_error("derivative_samples: need n >= 3");
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dx);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * dx);
    if (n >= 3) {
        d[1] = (f[2] - f[0]) / (2.0 * dx);
        d[n - 2] = (f[n - 1] - f[n - 3]) / (2.0 * dx);
    }
    for (std::size_t i = 2; i + 2 < n; ++i) {
        d[i] = (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]) / (12.0 * dx);
    }
    return d;
}

}  // namespace ctwave
