#pragma once

#include <cmath>
#include <functional>

#include "ctwave/errors.hpp"

namespace ctwave {

/// Bisection on a bracketing interval [lo, hi] with f(lo)*f(hi) <= 0.
/// Stops when the interval is shorter than abs_tol.
inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     double abs_tol = 1e-12, int max_iter = 200) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (flo * fhi > 0.0) throw domain_error("bisect: interval does not bracket a root");
    for (int it = 0; it < max_iter && (hi - lo) > abs_tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if (flo * fm < 0.0) {
            hi = mid;
            fhi = fm;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

/// Golden-section minimization on [lo, hi]; assumes the scan that produced
/// the bracket already isolated a single local minimum.
inline double golden_minimize(const std::function<double(double)>& f, double lo, double hi,
                              double rel_tol = 1e-10, int max_iter = 400) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < max_iter; ++it) {
        if ((b - a) <= rel_tol * (std::abs(c) + std::abs(d)) + 1e-300) break;
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return fc < fd ? c : d;
}

}  // namespace ctwave
