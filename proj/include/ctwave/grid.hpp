#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "ctwave/errors.hpp"

namespace ctwave {

/// Uniform 1D grid on a truncated domain [x_min, x_max].
struct Grid {
    double x_min = 0.0;
    double x_max = 1.0;
    int n = 2;
    double dx = 1.0;

    static Grid uniform(double x_min, double x_max, int n) {
        if (n < 3) throw domain_error("Grid: need at least 3 points");
        if (!(x_max > x_min)) throw domain_error("Grid: x_max must exceed x_min");
        Grid g;
        g.x_min = x_min;
        g.x_max = x_max;
        g.n = n;
        g.dx = (x_max - x_min) / (n - 1);
        return g;
    }

    double x(int i) const { return x_min + dx * i; }

    bool same_as(const Grid& o) const {
        return n == o.n && std::abs(x_min - o.x_min) < 1e-12 * (1.0 + std::abs(x_min)) &&
               std::abs(x_max - o.x_max) < 1e-12 * (1.0 + std::abs(x_max));
    }
};

/// A real function sampled on a Grid.
struct Profile {
    Grid grid;
    std::vector<double> v;

    Profile() = default;
    explicit Profile(const Grid& g) : grid(g), v(g.n, 0.0) {}
    Profile(const Grid& g, std::vector<double> values) : grid(g), v(std::move(values)) {
        if (static_cast<int>(v.size()) != g.n)
            throw domain_error("Profile: value count does not match grid");
    }

    static Profile sample(const Grid& g, const std::function<double(double)>& f) {
        Profile p(g);
        for (int i = 0; i < g.n; ++i) p.v[i] = f(g.x(i));
        return p;
    }

    double operator[](int i) const { return v[i]; }
    double& operator[](int i) { return v[i]; }
    int size() const { return static_cast<int>(v.size()); }

    bool all_finite() const {
        for (double x : v)
            if (!std::isfinite(x)) return false;
        return true;
    }
};

}  // namespace ctwave
