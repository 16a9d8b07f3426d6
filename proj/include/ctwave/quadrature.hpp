#pragma once

#include <cmath>
#include <vector>

#include "ctwave/errors.hpp"

namespace ctwave {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss–Laguerre rule for integrals of the form \int_0^\infty e^{-s} f(s) ds.
/// Nodes are the roots of L_n found by Newton iteration on the three-term
/// recurrence; weights use w_i = x_i / ((n+1) L_{n+1}(x_i))^2.
inline QuadratureRule gauss_laguerre(int n) {
    if (n < 1 || n > 256) throw domain_error("gauss_laguerre: n out of range");
    QuadratureRule q;
    q.nodes.resize(n);
    q.weights.resize(n);
    double z = 0.0;
    for (int i = 0; i < n; ++i) {
        // Stroud–Secrest starting guesses.
        if (i == 0) {
            z = 3.0 / (1.0 + 2.4 * n);
        } else if (i == 1) {
            z += 15.0 / (1.0 + 2.5 * n);
        } else {
            const double ai = i - 1;
            z += ((1.0 + 2.55 * ai) / (1.9 * ai)) * (z - q.nodes[i - 2]);
        }
        double p1 = 1.0, p2 = 0.0;
        for (int iter = 0; iter < 128; ++iter) {
            p1 = 1.0;
            p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0 - z) * p2 - j * p3) / (j + 1.0);
            }
            const double pp = n * (p1 - p2) / z;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
        }
        // One more recurrence step for L_{n+1}(z).
        const double lnp1 = ((2.0 * n + 1.0 - z) * p1 - n * p2) / (n + 1.0);
        q.nodes[i] = z;
        const double denom = (n + 1.0) * lnp1;
        q.weights[i] = z / (denom * denom);
    }
    return q;
}

}  // namespace ctwave
