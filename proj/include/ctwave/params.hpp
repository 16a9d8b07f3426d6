#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ctwave/errors.hpp"
#include "ctwave/rootfind.hpp"

namespace ctwave {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Model coefficients of the chemotaxis system
///   u_t = u_xx - chi (u v_x)_x + u (a - b u),   tau v_t = v_xx - v + u.
struct ModelParams {
    double a = 1.0;    ///< logistic growth rate (> 0)
    double b = 1.0;    ///< logistic damping (> 0)
    double chi = 0.0;  ///< chemotaxis sensitivity (>= 0)
    double tau = 0.0;  ///< chemical diffusion time constant (>= 0)

    void validate() const {
        if (!(a > 0.0)) throw domain_error("ModelParams: a must be positive");
        if (!(b > 0.0)) throw domain_error("ModelParams: b must be positive");
        if (!(chi >= 0.0)) throw domain_error("ModelParams: chi must be nonnegative");
        if (!(tau >= 0.0)) throw domain_error("ModelParams: tau must be nonnegative");
    }

    /// Global-boundedness hypothesis: 0 <= chi*tau*c/2 < b - chi.
    bool boundedness_hypothesis(double c) const {
        const double lhs = 0.5 * chi * tau * c;
        return lhs >= 0.0 && lhs < b - chi;
    }

    /// Hypothesis for convergence to the constant state: 0 <= chi*tau*c < b - 2*chi.
    bool stability_hypothesis(double c) const {
        const double lhs = chi * tau * c;
        return lhs >= 0.0 && lhs < b - 2.0 * chi;
    }
};

/// Dispersion relation c_mu = mu + a/mu.
inline double wave_speed(double mu, double a) {
    if (!(mu > 0.0)) throw domain_error("wave_speed: mu must be positive");
    if (!(a > 0.0)) throw domain_error("wave_speed: a must be positive");
    return mu + a / mu;
}

/// Upper wave-number bound mu_tau = min{ sqrt(a), sqrt((1+tau*a)/(1-tau)_+) }.
/// For tau >= 1 the positive part vanishes and the bound collapses to sqrt(a).
inline double mu_max(double a, double tau) {
    if (!(a > 0.0)) throw domain_error("mu_max: a must be positive");
    if (!(tau >= 0.0)) throw domain_error("mu_max: tau must be nonnegative");
    const double root_a = std::sqrt(a);
    const double one_minus_tau = 1.0 - tau;
    if (one_minus_tau <= 0.0) return root_a;
    return std::min(root_a, std::sqrt((1.0 + tau * a) / one_minus_tau));
}

/// Wave number mu with its derived quantities.
struct WaveNumbers {
    double mu = 0.0;
    double c_mu = 0.0;    ///< mu + a/mu
    double mu_tau = 0.0;  ///< admissible upper bound for mu
    double denom = 0.0;   ///< D(mu) = 1 + tau*mu*c_mu - mu^2

    static WaveNumbers from_mu(double mu, const ModelParams& p) {
        p.validate();
        WaveNumbers w;
        w.mu = mu;
        w.mu_tau = mu_max(p.a, p.tau);
        w.c_mu = wave_speed(mu, p.a);
        w.denom = 1.0 + p.tau * mu * w.c_mu - mu * mu;
        return w;
    }
};

/// The two constraint expressions from the admissibility condition: the pair
/// (G1, G2) is compared against (b - chi)/chi.
///
///   G1 = 1 + tau*c_mu
///   G2 = (mu + tau*c_mu)/sqrt(D) + mu*(mu + tau*c_mu)/D,  D = 1 + tau*mu*c_mu - mu^2
struct ConstraintPair {
    double g1 = 0.0;
    double g2 = 0.0;
};

inline ConstraintPair constraint_values(double mu, const ModelParams& p) {
    const double mt = mu_max(p.a, p.tau);
    if (!(mu > 0.0) || !(mu < mt))
        throw domain_error("constraint_values: mu outside (0, mu_tau)");
    const double c = wave_speed(mu, p.a);
    const double denom = 1.0 + p.tau * mu * c - mu * mu;
    if (!(denom > 0.0)) throw domain_error("constraint_values: denominator not positive");
    ConstraintPair g;
    g.g1 = 1.0 + p.tau * c;
    const double s = mu + p.tau * c;
    g.g2 = s / std::sqrt(denom) + mu * s / denom;
    return g;
}

/// Admissibility of (mu, chi): chi*G1 < b - chi (strict) and chi*G2 <= b - chi.
/// Written multiplied through by chi so that chi = 0 is handled without
/// dividing by zero.
inline bool admissible(double mu, const ModelParams& p) {
    const ConstraintPair g = constraint_values(mu, p);
    const double rhs = p.b - p.chi;
    return p.chi * g.g1 < rhs && p.chi * g.g2 <= rhs;
}

/// Constraint infimum m_tau = inf over mu in (0, mu_tau) of max{G1, G2},
/// by dense scan plus golden-section refinement around the scan minimum.
inline double m_tau(double a, double tau, int scan_points = 10000, double rel_tol = 1e-10) {
    if (!(a > 0.0)) throw domain_error("m_tau: a must be positive");
    if (!(tau > 0.0)) throw domain_error("m_tau: tau must be positive");
    ModelParams p{a, 1.0, 0.0, tau};
    const double mt = mu_max(a, tau);
    const auto h = [&](double mu) {
        const ConstraintPair g = constraint_values(mu, p);
        return std::max(g.g1, g.g2);
    };
    const double lo = mt * 1e-12;
    const double hi = mt * (1.0 - 1e-12);
    double best = kInf;
    int best_j = 1;
    for (int j = 1; j <= scan_points; ++j) {
        const double mu = lo + (hi - lo) * j / (scan_points + 1.0);
        const double val = h(mu);
        if (val < best) {
            best = val;
            best_j = j;
        }
    }
    const double step = (hi - lo) / (scan_points + 1.0);
    const double bl = std::max(lo, lo + step * (best_j - 1));
    const double br = std::min(hi, lo + step * (best_j + 1));
    const double mu_min = golden_minimize(h, bl, br, rel_tol);
    return std::min(best, h(mu_min));
}

/// Chemotaxis threshold chi*_tau = b / (1 + m_tau).
inline double chi_star(const ModelParams& p) {
    p.validate();
    if (!(p.tau > 0.0)) throw domain_error("chi_star: tau must be positive");
    return p.b / (1.0 + m_tau(p.a, p.tau));
}

/// Admissible wave-number window and the speed interval it generates.
struct SpeedRange {
    double m_tau = 0.0;            ///< constraint infimum
    double chi_star = 0.0;         ///< threshold b/(1+m_tau)
    double mu_tilde_star2 = 0.0;   ///< infimum where max{G1,G2} < (b-chi)/chi
    std::vector<double> crossings; ///< ordered roots of G2 = (b-chi)/chi in (0, mu_tau)
    double mu_tau_bound = 0.0;     ///< mu_tau
    double mu_star = 0.0;          ///< mu*
    double mu_star2 = 0.0;         ///< mu**
    double c_star = 0.0;           ///< c* = c_{mu*}
    double c_star2 = 0.0;          ///< c** = c_{mu**}, +inf when mu** == 0
    bool c_star2_unbounded = false;
    bool consistent = true;
    std::vector<std::string> notes;
};

/// Computes the window (mu**, mu*) and speeds (c*, c**) for 0 < chi < chi*_tau.
/// Roots of G2 = (b-chi)/chi are located by a uniform sign-change scan
/// refined by bisection; the infima are resolved on the same structure.
inline SpeedRange admissible_window(const ModelParams& p, int scan_cells = 10000,
                                    double root_tol = 1e-12) {
    p.validate();
    if (!(p.tau > 0.0)) throw domain_error("admissible_window: tau must be positive");
    SpeedRange r;
    r.m_tau = m_tau(p.a, p.tau);
    r.chi_star = p.b / (1.0 + r.m_tau);
    if (!(p.chi > 0.0) || !(p.chi < r.chi_star))
        throw domain_error("admissible_window: chi outside (0, chi*_tau)");
    const double rhs = (p.b - p.chi) / p.chi;
    const double mt = mu_max(p.a, p.tau);
    r.mu_tau_bound = mt;

    const auto g2 = [&](double mu) { return constraint_values(mu, p).g2; };
    const auto g1 = [&](double mu) { return constraint_values(mu, p).g1; };
    const auto f2 = [&](double mu) { return g2(mu) - rhs; };

    const double lo = mt * 1e-13;
    const double hi = mt * (1.0 - 1e-13);

    // Crossing set of G2 = rhs.
    double prev_mu = lo;
    double prev_f = f2(lo);
    if (prev_f < 0.0)
        r.notes.push_back("G2 already below threshold at the scan floor; near-zero crossing unresolved");
    for (int j = 1; j <= scan_cells; ++j) {
        const double mu = lo + (hi - lo) * j / scan_cells;
        const double fj = f2(mu);
        if (prev_f == 0.0) {
            r.crossings.push_back(prev_mu);
        } else if (prev_f * fj < 0.0) {
            const double root = bisect(f2, prev_mu, mu, root_tol);
            r.crossings.push_back(root);
            const double h = std::max(1e-9, root * 1e-9);
            const double slope = (f2(std::min(root + h, hi)) - f2(std::max(root - h, lo))) / (2.0 * h);
            if (std::abs(slope) < 1e-8)
                r.notes.push_back("near-double root of G2 at mu = " + std::to_string(root));
        }
        prev_mu = mu;
        prev_f = fj;
    }

    // Interval structure: endpoints 0 = m_0 < m_1 < ... < m_K < m_{K+1} = mu_tau,
    // each open interval labeled by whether G2 < rhs on it.
    std::vector<double> ends;
    ends.push_back(0.0);
    for (double c : r.crossings) ends.push_back(c);
    ends.push_back(mt);
    const int intervals = static_cast<int>(ends.size()) - 1;
    std::vector<bool> below(intervals, false);
    for (int k = 0; k < intervals; ++k) {
        const double mid = std::min(hi, std::max(lo, 0.5 * (ends[k] + ends[k + 1])));
        below[k] = g2(mid) < rhs;
    }

    // G1 is strictly decreasing on (0, mu_tau]; find where it drops below rhs.
    double mu_g1 = 0.0;
    if (g1(hi) - rhs >= 0.0) {
        r.consistent = false;
        r.notes.push_back("G1 >= threshold on the whole interval; window empty");
        return r;
    }
    if (g1(lo) - rhs > 0.0) {
        mu_g1 = bisect([&](double mu) { return g1(mu) - rhs; }, lo, hi, root_tol);
    }

    // mu_tilde** = inf { mu > mu_g1 : G2(mu) < rhs }.
    r.mu_tilde_star2 = -1.0;
    for (int k = 0; k < intervals; ++k) {
        if (!below[k]) continue;
        const double start = std::max(ends[k], mu_g1);
        if (start < ends[k + 1]) {
            r.mu_tilde_star2 = start;
            break;
        }
    }
    if (r.mu_tilde_star2 < 0.0) {
        r.consistent = false;
        r.notes.push_back("no mu satisfies both constraints strictly; window empty");
        return r;
    }

    // i* = largest interval satisfying G2 < rhs throughout with
    // mu_tilde** <= right endpoint; mu* is that right endpoint.
    int i_star = -1;
    for (int k = intervals - 1; k >= 0; --k) {
        if (below[k] && r.mu_tilde_star2 <= ends[k + 1]) {
            i_star = k;
            break;
        }
    }
    if (i_star < 0) {
        r.consistent = false;
        r.notes.push_back("no admissible interval found despite chi < chi*_tau");
        return r;
    }
    r.mu_star = ends[i_star + 1];

    // mu** = inf over left endpoints mu_bar in (mu_tilde**, mu*) with
    // G2 <= rhs on [mu_bar, mu*]: walk left from i* while intervals stay below.
    double w = 0.0;
    for (int k = i_star; k >= 0; --k) {
        if (!below[k]) {
            w = ends[k + 1];
            break;
        }
    }
    r.mu_star2 = std::max(w, r.mu_tilde_star2);

    r.c_star = wave_speed(r.mu_star, p.a);
    if (r.mu_star2 > 0.0) {
        r.c_star2 = wave_speed(r.mu_star2, p.a);
    } else {
        r.c_star2 = kInf;
        r.c_star2_unbounded = true;
        r.notes.push_back("mu** resolved to 0; c** reported as unbounded");
    }

    if (!(r.mu_star2 >= 0.0 && r.mu_star2 < r.mu_star && r.mu_star <= mt)) {
        r.consistent = false;
        r.notes.push_back("window ordering 0 <= mu** < mu* <= mu_tau violated");
    }
    if (!(r.c_star >= 2.0 * std::sqrt(p.a) - 1e-12 && r.c_star < r.c_star2)) {
        r.consistent = false;
        r.notes.push_back("speed ordering 2 sqrt(a) <= c* < c** violated");
    }
    return r;
}

/// Unique root of mu + a/mu = c in (0, mu_tau): mu = (c - sqrt(c^2 - 4a))/2.
inline double mu_from_speed(double c, const ModelParams& p, bool allow_boundary = false) {
    p.validate();
    const double disc = c * c - 4.0 * p.a;
    if (disc < 0.0) throw domain_error("mu_from_speed: c < 2 sqrt(a), no real root");
    const double mu = 0.5 * (c - std::sqrt(disc));
    const double mt = mu_max(p.a, p.tau);
    if (mu < mt) return mu;
    if (allow_boundary && mu <= mt * (1.0 + 1e-12)) return std::min(mu, mt);
    throw domain_error("mu_from_speed: root not inside (0, mu_tau); c <= c_{mu_tau}");
}

/// Sufficient smallness bound on chi guaranteeing mu* = mu_tau = sqrt(a) and
/// c* = 2 sqrt(a): chi < b / (1 + max{G1(mu_tau), G2(mu_tau)}).
/// Requires 0 < a < (1+tau*a)/(1-tau)_+ so that mu_tau = sqrt(a).
inline double remark_sufficient_chi(const ModelParams& p) {
    p.validate();
    const double pos_part = std::max(1.0 - p.tau, 0.0);
    const double cap = pos_part > 0.0 ? (1.0 + p.tau * p.a) / pos_part : kInf;
    if (!(p.a < cap)) throw domain_error("remark_sufficient_chi: requires a < (1+tau*a)/(1-tau)_+");
    const double ra = std::sqrt(p.a);
    const double g1 = 1.0 + 2.0 * p.tau * ra;
    const double den = 1.0 + 2.0 * p.tau * p.a - p.a;  // D at mu = sqrt(a)
    if (!(den > 0.0)) throw domain_error("remark_sufficient_chi: degenerate denominator");
    const double g2 = ra * (1.0 + 2.0 * p.tau) / std::sqrt(den) + p.a * (1.0 + 2.0 * p.tau) / den;
    return p.b / (1.0 + std::max(g1, g2));
}

}  // namespace ctwave
