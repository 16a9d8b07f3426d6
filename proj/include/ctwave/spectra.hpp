#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ctwave/errors.hpp"
#include "ctwave/grid.hpp"
#include "ctwave/numerics.hpp"
#include "ctwave/params.hpp"

namespace ctwave {

enum class EigenBC { DirichletDirichlet, NeumannDirichlet };

/// Eigenvalue problem phi'' + (c + b1(x)) phi' + (a + b2(x)) phi = lambda phi
/// on (0, L) with Dirichlet-Dirichlet or Neumann-Dirichlet boundary data.
struct EigenProblem {
    double a = 1.0;
    double c = 0.0;
    double L = 1.0;
    std::function<double(double)> b1;  ///< drift perturbation (empty = 0)
    std::function<double(double)> b2;  ///< zeroth-order perturbation (empty = 0)
    EigenBC bc = EigenBC::DirichletDirichlet;

    double eval_b1(double x) const { return b1 ? b1(x) : 0.0; }
    double eval_b2(double x) const { return b2 ? b2(x) : 0.0; }
};

/// Interval length making lambda0 the principal Dirichlet eigenvalue of
/// phi'' + c phi' + a phi = lambda phi: L = 2 pi / sqrt(4a - 4 lambda0 - c^2).
/// The eigenfunction is e^{-c x / 2} sin(pi x / L).
inline double dirichlet_length(double a, double c, double lambda0) {
    if (!(c >= 0.0)) throw domain_error("dirichlet_length: c must be nonnegative");
    const double disc = 4.0 * a - 4.0 * lambda0 - c * c;
    if (!(disc > 0.0)) throw domain_error("dirichlet_length: c^2 - 4a + 4 lambda0 must be negative");
    return 2.0 * M_PI / std::sqrt(disc);
}

/// Interval length for the Neumann-Dirichlet construction with c < 0 and
/// 0 < lambda0 < a, 4a - 4 lambda0 < c^2.
inline double neumann_dirichlet_length(double a, double c, double lambda0) {
    if (!(c < 0.0)) throw domain_error("neumann_dirichlet_length: c must be negative");
    if (!(lambda0 > 0.0 && lambda0 < a))
        throw domain_error("neumann_dirichlet_length: need 0 < lambda0 < a");
    const double disc = c * c - 4.0 * a + 4.0 * lambda0;
    if (!(disc > 0.0)) throw domain_error("neumann_dirichlet_length: need 4a - 4 lambda0 < c^2");
    const double rd = std::sqrt(disc);
    return std::log((-c + rd) / (-c - rd)) / rd;
}

/// Explicit positive eigenfunction of the Neumann-Dirichlet construction.
inline double neumann_dirichlet_eigenfunction(double a, double c, double lambda0, double x) {
    const double rd = std::sqrt(c * c - 4.0 * a + 4.0 * lambda0);
    const double ratio = (-c + rd) / (-c - rd);
    return -std::exp(0.5 * (-c + rd) * x) + ratio * std::exp(0.5 * (-c - rd) * x);
}

struct EigenPair {
    double lambda = 0.0;
    std::vector<double> phi;  ///< on the full grid 0..n-1 including boundary points
    double h = 0.0;
    bool positive = false;    ///< interior positivity of the eigenfunction
    int iterations = 0;
    std::string warning;
};

namespace detail {

struct EigenMatrix {
    std::vector<double> lower, diag, upper;  ///< tridiagonal action on the unknowns
    int offset = 0;                          ///< grid index of the first unknown
    int m = 0;                               ///< number of unknowns
};

inline EigenMatrix assemble_eigen_matrix(const EigenProblem& prob, int n) {
    const double h = prob.L / (n - 1);
    EigenMatrix em;
    const bool nd = prob.bc == EigenBC::NeumannDirichlet;
    em.offset = nd ? 0 : 1;
    em.m = nd ? n - 1 : n - 2;
    em.lower.assign(em.m, 0.0);
    em.diag.assign(em.m, 0.0);
    em.upper.assign(em.m, 0.0);
    const double ih2 = 1.0 / (h * h);
    for (int k = 0; k < em.m; ++k) {
        const int i = k + em.offset;
        const double x = i * h;
        const double w = prob.c + prob.eval_b1(x);
        if (nd && i == 0) {
            // phi'(0) = 0 via ghost symmetry: advection term vanishes.
            em.diag[k] = -2.0 * ih2 + prob.a + prob.eval_b2(x);
            em.upper[k] = 2.0 * ih2;
        } else {
            em.lower[k] = ih2 - w / (2.0 * h);
            em.diag[k] = -2.0 * ih2 + prob.a + prob.eval_b2(x);
            em.upper[k] = ih2 + w / (2.0 * h);
        }
        if (std::abs(w) * h / 2.0 >= 1.0)
            throw domain_error("assemble_eigen_matrix: drift unresolved, increase n");
    }
    return em;
}

inline void apply_eigen_matrix(const EigenMatrix& em, const std::vector<double>& x,
                               std::vector<double>& out) {
    for (int k = 0; k < em.m; ++k) {
        double acc = em.diag[k] * x[k];
        if (k > 0) acc += em.lower[k] * x[k - 1];
        if (k + 1 < em.m) acc += em.upper[k] * x[k + 1];
        out[k] = acc;
    }
}

}  // namespace detail

/// Principal eigenvalue and positive eigenfunction by inverse power iteration
/// with a Gershgorin shift. n is the total number of grid points on [0, L].
inline EigenPair principal_eigen(const EigenProblem& prob, int n) {
    if (n < 50) throw domain_error("principal_eigen: need n >= 50");
    const detail::EigenMatrix em = detail::assemble_eigen_matrix(prob, n);
    const double h = prob.L / (n - 1);

    double sigma = prob.a;
    for (int k = 0; k < em.m; ++k) sigma = std::max(sigma, em.diag[k] + 2.0 / (h * h));
    sigma += 1.0;

    // (sigma I - M) y = x
    std::vector<double> lo(em.m), di(em.m), up(em.m);
    for (int k = 0; k < em.m; ++k) {
        lo[k] = -em.lower[k];
        di[k] = sigma - em.diag[k];
        up[k] = -em.upper[k];
    }
    std::vector<double> x(em.m, 1.0), y(em.m), mx(em.m);
    TridiagonalScratch scratch;
    double lambda = 0.0, lambda_prev = kInf;
    int it = 0;
    for (; it < 5000; ++it) {
        y = x;
        scratch.solve(lo, di, up, y);
        double nrm = sup_norm(y);
        if (!(nrm > 0.0)) throw solver_error("principal_eigen: iteration vanished");
        for (double& v : y) v /= nrm;
        detail::apply_eigen_matrix(em, y, mx);
        double num = 0.0, den = 0.0;
        for (int k = 0; k < em.m; ++k) {
            num += y[k] * mx[k];
            den += y[k] * y[k];
        }
        lambda = num / den;
        x = y;
        if (std::abs(lambda - lambda_prev) < 1e-13 * (1.0 + std::abs(lambda)) && it > 3) break;
        lambda_prev = lambda;
    }
    if (it >= 5000) throw solver_error("principal_eigen: power iteration did not converge");

    EigenPair pair;
    pair.lambda = lambda;
    pair.h = h;
    pair.iterations = it + 1;
    pair.phi.assign(n, 0.0);
    double dominant = 0.0;  // signed entry of largest magnitude
    for (int k = 0; k < em.m; ++k) {
        pair.phi[k + em.offset] = x[k];
        if (std::abs(x[k]) > std::abs(dominant)) dominant = x[k];
    }
    // Normalize positive with sup norm 1 (flip if the Perron vector came out negative).
    for (double& v : pair.phi) v /= dominant;
    pair.positive = true;
    for (int k = 0; k < em.m; ++k) {
        if (!(pair.phi[k + em.offset] > 0.0)) {
            pair.positive = false;
            break;
        }
    }
    if (!pair.positive)
        pair.warning = "eigenfunction not strictly positive; possible multiplicity";
    return pair;
}

/// Independent characterization of the principal eigenvalue: evolve
/// u_t = u'' + (c + b1) u' + (a + b2) u with the problem's boundary data
/// (Crank-Nicolson) and fit the log growth rate of the L2 norm.
inline double growth_rate_estimate(const EigenProblem& prob, int n, double t0 = 10.0,
                                   double t1 = 20.0, double dt = 5e-3) {
    const detail::EigenMatrix em = detail::assemble_eigen_matrix(prob, n);
    const double h = prob.L / (n - 1);
    std::vector<double> u(em.m);
    for (int k = 0; k < em.m; ++k) {
        const double x = (k + em.offset) * h;
        u[k] = prob.bc == EigenBC::DirichletDirichlet ? std::sin(M_PI * x / prob.L)
                                                      : std::cos(0.5 * M_PI * x / prob.L);
    }
    std::vector<double> lo(em.m), di(em.m), up(em.m), rhs(em.m);
    for (int k = 0; k < em.m; ++k) {
        lo[k] = -0.5 * dt * em.lower[k];
        di[k] = 1.0 - 0.5 * dt * em.diag[k];
        up[k] = -0.5 * dt * em.upper[k];
    }
    TridiagonalScratch scratch;
    const auto l2 = [&]() {
        double s = 0.0;
        for (double v : u) s += v * v;
        return std::sqrt(s * h);
    };
    double log_offset = 0.0;
    double log_at_t0 = 0.0;
    const long steps = std::lround(t1 / dt);
    const long steps_t0 = std::lround(t0 / dt);
    for (long s = 0; s < steps; ++s) {
        for (int k = 0; k < em.m; ++k) {
            double acc = (1.0 + 0.5 * dt * em.diag[k]) * u[k];
            if (k > 0) acc += 0.5 * dt * em.lower[k] * u[k - 1];
            if (k + 1 < em.m) acc += 0.5 * dt * em.upper[k] * u[k + 1];
            rhs[k] = acc;
        }
        scratch.solve(lo, di, up, rhs);
        u = rhs;
        const double nrm = l2();
        if (nrm > 1e50 || nrm < 1e-50) {
            log_offset += std::log(nrm);
            for (double& v : u) v /= nrm;
        }
        if (s + 1 == steps_t0) log_at_t0 = log_offset + std::log(l2());
    }
    const double log_at_t1 = log_offset + std::log(l2());
    return (log_at_t1 - log_at_t0) / (t1 - t0);
}

/// One epsilon-level of the nonexistence certificate.
struct CertificateRun {
    double eps = 0.0;
    double x_eps = 0.0;            ///< left end of the smallness window
    double lambda_eps = 0.0;       ///< principal eigenvalue of the perturbed problem
    double residual_sup = 0.0;     ///< sup |L U| over the window (stationarity of the claim)
    double positive_on_window = false;
    bool contradiction = false;    ///< lambda_eps > 0 while the claim forces lambda_eps <= 0
    bool inconclusive = false;
    std::string note;
};

/// Certificate that no traveling wave of speed c < 2 sqrt(a) can connect
/// a/b to 0: the perturbed principal eigenvalue on a smallness window is
/// positive, while any genuine profile serves as a positive test function
/// forcing it nonpositive.
struct NonexistenceReport {
    bool applicable = false;
    char route = 'D';              ///< 'D' Dirichlet (0 <= c), 'N' Neumann-Dirichlet (c < 0)
    double lambda0 = 0.0;
    double L = 0.0;
    double lambda_unperturbed = 0.0;
    std::vector<CertificateRun> runs;
    bool contradiction_all = false;
};

inline NonexistenceReport nonexistence_certificate(const Profile& U, const Profile& V,
                                                   const Profile& Vp, double c,
                                                   const ModelParams& p,
                                                   std::vector<double> eps_list = {1e-2, 1e-3},
                                                   int n_eig = 2001) {
    p.validate();
    NonexistenceReport rep;
    if (!(c < 2.0 * std::sqrt(p.a))) return rep;  // certificate only applies below 2 sqrt(a)
    rep.applicable = true;

    if (c >= 0.0) {
        rep.route = 'D';
        rep.lambda0 = 0.5 * (p.a - 0.25 * c * c);
        rep.L = dirichlet_length(p.a, c, rep.lambda0);
    } else {
        rep.route = 'N';
        rep.lambda0 = p.a - 0.125 * c * c;
        rep.L = neumann_dirichlet_length(p.a, c, rep.lambda0);
    }

    {
        EigenProblem base{p.a, c, rep.L, nullptr, nullptr,
                          rep.route == 'D' ? EigenBC::DirichletDirichlet
                                           : EigenBC::NeumannDirichlet};
        rep.lambda_unperturbed = principal_eigen(base, n_eig).lambda;
    }

    const Grid& g = U.grid;
    // Shared copies for the perturbation closures.
    auto vals_V = std::make_shared<std::vector<double>>(V.v);
    auto vals_Vp = std::make_shared<std::vector<double>>(Vp.v);
    auto vals_U = std::make_shared<std::vector<double>>(U.v);

    bool all = !eps_list.empty();
    for (double eps : eps_list) {
        CertificateRun run;
        run.eps = eps;
        // Smallest x from the right where U, V, |V'| all stay below eps.
        int i_eps = g.n;
        for (int i = g.n - 1; i >= 0; --i) {
            if (U.v[i] < eps && V.v[i] < eps && std::abs(Vp.v[i]) < eps)
                i_eps = i;
            else
                break;
        }
        if (i_eps >= g.n) {
            run.inconclusive = true;
            run.note = "profile never enters the eps-smallness regime";
            rep.runs.push_back(run);
            all = false;
            continue;
        }
        double x0 = g.x(i_eps);
        if (rep.route == 'N') {
            // Advance to a point of strict decrease.
            int j = i_eps;
            while (j + 1 < g.n && !(U.v[j + 1] < U.v[j])) ++j;
            x0 = g.x(j);
        }
        if (x0 + rep.L > g.x_max) {
            run.inconclusive = true;
            run.note = "profile does not decay early enough to fit the window";
            rep.runs.push_back(run);
            all = false;
            continue;
        }
        run.x_eps = x0;

        const double xmin = g.x_min, dx = g.dx;
        const double chi = p.chi, tauc = p.tau * c, bmc = p.b - p.chi;
        EigenProblem prob;
        prob.a = p.a;
        prob.c = c;
        prob.L = rep.L;
        prob.bc = rep.route == 'D' ? EigenBC::DirichletDirichlet : EigenBC::NeumannDirichlet;
        prob.b1 = [vals_Vp, x0, xmin, dx, chi](double x) {
            return -chi * interp_uniform(x0 + x, xmin, dx, *vals_Vp);
        };
        prob.b2 = [vals_V, vals_Vp, vals_U, x0, xmin, dx, chi, tauc, bmc](double x) {
            const double v = interp_uniform(x0 + x, xmin, dx, *vals_V);
            const double vp = interp_uniform(x0 + x, xmin, dx, *vals_Vp);
            const double u = interp_uniform(x0 + x, xmin, dx, *vals_U);
            return -chi * (v - tauc * vp) - bmc * u;
        };
        run.lambda_eps = principal_eigen(prob, n_eig).lambda;

        // Test-function side: the claimed profile itself, restricted to the
        // window, is positive with admissible boundary values and satisfies
        // the operator equation with equality if it is genuinely stationary.
        run.positive_on_window = true;
        double res_sup = 0.0;
        const int i_lo = std::max(1, i_eps);
        const int i_hi = std::min(g.n - 2, static_cast<int>((x0 + rep.L - xmin) / dx));
        for (int i = i_lo; i <= i_hi; ++i) {
            if (!(U.v[i] > 0.0)) run.positive_on_window = false;
            const double d1 = (U.v[i + 1] - U.v[i - 1]) / (2.0 * dx);
            const double d2 = (U.v[i + 1] - 2.0 * U.v[i] + U.v[i - 1]) / (dx * dx);
            const double r = d2 + (c - chi * Vp.v[i]) * d1 +
                             (p.a - chi * (V.v[i] - tauc * Vp.v[i]) - bmc * U.v[i]) * U.v[i];
            res_sup = std::max(res_sup, std::abs(r));
        }
        run.residual_sup = res_sup;
        run.contradiction = run.lambda_eps > 0.0 && run.positive_on_window;
        all = all && run.contradiction;
        rep.runs.push_back(run);
    }
    rep.contradiction_all = all;
    return rep;
}

}  // namespace ctwave
