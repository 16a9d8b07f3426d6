// Acceptance suite: end-to-end checks of the laboratory against closed forms
// and independent oracles, one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ctwave/envelope.hpp"
#include "ctwave/field.hpp"
#include "ctwave/params.hpp"
#include "ctwave/spectra.hpp"
#include "ctwave/wave.hpp"
#include "support/oracles.hpp"

using namespace ctwave;

namespace {

struct Criterion {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

bool g_all_pass = true;

void run_criterion(int number, const std::string& name, double budget_s,
                   const std::function<Criterion()>& body) {
    const auto t0 = Clock::now();
    Criterion c;
    try {
        c = body();
    } catch (const std::exception& e) {
        c.pass = false;
        c.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    std::printf("[%s] %2d. %-28s %s (%.2fs / budget %.0fs)\n", c.pass ? "PASS" : "FAIL", number,
                name.c_str(), c.detail.c_str(), secs, budget_s);
    std::fflush(stdout);
    g_all_pass = g_all_pass && c.pass;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

// 1. Exponential field identity against the closed form e^{-mu x}/(1+tau mu c - mu^2).
Criterion exponential_field_identity() {
    const double a = 1.0, tau = 0.5, mu = 0.5;
    const double c = wave_speed(mu, a);
    const double denom = 1.0 + tau * mu * c - mu * mu;
    const Grid g = Grid::uniform(-40.0, 40.0, 4000);
    const Profile u = Profile::sample(g, [&](double x) { return std::exp(-mu * x); });
    const Profile V = solve_field_ode(u, tau, c, FieldBC{-mu, mu});
    double worst = 0.0;
    for (int i = 0; i < g.n; ++i) {
        const double e = std::exp(-mu * g.x(i)) / denom;
        worst = std::max(worst, std::abs(V.v[i] - e) / (1.0 + std::abs(e)));
    }
    const double tol = 10.0 * g.dx * g.dx;
    return {worst <= tol, "sup rel err " + fmt(worst) + " vs tol " + fmt(tol)};
}

// 2. Kernel quadrature vs tridiagonal solve on random bounded smooth inputs.
Criterion cross_method_agreement() {
    std::mt19937 rng(424242);
    const Grid g = Grid::uniform(-20.0, 20.0, 1601);
    const double tol = std::max(1e-3, 10.0 * g.dx * g.dx);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const Profile u = oracles::random_smooth_profile(g, rng);
        const Profile v_ode = solve_field_ode(u, 0.5, 2.5);
        const Profile v_ker = solve_field_kernel(u, 0.5, 2.5);
        worst = std::max(worst, sup_diff(v_ode.v, v_ker.v));
    }
    return {worst <= tol, "worst of 20 inputs " + fmt(worst) + " vs tol " + fmt(tol)};
}

// 3. chi*_tau climbs monotonically to b/2 as tau decreases.
Criterion threshold_limits() {
    const double b = 1.0;
    double prev = 0.0;
    bool monotone = true;
    double last = 0.0;
    for (double tau : {0.5, 0.1, 0.02, 0.004}) {
        const ModelParams p{1.0, b, 0.0, tau};
        last = chi_star(p);
        monotone = monotone && last > prev && last < b / 2.0;
        prev = last;
    }
    const bool close = std::abs(last - b / 2.0) <= 0.02 * (b / 2.0);
    return {monotone && close,
            "chi*(tau=0.004) = " + fmt(last) + (monotone ? ", monotone" : ", NOT monotone")};
}

// 4. Speed-window limits as chi -> 0: c* -> 2 sqrt(a), c** grows beyond 10.
Criterion speed_window_limits() {
    ModelParams p{1.0, 1.0, 0.0, 0.5};
    double prev_cstar = kInf;
    bool monotone = true, consistent = true;
    double last_cstar = 0.0, last_cstar2 = 0.0;
    for (double chi : {1e-1, 1e-2, 1e-3, 1e-4}) {
        p.chi = chi;
        const SpeedRange r = admissible_window(p);
        consistent = consistent && r.consistent;
        monotone = monotone && r.c_star <= prev_cstar + 1e-10;
        prev_cstar = r.c_star;
        last_cstar = r.c_star;
        last_cstar2 = r.c_star2;
    }
    const bool near = std::abs(last_cstar - 2.0) <= 0.01 * 2.0;
    const bool big = last_cstar2 > 10.0;
    return {monotone && consistent && near && big,
            "c*(1e-4) = " + fmt(last_cstar) + ", c**(1e-4) = " + fmt(last_cstar2)};
}

// 5. Four envelope verifiers pass on 10 admissible pairs; replacing b by b/10
//    must break the suite (soundness).
Criterion verifier_suite() {
    ModelParams base{1.0, 1.0, 0.0, 0.5};
    const double cs = chi_star(base);
    const Grid g = Grid::uniform(-40.0, 40.0, 4001);
    bool all = true;
    double worst_margin = -kInf;
    ModelParams last_p = base;
    double last_mu = 0.5;
    for (int j = 0; j < 10; ++j) {
        ModelParams p = base;
        p.chi = 0.8 * cs * std::pow(0.04, j / 9.0);
        const SpeedRange r = admissible_window(p);
        const double mu = 0.5 * (std::max(r.mu_star2, 1e-3) + r.mu_star);
        const Envelope env = build_envelope(p, mu, std::nullopt, g.dx);
        const Profile u_field = env.sample_U_plus(g);
        for (const VerifierReport& rep :
             {verify_super_constant(env, u_field, p), verify_super_phi(env, u_field, p),
              verify_sub(env, u_field, p),
              static_cast<VerifierReport>(verify_sub_shifted(env, u_field, p))}) {
            all = all && rep.pass;
            worst_margin = std::max(worst_margin, rep.worst - rep.tol);
        }
        last_p = p;
        last_mu = mu;
    }
    // Soundness: same envelope, b shrunk tenfold, the suite must fail.
    const Envelope env = build_envelope(last_p, last_mu, std::nullopt, g.dx);
    ModelParams broken = last_p;
    broken.b = last_p.b / 10.0;
    const Profile u_field = env.sample_U_plus(g);
    const bool broken_fails = !verify_super_phi(env, u_field, broken).pass ||
                              !verify_super_constant(env, u_field, broken).pass;
    return {all && broken_fails, std::string("10 pairs x 4 verifiers, worst margin ") +
                                     fmt(worst_margin) +
                                     (broken_fails ? ", soundness ok" : ", soundness FAILED")};
}

// 6. Wave construction at a speed inside (c*, c**): convergence, left state,
//    decay rate, and second-order residual decay under grid refinement.
Criterion wave_construction() {
    ModelParams p{1.0, 1.0, 0.01, 0.5};
    const SpeedRange r = admissible_window(p);
    if (!r.consistent) return {false, "window inconsistent"};
    const double c = r.c_star2_unbounded ? 2.0 * r.c_star : 0.5 * (r.c_star + r.c_star2);
    const double mu = mu_from_speed(c, p);

    // Tolerances tightened below the spatial error so the refinement ratio
    // measures discretization, not the solver's stopping floor.
    WaveOptions opt;
    opt.tol_outer = 1e-8;
    opt.tol_inner = 1e-10;
    const Grid g_base = detail::default_wave_grid(p, c, mu);
    opt.grid = g_base;
    const WaveProfile wp = fixed_point_wave(p, c, opt);

    const Envelope env = build_envelope(p, mu, std::nullopt, g_base.dx);
    const double tol = 50.0 * g_base.dx * g_base.dx * (1.0 + env.k.C0 * env.k.C0);
    const bool left_ok = std::abs(wp.left_state - 1.0) <= 0.01;
    const bool decay_ok = std::abs(wp.decay_exponent - mu) <= 0.02 * mu;
    const bool res_ok = wp.residual_norm <= tol;

    WaveOptions fine = opt;
    fine.grid = Grid::uniform(g_base.x_min, g_base.x_max, 2 * g_base.n - 1);
    const WaveProfile wp2 = fixed_point_wave(p, c, fine);
    const double ratio = wp.residual_norm / std::max(wp2.residual_norm, 1e-300);
    const bool refine_ok = ratio >= 3.5;

    return {wp.converged && left_ok && decay_ok && res_ok && refine_ok,
            "c = " + fmt(c) + ", left " + fmt(wp.left_state) + ", rate " +
                fmt(wp.decay_exponent) + " (mu " + fmt(mu) + "), residual " +
                fmt(wp.residual_norm) + " -> x" + fmt(ratio) + " on refine"};
}

// 7. chi = 0 wave against an independent shooting integration of the
//    chemotaxis-free front equation.
Criterion kpp_oracle_equivalence() {
    ModelParams p{1.0, 1.0, 0.0, 0.5};
    WaveOptions opt;
    opt.grid = Grid::uniform(-40.0, 40.0, 4001);
    const WaveProfile wp = fixed_point_wave(p, 2.5, opt);
    const oracles::FrontTable oracle = oracles::kpp_shooting(1.0, 1.0, 2.5);
    double x_half = 0.0;
    for (int i = 0; i + 1 < wp.U.size(); ++i) {
        if (wp.U.v[i] >= 0.5 && wp.U.v[i + 1] < 0.5) {
            const double frac = (wp.U.v[i] - 0.5) / (wp.U.v[i] - wp.U.v[i + 1]);
            x_half = wp.U.grid.x(i) + frac * wp.U.grid.dx;
            break;
        }
    }
    double worst = 0.0;
    for (int i = 0; i < wp.U.size(); ++i) {
        const double xr = wp.U.grid.x(i) - x_half;
        if (xr < oracle.x.front() || xr > oracle.x.back()) continue;
        worst = std::max(worst, std::abs(wp.U.v[i] - oracle.eval(xr)));
    }
    return {worst <= 1e-3, "sup err vs shooting " + fmt(worst)};
}

// 8. Global-boundedness estimate along the coupled evolution.
Criterion boundedness_estimate() {
    ModelParams p{1.0, 1.0, 0.2, 0.5};
    const double c = 1.0;
    if (!p.boundedness_hypothesis(c)) return {false, "hypothesis violated by test params"};
    const Grid g = Grid::uniform(-40.0, 40.0, 2001);
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> unif(-0.1, 0.1);
    const Profile u0 = Profile::sample(g, [&](double) { return 3.0 * (1.0 + unif(rng)); });
    const double bound = std::max(sup_norm(u0.v), p.a / (p.b - p.chi - 0.5 * p.chi * c * p.tau));
    const CoupledTrajectory traj = evolve_coupled(u0, p, c, 100.0);
    double worst = -kInf;
    for (double s : traj.sup_u) worst = std::max(worst, s - bound);
    for (double s : traj.sup_v) worst = std::max(worst, s - bound);
    return {worst <= 1e-3, "max excess over bound " + fmt(worst)};
}

// 9. Stability of (a/b, a/b) under the stricter hypothesis.
Criterion stability_estimate() {
    ModelParams p{1.0, 1.0, 0.1, 0.5};
    const double c = 1.0;
    if (!p.stability_hypothesis(c)) return {false, "hypothesis violated by test params"};
    const Grid g = Grid::uniform(-40.0, 40.0, 2001);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> unif(-0.1, 0.1);
    const Profile u0 = Profile::sample(g, [&](double) { return 3.0 * (1.0 + unif(rng)); });
    const CoupledTrajectory traj = evolve_coupled(u0, p, c, 200.0);
    double du = 0.0, dv = 0.0;
    for (int i = 0; i < g.n; ++i) {
        du = std::max(du, std::abs(traj.u_final.v[i] - 1.0));
        dv = std::max(dv, std::abs(traj.v_final.v[i] - 1.0));
    }
    return {du + dv <= 1e-3, "final |u-a/b| + |v-a/b| = " + fmt(du + dv)};
}

// 10. Eigenvalue constructions against their closed forms.
Criterion eigenvalue_closed_forms() {
    EigenProblem dd{1.0, 0.0, 2.0 * M_PI, nullptr, nullptr, EigenBC::DirichletDirichlet};
    const double lam_dd = principal_eigen(dd, 2000).lambda;
    const bool dd_ok = std::abs(lam_dd - 0.75) <= 1e-4;

    const double L = neumann_dirichlet_length(1.0, -1.0, 0.9);
    const bool L_ok = std::abs(L - 2.66393) <= 1e-3;
    EigenProblem nd{1.0, -1.0, L, nullptr, nullptr, EigenBC::NeumannDirichlet};
    const double lam_nd = principal_eigen(nd, 2000).lambda;
    const bool nd_ok = std::abs(lam_nd - 0.9) <= 1e-3;

    return {dd_ok && L_ok && nd_ok, "lambda_DD = " + fmt(lam_dd) + ", L_ND = " + fmt(L) +
                                        ", lambda_ND = " + fmt(lam_nd)};
}

// 11. Nonexistence certificate trips on a synthetic sub-minimal-speed profile.
Criterion nonexistence_certificate_check() {
    ModelParams p{1.0, 1.0, 0.1, 0.5};
    const double c = 1.0;
    const Grid g = Grid::uniform(-40.0, 40.0, 4001);
    const Profile U = Profile::sample(g, [&](double x) { return 0.5 * (1.0 - std::tanh(x)); });
    const Profile V = solve_field_ode(U, p.tau, c);
    const Profile Vp = field_derivative(V);
    const NonexistenceReport rep = nonexistence_certificate(U, V, Vp, c, p, {1e-2, 1e-3});
    if (!rep.applicable) return {false, "certificate not applicable"};
    bool ok = rep.contradiction_all && rep.runs.size() == 2;
    std::string detail = "lambda_eps =";
    for (const auto& run : rep.runs) {
        ok = ok && run.lambda_eps > 0.0 && run.contradiction;
        detail += " " + fmt(run.lambda_eps);
    }
    return {ok, detail + " (both > 0, test-function side forces <= 0)"};
}

// 12. Spreading speed of compact data stays above 2 sqrt(a) (within 5%).
Criterion front_speed_floor() {
    const double floor = 2.0 * std::sqrt(1.0) * 0.95;
    std::string detail = "speeds:";
    bool ok = true;
    for (double chi : {0.0, 0.01}) {
        ModelParams p{1.0, 1.0, chi, 0.5};
        const Grid g = Grid::uniform(-60.0, 160.0, 2201);
        const Profile u0 = Profile::sample(g, [](double x) {
            const double s = 1.0 - (x / 5.0) * (x / 5.0);
            return s > 0.0 ? s : 0.0;
        });
        const CoupledTrajectory traj = evolve_coupled(u0, p, 0.0, 60.0);
        const FrontSpeedResult f = front_speed(traj, 1e-2);
        ok = ok && !f.truncated && f.speed >= floor;
        detail += " " + fmt(f.speed);
    }
    return {ok, detail + " vs floor " + fmt(floor)};
}

}  // namespace

int main() {
    std::printf("ctwave acceptance suite\n");
    run_criterion(1, "exponential-field-identity", 1, exponential_field_identity);
    run_criterion(2, "cross-method-agreement", 30, cross_method_agreement);
    run_criterion(3, "threshold-limits", 5, threshold_limits);
    run_criterion(4, "speed-window-limits", 10, speed_window_limits);
    run_criterion(5, "verifier-suite", 20, verifier_suite);
    run_criterion(6, "wave-construction", 180, wave_construction);
    run_criterion(7, "kpp-oracle-equivalence", 60, kpp_oracle_equivalence);
    run_criterion(8, "boundedness-estimate", 120, boundedness_estimate);
    run_criterion(9, "stability-estimate", 180, stability_estimate);
    run_criterion(10, "eigenvalue-closed-forms", 10, eigenvalue_closed_forms);
    run_criterion(11, "nonexistence-certificate", 30, nonexistence_certificate_check);
    run_criterion(12, "front-speed-floor", 300, front_speed_floor);
    std::printf(g_all_pass ? "acceptance: ALL CRITERIA PASSED\n"
                           : "acceptance: FAILURES PRESENT\n");
    return g_all_pass ? 0 : 1;
}
