#pragma once

#include <algorithm>
#include <cmath>
#include <iostream>
#include <optional>
#include <vector>

#include "ctwave/envelope.hpp"
#include "ctwave/errors.hpp"
#include "ctwave/field.hpp"
#include "ctwave/grid.hpp"
#include "ctwave/numerics.hpp"
#include "ctwave/params.hpp"

namespace ctwave {

namespace detail {

/// Pre-factored constant tridiagonal system (LU without pivoting); reused
/// across time steps of the frozen-field evolution.
class FactoredTridiagonal {
public:
    void factor(const std::vector<double>& lower, const std::vector<double>& diag,
                const std::vector<double>& upper) {
        const std::size_t n = diag.size();
        mult_.assign(n, 0.0);
        diag_ = diag;
        upper_ = upper;
        for (std::size_t i = 1; i < n; ++i) {
            if (diag_[i - 1] == 0.0) throw solver_error("tridiagonal factor: zero pivot");
            mult_[i] = lower[i] / diag_[i - 1];
            diag_[i] -= mult_[i] * upper_[i - 1];
        }
        if (diag_[n - 1] == 0.0) throw solver_error("tridiagonal factor: zero pivot");
    }

    void solve(std::vector<double>& rhs) const {
        const std::size_t n = diag_.size();
        for (std::size_t i = 1; i < n; ++i) rhs[i] -= mult_[i] * rhs[i - 1];
        rhs[n - 1] /= diag_[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) {
            rhs[i] = (rhs[i] - upper_[i] * rhs[i + 1]) / diag_[i];
        }
    }

private:
    std::vector<double> mult_, diag_, upper_;
};

/// One semi-implicit step of U_t = U_xx + w(x) U_x + (alpha(x) - bmc U) U:
/// the linear transport part is folded into a tridiagonal solve (centered
/// differences, backward Euler), the quadratic reaction is explicit, and the
/// result is clamped at zero so nonnegativity holds exactly.
class TransportStepper {
public:
    /// An empty right_dirichlet selects homogeneous Neumann on the right.
    TransportStepper(const Grid& g, double dt, std::optional<double> right_dirichlet)
        : grid_(g), dt_(dt), right_dirichlet_(right_dirichlet) {
        lower_.assign(g.n, 0.0);
        diag_.assign(g.n, 0.0);
        upper_.assign(g.n, 0.0);
        rhs_.assign(g.n, 0.0);
    }

    void assemble(const std::vector<double>& w) {
        const int n = grid_.n;
        const double dx = grid_.dx;
        const double r = dt_ / (dx * dx);
        double wmax = 0.0;
        for (int i = 1; i + 1 < n; ++i) {
            const double adv = dt_ * w[i] / (2.0 * dx);
            lower_[i] = -(r - adv);
            diag_[i] = 1.0 + 2.0 * r;
            upper_[i] = -(r + adv);
            wmax = std::max(wmax, std::abs(w[i]));
        }
        if (wmax * dx / 2.0 >= 0.995)
            throw domain_error("TransportStepper: advective cell Reynolds number too large; refine the grid");
        // Left: homogeneous Neumann via ghost node.
        diag_[0] = 1.0 + 2.0 * r;
        upper_[0] = -2.0 * r;
        if (right_dirichlet_) {
            lower_[n - 1] = 0.0;
            diag_[n - 1] = 1.0;
        } else {
            lower_[n - 1] = -2.0 * r;
            diag_[n - 1] = 1.0 + 2.0 * r;
        }
        factored_.factor(lower_, diag_, upper_);
    }

    void step(std::vector<double>& U, const std::vector<double>& alpha, double bmc) {
        const int n = grid_.n;
        for (int i = 0; i < n; ++i) {
            rhs_[i] = U[i] + dt_ * (alpha[i] - bmc * U[i]) * U[i];
        }
        if (right_dirichlet_) rhs_[n - 1] = *right_dirichlet_;
        factored_.solve(rhs_);
        for (int i = 0; i < n; ++i) U[i] = std::max(0.0, rhs_[i]);
        if (right_dirichlet_) U[n - 1] = *right_dirichlet_;
    }

private:
    Grid grid_;
    double dt_;
    std::optional<double> right_dirichlet_;
    std::vector<double> lower_, diag_, upper_, rhs_;
    FactoredTridiagonal factored_;
};

/// Step size keeping the explicit reaction update positivity-preserving:
/// dt * (|alpha| + bmc * cap) <= 0.4.
inline double auto_dt(const std::vector<double>& alpha, double bmc, double cap) {
    double lip = 1e-12;
    for (double a : alpha) lip = std::max(lip, std::abs(a));
    lip += std::max(0.0, bmc) * std::max(cap, 1e-12);
    return std::min(0.25, 0.4 / lip);
}

inline std::vector<double> advection_coefficient(const Profile& Vp, const ModelParams& p,
                                                 double c) {
    std::vector<double> w(Vp.size());
    for (int i = 0; i < Vp.size(); ++i) w[i] = c - p.chi * Vp.v[i];
    return w;
}

inline std::vector<double> reaction_coefficient(const FieldPair& f, const ModelParams& p,
                                                double c) {
    std::vector<double> alpha(f.V.size());
    for (int i = 0; i < f.V.size(); ++i)
        alpha[i] = p.a - p.chi * (f.V.v[i] - p.tau * c * f.Vp.v[i]);
    return alpha;
}

}  // namespace detail

/// Evolves the frozen-field parabolic equation from U0 until t_end. V and V'
/// are computed once from u_frozen and held fixed. Boundary conditions:
/// homogeneous Neumann on the left, Dirichlet pinned to U+(x_max) on the
/// right. A caller-supplied dt exceeding the reaction positivity bound is
/// reduced with a notice.
inline Profile evolve_frozen(const Profile& u_frozen, const Profile& U0, const Envelope& env,
                             const ModelParams& p, double t_end, double dt = 0.0) {
    const Grid& g = U0.grid;
    const FieldPair f = field_of(u_frozen, p.tau, env.k.c_mu, env.k.mu);
    const auto w = detail::advection_coefficient(f.Vp, p, env.k.c_mu);
    const auto alpha = detail::reaction_coefficient(f, p, env.k.c_mu);
    const double bmc = p.b - p.chi;
    const double dt_auto = detail::auto_dt(alpha, bmc, env.k.C0);
    if (dt <= 0.0) {
        dt = dt_auto;
    } else if (dt > dt_auto) {
        std::cerr << "[ctwave] notice: dt " << dt << " exceeds the explicit-part bound; reduced to "
                  << dt_auto << "\n";
        dt = dt_auto;
    }
    detail::TransportStepper stepper(g, dt, env.U_plus(g.x_max));
    stepper.assemble(w);
    Profile U = U0;
    const long steps = static_cast<long>(std::ceil(t_end / dt));
    for (long s = 0; s < steps; ++s) stepper.step(U.v, alpha, bmc);
    return U;
}

struct LongTimeResult {
    Profile U;
    double t = 0.0;
    long steps = 0;
    bool converged = false;
    std::vector<double> checkpoint_gaps;  ///< sup change per checkpoint window
    double max_over_upper = -kInf;        ///< max of U - U+ over the run
    double max_under_lower = -kInf;       ///< max of U-_delta - U over the run
    double max_monotone_gain = -kInf;     ///< max pointwise increase between checkpoints
};

/// Long-time limit of the frozen-field evolution started from U+; stops when
/// the sup change over a one-time-unit window falls below tol. The returned
/// profile is the monotone limit and stays inside the envelope.
inline LongTimeResult long_time_limit(const Profile& u, const Envelope& env,
                                      const ModelParams& p, double tol = 1e-8,
                                      double t_max = 1000.0, double dt = 0.0,
                                      bool throw_on_budget = true) {
    const Grid& g = u.grid;
    const FieldPair f = field_of(u, p.tau, env.k.c_mu, env.k.mu);
    const auto w = detail::advection_coefficient(f.Vp, p, env.k.c_mu);
    const auto alpha = detail::reaction_coefficient(f, p, env.k.c_mu);
    const double bmc = p.b - p.chi;
    if (dt <= 0.0) dt = detail::auto_dt(alpha, bmc, env.k.C0);

    detail::TransportStepper stepper(g, dt, env.U_plus(g.x_max));
    stepper.assemble(w);

    LongTimeResult res;
    res.U = env.sample_U_plus(g);
    const Profile upper = res.U;
    const Profile lower = env.sample_U_minus_delta(g);
    Profile prev = res.U;

    const long steps_per_window = std::max<long>(1, std::lround(std::ceil(1.0 / dt)));
    while (res.t < t_max) {
        for (long s = 0; s < steps_per_window; ++s) stepper.step(res.U.v, alpha, bmc);
        res.t += steps_per_window * dt;
        res.steps += steps_per_window;
        double gap = 0.0, gain = -kInf, over = -kInf, under = -kInf;
        for (int i = 0; i < g.n; ++i) {
            gap = std::max(gap, std::abs(res.U.v[i] - prev.v[i]));
            gain = std::max(gain, res.U.v[i] - prev.v[i]);
            over = std::max(over, res.U.v[i] - upper.v[i]);
            under = std::max(under, lower.v[i] - res.U.v[i]);
        }
        res.checkpoint_gaps.push_back(gap);
        res.max_monotone_gain = std::max(res.max_monotone_gain, gain);
        res.max_over_upper = std::max(res.max_over_upper, over);
        res.max_under_lower = std::max(res.max_under_lower, under);
        if (gap < tol) {
            res.converged = true;
            break;
        }
        prev = res.U;
    }
    if (!res.converged && throw_on_budget) {
        throw budget_exceeded("long_time_limit: no convergence by t_max", res.U.v, res.t);
    }
    return res;
}

/// Converged traveling-wave profile with its diagnostics.
struct WaveProfile {
    Profile U;
    Profile V;
    double c = 0.0;
    double mu = 0.0;
    double residual_norm = 0.0;   ///< sup norm of the stationary residual (interior)
    double left_state = 0.0;      ///< estimated U(-inf)
    double decay_ratio = 0.0;     ///< estimated lim U(x) e^{mu x}
    double decay_exponent = 0.0;  ///< fitted right-tail log slope
    int outer_iterations = 0;
    std::vector<double> outer_gaps;
    bool converged = false;
};

struct WaveOptions {
    std::optional<Grid> grid;
    double tol_outer = 1e-6;
    double tol_inner = 1e-8;
    int k_max = 200;
    double t_max_inner = 1000.0;
    double dt = 0.0;
    std::optional<double> C0;
};

/// Exponential fit of the right tail: returns the decay exponent of U over
/// the rightmost window (default last 25% of the grid minus 5 boundary cells).
inline double decay_rate(const Profile& U, double window_frac = 0.25) {
    const int n = U.size();
    const int m = static_cast<int>(n * window_frac);
    const int hi = n - 5;
    const int lo = hi - m;
    if (lo < 0 || m < 4) throw domain_error("decay_rate: window too small");
    std::vector<double> xs, ls;
    xs.reserve(m);
    ls.reserve(m);
    for (int i = lo; i < hi; ++i) {
        if (!(U.v[i] > 0.0)) throw domain_error("decay_rate: non-positive values in fit window");
        xs.push_back(U.grid.x(i));
        ls.push_back(std::log(U.v[i]));
    }
    return -fit_line(xs, ls).slope;
}

namespace detail {

inline Grid default_wave_grid(const ModelParams& p, double c, double mu) {
    const double half = std::max(40.0, 20.0 / mu);
    const double dx_cap = 1.8 / std::max({1.0, std::abs(c), p.tau * std::abs(c)});
    const double dx = std::min(2.0 * half / 4000.0, dx_cap);
    const long n = std::lround(2.0 * half / dx) + 1;
    if (n > 2'000'000) throw domain_error("default_wave_grid: grid would exceed 2e6 points");
    return Grid::uniform(-half, half, static_cast<int>(n));
}

}  // namespace detail

/// Picard iteration on the frozen-field map u -> long-time limit, starting
/// from U+. Returns the wave profile once successive iterates settle below
/// tol_outer in sup norm; throws fixed_point_error (with the gap history)
/// if k_max iterations do not suffice.
inline WaveProfile fixed_point_wave(const ModelParams& p, double c, const WaveOptions& opt = {}) {
    p.validate();
    const double mu = mu_from_speed(c, p);
    const Grid g = opt.grid ? *opt.grid : detail::default_wave_grid(p, c, mu);
    const Envelope env = build_envelope(p, mu, opt.C0, g.dx);

    WaveProfile wp;
    wp.c = c;
    wp.mu = mu;
    Profile u = env.sample_U_plus(g);
    double last_gap = kInf;
    for (int k = 0; k < opt.k_max; ++k) {
        const double tol_k =
            std::max(opt.tol_inner, std::min(1e-5, 1e-2 * std::min(last_gap, 1.0)));
        LongTimeResult inner =
            long_time_limit(u, env, p, tol_k, opt.t_max_inner, opt.dt, true);
        const double gap = sup_diff(inner.U.v, u.v);
        wp.outer_gaps.push_back(gap);
        u = std::move(inner.U);
        wp.outer_iterations = k + 1;
        last_gap = gap;
        if (gap < opt.tol_outer) {
            wp.converged = true;
            break;
        }
    }
    if (!wp.converged)
        throw fixed_point_error("fixed_point_wave: Picard iteration did not settle", wp.outer_gaps);

    // Re-run the final limit at full inner tolerance so the reported profile
    // is stationary for its own field.
    LongTimeResult final_run = long_time_limit(u, env, p, opt.tol_inner, opt.t_max_inner, opt.dt);
    wp.U = std::move(final_run.U);
    const FieldPair f = field_of(wp.U, p.tau, c, mu);
    wp.V = f.V;

    const Profile res = lop_residual(wp.U, f.V, f.Vp, p, c, 4);
    double rn = 0.0;
    for (int i = 3; i + 3 < g.n; ++i) rn = std::max(rn, std::abs(res.v[i]));
    wp.residual_norm = rn;

    const int left_cells = std::max(3, g.n / 20);
    double ls = 0.0;
    for (int i = 0; i < left_cells; ++i) ls += wp.U.v[i];
    wp.left_state = ls / left_cells;

    wp.decay_exponent = decay_rate(wp.U);
    std::vector<double> ratios;
    const int hi = g.n - 5;
    const int lo = hi - static_cast<int>(g.n * 0.25);
    for (int i = std::max(0, lo); i < hi; ++i) {
        if (wp.U.v[i] > 0.0) ratios.push_back(wp.U.v[i] * std::exp(mu * g.x(i)));
    }
    if (!ratios.empty()) {
        std::nth_element(ratios.begin(), ratios.begin() + ratios.size() / 2, ratios.end());
        wp.decay_ratio = ratios[ratios.size() / 2];
    }
    return wp;
}

/// Trajectory of the fully coupled evolution: u advances one semi-implicit
/// step per time step, with v re-solved elliptically from the current u
/// before every step. Homogeneous Neumann boundaries on both sides.
struct CoupledTrajectory {
    Grid grid;
    double dt = 0.0;
    double snap_dt = 1.0;
    std::vector<double> t;
    std::vector<double> sup_u;
    std::vector<double> sup_v;
    std::vector<std::vector<double>> u_snapshots;
    Profile u_final;
    Profile v_final;
};

inline CoupledTrajectory evolve_coupled(const Profile& u0, const ModelParams& p, double c,
                                        double t_end, double dt = 0.0, double snap_dt = 1.0) {
    p.validate();
    const Grid& g = u0.grid;
    Profile u = u0;
    Profile v = solve_field_ode(u, p.tau, c);

    if (dt <= 0.0) {
        const double cap = std::max(sup_norm(u0.v), p.a / std::max(p.b - p.chi, 1e-3)) * 2.0;
        const double lip = p.a + p.chi * (1.0 + p.tau * std::abs(c)) * cap + (p.b - p.chi) * cap;
        dt = std::min(0.2, 0.4 / lip);
    }
    const double bmc = p.b - p.chi;

    CoupledTrajectory traj;
    traj.grid = g;
    traj.dt = dt;
    traj.snap_dt = snap_dt;
    const long steps_per_snap = std::max<long>(1, std::lround(snap_dt / dt));
    const long total_steps = static_cast<long>(std::ceil(t_end / dt));

    detail::TransportStepper stepper(g, dt, std::nullopt);
    const auto record = [&](double time) {
        traj.t.push_back(time);
        traj.sup_u.push_back(sup_norm(u.v));
        traj.sup_v.push_back(sup_norm(v.v));
        traj.u_snapshots.push_back(u.v);
    };
    record(0.0);

    for (long s = 0; s < total_steps; ++s) {
        v = solve_field_ode(u, p.tau, c);
        Profile vp = field_derivative(v);
        std::vector<double> w(g.n), alpha(g.n);
        for (int i = 0; i < g.n; ++i) {
            w[i] = c - p.chi * vp.v[i];
            alpha[i] = p.a - p.chi * (v.v[i] - p.tau * c * vp.v[i]);
        }
        stepper.assemble(w);
        stepper.step(u.v, alpha, bmc);
        if (sup_norm(u.v) > 1e6)
            throw solver_error("evolve_coupled: sup norm exceeded 1e6 (divergence)");
        if ((s + 1) % steps_per_snap == 0) record((s + 1) * dt);
    }
    if (traj.t.back() < t_end - 0.5 * dt) record(total_steps * dt);
    traj.u_final = u;
    traj.v_final = solve_field_ode(u, p.tau, c);
    return traj;
}

struct FrontSpeedResult {
    double speed = 0.0;
    bool truncated = false;  ///< front reached the domain edge during the fit window
    int points_used = 0;
};

/// Least-squares slope of the level-set position x_f(t) = max{x : u >= level}
/// over the second half of the recorded window.
inline FrontSpeedResult front_speed(const CoupledTrajectory& traj, double level) {
    std::vector<double> ts, xs;
    bool truncated = false;
    for (std::size_t k = 0; k < traj.t.size(); ++k) {
        const auto& u = traj.u_snapshots[k];
        const int n = traj.grid.n;
        int idx = -1;
        for (int i = n - 1; i >= 0; --i) {
            if (u[i] >= level) {
                idx = i;
                break;
            }
        }
        if (idx < 0) continue;
        double xf;
        if (idx == n - 1) {
            xf = traj.grid.x_max;
            truncated = true;
        } else {
            const double frac = (u[idx] - level) / (u[idx] - u[idx + 1]);
            xf = traj.grid.x(idx) + frac * traj.grid.dx;
        }
        ts.push_back(traj.t[k]);
        xs.push_back(xf);
    }
    if (ts.size() < 4) throw domain_error("front_speed: too few level crossings recorded");
    const std::size_t half = ts.size() / 2;
    std::vector<double> t2(ts.begin() + half, ts.end());
    std::vector<double> x2(xs.begin() + half, xs.end());
    FrontSpeedResult r;
    r.speed = fit_line(t2, x2).slope;
    r.truncated = truncated;
    r.points_used = static_cast<int>(t2.size());
    return r;
}

}  // namespace ctwave
