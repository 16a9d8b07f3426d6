#pragma once

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "ctwave/config.hpp"
#include "ctwave/envelope.hpp"
#include "ctwave/io.hpp"
#include "ctwave/params.hpp"
#include "ctwave/spectra.hpp"
#include "ctwave/wave.hpp"

namespace ctwave {

/// Exit status contract of the batch front-end:
///   0 pass, 1 invariant failure, 2 usage error, 3 solver non-convergence.
struct RunOutcome {
    int exit_code = 0;
    std::vector<std::string> messages;

    void note(std::string m) { messages.push_back(std::move(m)); }
    void raise_to(int code) { exit_code = std::max(exit_code, code); }
};

namespace harness {

inline std::string flag(bool ok) { return ok ? "1" : "0"; }

inline Grid grid_or_default(const GridSpec& spec, double x_min, double x_max, int n) {
    return Grid::uniform(spec.x_min.value_or(x_min), spec.x_max.value_or(x_max),
                         spec.n.value_or(n));
}

inline Profile make_initial_data(const EvolveSpec& e, const Grid& g, const ModelParams& p,
                                 std::uint64_t seed) {
    std::mt19937 rng(static_cast<std::uint32_t>(seed));
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    const double base = e.u0_amplitude * p.a / p.b;
    if (e.u0 == "constant") {
        return Profile::sample(g, [&](double) { return base; });
    }
    if (e.u0 == "perturbed-constant") {
        Profile u(g);
        for (int i = 0; i < g.n; ++i) u.v[i] = base * (1.0 + e.u0_noise * unif(rng));
        return u;
    }
    if (e.u0 == "bump") {
        return Profile::sample(g, [&](double x) {
            const double s = 1.0 - (x / 5.0) * (x / 5.0);
            return s > 0.0 ? base * s : 0.0;
        });
    }
    // sine
    return Profile::sample(g, [&](double x) {
        return base * (1.0 + e.u0_noise * std::sin(x));
    });
}

/// Smooth deterministic in-envelope member: U- + r(x) (U+ - U-) with
/// r in [0, 1] built from the seed.
inline Profile random_envelope_member(const Envelope& env, const Grid& g, std::mt19937& rng) {
    std::uniform_real_distribution<double> k_dist(0.2, 2.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
    const double k = k_dist(rng), ph = phase(rng);
    Profile u(g);
    for (int i = 0; i < g.n; ++i) {
        const double x = g.x(i);
        const double r = 0.5 + 0.5 * std::sin(k * x + ph);
        u.v[i] = env.U_minus(x) + r * (env.U_plus(x) - env.U_minus(x));
    }
    return u;
}

struct SpeedsRow {
    double chi = 0.0, tau = 0.0;
    SpeedRange range;
    bool ok = false;
    std::string error;
};

inline SpeedsRow speeds_row(const ModelParams& base, double chi, double tau) {
    SpeedsRow row;
    row.chi = chi;
    row.tau = tau;
    try {
        ModelParams p = base;
        p.chi = chi;
        p.tau = tau;
        row.range = admissible_window(p);
        row.ok = true;
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    return row;
}

inline void append_speeds_row(CsvTable& table, const SpeedsRow& row) {
    if (row.ok) {
        const SpeedRange& r = row.range;
        table.add_row({format_number(row.chi), format_number(row.tau), format_number(r.m_tau),
                       format_number(r.chi_star), format_number(r.mu_tilde_star2),
                       format_number(r.mu_star2), format_number(r.mu_star),
                       format_number(r.c_star),
                       r.c_star2_unbounded ? "inf" : format_number(r.c_star2),
                       flag(r.c_star2_unbounded), flag(r.consistent), "ok"});
    } else {
        table.add_row({format_number(row.chi), format_number(row.tau), "", "", "", "", "", "",
                       "", "", "0", row.error});
    }
}

inline const std::vector<std::string>& speeds_header() {
    static const std::vector<std::string> h = {
        "chi",     "tau",    "m_tau",  "chi_star", "mu_tilde_star2", "mu_star2",
        "mu_star", "c_star", "c_star2", "c_star2_unbounded", "consistent", "status"};
    return h;
}

}  // namespace harness

inline RunOutcome run(const ExperimentConfig& cfg);

namespace harness {

inline RunOutcome run_speeds(const ExperimentConfig& cfg, const std::filesystem::path& out) {
    RunOutcome outcome;
    const std::vector<double> chis =
        cfg.sweep.chi.value_or(std::vector<double>{cfg.params.chi});
    CsvTable table(speeds_header());
    for (double chi : chis) {
        const SpeedsRow row = speeds_row(cfg.params, chi, cfg.params.tau);
        if (row.ok && !row.range.consistent) outcome.raise_to(1);
        if (!row.ok) outcome.raise_to(1);
        append_speeds_row(table, row);
    }
    table.write(out / "results.csv");
    outcome.note("speeds: wrote " + std::to_string(table.size()) + " row(s)");
    return outcome;
}

/// Wave-solve sweep over (chi, tau, c). Speeds outside the computed window
/// are still attempted (the theory only certifies the open interval) and the
/// rows are tagged accordingly; failures are captured per row.
inline RunOutcome run_wave_sweep(const ExperimentConfig& cfg, const std::filesystem::path& out) {
    RunOutcome outcome;
    const std::vector<double> chis =
        cfg.sweep.chi.value_or(std::vector<double>{cfg.params.chi});
    const std::vector<double> taus =
        cfg.sweep.tau.value_or(std::vector<double>{cfg.params.tau});
    const std::vector<double> cs = *cfg.sweep.c;

    struct Job {
        double chi, tau, c;
    };
    std::vector<Job> jobs;
    for (double tau : taus)
        for (double chi : chis)
            for (double c : cs) jobs.push_back({chi, tau, c});

    struct Row {
        Job job{};
        int in_window = -1;  // -1 unknown, else 0/1
        bool converged = false;
        WaveProfile wp;
        double residual_tol = 0.0;
        std::string status = "ok";
    };
    std::vector<Row> rows(jobs.size());

    const auto work = [&](std::size_t i) {
        Row& row = rows[i];
        row.job = jobs[i];
        ModelParams p = cfg.params;
        p.chi = row.job.chi;
        p.tau = row.job.tau;
        try {
            const SpeedRange r = admissible_window(p);
            if (r.consistent)
                row.in_window = row.job.c > r.c_star && row.job.c < r.c_star2 ? 1 : 0;
        } catch (const std::exception&) {
            row.in_window = -1;
        }
        try {
            WaveOptions opt;
            opt.tol_outer = cfg.tol.outer;
            opt.tol_inner = cfg.tol.inner;
            if (cfg.grid.x_min && cfg.grid.x_max && cfg.grid.n)
                opt.grid = Grid::uniform(*cfg.grid.x_min, *cfg.grid.x_max, *cfg.grid.n);
            row.wp = fixed_point_wave(p, row.job.c, opt);
            row.converged = row.wp.converged;
            const Envelope env =
                build_envelope(p, row.wp.mu, std::nullopt, row.wp.U.grid.dx);
            row.residual_tol = cfg.tol.residual_factor * row.wp.U.grid.dx * row.wp.U.grid.dx *
                               (1.0 + env.k.C0 * env.k.C0);
            if (row.in_window == 0) row.status = "ok (outside-theory)";
        } catch (const std::exception& e) {
            row.status = e.what();
        }
    };

    const int workers = std::max(1, std::min<int>(cfg.workers, static_cast<int>(jobs.size())));
    if (workers <= 1) {
        for (std::size_t i = 0; i < jobs.size(); ++i) work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&]() {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= jobs.size()) return;
                    work(i);
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    CsvTable table({"chi", "tau", "c", "in_window", "converged", "mu", "left_state",
                    "decay_exponent", "residual_norm", "residual_tol", "outer_iterations",
                    "status"});
    for (const Row& row : rows) {
        if (row.converged) {
            table.add_row({format_number(row.job.chi), format_number(row.job.tau),
                           format_number(row.job.c),
                           row.in_window < 0 ? "" : std::to_string(row.in_window), "1",
                           format_number(row.wp.mu), format_number(row.wp.left_state),
                           format_number(row.wp.decay_exponent),
                           format_number(row.wp.residual_norm),
                           format_number(row.residual_tol),
                           std::to_string(row.wp.outer_iterations), row.status});
        } else {
            table.add_row({format_number(row.job.chi), format_number(row.job.tau),
                           format_number(row.job.c),
                           row.in_window < 0 ? "" : std::to_string(row.in_window), "0", "", "",
                           "", "", "", "", row.status});
        }
    }
    table.write(out / "results.csv");
    outcome.note("sweep: wrote " + std::to_string(table.size()) + " wave row(s)");
    return outcome;
}

inline RunOutcome run_sweep(const ExperimentConfig& cfg, const std::filesystem::path& out) {
    if (cfg.sweep.c) return run_wave_sweep(cfg, out);
    RunOutcome outcome;
    const std::vector<double> chis =
        cfg.sweep.chi.value_or(std::vector<double>{cfg.params.chi});
    const std::vector<double> taus =
        cfg.sweep.tau.value_or(std::vector<double>{cfg.params.tau});

    struct Job {
        double chi, tau;
    };
    std::vector<Job> jobs;
    for (double tau : taus)
        for (double chi : chis) jobs.push_back({chi, tau});

    std::vector<SpeedsRow> rows(jobs.size());
    const int workers = std::max(1, std::min<int>(cfg.workers, static_cast<int>(jobs.size())));
    if (workers <= 1) {
        for (std::size_t i = 0; i < jobs.size(); ++i)
            rows[i] = speeds_row(cfg.params, jobs[i].chi, jobs[i].tau);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&]() {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= jobs.size()) return;
                    rows[i] = speeds_row(cfg.params, jobs[i].chi, jobs[i].tau);
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    CsvTable table(speeds_header());
    for (const auto& row : rows) {
        if (row.ok && !row.range.consistent) outcome.raise_to(1);
        append_speeds_row(table, row);
    }
    table.write(out / "results.csv");
    outcome.note("sweep: wrote " + std::to_string(table.size()) + " row(s) (" +
                 std::to_string(chis.size()) + " chi x " + std::to_string(taus.size()) +
                 " tau)");
    return outcome;
}

inline RunOutcome run_wave(const ExperimentConfig& cfg, const std::filesystem::path& out,
                           const std::string& manifest_hash) {
    RunOutcome outcome;
    double c;
    if (cfg.wave.c_midway) {
        const SpeedRange r = admissible_window(cfg.params);
        if (!r.consistent)
            throw domain_error("wave: admissible window inconsistent at these parameters");
        c = r.c_star2_unbounded ? 2.0 * r.c_star : 0.5 * (r.c_star + r.c_star2);
    } else if (cfg.wave.c) {
        c = *cfg.wave.c;
    } else {
        throw config_error("wave.c: required unless wave.c_midway is set");
    }

    WaveOptions opt;
    opt.tol_outer = cfg.tol.outer;
    opt.tol_inner = cfg.tol.inner;
    if (cfg.grid.x_min && cfg.grid.x_max && cfg.grid.n)
        opt.grid = Grid::uniform(*cfg.grid.x_min, *cfg.grid.x_max, *cfg.grid.n);

    WaveProfile wp;
    try {
        wp = fixed_point_wave(cfg.params, c, opt);
    } catch (const solver_error& e) {
        outcome.note(std::string("wave: solver failed: ") + e.what());
        outcome.raise_to(3);
        return outcome;
    }

    std::filesystem::create_directories(out / "profiles");
    write_profile(out / "profiles" / "U.dat", wp.U, manifest_hash, "U");
    write_profile(out / "profiles" / "V.dat", wp.V, manifest_hash, "V");
    {
        std::ofstream gp(out / "plot.gp");
        gp << "# gnuplot script emitted by ctwave (mode wave)\n"
           << "set xlabel 'x'\nset ylabel 'value'\n"
           << "plot 'profiles/U.dat' using 1:2 with lines title 'U', \\\n"
           << "     'profiles/V.dat' using 1:2 with lines title 'V'\n";
    }

    const double dx = wp.U.grid.dx;
    const Envelope env = build_envelope(cfg.params, wp.mu, std::nullopt, dx);
    const double res_tol = cfg.tol.residual_factor * dx * dx * (1.0 + env.k.C0 * env.k.C0);
    const bool residual_ok = wp.residual_norm <= res_tol;
    const bool left_ok = std::abs(wp.left_state - cfg.params.a / cfg.params.b) <=
                         0.05 * cfg.params.a / cfg.params.b;
    const bool decay_ok = std::abs(wp.decay_exponent - wp.mu) <= 0.05 * wp.mu;

    CsvTable table({"c", "mu", "left_state", "decay_exponent", "decay_ratio", "residual_norm",
                    "residual_tol", "outer_iterations", "residual_ok", "left_ok", "decay_ok"});
    table.add_row({format_number(c), format_number(wp.mu), format_number(wp.left_state),
                   format_number(wp.decay_exponent), format_number(wp.decay_ratio),
                   format_number(wp.residual_norm), format_number(res_tol),
                   std::to_string(wp.outer_iterations), flag(residual_ok), flag(left_ok),
                   flag(decay_ok)});
    table.write(out / "results.csv");
    if (!(residual_ok && left_ok && decay_ok)) outcome.raise_to(1);
    outcome.note("wave: c = " + format_number(c) + ", mu = " + format_number(wp.mu) + ", " +
                 std::to_string(wp.outer_iterations) + " outer iterations");
    return outcome;
}

inline RunOutcome run_evolve(const ExperimentConfig& cfg, const std::filesystem::path& out,
                             const std::string& manifest_hash) {
    RunOutcome outcome;
    const Grid g = grid_or_default(cfg.grid, -40.0, 40.0, 2001);
    const Profile u0 = make_initial_data(cfg.evolve, g, cfg.params, cfg.seed);

    CoupledTrajectory traj;
    try {
        traj = evolve_coupled(u0, cfg.params, cfg.evolve.c, cfg.evolve.t_end, cfg.evolve.dt,
                              cfg.evolve.snap_dt);
    } catch (const solver_error& e) {
        outcome.note(std::string("evolve: ") + e.what());
        outcome.raise_to(3);
        return outcome;
    }

    std::filesystem::create_directories(out / "profiles");
    write_profile(out / "profiles" / "u_final.dat", traj.u_final, manifest_hash, "u_final");
    write_profile(out / "profiles" / "v_final.dat", traj.v_final, manifest_hash, "v_final");
    {
        CsvTable series({"t", "sup_u", "sup_v"});
        for (std::size_t k = 0; k < traj.t.size(); ++k)
            series.add_row({format_number(traj.t[k]), format_number(traj.sup_u[k]),
                            format_number(traj.sup_v[k])});
        series.write(out / "series.csv");
    }

    const double a = cfg.params.a, b = cfg.params.b, chi = cfg.params.chi, tau = cfg.params.tau;
    const double c = cfg.evolve.c;
    const bool hyp_a = cfg.params.boundedness_hypothesis(c);
    bool bound_ok = true;
    double bound = kInf;
    if (hyp_a) {
        bound = std::max(sup_norm(u0.v), a / (b - chi - 0.5 * chi * c * tau));
        for (double s : traj.sup_u) bound_ok = bound_ok && s <= bound + 1e-3;
        for (double s : traj.sup_v) bound_ok = bound_ok && s <= bound + 1e-3;
        if (!bound_ok) outcome.raise_to(1);
    }
    // The convergence-to-(a/b) hypothesis also needs strictly positive data.
    const bool hyp_b = cfg.params.stability_hypothesis(c);
    double inf_u0 = kInf;
    for (double v : u0.v) inf_u0 = std::min(inf_u0, v);
    double dev = kInf;
    {
        double du = 0.0, dv = 0.0;
        for (int i = 0; i < g.n; ++i) {
            du = std::max(du, std::abs(traj.u_final.v[i] - a / b));
            dv = std::max(dv, std::abs(traj.v_final.v[i] - a / b));
        }
        dev = du + dv;
    }

    double speed = 0.0;
    bool have_speed = false, truncated = false;
    if (cfg.evolve.u0 == "bump" && cfg.evolve.c == 0.0) {
        try {
            const FrontSpeedResult f = front_speed(traj, cfg.evolve.level);
            speed = f.speed;
            truncated = f.truncated;
            have_speed = true;
        } catch (const domain_error& e) {
            outcome.note(std::string("evolve: front tracking: ") + e.what());
        }
    }

    CsvTable table({"c", "t_end", "sup_u_final", "bound_hypothesis", "bound", "bound_ok",
                    "stability_hypothesis", "inf_u0", "deviation_final", "front_speed",
                    "front_truncated"});
    table.add_row({format_number(c), format_number(traj.t.back()),
                   format_number(traj.sup_u.back()), flag(hyp_a),
                   hyp_a ? format_number(bound) : "", flag(bound_ok), flag(hyp_b),
                   format_number(inf_u0), format_number(dev),
                   have_speed ? format_number(speed) : "", flag(truncated)});
    table.write(out / "results.csv");
    outcome.note("evolve: reached t = " + format_number(traj.t.back()) +
                 (have_speed ? ", front speed " + format_number(speed) : ""));
    return outcome;
}

inline RunOutcome run_verify(const ExperimentConfig& cfg, const std::filesystem::path& out) {
    RunOutcome outcome;
    ModelParams base = cfg.params;
    base.chi = 0.0;
    const double cs = chi_star(base);
    const Grid g = grid_or_default(cfg.grid, -40.0, 40.0, 4001);
    std::mt19937 rng(static_cast<std::uint32_t>(cfg.seed));

    CsvTable table({"chi", "mu", "u_member", "verifier", "worst", "tol", "pass"});
    bool all_pass = true;
    for (int j = 0; j < cfg.verify.pairs; ++j) {
        const double t = cfg.verify.pairs == 1
                             ? 0.0
                             : static_cast<double>(j) / (cfg.verify.pairs - 1);
        ModelParams p = base;
        p.chi = 0.8 * cs * std::pow(0.025, t);  // log-spaced down from 0.8 chi*
        SpeedRange r;
        try {
            r = admissible_window(p);
        } catch (const std::exception& e) {
            table.add_row({format_number(p.chi), "", "", "window", "", "", e.what()});
            all_pass = false;
            continue;
        }
        const double mu = 0.5 * (std::max(r.mu_star2, 1e-3) + r.mu_star);
        if (!admissible(mu, p)) {
            table.add_row({format_number(p.chi), format_number(mu), "", "admissible", "", "",
                           "0"});
            all_pass = false;
            continue;
        }
        const Envelope env = build_envelope(p, mu, std::nullopt, g.dx);

        std::vector<std::pair<std::string, Profile>> members;
        members.emplace_back("U_plus", env.sample_U_plus(g));
        members.emplace_back("U_minus", env.sample_U_minus(g));
        for (int m = 0; m < cfg.verify.random_members; ++m)
            members.emplace_back("random" + std::to_string(m),
                                 random_envelope_member(env, g, rng));

        for (const auto& [name, u_field] : members) {
            const auto record = [&](const char* which, const VerifierReport& rep) {
                table.add_row({format_number(p.chi), format_number(mu), name, which,
                               format_number(rep.worst), format_number(rep.tol),
                               flag(rep.pass)});
                all_pass = all_pass && rep.pass;
            };
            record("super_constant", verify_super_constant(env, u_field, p));
            record("super_phi", verify_super_phi(env, u_field, p));
            record("sub", verify_sub(env, u_field, p));
            record("sub_shifted", verify_sub_shifted(env, u_field, p));

            const FieldPair f = field_of(u_field, p.tau, env.k.c_mu, mu);
            const FieldBoundsReport fb =
                verify_field_bounds(u_field, f.V, f.Vp, p, mu, env.k.C0);
            table.add_row({format_number(p.chi), format_number(mu), name, "field_bounds",
                           format_number(std::max({fb.neg_V, fb.over_V_plus, fb.over_Vp_bound})),
                           format_number(fb.tol), flag(fb.pass)});
            all_pass = all_pass && fb.pass;
        }
    }
    table.write(out / "results.csv");
    if (!all_pass) outcome.raise_to(1);
    outcome.note(std::string("verify: ") + (all_pass ? "all checks passed" : "FAILURES found"));
    return outcome;
}

inline RunOutcome run_eig(const ExperimentConfig& cfg, const std::filesystem::path& out) {
    RunOutcome outcome;
    const EigSpec& e = cfg.eig;
    CsvTable table({"kind", "a", "c", "lambda0", "L", "lambda_num", "err", "tol", "growth_rate",
                    "growth_err", "pass"});
    try {
        const bool dd = e.kind == "dirichlet";
        const double L = dd ? dirichlet_length(e.a, e.c, e.lambda0)
                            : neumann_dirichlet_length(e.a, e.c, e.lambda0);
        EigenProblem prob{e.a, e.c, L, nullptr, nullptr,
                          dd ? EigenBC::DirichletDirichlet : EigenBC::NeumannDirichlet};
        const EigenPair pair = principal_eigen(prob, e.n);
        const double growth = growth_rate_estimate(prob, std::min(e.n, 1500));
        const double err = std::abs(pair.lambda - e.lambda0);
        const double tol = 1e-3 * (1.0 + std::abs(e.lambda0));
        const double gerr = std::abs(growth - pair.lambda);
        const bool pass = err <= tol && gerr <= 1e-3;
        table.add_row({e.kind, format_number(e.a), format_number(e.c),
                       format_number(e.lambda0), format_number(L), format_number(pair.lambda),
                       format_number(err), format_number(tol), format_number(growth),
                       format_number(gerr), flag(pass)});
        if (!pass) outcome.raise_to(1);
        outcome.note("eig: L = " + format_number(L) + ", lambda = " +
                     format_number(pair.lambda));
    } catch (const domain_error& err) {
        throw config_error(std::string("eig: ") + err.what());
    }
    table.write(out / "results.csv");
    return outcome;
}

}  // namespace harness

/// Dispatches a parsed configuration: writes the run manifest, executes the
/// requested mode, and reports the exit status per the CLI contract.
inline RunOutcome run(const ExperimentConfig& cfg) {
    const std::filesystem::path out(cfg.out_dir);
    std::filesystem::create_directories(out);

    nlohmann::json manifest;
    manifest["tool"] = "ctwave";
    manifest["format_version"] = 1;
    manifest["mode"] = to_string(cfg.mode);
    manifest["config"] = cfg.echo;
    const std::string hash = hash_hex(cfg.echo.dump());
    manifest["config_hash"] = hash;
    {
        std::ofstream mf(out / "manifest.json");
        mf << manifest.dump(2) << "\n";
    }

    switch (cfg.mode) {
        case RunMode::Speeds: return harness::run_speeds(cfg, out);
        case RunMode::Sweep: return harness::run_sweep(cfg, out);
        case RunMode::Wave: return harness::run_wave(cfg, out, hash);
        case RunMode::Evolve: return harness::run_evolve(cfg, out, hash);
        case RunMode::Verify: return harness::run_verify(cfg, out);
        case RunMode::Eig: return harness::run_eig(cfg, out);
    }
    return {};
}

}  // namespace ctwave
