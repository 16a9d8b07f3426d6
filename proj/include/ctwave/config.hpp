#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ctwave/errors.hpp"
#include "ctwave/params.hpp"

namespace ctwave {

/// Configuration problems are usage errors (CLI exit code 2); the message
/// carries the offending field path.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

enum class RunMode { Speeds, Wave, Evolve, Verify, Eig, Sweep };

inline std::string to_string(RunMode m) {
    switch (m) {
        case RunMode::Speeds: return "speeds";
        case RunMode::Wave: return "wave";
        case RunMode::Evolve: return "evolve";
        case RunMode::Verify: return "verify";
        case RunMode::Eig: return "eig";
        case RunMode::Sweep: return "sweep";
    }
    return "?";
}

inline RunMode mode_from_string(const std::string& s) {
    if (s == "speeds") return RunMode::Speeds;
    if (s == "wave") return RunMode::Wave;
    if (s == "evolve") return RunMode::Evolve;
    if (s == "verify") return RunMode::Verify;
    if (s == "eig") return RunMode::Eig;
    if (s == "sweep") return RunMode::Sweep;
    throw config_error("mode: unknown value '" + s + "'");
}

struct GridSpec {
    std::optional<double> x_min, x_max;
    std::optional<int> n;
};

struct Tolerances {
    double outer = 1e-6;            ///< outer Picard stop
    double inner = 1e-8;            ///< long-time-limit stop per unit window
    double residual_factor = 50.0;  ///< residual tol = factor * dx^2 * (1 + C0^2)
    double root = 1e-12;            ///< bisection tolerance for crossings
};

struct WaveSpec {
    std::optional<double> c;
    bool c_midway = false;  ///< place c halfway inside the computed (c*, c**)
};

struct EvolveSpec {
    double c = 0.0;
    double t_end = 100.0;
    double dt = 0.0;
    double snap_dt = 1.0;
    std::string u0 = "perturbed-constant";  ///< constant | perturbed-constant | bump | sine
    double u0_amplitude = 1.0;
    double u0_noise = 0.0;
    double level = 1e-2;  ///< front-tracking level for bump runs
};

struct EigSpec {
    std::string kind = "dirichlet";  ///< dirichlet | neumann-dirichlet
    double a = 1.0;
    double c = 0.0;
    double lambda0 = 0.75;
    int n = 2000;
};

struct VerifySpec {
    int pairs = 10;
    int random_members = 2;  ///< random in-envelope frozen fields per pair
};

struct SweepSpec {
    std::optional<std::vector<double>> chi;  ///< absent -> fall back to params.chi
    std::optional<std::vector<double>> tau;  ///< absent -> fall back to params.tau
    std::optional<std::vector<double>> c;    ///< present -> wave solves per speed
};

struct ExperimentConfig {
    ModelParams params{1.0, 1.0, 0.01, 0.5};
    RunMode mode = RunMode::Speeds;
    GridSpec grid;
    Tolerances tol;
    WaveSpec wave;
    EvolveSpec evolve;
    EigSpec eig;
    VerifySpec verify;
    SweepSpec sweep;
    std::uint64_t seed = 12345;
    std::string out_dir = "results";
    int workers = 1;
    nlohmann::json echo;  ///< parsed config, echoed into the run manifest
};

namespace detail {

template <typename T>
T get_or(const nlohmann::json& j, const std::string& key, const T& fallback,
         const std::string& path) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw config_error(path + key + ": wrong type");
    }
}

/// A range is either an explicit array or {"log": {"from": , "to": , "count": }}.
inline std::vector<double> parse_range(const nlohmann::json& j, const std::string& path) {
    std::vector<double> out;
    if (j.is_array()) {
        for (const auto& v : j) {
            if (!v.is_number()) throw config_error(path + ": array entries must be numbers");
            out.push_back(v.get<double>());
        }
        return out;
    }
    if (j.is_object() && j.contains("log")) {
        const auto& spec = j.at("log");
        const double from = get_or<double>(spec, "from", 0.0, path + ".log.");
        const double to = get_or<double>(spec, "to", 0.0, path + ".log.");
        const int count = get_or<int>(spec, "count", 0, path + ".log.");
        if (!(from > 0.0) || !(to > 0.0) || count < 1)
            throw config_error(path + ".log: need positive from/to and count >= 1");
        if (count == 1) return {from};
        for (int k = 0; k < count; ++k) {
            const double t = static_cast<double>(k) / (count - 1);
            out.push_back(from * std::pow(to / from, t));
        }
        return out;
    }
    throw config_error(path + ": expected an array or a {\"log\": ...} object");
}

}  // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& j) {
    using detail::get_or;
    ExperimentConfig cfg;
    cfg.echo = j;
    if (j.contains("params")) {
        const auto& p = j.at("params");
        cfg.params.a = get_or<double>(p, "a", cfg.params.a, "params.");
        cfg.params.b = get_or<double>(p, "b", cfg.params.b, "params.");
        cfg.params.chi = get_or<double>(p, "chi", cfg.params.chi, "params.");
        cfg.params.tau = get_or<double>(p, "tau", cfg.params.tau, "params.");
        try {
            cfg.params.validate();
        } catch (const domain_error& e) {
            throw config_error(std::string("params: ") + e.what());
        }
    }
    if (j.contains("mode")) cfg.mode = mode_from_string(j.at("mode").get<std::string>());
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        if (g.contains("x_min")) cfg.grid.x_min = g.at("x_min").get<double>();
        if (g.contains("x_max")) cfg.grid.x_max = g.at("x_max").get<double>();
        if (g.contains("n")) cfg.grid.n = g.at("n").get<int>();
        if (cfg.grid.n && *cfg.grid.n < 3) throw config_error("grid.n: need at least 3 points");
        if (cfg.grid.x_min && cfg.grid.x_max && !(*cfg.grid.x_min < *cfg.grid.x_max))
            throw config_error("grid.x_min: must be below grid.x_max");
    }
    if (j.contains("tolerances")) {
        const auto& t = j.at("tolerances");
        cfg.tol.outer = get_or<double>(t, "outer", cfg.tol.outer, "tolerances.");
        cfg.tol.inner = get_or<double>(t, "inner", cfg.tol.inner, "tolerances.");
        cfg.tol.residual_factor =
            get_or<double>(t, "residual_factor", cfg.tol.residual_factor, "tolerances.");
        cfg.tol.root = get_or<double>(t, "root", cfg.tol.root, "tolerances.");
        for (auto [name, v] : {std::pair{"outer", cfg.tol.outer},
                               {"inner", cfg.tol.inner},
                               {"residual_factor", cfg.tol.residual_factor},
                               {"root", cfg.tol.root}}) {
            if (!(v > 0.0)) throw config_error(std::string("tolerances.") + name + ": must be positive");
        }
    }
    if (j.contains("wave")) {
        const auto& w = j.at("wave");
        if (w.contains("c")) cfg.wave.c = w.at("c").get<double>();
        cfg.wave.c_midway = get_or<bool>(w, "c_midway", cfg.wave.c_midway, "wave.");
    }
    if (j.contains("evolve")) {
        const auto& e = j.at("evolve");
        cfg.evolve.c = get_or<double>(e, "c", cfg.evolve.c, "evolve.");
        cfg.evolve.t_end = get_or<double>(e, "t_end", cfg.evolve.t_end, "evolve.");
        cfg.evolve.dt = get_or<double>(e, "dt", cfg.evolve.dt, "evolve.");
        cfg.evolve.snap_dt = get_or<double>(e, "snap_dt", cfg.evolve.snap_dt, "evolve.");
        cfg.evolve.u0 = get_or<std::string>(e, "u0", cfg.evolve.u0, "evolve.");
        cfg.evolve.u0_amplitude =
            get_or<double>(e, "u0_amplitude", cfg.evolve.u0_amplitude, "evolve.");
        cfg.evolve.u0_noise = get_or<double>(e, "u0_noise", cfg.evolve.u0_noise, "evolve.");
        cfg.evolve.level = get_or<double>(e, "level", cfg.evolve.level, "evolve.");
        if (cfg.evolve.u0 != "constant" && cfg.evolve.u0 != "perturbed-constant" &&
            cfg.evolve.u0 != "bump" && cfg.evolve.u0 != "sine")
            throw config_error("evolve.u0: unknown initial data '" + cfg.evolve.u0 + "'");
        if (!(cfg.evolve.t_end > 0.0)) throw config_error("evolve.t_end: must be positive");
    }
    if (j.contains("eig")) {
        const auto& e = j.at("eig");
        cfg.eig.kind = get_or<std::string>(e, "kind", cfg.eig.kind, "eig.");
        cfg.eig.a = get_or<double>(e, "a", cfg.eig.a, "eig.");
        cfg.eig.c = get_or<double>(e, "c", cfg.eig.c, "eig.");
        cfg.eig.lambda0 = get_or<double>(e, "lambda0", cfg.eig.lambda0, "eig.");
        cfg.eig.n = get_or<int>(e, "n", cfg.eig.n, "eig.");
        if (cfg.eig.kind != "dirichlet" && cfg.eig.kind != "neumann-dirichlet")
            throw config_error("eig.kind: unknown value '" + cfg.eig.kind + "'");
        if (cfg.eig.n < 50) throw config_error("eig.n: need at least 50 points");
    }
    if (j.contains("verify")) {
        const auto& v = j.at("verify");
        cfg.verify.pairs = get_or<int>(v, "pairs", cfg.verify.pairs, "verify.");
        cfg.verify.random_members =
            get_or<int>(v, "random_members", cfg.verify.random_members, "verify.");
        if (cfg.verify.pairs < 1) throw config_error("verify.pairs: must be >= 1");
    }
    if (j.contains("sweep")) {
        const auto& s = j.at("sweep");
        if (s.contains("chi")) cfg.sweep.chi = detail::parse_range(s.at("chi"), "sweep.chi");
        if (s.contains("tau")) cfg.sweep.tau = detail::parse_range(s.at("tau"), "sweep.tau");
        if (s.contains("c")) cfg.sweep.c = detail::parse_range(s.at("c"), "sweep.c");
        if (cfg.sweep.tau)
            for (double t : *cfg.sweep.tau)
                if (!(t > 0.0)) throw config_error("sweep.tau: entries must be positive");
        if (cfg.sweep.chi)
            for (double x : *cfg.sweep.chi)
                if (!(x >= 0.0)) throw config_error("sweep.chi: entries must be nonnegative");
    }
    cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed, "");
    cfg.out_dir = get_or<std::string>(j, "out", cfg.out_dir, "");
    cfg.workers = get_or<int>(j, "workers", cfg.workers, "");
    if (cfg.workers < 1) throw config_error("workers: must be >= 1");
    return cfg;
}

inline ExperimentConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw config_error("config: cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw config_error("config: " + std::string(e.what()));
    }
    return parse_config(j);
}

/// Documented defaults, emitted by the `schema` subcommand.
inline nlohmann::json default_config_schema() {
    nlohmann::json j;
    j["params"] = {{"a", 1.0}, {"b", 1.0}, {"chi", 0.01}, {"tau", 0.5}};
    j["mode"] = "speeds";
    j["grid"] = {{"x_min", -40.0}, {"x_max", 40.0}, {"n", 4001}};
    j["tolerances"] = {{"outer", 1e-6}, {"inner", 1e-8}, {"residual_factor", 50.0},
                       {"root", 1e-12}};
    j["wave"] = {{"c", 2.5}, {"c_midway", false}};
    j["evolve"] = {{"c", 0.0},          {"t_end", 100.0},      {"dt", 0.0},
                   {"snap_dt", 1.0},    {"u0", "perturbed-constant"},
                   {"u0_amplitude", 1.0}, {"u0_noise", 0.0},   {"level", 1e-2}};
    j["eig"] = {{"kind", "dirichlet"}, {"a", 1.0}, {"c", 0.0}, {"lambda0", 0.75}, {"n", 2000}};
    j["verify"] = {{"pairs", 10}, {"random_members", 2}};
    j["sweep"] = {{"chi", {0.1, 0.01}}, {"tau", {0.5}}};
    j["seed"] = 12345;
    j["out"] = "results";
    j["workers"] = 1;
    return j;
}

}  // namespace ctwave
