// ctwave — batch front-end for the chemotaxis traveling-wave laboratory.
//
// Subcommands: speeds | wave | evolve | verify | eig | sweep | schema
// Exit codes:  0 pass, 1 invariant failure, 2 usage error, 3 solver
//              non-convergence.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ctwave/config.hpp"
#include "ctwave/runner.hpp"

namespace {

int apply_tol_override(ctwave::Tolerances& tol, const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
        std::cerr << "ctwave: --tol-override expects KEY=VALUE, got '" << kv << "'\n";
        return 2;
    }
    const std::string key = kv.substr(0, eq);
    double value;
    try {
        value = std::stod(kv.substr(eq + 1));
    } catch (const std::exception&) {
        std::cerr << "ctwave: --tol-override " << key << ": not a number\n";
        return 2;
    }
    if (!(value > 0.0)) {
        std::cerr << "ctwave: --tol-override " << key << ": must be positive\n";
        return 2;
    }
    if (key == "outer")
        tol.outer = value;
    else if (key == "inner")
        tol.inner = value;
    else if (key == "residual_factor")
        tol.residual_factor = value;
    else if (key == "root")
        tol.root = value;
    else {
        std::cerr << "ctwave: --tol-override: unknown key '" << key << "'\n";
        return 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ctwave: traveling waves of a chemotaxis system with logistic growth"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int workers = 0;
    std::vector<std::string> tol_overrides;

    const std::vector<std::pair<std::string, std::string>> modes = {
        {"speeds", "admissible speed window and thresholds over a chi list"},
        {"wave", "construct a traveling-wave profile at a given speed"},
        {"evolve", "coupled evolution with boundedness/stability checks"},
        {"verify", "run the super/sub-solution verifier suite"},
        {"eig", "principal-eigenvalue constructions and cross-checks"},
        {"sweep", "Cartesian (chi, tau) sweep of the speed window"},
    };
    std::vector<CLI::App*> subs;
    for (const auto& [name, desc] : modes) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->add_option("--config", config_path, "JSON configuration file");
        sub->add_option("--out", out_dir, "output directory (overrides config)");
        sub->add_option("--workers", workers, "worker threads for sweeps");
        sub->add_option("--tol-override", tol_overrides,
                        "override a tolerance, KEY=VALUE (outer|inner|residual_factor|root)");
        subs.push_back(sub);
    }
    CLI::App* schema = app.add_subcommand("schema", "print the documented default configuration");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (schema->parsed()) {
        std::cout << ctwave::default_config_schema().dump(2) << "\n";
        return 0;
    }

    try {
        ctwave::ExperimentConfig cfg;
        if (!config_path.empty()) {
            cfg = ctwave::load_config_file(config_path);
        } else {
            cfg.echo = nlohmann::json::object();
        }
        for (std::size_t i = 0; i < subs.size(); ++i) {
            if (subs[i]->parsed()) cfg.mode = ctwave::mode_from_string(modes[i].first);
        }
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (workers > 0) cfg.workers = workers;
        for (const std::string& kv : tol_overrides) {
            if (const int rc = apply_tol_override(cfg.tol, kv); rc != 0) return rc;
        }

        const ctwave::RunOutcome outcome = ctwave::run(cfg);
        for (const std::string& m : outcome.messages) std::cout << "ctwave: " << m << "\n";
        return outcome.exit_code;
    } catch (const ctwave::config_error& e) {
        std::cerr << "ctwave: usage error: " << e.what() << "\n";
        return 2;
    } catch (const ctwave::domain_error& e) {
        std::cerr << "ctwave: usage error: " << e.what() << "\n";
        return 2;
    } catch (const ctwave::solver_error& e) {
        std::cerr << "ctwave: solver error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "ctwave: error: " << e.what() << "\n";
        return 1;
    }
}
