#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "hbl/cli.hpp"
#include "hbl/params.hpp"

namespace {

struct ModelFlags {
    std::string preset = "high";
    std::string config_file;
    std::optional<double> mu, kappa, theta, sigma, rho, x0, v0, T;
};

void add_model_flags(CLI::App* cmd, ModelFlags& m) {
    cmd->add_option("--preset", m.preset, "parameter preset: high, unit or low")
        ->envname("HBL_PRESET");
    cmd->add_option("--config", m.config_file, "key=value parameter file (overrides preset)")
        ->envname("HBL_CONFIG");
    cmd->add_option("--mu", m.mu, "drift override");
    cmd->add_option("--kappa", m.kappa, "mean-reversion speed override");
    cmd->add_option("--theta", m.theta, "long-run variance override");
    cmd->add_option("--sigma", m.sigma, "vol-of-vol override");
    cmd->add_option("--rho", m.rho, "correlation override");
    cmd->add_option("--x0", m.x0, "initial log-price override");
    cmd->add_option("--v0", m.v0, "initial variance override");
    cmd->add_option("--T", m.T, "horizon override");
}

// Preset/config values first, then any explicit flag on top.
hbl::HestonParams resolve_model(const ModelFlags& m) {
    hbl::HestonParams base = m.config_file.empty() ? hbl::preset_params(m.preset)
                                                   : hbl::load_params_file(m.config_file);
    return hbl::HestonParams(m.mu.value_or(base.mu), m.kappa.value_or(base.kappa),
                             m.theta.value_or(base.theta), m.sigma.value_or(base.sigma),
                             m.rho.value_or(base.rho), m.x0.value_or(base.x0),
                             m.v0.value_or(base.v0), m.T.value_or(base.T));
}

bool has_override(const ModelFlags& m) {
    return !m.config_file.empty() || m.mu || m.kappa || m.theta || m.sigma || m.rho || m.x0 ||
           m.v0 || m.T;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hbl: strong-approximation laboratory for the log-Heston SDE"};
    app.set_version_flag("--version", hbl::kVersion);
    app.require_subcommand(1);

    hbl::RunConfig cfg;
    ModelFlags model;

    auto add_common = [&](CLI::App* cmd, bool with_model) {
        if (with_model) add_model_flags(cmd, model);
        cmd->add_option("--steps", cfg.steps, "comma list of coarse step counts")
            ->delimiter(',')
            ->envname("HBL_STEPS");
        cmd->add_option("--steps-fine", cfg.steps_fine, "fine reference step count")
            ->envname("HBL_STEPS_FINE");
        cmd->add_option("--paths,-M", cfg.paths, "Monte Carlo path count")->envname("HBL_PATHS");
        cmd->add_option("--refine", cfg.refine, "dyadic refinement level n")
            ->envname("HBL_REFINE");
        cmd->add_option("--seed", cfg.seed, "master seed")->envname("HBL_SEED");
        cmd->add_option("--threads", cfg.threads, "worker thread count (0 = default)")
            ->envname("HBL_THREADS");
        cmd->add_option("--out,-o", cfg.out, "output CSV path (default stdout)")
            ->envname("HBL_OUT");
    };

    auto* rates = app.add_subcommand("rates", "coupled strong-error table and rate fit");
    add_common(rates, true);
    rates->add_option("--scheme", cfg.scheme, "trajectory dump scheme: euler or reference")
        ->envname("HBL_SCHEME");
    rates->add_option("--dump-paths", cfg.dump_paths,
                      "also write fine-grid trajectories of the first paths to this CSV");
    add_common(app.add_subcommand("barrier", "X-error floor comparison table"), true);
    add_common(app.add_subcommand("bridge-check", "iterated-integral law and bracket"), true);
    add_common(app.add_subcommand("cc", "Clark-Cameron exact-error table"), false);
    add_common(app.add_subcommand("decompose", "decomposition reconstruction table"), true);
    add_common(app.add_subcommand("moments", "CIR marginal-law oracle table"), true);
    auto* selftest = app.add_subcommand("selftest", "run the verification suite");
    add_common(selftest, false);
    selftest->add_flag("--quick", cfg.quick, "reduced ensembles, about two minutes");
    selftest->add_flag("--full", cfg.full, "full-scale ensembles (default)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    cfg.subcommand = app.get_subcommands().front()->get_name();
    cfg.preset = model.preset;
    try {
        if (has_override(model)) {
            cfg.params = resolve_model(model);
            cfg.preset = "custom";
        } else if (cfg.subcommand != "cc" && cfg.subcommand != "selftest") {
            cfg.params = hbl::preset_params(model.preset);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    return hbl::run(cfg, std::cout, std::cerr);
}
