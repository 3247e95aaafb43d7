// adiabound: adiabatic error bounds, simulations and self-checks from a JSON config.

#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "adiabound/cli.hpp"

namespace cli = adiabound::cli;

namespace {

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string tau;
    std::string out;
    std::string format;
    int parallel = 0;
    std::string model;
};

cli::RunConfig resolve(const Options& o, bool config_required) {
    cli::RunConfig cfg;
    if (!o.config.empty()) {
        cfg = cli::load_config(o.config);
    } else if (!o.model.empty()) {
        cfg = cli::parse_config(cli::default_config(o.model));
    } else if (config_required) {
        throw adiabound::ConfigError("--config PATH or --model tong|flux is required");
    }
    if (o.seed) {
        if (!cfg.noise) throw adiabound::ConfigError("--seed given but the config has no noise section");
        cfg.noise->seed = *o.seed;
        cfg.seeds = {*o.seed};
    }
    if (!o.tau.empty()) cfg.taus = cli::parse_tau_argument(o.tau);
    if (!o.out.empty()) cfg.out_path = o.out;
    if (!o.format.empty()) {
        if (o.format != "csv" && o.format != "json") throw adiabound::ConfigError("--format must be csv or json");
        cfg.format = o.format;
    }
    if (o.parallel > 0) cfg.parallel = o.parallel;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adiabatic-theorem error bounds with explicit constants"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config, "JSON run configuration")->check(CLI::ExistingFile);
        sub->add_option("--model", opt.model, "use the built-in defaults for a model")
            ->check(CLI::IsMember({"tong", "flux"}));
        sub->add_option("--seed", opt.seed, "noise seed (overrides the config)");
        sub->add_option("--tau", opt.tau, "tau values in us: LIST (0.5,1,5) or RANGE (start:stop:count[:log])");
        sub->add_option("--out", opt.out, "output path ('-' for stdout)");
        sub->add_option("--format", opt.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--parallel", opt.parallel, "worker threads for sweeps")->check(CLI::PositiveNumber);
    };
    CLI::App* bound = app.add_subcommand("bound", "evaluate the error bound over tau");
    CLI::App* simulate = app.add_subcommand("simulate", "simulate the adiabatic error over tau");
    CLI::App* calibrate = app.add_subcommand("calibrate-noise", "calibrate noise amplitude bounds");
    CLI::App* verify = app.add_subcommand("verify", "run the property suite");
    for (auto* sub : {bound, simulate, calibrate, verify}) add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? cli::kOk : cli::kConfigError;
    }

    try {
        const cli::RunConfig cfg = resolve(opt, !*verify);
        cli::CommandResult res;
        if (*bound) res = cli::cmd_bound(cfg);
        else if (*simulate) res = cli::cmd_simulate(cfg);
        else if (*calibrate) res = cli::cmd_calibrate_noise(cfg);
        else res = cli::cmd_verify(cfg);

        cli::emit(res.data, cfg, std::cout);
        if (!res.message.empty()) std::cerr << "adiabound: " << res.message << '\n';
        return res.exit_code;
    } catch (const adiabound::ConfigError& e) {
        std::cerr << "adiabound: " << e.what() << '\n';
        return cli::kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "adiabound: " << e.what() << '\n';
        return cli::kNumericalFailure;
    }
}
