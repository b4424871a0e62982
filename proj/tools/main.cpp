#include <CLI11.hpp>
#include <iostream>

#include "piezo/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Piezoelectric beam with time-varying delayed damping: simulation and stability checks"};
    app.require_subcommand(1);

    piezo::CommandOptions opt;
    std::uint64_t seed = 0;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "INI configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out_dir, "output directory");
        sub->add_option("--seed", seed, "seed for probe randomization")->each([&](const std::string&) {
            opt.seed = seed;
        });
    };

    auto* validate = app.add_subcommand("validate", "check the stability assumptions of a configuration");
    common(validate);
    auto* simulate = app.add_subcommand("simulate", "run one simulation and write trace.csv, report.txt, plot.gp");
    common(simulate);
    simulate->add_flag("--dump-operator", opt.dump_operator, "also write the dense generator at t = 0");
    auto* check = app.add_subcommand("check", "run the dissipativity, trajectory and decay checks");
    common(check);
    auto* sweep = app.add_subcommand("sweep", "repeat the simulation over values of one config key");
    common(sweep);
    sweep->add_option("--axis", opt.axis, "config key as section.key, e.g. model.delta")->required();
    sweep->add_option("--values", opt.values, "values for the axis")->required()->delimiter(',');
    sweep->add_option("--threads", opt.threads, "worker threads (0 = all cores)");
    auto* refine = app.add_subcommand("refine", "grid refinement study ending at the configured grid");
    common(refine);
    refine->add_option("--levels", opt.levels, "number of levels (>= 3)")->check(CLI::Range(3, 8));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : piezo::exit_code::config_error;
    }

    if (*validate) return piezo::cmd_validate(opt, std::cout, std::cerr);
    if (*simulate) return piezo::cmd_simulate(opt, std::cout, std::cerr);
    if (*check) return piezo::cmd_check(opt, std::cout, std::cerr);
    if (*sweep) return piezo::cmd_sweep(opt, std::cout, std::cerr);
    return piezo::cmd_refine(opt, std::cout, std::cerr);
}
