#include "piezo/commands.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "piezo/dense.hpp"
#include "piezo/format.hpp"

namespace piezo {

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    os << text;
}

// Loads the config and applies --seed; config errors become exit code 2.
std::optional<RunConfig> load(const CommandOptions& opt, std::ostream& err) {
    try {
        auto cfg = load_config(opt.config_path);
        if (opt.seed) cfg.check.seed = *opt.seed;
        return cfg;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << '\n';
    }
    return std::nullopt;
}

const char* verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

void fill_report(Report& r, const SimulationOutcome& o, const RunConfig& cfg) {
    const auto& tr = o.trace;
    r.set("admissible", o.admissibility.admissible());
    if (const auto* f = o.admissibility.first_failure()) r.set("first_failure", f->id);
    r.set("C1", o.admissibility.C1);
    r.set("C2_min", o.admissibility.C2_min);
    r.set("max_energy_residual", o.trajectory.max_energy_residual);
    r.set("max_energy_increase", o.trajectory.max_energy_increase);
    r.set("max_j_residual", o.trajectory.max_j_residual);
    r.set("max_diss_residual", o.trajectory.max_diss_residual);
    r.set("tol_E", o.trajectory.tol_E);
    r.set("gamma1", o.calibration.gamma1);
    r.set("gamma2", o.calibration.gamma2);
    r.set("gamma3", o.calibration.gamma3);
    r.set("N", o.calibration.weights.N);
    r.set("N1", o.calibration.weights.N1);
    r.set("N2", o.calibration.weights.N2);
    r.set("N3", o.calibration.weights.N3);
    r.set("lambda_fit", o.fit.lambda_fit);
    r.set("lambda_fit_defined", o.fit.defined);
    r.set("M_fit", o.fit.M_fit);
    r.set("r_squared", o.fit.r_squared);
    r.set("fit_t_lo", o.fit.t_lo);
    r.set("fit_t_hi", o.fit.t_hi);
    r.set("nx", cfg.nx);
    r.set("ny", cfg.ny);
    r.set("dt", tr.config.dt);
    r.set("t_end", cfg.t_end);
    r.set("scheme", to_string(cfg.scheme));
    r.set("seed", std::to_string(cfg.check.seed));
    r.set("samples", static_cast<int>(tr.samples.size()));
    r.set("init_max_adjustment", tr.init.max_adjustment);
    r.set("init_history_mismatch", tr.init.history_mismatch);
    r.set("init_history_incompatible", tr.init.history_incompatible);
    r.set("E0", tr.samples.front().E);
    r.set("E_final", tr.samples.back().E);
}

void write_outputs(const fs::path& dir, const SimulationOutcome& o) {
    fs::create_directories(dir);
    std::ostringstream csv;
    write_trace_csv(csv, o.trace);
    write_file(dir / "trace.csv", csv.str());
    std::ostringstream rep;
    o.report.write(rep);
    write_file(dir / "report.txt", rep.str());
    std::ostringstream gp;
    write_plot_script(gp, "trace.csv");
    write_file(dir / "plot.gp", gp.str());
}

}  // namespace

std::string resolve_out_dir(const CommandOptions& opt, const RunConfig& cfg) {
    if (opt.out_dir) return *opt.out_dir;
    if (const char* env = std::getenv("PIEZO_OUT_DIR"); env && *env) return env;
    return cfg.out_dir;
}

SimulationOutcome simulate(const RunConfig& cfg) {
    auto adm = validate_admissibility(cfg.problem, cfg.t_end);
    auto cal = calibrate_for_run(cfg, cfg.check.probes);
    auto tr = run(cfg.initial, cfg.grid(), cfg.scheme_config(), cfg.problem, cal.weights);
    auto traj = check_trajectory(tr, cal, cfg.check.c_tol);
    DecayFit fit;
    try {
        fit = fit_decay(tr.samples, cfg.fit_lo(), cfg.fit_hi());
    } catch (const std::invalid_argument&) {
        fit.t_lo = cfg.fit_lo();
        fit.t_hi = cfg.fit_hi();
    }
    SimulationOutcome o{std::move(adm), cal, std::move(tr), traj, fit, {}};
    fill_report(o.report, o, cfg);
    return o;
}

int cmd_validate(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
    const auto cfg = load(opt, err);
    if (!cfg) return exit_code::config_error;
    const auto rep = validate_admissibility(cfg->problem, cfg->t_end);
    print_report(out, rep);
    return rep.admissible() ? exit_code::ok : exit_code::inadmissible;
}

int cmd_simulate(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
    const auto cfg = load(opt, err);
    if (!cfg) return exit_code::config_error;
    const auto adm = validate_admissibility(cfg->problem, cfg->t_end);
    if (!adm.admissible()) {
        print_report(err, adm);
        return exit_code::inadmissible;
    }
    const fs::path dir = resolve_out_dir(opt, *cfg);
    if (opt.dump_operator) {
        const auto g = cfg->grid();
        if (state_dimension(g) > kMaxDumpDimension) {
            err << "operator dump refused: state dimension " << state_dimension(g) << " exceeds "
                << kMaxDumpDimension << '\n';
            return exit_code::config_error;
        }
        fs::create_directories(dir);
        write_matrix_text((dir / "operator.txt").string(), generator_matrix(0.0, g, cfg->problem));
    }
    try {
        const auto o = simulate(*cfg);
        write_outputs(dir, o);
        out << "wrote " << (dir / "trace.csv").string() << " (" << o.trace.samples.size() << " records), "
            << (dir / "report.txt").string() << ", " << (dir / "plot.gp").string() << '\n';
        out << "lambda_fit = " << format_double(o.fit.lambda_fit) << ", r_squared = " << format_double(o.fit.r_squared)
            << '\n';
    } catch (const std::exception& e) {
        err << "simulation failed: " << e.what() << '\n';
        return exit_code::check_failed;
    }
    return exit_code::ok;
}

int cmd_check(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
    const auto cfg = load(opt, err);
    if (!cfg) return exit_code::config_error;
    const auto adm = validate_admissibility(cfg->problem, cfg->t_end);
    print_report(out, adm);
    if (!adm.admissible()) return exit_code::inadmissible;

    const auto grid = cfg->grid();
    bool all = true;
    auto line = [&](const std::string& name, bool ok, const std::string& detail) {
        out << verdict(ok) << "  " << name << "  " << detail << '\n';
        all = all && ok;
    };

    const auto sweep = dissipativity_sweep(grid, cfg->problem, cfg->check.diss_states, cfg->check.diss_times,
                                           cfg->t_end, cfg->check.seed);
    const double tol_h = tolerance_dissipativity(grid, cfg->check.c_tol_h);
    line("dissipativity", sweep.max_residual <= tol_h,
         "max residual " + format_double(sweep.max_residual) + " <= tol_h " + format_double(tol_h));

    std::optional<SimulationOutcome> outcome;
    try {
        outcome.emplace(simulate(*cfg));
    } catch (const std::exception& e) {
        err << "simulation failed: " << e.what() << '\n';
        return exit_code::check_failed;
    }
    auto& o = *outcome;
    const auto& tc = o.trajectory;
    line("energy", tc.energy_ok,
         "max increase " + format_double(tc.max_energy_increase) + ", max dEdt_fd - bound " +
             format_double(tc.max_energy_residual) + " <= tol_E " + format_double(tc.tol_E));
    line("j_inequality", tc.j_ok, "max residual " + format_double(tc.max_j_residual));
    line("equivalence_trajectory", tc.equivalence_ok,
         "gamma1 " + format_double(o.calibration.gamma1) + ", gamma2 " + format_double(o.calibration.gamma2) +
             ", margins " + format_double(tc.min_lower_margin) + " / " + format_double(tc.min_upper_margin));

    std::mt19937_64 rng(cfg->check.seed ^ 0x9e3779b97f4a7c15ULL);
    auto probes = random_states(grid, cfg->check.probes, rng);
    const auto& times = o.trace.samples;
    std::uniform_int_distribution<std::size_t> pick(0, times.size() - 1);
    for (auto& s : probes) {
        s.t = times[pick(rng)].t;
        normalize(s, cfg->problem);
    }
    const auto eq = check_equivalence(probes, cfg->problem, o.calibration);
    line("equivalence_probes", eq.ok,
         "margins " + format_double(eq.min_lower_margin) + " / " + format_double(eq.min_upper_margin));
    line("decay_fit", o.fit.defined && o.fit.lambda_fit > 0.0 && o.fit.r_squared >= 0.99,
         "lambda_fit " + format_double(o.fit.lambda_fit) + ", r_squared " + format_double(o.fit.r_squared));

    o.report.set("tol_h", tol_h);
    o.report.set("max_diss_sweep_residual", sweep.max_residual);
    o.report.set("check_passed", all);
    try {
        write_outputs(resolve_out_dir(opt, *cfg), o);
    } catch (const std::exception& e) {
        err << e.what() << '\n';
        return exit_code::check_failed;
    }
    return all ? exit_code::ok : exit_code::check_failed;
}

int cmd_sweep(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
    ConfigMap base;
    try {
        base = read_config_map(opt.config_path);
        (void)build_config(base);
    } catch (const std::exception& e) {
        err << "config error: " << e.what() << '\n';
        return exit_code::config_error;
    }
    if (opt.axis.empty() || opt.values.empty()) {
        err << "config error: sweep needs --axis and at least one value\n";
        return exit_code::config_error;
    }
    std::vector<RunConfig> plans;
    for (const auto& v : opt.values) {
        auto m = base;
        m[opt.axis] = v;
        try {
            auto c = build_config(m);
            if (opt.seed) c.check.seed = *opt.seed;
            plans.push_back(std::move(c));
        } catch (const std::exception& e) {
            err << "config error: " << opt.axis << " = " << v << ": " << e.what() << '\n';
            return exit_code::config_error;
        }
    }
    const fs::path dir = resolve_out_dir(opt, plans.front());

    struct Row {
        bool admissible = false;
        std::string first_failure;
        bool ran = false;
        std::string error;
        DecayFit fit;
        double max_energy_residual = 0.0;
    };
    std::vector<Row> rows(plans.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < plans.size(); k = next++) {
            Row& r = rows[k];
            const auto adm = validate_admissibility(plans[k].problem, plans[k].t_end);
            r.admissible = adm.admissible();
            if (const auto* f = adm.first_failure()) r.first_failure = f->id;
            if (!r.admissible) continue;
            try {
                const auto o = simulate(plans[k]);
                write_outputs(dir / ("run_" + std::to_string(k)), o);
                r.ran = true;
                r.fit = o.fit;
                r.max_energy_residual = o.trajectory.max_energy_residual;
            } catch (const std::exception& e) {
                r.error = e.what();
            }
        }
    };
    unsigned n = opt.threads > 0 ? static_cast<unsigned>(opt.threads) : std::thread::hardware_concurrency();
    n = std::max(1u, std::min<unsigned>(n, static_cast<unsigned>(plans.size())));
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::ostringstream csv;
    csv << "index," << opt.axis << ",admissible,first_failure,lambda_fit,r_squared,max_energy_residual\n";
    bool failures = false;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto& r = rows[k];
        csv << k << ',' << opt.values[k] << ',' << (r.admissible ? "true" : "false") << ',' << r.first_failure << ','
            << (r.ran ? format_double(r.fit.lambda_fit) : "") << ',' << (r.ran ? format_double(r.fit.r_squared) : "")
            << ',' << (r.ran ? format_double(r.max_energy_residual) : "") << '\n';
        if (!r.error.empty()) {
            err << opt.axis << " = " << opt.values[k] << ": " << r.error << '\n';
            failures = true;
        }
    }
    fs::create_directories(dir);
    write_file(dir / "sweep.csv", csv.str());
    out << csv.str();
    return failures ? exit_code::check_failed : exit_code::ok;
}

int cmd_refine(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
    const auto cfg = load(opt, err);
    if (!cfg) return exit_code::config_error;
    RefinementStudy st;
    try {
        st = refinement_study(*cfg, opt.levels);
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << '\n';
        return exit_code::config_error;
    } catch (const std::exception& e) {
        err << "refinement failed: " << e.what() << '\n';
        return exit_code::check_failed;
    }
    std::ostringstream csv;
    write_refinement_csv(csv, st);
    const fs::path dir = resolve_out_dir(opt, *cfg);
    fs::create_directories(dir);
    write_file(dir / "refinement.csv", csv.str());
    out << csv.str();
    return exit_code::ok;
}

}  // namespace piezo
