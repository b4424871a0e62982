#include "piezo/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <ostream>
#include <random>

#include "piezo/format.hpp"
#include "piezo/operators.hpp"

namespace piezo {

DecayFit fit_decay(std::span<const double> t, std::span<const double> E, double E0, double t_lo, double t_hi) {
    if (t.size() != E.size()) throw std::invalid_argument("fit_decay: length mismatch");
    if (!(t_hi > t_lo)) throw std::invalid_argument("fit_decay: empty window");
    DecayFit fit;
    fit.t_lo = t_lo;
    fit.t_hi = t_hi;

    bool any_positive = false;
    for (std::size_t k = 0; k < t.size(); ++k)
        if (t[k] >= t_lo && t[k] <= t_hi && E[k] > 0.0) any_positive = true;
    if (!any_positive && !(E0 > 0.0)) return fit;  // all-zero energy: rate undefined
    if (!(E0 > 0.0)) throw std::invalid_argument("fit_decay: E0 must be positive");

    const double floor = 1e3 * std::numeric_limits<double>::epsilon() * E0;
    std::vector<double> xs, ys;
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] < t_lo || t[k] > t_hi || !(E[k] > floor)) continue;
        xs.push_back(t[k]);
        ys.push_back(std::log(E[k]));
    }
    if (static_cast<int>(xs.size()) < kMinFitSamples)
        throw std::invalid_argument("fit_decay: fewer than " + std::to_string(kMinFitSamples) +
                                    " usable samples in the window");

    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        mx += xs[k];
        my += ys[k];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        sxx += (xs[k] - mx) * (xs[k] - mx);
        sxy += (xs[k] - mx) * (ys[k] - my);
        syy += (ys[k] - my) * (ys[k] - my);
    }
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    fit.defined = true;
    fit.lambda_fit = -slope;
    fit.M_fit = std::exp(intercept) / E0;
    fit.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
    fit.samples_used = static_cast<int>(xs.size());
    return fit;
}

DecayFit fit_decay(std::span<const FunctionalSample> samples, double t_lo, double t_hi) {
    std::vector<double> t, E;
    for (const auto& s : samples) {
        t.push_back(s.t);
        E.push_back(s.E);
    }
    const double E0 = samples.empty() ? 0.0 : samples.front().E;
    return fit_decay(t, E, E0, t_lo, t_hi);
}

double tolerance_energy(const Grid& g, double dt, double E0, double c_tol) {
    return c_tol * (g.hx() * g.hx() + g.hy() + dt) * E0;
}

double tolerance_dissipativity(const Grid& g, double c_tol_h) { return c_tol_h * (g.hx() * g.hx() + g.hy()); }

DissipativitySweep dissipativity_sweep(const Grid& grid, const Problem& pb, int states, int times, double horizon,
                                       std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto probes = random_states(grid, states, rng);
    DissipativitySweep out;
    out.states = states;
    out.times = times;
    out.max_residual = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < times; ++k) {
        const double t = times == 1 ? 0.0 : horizon * k / (times - 1);
        for (auto& s : probes) {
            s.t = t;
            normalize(s, pb);
            const double r = dissipativity_residual(t, s, pb);
            if (r > out.max_residual) {
                out.max_residual = r;
                out.worst_t = t;
            }
        }
    }
    return out;
}

TrajectoryCheck check_trajectory(const Trace& tr, const Calibration& cal, double c_tol) {
    TrajectoryCheck c;
    const auto& s = tr.samples;
    if (s.size() < 3) throw std::invalid_argument("check_trajectory: need at least three samples");
    const double E0 = s.front().E;
    c.tol_E = tolerance_energy(tr.grid, tr.config.dt, E0, c_tol);
    const double ninf = -std::numeric_limits<double>::infinity();
    c.max_energy_increase = c.max_energy_residual = c.max_j_residual = c.max_diss_residual = ninf;
    c.min_lower_margin = c.min_upper_margin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (k + 1 < s.size()) c.max_energy_increase = std::max(c.max_energy_increase, s[k + 1].E - s[k].E);
        if (k > 0 && k + 1 < s.size()) {
            c.max_energy_residual = std::max(c.max_energy_residual, s[k].dEdt_fd - s[k].dE_bound);
            c.max_j_residual = std::max(c.max_j_residual, s[k].j_residual);
        }
        if (s[k].E > 0.0) {
            c.max_diss_residual = std::max(c.max_diss_residual, s[k].diss_residual / (2.0 * s[k].E));
            c.min_lower_margin = std::min(c.min_lower_margin, (s[k].Lyap - cal.gamma1 * s[k].E) / s[k].E);
            c.min_upper_margin = std::min(c.min_upper_margin, (cal.gamma2 * s[k].E - s[k].Lyap) / s[k].E);
        }
    }
    c.energy_ok = c.max_energy_increase <= c.tol_E && c.max_energy_residual <= c.tol_E;
    c.j_ok = c.max_j_residual <= c.tol_E;
    c.equivalence_ok = cal.gamma1 > 0.0 && cal.gamma2 > cal.gamma1 && c.min_lower_margin >= 0.0 &&
                       c.min_upper_margin >= 0.0;
    return c;
}

EquivalenceCheck check_equivalence(std::span<const BeamState> states, const Problem& pb, const Calibration& cal) {
    EquivalenceCheck c;
    c.min_lower_margin = c.min_upper_margin = std::numeric_limits<double>::infinity();
    for (const auto& st : states) {
        const auto f = lyapunov_suite(st.t, st, pb, cal.weights);
        if (!(f.E > 0.0)) continue;
        c.min_lower_margin = std::min(c.min_lower_margin, (f.Lyap - cal.gamma1 * f.E) / f.E);
        c.min_upper_margin = std::min(c.min_upper_margin, (cal.gamma2 * f.E - f.Lyap) / f.E);
    }
    c.ok = cal.gamma1 > 0.0 && cal.gamma2 > cal.gamma1 && c.min_lower_margin >= 0.0 && c.min_upper_margin >= 0.0;
    return c;
}

namespace {
std::vector<double> record_times(const SchemeConfig& sc) {
    const long steps = step_count(sc.dt, sc.t_end);
    std::vector<double> t;
    for (long k = 0; k <= steps; ++k)
        if (k % sc.record_every == 0 || k == steps) t.push_back(static_cast<double>(k) * sc.dt);
    return t;
}
}  // namespace

Calibration calibrate_for_run(const RunConfig& cfg, int random_probes) {
    const auto grid = cfg.grid();
    const auto base = cfg.base_weights();
    const auto times = record_times(cfg.scheme_config());
    auto probes = extremal_probes(grid, cfg.problem, base, times);
    std::mt19937_64 rng(cfg.check.seed);
    auto extra = random_states(grid, random_probes, rng);
    std::uniform_int_distribution<std::size_t> pick(0, times.size() - 1);
    for (auto& s : extra) {
        s.t = times[pick(rng)];
        normalize(s, cfg.problem);
        probes.push_back(std::move(s));
    }
    return calibrate_weights(probes, cfg.problem, base);
}

RefinementStudy refinement_study(const RunConfig& cfg, int levels) {
    if (levels < 3) throw std::invalid_argument("refinement_study: needs at least 3 levels");
    const int factor = 1 << (levels - 1);
    if ((cfg.nx - 1) % factor != 0 || (cfg.ny - 1) % factor != 0)
        throw std::invalid_argument("refinement_study: nx-1 and ny-1 must be divisible by 2^(levels-1)");
    if (cfg.history_every < 1) throw std::invalid_argument("refinement_study: history_every must be positive");
    const double dt_fine = cfg.time_step();

    std::vector<RunConfig> plans;
    for (int k = 0; k < levels; ++k) {
        const int coarsen = factor >> k;
        RunConfig c = cfg;
        c.nx = (cfg.nx - 1) / coarsen + 1;
        c.ny = (cfg.ny - 1) / coarsen + 1;
        if (c.nx < 3 || c.ny < 2) throw std::invalid_argument("refinement_study: coarsest grid is too small");
        c.dt = dt_fine * coarsen;
        // keep the record times common to every level
        c.record_every = std::max(1, cfg.record_every / coarsen);
        const double cell_steps =
            static_cast<double>(c.nx) * c.ny * static_cast<double>(step_count(*c.dt, c.t_end));
        if (cell_steps > kMaxCellSteps)
            throw std::invalid_argument("refinement_study: level " + std::to_string(k) + " exceeds the work limit");
        plans.push_back(std::move(c));
    }

    auto one = [](RunConfig c) {
        const auto base = c.base_weights();
        const auto tr = run(c.initial, c.grid(), c.scheme_config(), c.problem, base);
        RefinementLevel lv;
        lv.nx = c.nx;
        lv.ny = c.ny;
        lv.dt = *c.dt;
        lv.z_error = delay_channel_error(tr, c.problem, c.problem.delay.tau1());
        const double E0 = tr.samples.front().E;
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 1; k + 1 < tr.samples.size(); ++k)
            worst = std::max(worst, tr.samples[k].dEdt_fd - tr.samples[k].dE_bound);
        lv.energy_residual = E0 > 0.0 ? worst / E0 : worst;
        const auto fit = fit_decay(tr.samples, c.fit_lo(), c.fit_hi());
        lv.lambda_fit = fit.lambda_fit;
        lv.r_squared = fit.r_squared;
        return lv;
    };

    std::vector<std::future<RefinementLevel>> jobs;
    for (const auto& c : plans) jobs.push_back(std::async(std::launch::async, one, c));
    RefinementStudy study;
    for (auto& j : jobs) study.levels.push_back(j.get());
    for (std::size_t k = 0; k + 1 < study.levels.size(); ++k) {
        const auto& a = study.levels[k];
        const auto& b = study.levels[k + 1];
        study.z_orders.push_back(std::log2(a.z_error / b.z_error));
        study.lambda_drift.push_back(std::abs(a.lambda_fit - b.lambda_fit) / std::abs(b.lambda_fit));
    }
    return study;
}

void write_refinement_csv(std::ostream& os, const RefinementStudy& st) {
    os << "level,nx,ny,dt,z_error,z_order,energy_residual,lambda_fit,lambda_drift,r_squared\n";
    for (std::size_t k = 0; k < st.levels.size(); ++k) {
        const auto& l = st.levels[k];
        os << k << ',' << l.nx << ',' << l.ny << ',' << format_double(l.dt) << ',' << format_double(l.z_error) << ','
           << (k > 0 ? format_double(st.z_orders[k - 1]) : "") << ',' << format_double(l.energy_residual) << ','
           << format_double(l.lambda_fit) << ',' << (k > 0 ? format_double(st.lambda_drift[k - 1]) : "") << ','
           << format_double(l.r_squared) << '\n';
    }
}

void write_trace_csv(std::ostream& os, const Trace& tr) {
    os << kTraceCsvHeader << '\n';
    for (const auto& s : tr.samples) {
        os << format_double(s.t) << ',' << format_double(s.E) << ',' << format_double(s.dEdt_fd) << ','
           << format_double(s.dE_bound) << ',' << format_double(s.I1) << ',' << format_double(s.I2) << ','
           << format_double(s.I3) << ',' << format_double(s.J) << ',' << format_double(s.Lyap) << ','
           << format_double(s.diss_residual) << ',' << format_double(s.j_residual) << '\n';
    }
}

void Report::set(const std::string& key, const std::string& value) {
    for (auto& [k, v] : entries_) {
        if (k == key) {
            v = value;
            return;
        }
    }
    entries_.emplace_back(key, value);
}
void Report::set(const std::string& key, double value) { set(key, format_double(value)); }
void Report::set(const std::string& key, bool value) { set(key, std::string(value ? "true" : "false")); }
void Report::set(const std::string& key, int value) { set(key, std::to_string(value)); }

const std::string* Report::get(const std::string& key) const {
    for (const auto& [k, v] : entries_)
        if (k == key) return &v;
    return nullptr;
}

void Report::write(std::ostream& os) const {
    for (const auto& [k, v] : entries_) os << k << " = " << v << '\n';
}

void write_plot_script(std::ostream& os, const std::string& csv) {
    os << "# gnuplot script; run with: gnuplot -p plot.gp\n"
       << "set datafile separator ','\n"
       << "set key autotitle columnhead\n"
       << "set multiplot layout 2,1\n"
       << "set logscale y\n"
       << "set xlabel 't'\n"
       << "plot '" << csv << "' using 1:2 with lines, '' using 1:9 with lines, '' using 1:8 with lines\n"
       << "unset logscale y\n"
       << "plot '" << csv << "' using 1:($3-$4) with lines title 'dEdt_fd - dE_bound', "
       << "'' using 1:11 with lines title 'j_residual'\n"
       << "unset multiplot\n";
}

}  // namespace piezo
