#include "piezo/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "piezo/format.hpp"
#include "piezo/operators.hpp"

namespace piezo {

StepError::StepError(double t, const std::string& what)
    : std::runtime_error("step failed at t = " + format_double(t) + ": " + what), t_(t) {}

Trace run(const InitialData& data, const Grid& grid, const SchemeConfig& cfg, const Problem& problem,
          const LyapunovWeights& weights) {
    if (cfg.record_every < 1) throw std::invalid_argument("run: record_every must be at least 1");
    if (cfg.history_every < 0) throw std::invalid_argument("run: history_every must be non-negative");
    const long steps = step_count(cfg.dt, cfg.t_end);

    Trace tr(grid);
    tr.config = cfg;
    tr.data = data;
    tr.weights = weights;
    auto init = initialize(data, grid);
    tr.init = init.report;
    BeamState s = std::move(init.state);

    auto record = [&] {
        auto f = lyapunov_suite(s.t, s, problem, weights);
        f.diss_residual = dissipativity_residual(s.t, s, problem);
        tr.samples.push_back(f);
        tr.outflow.push_back(s.outflow());
    };
    auto remember = [&] {
        tr.history_t.push_back(s.t);
        tr.history_u.push_back(s.u);
    };

    TimeStepper stepper(problem, grid, cfg.dt, cfg.scheme);
    record();
    if (cfg.history_every > 0) remember();
    for (long k = 1; k <= steps; ++k) {
        try {
            stepper.advance(s);
        } catch (const std::exception& e) {
            throw StepError(s.t, e.what());
        }
        // integer step index keeps the time grid free of accumulated roundoff
        s.t = static_cast<double>(k) * cfg.dt;
        if (k % cfg.record_every == 0 || k == steps) record();
        if (cfg.history_every > 0 && (k % cfg.history_every == 0 || k == steps)) remember();
    }

    std::vector<double> t(tr.samples.size()), E(tr.samples.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        t[i] = tr.samples[i].t;
        E[i] = tr.samples[i].E;
    }
    if (t.size() >= 2) {
        const auto dE = centered_derivative(t, E);
        const auto jr = j_inequality_residual(tr.samples, problem);
        for (std::size_t i = 0; i < t.size(); ++i) {
            tr.samples[i].dEdt_fd = dE[i];
            tr.samples[i].j_residual = jr[i];
        }
    }
    tr.final_state = std::move(s);
    return tr;
}

std::vector<double> history_oracle_velocity(const Trace& tr, double t, const Problem& pb) {
    const auto& g = tr.grid;
    const double target = t - pb.delay.tau(t);
    std::vector<double> out(g.nx());
    if (target < 0.0) {
        const double s = -target / pb.delay.tau(0.0);
        if (s > 1.0 + 1e-12)
            throw std::out_of_range("history oracle: t - tau(t) = " + format_double(target) +
                                    " lies before the initial history");
        for (int i = 0; i < g.nx(); ++i) out[i] = tr.data.v2(g.x(i), s, g.length());
        // the clamped node and the inflow identity hold exactly on the grid
        out[0] = 0.0;
        return out;
    }
    const auto& ht = tr.history_t;
    if (ht.empty() || target > ht.back() + 1e-12)
        throw std::out_of_range("history oracle: t - tau(t) = " + format_double(target) +
                                " is outside the recorded history");
    auto it = std::upper_bound(ht.begin(), ht.end(), target);
    std::size_t hi = std::min<std::size_t>(it - ht.begin(), ht.size() - 1);
    if (hi == 0) hi = std::min<std::size_t>(1, ht.size() - 1);
    const std::size_t lo = hi == 0 ? 0 : hi - 1;
    const double w = hi == lo ? 0.0 : std::clamp((target - ht[lo]) / (ht[hi] - ht[lo]), 0.0, 1.0);
    for (int i = 0; i < g.nx(); ++i) out[i] = (1 - w) * tr.history_u[lo][i] + w * tr.history_u[hi][i];
    return out;
}

double delay_channel_error(const Trace& tr, const Problem& pb, double t_from) {
    double err = 0.0;
    for (std::size_t k = 0; k < tr.samples.size(); ++k) {
        const double t = tr.samples[k].t;
        if (t < t_from) continue;
        const auto ref = history_oracle_velocity(tr, t, pb);
        for (std::size_t i = 0; i < ref.size(); ++i) err = std::max(err, std::abs(tr.outflow[k][i] - ref[i]));
    }
    return err;
}

}  // namespace piezo
