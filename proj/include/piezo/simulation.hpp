#pragma once

#include <functional>
#include <vector>

#include "piezo/functionals.hpp"
#include "piezo/grid.hpp"
#include "piezo/initial.hpp"
#include "piezo/model.hpp"
#include "piezo/stepper.hpp"

namespace piezo {

/// Everything recorded along one run. Full states are not kept; each record
/// stores the functionals and the channel outflow z(., 1), and the velocity
/// history is sampled every `history_every` steps for the delay oracle.
struct Trace {
    Grid grid;
    SchemeConfig config;
    InitialData data;
    InitReport init;
    LyapunovWeights weights;

    std::vector<FunctionalSample> samples;
    std::vector<std::vector<double>> outflow;  // one per sample

    std::vector<double> history_t;
    std::vector<std::vector<double>> history_u;

    BeamState final_state;

    explicit Trace(const Grid& g) : grid(g), final_state(g) {}
};

class StepError : public std::runtime_error {
public:
    StepError(double t, const std::string& what);
    [[nodiscard]] double time() const { return t_; }

private:
    double t_;
};

/// Steps from 0 to cfg.t_end. Samples are taken at step 0, every
/// cfg.record_every steps, and at the final step; dEdt_fd and j_residual
/// are filled in after the run.
Trace run(const InitialData& data, const Grid& grid, const SchemeConfig& cfg, const Problem& problem,
          const LyapunovWeights& weights);

/// v_t(x, t - tau(t)) from the recorded velocity history, or from the
/// initial history v2 when t - tau(t) < 0.
std::vector<double> history_oracle_velocity(const Trace& trace, double t, const Problem& problem);

/// sup over records with t >= t_from of || z(., 1, t) - oracle(t) ||_inf.
double delay_channel_error(const Trace& trace, const Problem& problem, double t_from);

}  // namespace piezo
