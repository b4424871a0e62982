#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "piezo/admissibility.hpp"
#include "piezo/config.hpp"
#include "piezo/functionals.hpp"
#include "piezo/simulation.hpp"

namespace piezo {

struct DecayFit {
    bool defined = false;  // false when every energy in the window is zero
    double lambda_fit = 0.0;
    double M_fit = 0.0;
    double r_squared = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    int samples_used = 0;
};

inline constexpr int kMinFitSamples = 10;

/// Least-squares line through (t, ln E) over [t_lo, t_hi], skipping samples
/// with E below 1e3 eps E0. M_fit is exp(intercept) / E0.
DecayFit fit_decay(std::span<const double> t, std::span<const double> E, double E0, double t_lo, double t_hi);
DecayFit fit_decay(std::span<const FunctionalSample> samples, double t_lo, double t_hi);

// ---------------------------------------------------------------------------
// tolerances

/// c_tol (hx^2 + hy + dt) E0.
double tolerance_energy(const Grid& grid, double dt, double E0, double c_tol);
/// c_tol_h (hx^2 + hy), for unit-norm states.
double tolerance_dissipativity(const Grid& grid, double c_tol_h);

// ---------------------------------------------------------------------------
// checks shared by the CLI and the acceptance suite

struct DissipativitySweep {
    double max_residual = 0.0;  // over unit-norm states
    double worst_t = 0.0;
    int states = 0;
    int times = 0;
};

/// Random unit-norm states at `times` evenly spaced points of [0, horizon].
DissipativitySweep dissipativity_sweep(const Grid& grid, const Problem& problem, int states, int times,
                                       double horizon, std::uint64_t seed);

struct TrajectoryCheck {
    double tol_E = 0.0;
    double max_energy_increase = 0.0;  // max_k E(t_{k+1}) - E(t_k)
    double max_energy_residual = 0.0;  // max interior dEdt_fd - dE_bound
    double max_j_residual = 0.0;       // max interior j_residual
    double max_diss_residual = 0.0;    // max diss_residual / <U,U>
    double min_lower_margin = 0.0;     // min (Lyap - gamma1 E) / E
    double min_upper_margin = 0.0;     // min (gamma2 E - Lyap) / E
    bool energy_ok = false;
    bool j_ok = false;
    bool equivalence_ok = false;
};

/// Evaluates the per-sample inequalities of a trace. The Lyapunov values in
/// the trace must have been computed with `cal.weights`.
TrajectoryCheck check_trajectory(const Trace& trace, const Calibration& cal, double c_tol);

struct EquivalenceCheck {
    double min_lower_margin = 0.0;
    double min_upper_margin = 0.0;
    bool ok = false;
};
EquivalenceCheck check_equivalence(std::span<const BeamState> states, const Problem& problem, const Calibration& cal);

/// Calibrates on the extremal probes at the record times of a planned run
/// plus `random_probes` random unit-norm states.
Calibration calibrate_for_run(const RunConfig& cfg, int random_probes);

// ---------------------------------------------------------------------------
// refinement

struct RefinementLevel {
    int nx = 0;
    int ny = 0;
    double dt = 0.0;
    double z_error = 0.0;           // delay-channel mismatch on [tau1, t_end]
    double energy_residual = 0.0;   // max interior (dEdt_fd - dE_bound) / E0
    double lambda_fit = 0.0;
    double r_squared = 0.0;
};

struct RefinementStudy {
    std::vector<RefinementLevel> levels;  // coarse to fine
    std::vector<double> z_orders;         // log2 ratio between successive levels
    std::vector<double> lambda_drift;     // relative change between successive levels
};

inline constexpr double kMaxCellSteps = 4e9;

/// Runs `levels` grids ending at the configured one; each coarser level has
/// hx, hy and dt doubled. Levels run concurrently.
RefinementStudy refinement_study(const RunConfig& cfg, int levels);
void write_refinement_csv(std::ostream& os, const RefinementStudy& study);

// ---------------------------------------------------------------------------
// output

inline constexpr const char* kTraceCsvHeader = "t,E,dEdt_fd,dE_bound,I1,I2,I3,J,Lyap,diss_residual,j_residual";

void write_trace_csv(std::ostream& os, const Trace& trace);

/// Flat "key = value" report, keys in insertion order.
class Report {
public:
    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, double value);
    void set(const std::string& key, bool value);
    void set(const std::string& key, int value);
    [[nodiscard]] const std::string* get(const std::string& key) const;
    [[nodiscard]] const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
    void write(std::ostream& os) const;

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

/// Gnuplot script plotting E, Lyap and J (log scale) and the two residuals.
void write_plot_script(std::ostream& os, const std::string& csv_name);

}  // namespace piezo
