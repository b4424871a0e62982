#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "piezo/grid.hpp"
#include "piezo/model.hpp"

namespace piezo {

enum class Scheme {
    /// Trapezoid (Crank-Nicolson) update of the whole semi-discrete system
    /// with coefficients frozen at the step midpoint.
    trapezoid,
    /// Classical four-stage Runge-Kutta.
    rk4,
};

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& name);

struct SchemeConfig {
    double dt = 0.0;
    Scheme scheme = Scheme::trapezoid;
    double t_end = 0.0;
    int record_every = 1;
    /// Steps between stored velocity snapshots (for the delay oracle); 0 keeps none.
    int history_every = 1;
};

class CflViolation : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Certified sup over t and y of (1 - tau'(t) y) / tau(t).
double max_transport_speed(const DelaySpec& delay);
/// dt * max_transport_speed / hy; explicit transport needs this <= 1.
double cfl_number(double dt, const Grid& grid, const DelaySpec& delay);
/// Half the transport CFL limit, capped by 0.25 hx sqrt(rho / alpha).
double default_dt(const Grid& grid, const Problem& problem);

/// Number of steps needed to reach t_end with a fixed dt.
long step_count(double dt, double t_end);

/// Advances a state by one step of the chosen scheme. Holds scratch storage,
/// so one instance per thread.
class TimeStepper {
public:
    TimeStepper(const Problem& problem, const Grid& grid, double dt, Scheme scheme);

    /// Throws CflViolation when dt breaks the transport CFL bound.
    void advance(BeamState& state);

    [[nodiscard]] double dt() const { return dt_; }
    [[nodiscard]] Scheme scheme() const { return scheme_; }

private:
    void advance_trapezoid(BeamState& s);
    void advance_rk4(BeamState& s);

    Problem problem_;
    Grid grid_;
    double dt_;
    Scheme scheme_;
    std::vector<double> a_, b_;  // channel affine map z_new = a + b * u_new
    std::vector<double> rhs_;
};

/// One step, functional form.
BeamState step(const BeamState& state, const SchemeConfig& cfg, const Problem& problem);

/// Trapezoid-in-time, upwind-in-y update of the delay channel written as an
/// affine map of the new inflow: z_new(i, j) = a(i, j) + b(j) * inflow_new(i).
/// Coefficients are evaluated at the midpoint values tau_mid, dtau_mid.
void channel_affine_map(const BeamState& state, double tau_mid, double dtau_mid, double dt, std::span<double> a,
                        std::span<double> b);

/// Delay channel driven by a scripted inflow, with the beam frozen. Used to
/// validate the transport discretization on its own.
class TransportOnly {
public:
    TransportOnly(const Grid& grid, const DelaySpec& delay, BeamState initial);

    /// Moves to t + dt with z(., 0, t + dt) = inflow_new.
    void advance(double dt, std::span<const double> inflow_new);

    [[nodiscard]] const BeamState& state() const { return state_; }
    [[nodiscard]] double t() const { return state_.t; }

private:
    DelaySpec delay_;
    BeamState state_;
    std::vector<double> a_, b_;
};

}  // namespace piezo
