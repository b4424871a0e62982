#pragma once

// Continuous-time problem data: beam constants, delay schedule, damping
// weights, and the weight multiplier that makes the time-dependent norm
// dissipative.

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace piezo {

/// Raised when a configuration cannot satisfy the stability assumptions
/// (empty weight window, non-positive delay bound, ...).
class InadmissibleError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct PhysicalParams {
    double rho = 1.0;     // mass density
    double alpha1 = 1.0;  // elastic coefficient
    double gamma = 0.5;   // piezoelectric coefficient
    double beta = 1.0;    // beam coefficient
    double mu = 1.0;      // magnetic permeability
    double length = 1.0;  // beam length L

    /// Elastic stiffness of the coupled system, alpha1 + gamma^2 beta.
    [[nodiscard]] double alpha() const { return alpha1 + gamma * gamma * beta; }
    [[nodiscard]] bool all_positive() const;
};

// ---------------------------------------------------------------------------
// Delay schedules

struct ConstantDelay {
    double value;
};

/// tau(t) = clamp(offset + slope t, lo, hi). The clamp produces a corner in
/// tau, so the schedule is only twice-Lipschitz on horizons that avoid it.
struct AffineClampedDelay {
    double offset;
    double slope;
    double lo;
    double hi;
};

/// tau(t) = mean + amplitude sin(omega t).
struct SinusoidalDelay {
    double mean;
    double amplitude;
    double omega;
};

class DelaySpec {
public:
    using Kind = std::variant<ConstantDelay, AffineClampedDelay, SinusoidalDelay>;

    explicit DelaySpec(Kind kind) : kind_(kind) {}

    static DelaySpec constant(double value) { return DelaySpec{ConstantDelay{value}}; }
    static DelaySpec affine_clamped(double offset, double slope, double lo, double hi) {
        return DelaySpec{AffineClampedDelay{offset, slope, lo, hi}};
    }
    static DelaySpec sinusoidal(double mean, double amplitude, double omega) {
        return DelaySpec{SinusoidalDelay{mean, amplitude, omega}};
    }
    /// Builds a schedule from its config name ("constant", "affine-clamped",
    /// "sinusoidal") and positional parameters.
    static DelaySpec from_kind(const std::string& name, const std::vector<double>& params);

    [[nodiscard]] double tau(double t) const;
    [[nodiscard]] double dtau(double t) const;
    [[nodiscard]] double ddtau(double t) const;

    // Certified constants, valid for every t >= 0.
    [[nodiscard]] double tau0() const;
    [[nodiscard]] double tau1() const;
    [[nodiscard]] double d() const;
    /// Certified lower bound on tau'(t); bounds the transport speed.
    [[nodiscard]] double dtau_min() const;
    /// sup |tau'|.
    [[nodiscard]] double dtau_abs_max() const;
    /// sup |tau''| on [0, horizon]; empty when tau' has a jump in the horizon.
    [[nodiscard]] std::optional<double> ddtau_bound(double horizon) const;

    /// Times in [0, horizon] where tau or tau' attain extrema or change regime.
    [[nodiscard]] std::vector<double> critical_times(double horizon) const;

    [[nodiscard]] std::string kind_name() const;
    [[nodiscard]] std::vector<double> params() const;
    [[nodiscard]] const Kind& kind() const { return kind_; }

private:
    Kind kind_;
};

// ---------------------------------------------------------------------------
// Damping weights

struct ConstantWeight {
    double value;
};
/// base + amplitude exp(-rate t)
struct ExponentialWeight {
    double base;
    double amplitude;
    double rate;
};
/// amplitude / (1 + rate t)
struct RationalWeight {
    double amplitude;
    double rate;
};
/// factor * mu1(t); only meaningful for the delayed weight.
struct ProportionalWeight {
    double factor;
};
/// mean + amplitude sin(omega t)
struct SinusoidalWeight {
    double mean;
    double amplitude;
    double omega;
};

using InstantWeight = std::variant<ConstantWeight, ExponentialWeight, RationalWeight>;
using DelayedWeight = std::variant<ConstantWeight, ProportionalWeight, SinusoidalWeight>;

InstantWeight instant_weight_from_kind(const std::string& name, const std::vector<double>& params);
DelayedWeight delayed_weight_from_kind(const std::string& name, const std::vector<double>& params);
std::string kind_name(const InstantWeight& w);
std::string kind_name(const DelayedWeight& w);
std::vector<double> kind_params(const InstantWeight& w);
std::vector<double> kind_params(const DelayedWeight& w);

struct DampingSpec {
    InstantWeight mu1_kind = ConstantWeight{1.0};
    DelayedWeight mu2_kind = ConstantWeight{0.0};
    double M1 = 1.0;     // declared bound on |mu1'/mu1|
    double M2 = 1.0;     // declared bound on |mu2'| / mu1
    double delta = 0.0;  // declared bound on |mu2| / mu1

    [[nodiscard]] double mu1(double t) const;
    [[nodiscard]] double dmu1(double t) const;
    [[nodiscard]] double mu2(double t) const;
    [[nodiscard]] double dmu2(double t) const;
    [[nodiscard]] std::vector<double> critical_times(double horizon) const;
};

// ---------------------------------------------------------------------------

struct OpenInterval {
    double lo;
    double hi;
    [[nodiscard]] bool contains(double x) const { return lo < x && x < hi; }
    [[nodiscard]] double midpoint() const { return 0.5 * (lo + hi); }
};

/// Admissible interval for the weight multiplier,
/// (delta / sqrt(1-d), 2 - delta / sqrt(1-d)).
/// Throws InadmissibleError when delta >= sqrt(1-d) and std::invalid_argument
/// when delta < 0 or d >= 1.
OpenInterval xi_window(double delta, double d);

/// sqrt(1 + tau'(t)^2) / (2 tau(t)).
double kappa(double t, const DelaySpec& delay);

struct StabilityConstants {
    double xi_bar;
    double delta;
    double d;

    /// Coefficient of the instantaneous-velocity dissipation.
    [[nodiscard]] double C1() const;
    /// Coefficient of the delayed-velocity dissipation at a given tau'(t).
    [[nodiscard]] double C2(double dtau) const;
};

/// Complete continuous-time problem. Immutable after construction; freely
/// shared between threads.
struct Problem {
    PhysicalParams phys;
    DelaySpec delay = DelaySpec::constant(0.5);
    DampingSpec damping;
    double xi_bar = 1.0;

    /// xi(t) = xi_bar * mu1(t)
    [[nodiscard]] double xi(double t) const { return xi_bar * damping.mu1(t); }
    [[nodiscard]] StabilityConstants stability() const {
        return StabilityConstants{xi_bar, damping.delta, delay.d()};
    }
};

}  // namespace piezo
