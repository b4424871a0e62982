#include "piezo/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace piezo {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void expect_params(const std::string& kind, const std::vector<double>& params, std::size_t n) {
    if (params.size() != n) {
        throw std::invalid_argument("schedule kind '" + kind + "' takes " + std::to_string(n) +
                                    " parameters, got " + std::to_string(params.size()));
    }
}

// Times in [0, horizon] where sin(omega t + phase) = +-1 or 0 respectively.
std::vector<double> sine_extrema(double omega, double phase, double horizon) {
    std::vector<double> out;
    if (omega == 0.0) return out;
    const double w = std::abs(omega);
    const double period_half = std::numbers::pi / w;
    // omega t + phase = pi/2 + k pi  (sign of omega folded into k)
    double t0 = (std::numbers::pi / 2 - phase) / omega;
    t0 = std::fmod(t0, period_half);
    if (t0 < 0) t0 += period_half;
    for (double t = t0; t <= horizon; t += period_half) out.push_back(t);
    return out;
}

}  // namespace

bool PhysicalParams::all_positive() const {
    return rho > 0 && alpha1 > 0 && gamma > 0 && beta > 0 && mu > 0 && length > 0;
}

// ---------------------------------------------------------------------------

DelaySpec DelaySpec::from_kind(const std::string& name, const std::vector<double>& p) {
    if (name == "constant") {
        expect_params(name, p, 1);
        return constant(p[0]);
    }
    if (name == "affine-clamped") {
        expect_params(name, p, 4);
        return affine_clamped(p[0], p[1], p[2], p[3]);
    }
    if (name == "sinusoidal") {
        expect_params(name, p, 3);
        return sinusoidal(p[0], p[1], p[2]);
    }
    throw std::invalid_argument("unknown delay kind '" + name + "'");
}

double DelaySpec::tau(double t) const {
    return std::visit(overloaded{
                          [](const ConstantDelay& k) { return k.value; },
                          [t](const AffineClampedDelay& k) {
                              return std::clamp(k.offset + k.slope * t, k.lo, k.hi);
                          },
                          [t](const SinusoidalDelay& k) {
                              return k.mean + k.amplitude * std::sin(k.omega * t);
                          },
                      },
                      kind_);
}

double DelaySpec::dtau(double t) const {
    return std::visit(overloaded{
                          [](const ConstantDelay&) { return 0.0; },
                          [t](const AffineClampedDelay& k) {
                              // right derivative at the corners
                              const double raw = k.offset + k.slope * t;
                              if (k.slope > 0) return raw < k.hi ? k.slope : 0.0;
                              if (k.slope < 0) return raw > k.lo ? k.slope : 0.0;
                              return 0.0;
                          },
                          [t](const SinusoidalDelay& k) {
                              return k.amplitude * k.omega * std::cos(k.omega * t);
                          },
                      },
                      kind_);
}

double DelaySpec::ddtau(double t) const {
    return std::visit(overloaded{
                          [](const ConstantDelay&) { return 0.0; },
                          [](const AffineClampedDelay&) { return 0.0; },
                          [t](const SinusoidalDelay& k) {
                              return -k.amplitude * k.omega * k.omega * std::sin(k.omega * t);
                          },
                      },
                      kind_);
}

double DelaySpec::tau0() const {
    return std::visit(overloaded{
                          [](const ConstantDelay& k) { return k.value; },
                          [this](const AffineClampedDelay& k) {
                              const double start = tau(0.0);
                              return k.slope < 0 ? std::min(start, k.lo) : start;
                          },
                          [](const SinusoidalDelay& k) { return k.mean - std::abs(k.amplitude); },
                      },
                      kind_);
}

double DelaySpec::tau1() const {
    return std::visit(overloaded{
                          [](const ConstantDelay& k) { return k.value; },
                          [this](const AffineClampedDelay& k) {
                              const double start = tau(0.0);
                              return k.slope > 0 ? std::max(start, k.hi) : start;
                          },
                          [](const SinusoidalDelay& k) { return k.mean + std::abs(k.amplitude); },
                      },
                      kind_);
}

namespace {
// Whether the affine part is ever active for t >= 0.
bool affine_active(const AffineClampedDelay& k) {
    if (k.slope == 0.0 || k.lo >= k.hi) return false;
    const double start = k.offset;
    if (k.slope > 0) return start < k.hi;
    return start > k.lo;
}
}  // namespace

double DelaySpec::d() const {
    return std::visit(overloaded{
                          [](const ConstantDelay&) { return 0.0; },
                          [](const AffineClampedDelay& k) {
                              return affine_active(k) ? std::max(k.slope, 0.0) : 0.0;
                          },
                          [](const SinusoidalDelay& k) { return std::abs(k.amplitude * k.omega); },
                      },
                      kind_);
}

double DelaySpec::dtau_min() const {
    return std::visit(overloaded{
                          [](const ConstantDelay&) { return 0.0; },
                          [](const AffineClampedDelay& k) {
                              return affine_active(k) ? std::min(k.slope, 0.0) : 0.0;
                          },
                          [](const SinusoidalDelay& k) { return -std::abs(k.amplitude * k.omega); },
                      },
                      kind_);
}

double DelaySpec::dtau_abs_max() const { return std::max(std::abs(d()), std::abs(dtau_min())); }

std::optional<double> DelaySpec::ddtau_bound(double horizon) const {
    return std::visit(overloaded{
                          [](const ConstantDelay&) -> std::optional<double> { return 0.0; },
                          [horizon](const AffineClampedDelay& k) -> std::optional<double> {
                              if (k.slope == 0.0) return 0.0;
                              for (double edge : {k.lo, k.hi}) {
                                  const double tc = (edge - k.offset) / k.slope;
                                  if (tc > 0.0 && tc <= horizon) return std::nullopt;
                              }
                              return 0.0;
                          },
                          [](const SinusoidalDelay& k) -> std::optional<double> {
                              return std::abs(k.amplitude) * k.omega * k.omega;
                          },
                      },
                      kind_);
}

std::vector<double> DelaySpec::critical_times(double horizon) const {
    std::vector<double> out{0.0, horizon};
    std::visit(overloaded{
                   [](const ConstantDelay&) {},
                   [&](const AffineClampedDelay& k) {
                       if (k.slope == 0.0) return;
                       for (double edge : {k.lo, k.hi}) {
                           const double tc = (edge - k.offset) / k.slope;
                           if (tc > 0.0 && tc <= horizon) out.push_back(tc);
                       }
                   },
                   [&](const SinusoidalDelay& k) {
                       for (double t : sine_extrema(k.omega, 0.0, horizon)) out.push_back(t);
                       for (double t : sine_extrema(k.omega, std::numbers::pi / 2, horizon))
                           out.push_back(t);
                   },
               },
               kind_);
    std::sort(out.begin(), out.end());
    return out;
}

std::string DelaySpec::kind_name() const {
    return std::visit(overloaded{
                          [](const ConstantDelay&) { return std::string("constant"); },
                          [](const AffineClampedDelay&) { return std::string("affine-clamped"); },
                          [](const SinusoidalDelay&) { return std::string("sinusoidal"); },
                      },
                      kind_);
}

std::vector<double> DelaySpec::params() const {
    return std::visit(overloaded{
                          [](const ConstantDelay& k) { return std::vector<double>{k.value}; },
                          [](const AffineClampedDelay& k) {
                              return std::vector<double>{k.offset, k.slope, k.lo, k.hi};
                          },
                          [](const SinusoidalDelay& k) {
                              return std::vector<double>{k.mean, k.amplitude, k.omega};
                          },
                      },
                      kind_);
}

// ---------------------------------------------------------------------------

InstantWeight instant_weight_from_kind(const std::string& name, const std::vector<double>& p) {
    if (name == "constant") {
        expect_params(name, p, 1);
        return ConstantWeight{p[0]};
    }
    if (name == "exponential") {
        expect_params(name, p, 3);
        return ExponentialWeight{p[0], p[1], p[2]};
    }
    if (name == "rational") {
        expect_params(name, p, 2);
        return RationalWeight{p[0], p[1]};
    }
    throw std::invalid_argument("unknown mu1 kind '" + name + "'");
}

DelayedWeight delayed_weight_from_kind(const std::string& name, const std::vector<double>& p) {
    if (name == "constant") {
        expect_params(name, p, 1);
        return ConstantWeight{p[0]};
    }
    if (name == "proportional") {
        expect_params(name, p, 1);
        return ProportionalWeight{p[0]};
    }
    if (name == "sinusoidal") {
        expect_params(name, p, 3);
        return SinusoidalWeight{p[0], p[1], p[2]};
    }
    throw std::invalid_argument("unknown mu2 kind '" + name + "'");
}

std::string kind_name(const InstantWeight& w) {
    return std::visit(overloaded{
                          [](const ConstantWeight&) { return std::string("constant"); },
                          [](const ExponentialWeight&) { return std::string("exponential"); },
                          [](const RationalWeight&) { return std::string("rational"); },
                      },
                      w);
}

std::string kind_name(const DelayedWeight& w) {
    return std::visit(overloaded{
                          [](const ConstantWeight&) { return std::string("constant"); },
                          [](const ProportionalWeight&) { return std::string("proportional"); },
                          [](const SinusoidalWeight&) { return std::string("sinusoidal"); },
                      },
                      w);
}

std::vector<double> kind_params(const InstantWeight& w) {
    return std::visit(overloaded{
                          [](const ConstantWeight& k) { return std::vector<double>{k.value}; },
                          [](const ExponentialWeight& k) {
                              return std::vector<double>{k.base, k.amplitude, k.rate};
                          },
                          [](const RationalWeight& k) { return std::vector<double>{k.amplitude, k.rate}; },
                      },
                      w);
}

std::vector<double> kind_params(const DelayedWeight& w) {
    return std::visit(overloaded{
                          [](const ConstantWeight& k) { return std::vector<double>{k.value}; },
                          [](const ProportionalWeight& k) { return std::vector<double>{k.factor}; },
                          [](const SinusoidalWeight& k) {
                              return std::vector<double>{k.mean, k.amplitude, k.omega};
                          },
                      },
                      w);
}

double DampingSpec::mu1(double t) const {
    return std::visit(overloaded{
                          [](const ConstantWeight& k) { return k.value; },
                          [t](const ExponentialWeight& k) { return k.base + k.amplitude * std::exp(-k.rate * t); },
                          [t](const RationalWeight& k) { return k.amplitude / (1.0 + k.rate * t); },
                      },
                      mu1_kind);
}

double DampingSpec::dmu1(double t) const {
    return std::visit(overloaded{
                          [](const ConstantWeight&) { return 0.0; },
                          [t](const ExponentialWeight& k) {
                              return -k.rate * k.amplitude * std::exp(-k.rate * t);
                          },
                          [t](const RationalWeight& k) {
                              const double s = 1.0 + k.rate * t;
                              return -k.amplitude * k.rate / (s * s);
                          },
                      },
                      mu1_kind);
}

double DampingSpec::mu2(double t) const {
    return std::visit(overloaded{
                          [](const ConstantWeight& k) { return k.value; },
                          [this, t](const ProportionalWeight& k) { return k.factor * mu1(t); },
                          [t](const SinusoidalWeight& k) { return k.mean + k.amplitude * std::sin(k.omega * t); },
                      },
                      mu2_kind);
}

double DampingSpec::dmu2(double t) const {
    return std::visit(overloaded{
                          [](const ConstantWeight&) { return 0.0; },
                          [this, t](const ProportionalWeight& k) { return k.factor * dmu1(t); },
                          [t](const SinusoidalWeight& k) {
                              return k.amplitude * k.omega * std::cos(k.omega * t);
                          },
                      },
                      mu2_kind);
}

std::vector<double> DampingSpec::critical_times(double horizon) const {
    std::vector<double> out{0.0, horizon};
    if (const auto* s = std::get_if<SinusoidalWeight>(&mu2_kind)) {
        for (double t : sine_extrema(s->omega, 0.0, horizon)) out.push_back(t);
        for (double t : sine_extrema(s->omega, std::numbers::pi / 2, horizon)) out.push_back(t);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------

OpenInterval xi_window(double delta, double d) {
    if (!(d < 1.0) || !(d >= 0.0)) throw std::invalid_argument("xi_window: d must lie in [0, 1)");
    if (!(delta >= 0.0)) throw std::invalid_argument("xi_window: delta must be non-negative");
    const double root = std::sqrt(1.0 - d);
    if (delta >= root) {
        throw InadmissibleError("xi_window: delta = " + std::to_string(delta) +
                                " is not below sqrt(1-d) = " + std::to_string(root) +
                                "; the weight window is empty");
    }
    const double ratio = delta / root;
    return OpenInterval{ratio, 2.0 - ratio};
}

double kappa(double t, const DelaySpec& delay) {
    const double dt = delay.dtau(t);
    return std::sqrt(1.0 + dt * dt) / (2.0 * delay.tau(t));
}

double StabilityConstants::C1() const { return 1.0 - xi_bar / 2.0 - delta / (2.0 * std::sqrt(1.0 - d)); }

double StabilityConstants::C2(double dtau) const {
    return xi_bar * (1.0 - dtau) / 2.0 - delta * std::sqrt(1.0 - d) / 2.0;
}

}  // namespace piezo
