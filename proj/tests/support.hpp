#pragma once

#include <random>

#include "piezo/model.hpp"

namespace piezo::testing {

/// The reference configuration used across the suites.
inline Problem reference_problem() {
    Problem pb;
    pb.phys = PhysicalParams{1.0, 1.0, 0.5, 1.0, 1.0, 1.0};
    pb.delay = DelaySpec::sinusoidal(0.5, 0.2, 0.5);
    pb.damping.mu1_kind = ExponentialWeight{1.0, 1.0, 1.0};
    pb.damping.mu2_kind = ProportionalWeight{0.3};
    pb.damping.delta = 0.3;
    pb.damping.M1 = 1.0;
    pb.damping.M2 = 0.3;
    pb.xi_bar = 1.0;
    return pb;
}

/// Problem with constant schedules, convenient for closed-form checks.
inline Problem constant_problem(double mu1, double mu2, double tau, double delta = 0.0) {
    Problem pb;
    pb.delay = DelaySpec::constant(tau);
    pb.damping.mu1_kind = ConstantWeight{mu1};
    pb.damping.mu2_kind = ConstantWeight{mu2};
    pb.damping.delta = delta;
    return pb;
}

/// Seeded uniform draws for hand-rolled property generators.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

}  // namespace piezo::testing
