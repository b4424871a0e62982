#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "piezo/dense.hpp"
#include "piezo/functionals.hpp"
#include "piezo/operators.hpp"
#include "support.hpp"

using namespace piezo;
using piezo::testing::Gen;

namespace {

BeamState random_state(const Grid& g, Gen& gen) {
    BeamState s(g);
    for (auto* f : {&s.v, &s.u, &s.p, &s.q, &s.z})
        for (double& x : *f) x = gen.uniform(-1.0, 1.0);
    s.v[0] = s.p[0] = s.u[0] = s.q[0] = 0.0;
    s.impose_inflow();
    return s;
}

double max_diff(const BeamState& a, const BeamState& b) {
    BeamState d = a;
    d.axpy(-1.0, b);
    return d.max_abs();
}

}  // namespace

TEST(Grid, GeometryAndValidation) {
    const Grid g(5, 3, 2.0);
    EXPECT_DOUBLE_EQ(g.hx(), 0.5);
    EXPECT_DOUBLE_EQ(g.hy(), 0.5);
    EXPECT_DOUBLE_EQ(g.x(4), 2.0);
    EXPECT_DOUBLE_EQ(g.y(2), 1.0);
    EXPECT_THROW(Grid(2, 3, 1.0), std::invalid_argument);
    EXPECT_THROW(Grid(3, 1, 1.0), std::invalid_argument);
    EXPECT_THROW(Grid(3, 2, 0.0), std::invalid_argument);
}

TEST(BeamState, InflowAndArithmetic) {
    const Grid g(4, 3, 1.0);
    BeamState s(g);
    s.u = {0.0, 1.0, 2.0, 3.0};
    EXPECT_DOUBLE_EQ(s.constraint_violation(), 3.0);
    s.impose_inflow();
    EXPECT_DOUBLE_EQ(s.constraint_violation(), 0.0);
    const BeamState twice = 2.0 * s;
    EXPECT_DOUBLE_EQ(twice.z_at(3, 0), 6.0);
    EXPECT_DOUBLE_EQ((s + s).u[2], 4.0);
    EXPECT_THROW(s += BeamState(Grid(5, 3, 1.0)), std::invalid_argument);
}

TEST(SecondDifference, ConstantHasNoCurvature) {
    const std::vector<double> f(9, 3.7);
    for (double x : second_difference(f, 0.125)) EXPECT_NEAR(x, 0.0, 1e-12);
}

TEST(SecondDifference, LinearFieldMirrorEnd) {
    // nx = 5 on L = 1: hx = 0.25, f = x. Interior rows vanish; the free end
    // sees the ghost f[5] = f[3] = 0.75, so (0.75 - 2 + 0.75) / 0.0625 = -8.
    const std::vector<double> f = {0.0, 0.25, 0.5, 0.75, 1.0};
    const auto out = second_difference(f, 0.25);
    EXPECT_DOUBLE_EQ(out[0], 0.0);
    for (int i = 1; i < 4; ++i) EXPECT_NEAR(out[i], 0.0, 1e-13);
    EXPECT_DOUBLE_EQ(out[4], -8.0);
}

TEST(SecondDifference, SecondOrderOnClampedFreeMode) {
    // sin(pi x / 2) satisfies both end conditions; the error must fall by ~4
    // per halving of hx.
    std::vector<double> errs;
    for (int nx : {33, 65, 129}) {
        const Grid g(nx, 2, 1.0);
        std::vector<double> f(nx);
        for (int i = 0; i < nx; ++i) f[i] = std::sin(std::numbers::pi * g.x(i) / 2);
        const auto out = second_difference(f, g.hx());
        double e = 0.0;
        for (int i = 1; i < nx; ++i) e = std::max(e, std::abs(out[i] + std::pow(std::numbers::pi / 2, 2) * f[i]));
        errs.push_back(e);
    }
    EXPECT_NEAR(errs[0] / errs[1], 4.0, 0.2);
    EXPECT_NEAR(errs[1] / errs[2], 4.0, 0.2);
}

TEST(SecondDifference, LengthMismatch) {
    std::vector<double> f(5), out(4);
    EXPECT_THROW(second_difference(f, 0.1, out), std::invalid_argument);
}

TEST(SecondDifference, SummationByPartsAgainstStiffness) {
    // <D2 f, g>_trap = -stiffness(f, g) when g(0) = 0: the identity behind
    // exact energy conservation of the wave part
    Gen gen(21);
    const Grid g(17, 2, 1.0);
    for (int k = 0; k < 50; ++k) {
        std::vector<double> a(17), b(17);
        for (int i = 0; i < 17; ++i) {
            a[i] = gen.uniform(-1, 1);
            b[i] = gen.uniform(-1, 1);
        }
        b[0] = 0.0;
        const auto d2a = second_difference(a, g.hx());
        EXPECT_NEAR(trapezoid_dot(d2a, b, g.hx()), -stiffness_dot(a, b, g.hx()), 1e-10);
    }
}

// ---------------------------------------------------------------------------

TEST(Generator, ZeroStateHasZeroRate) {
    const Grid g(9, 5, 1.0);
    const auto r = apply_generator(0.3, BeamState(g), piezo::testing::reference_problem());
    EXPECT_EQ(r.max_abs(), 0.0);
}

TEST(Generator, UniformVelocityDamped) {
    const Grid g(9, 5, 1.0);
    auto pb = piezo::testing::constant_problem(2.0, 0.0, 0.5);
    BeamState s(g);
    for (int i = 1; i < g.nx(); ++i) s.u[i] = 1.0;
    s.impose_inflow();
    const auto r = apply_generator(0.0, s, pb);
    for (int i = 1; i < g.nx(); ++i) {
        EXPECT_DOUBLE_EQ(r.u[i], -2.0);
        EXPECT_DOUBLE_EQ(r.v[i], 1.0);
        EXPECT_DOUBLE_EQ(r.z_at(i, 0), -2.0);
        // upwind difference sees the unit inflow at the first interior y-node only
        EXPECT_DOUBLE_EQ(r.z_at(i, 1), 1.0 / 0.5 / g.hy());
        for (int j = 2; j < g.ny(); ++j) EXPECT_DOUBLE_EQ(r.z_at(i, j), 0.0);
    }
    EXPECT_EQ(r.u[0], 0.0);
    EXPECT_EQ(r.v[0], 0.0);
}

TEST(Generator, MatchesDenseAssembly) {
    Gen gen(22);
    const auto pb = piezo::testing::reference_problem();
    for (auto [nx, ny] : {std::pair{3, 2}, {5, 3}, {9, 4}, {17, 9}, {33, 9}}) {
        const Grid g(nx, ny, 1.0);
        for (double t : {0.0, 1.3, 7.9}) {
            const auto A = generator_matrix(t, g, pb);
            const auto s = random_state(g, gen);
            const auto free = apply_generator(t, s, pb);
            const Eigen::VectorXd dense = A * flatten(s);
            const double scale = std::max(1.0, dense.lpNorm<Eigen::Infinity>());
            EXPECT_LT((dense - flatten(free)).lpNorm<Eigen::Infinity>(), 1e-13 * scale) << nx << "x" << ny;
        }
    }
}

TEST(Generator, PropertyLinear) {
    Gen gen(23);
    const auto pb = piezo::testing::reference_problem();
    const Grid g(11, 6, 1.0);
    for (int k = 0; k < 50; ++k) {
        const auto a = random_state(g, gen), b = random_state(g, gen);
        const double ca = gen.uniform(-3, 3), cb = gen.uniform(-3, 3);
        const double t = gen.uniform(0, 20);
        BeamState mix = ca * a;
        mix.axpy(cb, b);
        BeamState expect = ca * apply_generator(t, a, pb);
        expect.axpy(cb, apply_generator(t, b, pb));
        EXPECT_LT(max_diff(apply_generator(t, mix, pb), expect), 1e-10 * std::max(1.0, expect.max_abs()));
    }
}

TEST(Generator, RejectsNonPositiveDelay) {
    auto pb = piezo::testing::constant_problem(1.0, 0.0, 0.0);
    EXPECT_THROW(apply_generator(0.0, BeamState(Grid(3, 2, 1.0)), pb), InadmissibleError);
}

TEST(DenseDump, RoundTrip) {
    const Grid g(3, 2, 1.0);
    const auto A = generator_matrix(0.5, g, piezo::testing::reference_problem());
    std::stringstream ss;
    write_matrix_text(ss, A);
    const auto B = read_matrix_text(ss);
    ASSERT_EQ(B.rows(), A.rows());
    EXPECT_EQ((A - B).lpNorm<Eigen::Infinity>(), 0.0);
}

TEST(Flatten, RoundTrip) {
    Gen gen(24);
    const Grid g(5, 3, 1.0);
    const auto s = random_state(g, gen);
    EXPECT_EQ(max_diff(unflatten(flatten(s), g), s), 0.0);
    EXPECT_EQ(state_dimension(g), 4 * 5 + 5 * 3);
}

// ---------------------------------------------------------------------------

TEST(WeightedInner, ZeroState) {
    const Grid g(9, 5, 1.0);
    const BeamState z(g);
    EXPECT_EQ(weighted_inner(0.0, z, z, piezo::testing::reference_problem()), 0.0);
}

TEST(WeightedInner, VelocityOnly) {
    const Grid g(9, 5, 1.0);
    auto pb = piezo::testing::constant_problem(1.0, 0.0, 0.5);
    pb.phys.rho = 2.0;
    BeamState s(g);
    std::fill(s.u.begin(), s.u.end(), 1.0);
    EXPECT_DOUBLE_EQ(weighted_inner(0.0, s, s, pb), 2.0);
}

TEST(WeightedInner, ChannelOnly) {
    const Grid g(9, 5, 1.0);
    auto pb = piezo::testing::constant_problem(1.0, 0.0, 0.5);
    BeamState s(g);
    std::fill(s.z.begin(), s.z.end(), 1.0);
    EXPECT_DOUBLE_EQ(weighted_inner(0.0, s, s, pb), 0.5);
}

TEST(WeightedInner, PropertySymmetricBilinearPositive) {
    Gen gen(25);
    const auto pb = piezo::testing::reference_problem();
    const Grid g(13, 7, 1.0);
    for (int k = 0; k < 100; ++k) {
        const auto a = random_state(g, gen), b = random_state(g, gen), c = random_state(g, gen);
        const double t = gen.uniform(0, 40), x = gen.uniform(-2, 2);
        const double ab = weighted_inner(t, a, b, pb);
        EXPECT_NEAR(ab, weighted_inner(t, b, a, pb), 1e-13);
        BeamState lin = x * a;
        lin.axpy(1.0, c);
        EXPECT_NEAR(weighted_inner(t, lin, b, pb), x * ab + weighted_inner(t, c, b, pb), 1e-12);
        EXPECT_GT(weighted_inner(t, a, a, pb), 0.0);
    }
}

TEST(WeightedInner, PropertyGrowthBoundForward) {
    // <U,U>_t / <U,U>_s <= exp(sup|tau'| / tau0 |t - s|) for t >= s; the
    // instantaneous weight only decreases forward in time
    Gen gen(26);
    const auto pb = piezo::testing::reference_problem();
    const double c = pb.delay.dtau_abs_max() / pb.delay.tau0();
    const Grid g(9, 5, 1.0);
    for (int k = 0; k < 200; ++k) {
        const auto u = random_state(g, gen);
        const double s = gen.uniform(0, 30), t = s + gen.uniform(0, 10);
        const double ratio = weighted_inner(t, u, u, pb) / weighted_inner(s, u, u, pb);
        EXPECT_LE(ratio, std::exp(c * (t - s)) * (1 + 1e-14));
    }
}

TEST(WeightedInner, PropertyGrowthBoundBothWaysWithConstantWeight) {
    Gen gen(27);
    auto pb = piezo::testing::reference_problem();
    pb.damping.mu1_kind = ConstantWeight{1.0};
    const double c = pb.delay.dtau_abs_max() / pb.delay.tau0();
    const Grid g(9, 5, 1.0);
    for (int k = 0; k < 200; ++k) {
        const auto u = random_state(g, gen);
        const double s = gen.uniform(0, 30), t = gen.uniform(0, 30);
        const double ratio = weighted_inner(t, u, u, pb) / weighted_inner(s, u, u, pb);
        EXPECT_LE(ratio, std::exp(c * std::abs(t - s)) * (1 + 1e-14));
    }
}

// ---------------------------------------------------------------------------

TEST(Dissipativity, ZeroState) {
    const Grid g(9, 5, 1.0);
    EXPECT_EQ(dissipativity_residual(0.0, BeamState(g), piezo::testing::reference_problem()), 0.0);
}

TEST(Dissipativity, VelocityOnlyClosedForm) {
    // Only u is nonzero (u = 1 off the clamped node) and z = 0 off the
    // inflow. With the channel quadrature skipping the inflow node, the
    // pairing reduces to -mu1 int u^2 and the norm to rho int u^2.
    const Grid g(65, 9, 1.0);
    auto pb = piezo::testing::constant_problem(1.5, 0.0, 0.5);
    pb.phys.rho = 2.0;
    BeamState s(g);
    for (int i = 1; i < g.nx(); ++i) s.u[i] = 1.0;
    s.impose_inflow();
    const double int_u2 = 1.0 - 0.5 * g.hx();  // trapezoid with u(0) = 0
    const double expect = -1.5 * int_u2 - kappa(0.0, pb.delay) * 2.0 * int_u2;
    EXPECT_NEAR(dissipativity_residual(0.0, s, pb), expect, 1e-12);
}

TEST(Dissipativity, PropertyNonPositiveOnRandomStates) {
    std::mt19937_64 rng(28);
    const auto pb = piezo::testing::reference_problem();
    const Grid g(201, 33, 1.0);
    auto states = random_states(g, 100, rng);
    for (auto& s : states) {
        for (double t : {0.0, 3.0, 11.0, 39.0}) {
            s.t = t;
            normalize(s, pb);
            EXPECT_LE(dissipativity_residual(t, s, pb), 1e-12);
        }
    }
}

TEST(Dissipativity, PropertyHoldsAcrossAdmissibleConfigurations) {
    Gen gen(29);
    const Grid g(21, 9, 1.0);
    for (int k = 0; k < 60; ++k) {
        auto pb = piezo::testing::reference_problem();
        const double d = gen.uniform(0.0, 0.5);
        const double omega = gen.uniform(0.2, 2.0);
        pb.delay = DelaySpec::sinusoidal(gen.uniform(0.4, 1.0), d / omega * 0.3, omega);
        pb.damping.delta = gen.uniform(0.0, 0.95) * std::sqrt(1 - pb.delay.d());
        pb.damping.mu2_kind = ProportionalWeight{pb.damping.delta * gen.uniform(-1.0, 1.0)};
        const auto w = xi_window(pb.damping.delta, pb.delay.d());
        pb.xi_bar = w.lo + gen.uniform(0.05, 0.95) * (w.hi - w.lo);
        auto s = random_state(g, gen);
        const double t = gen.uniform(0, 30);
        s.t = t;
        normalize(s, pb);
        EXPECT_LE(dissipativity_residual(t, s, pb), 1e-12);
    }
}
