#include <gtest/gtest.h>

#include <cmath>

#include "piezo/admissibility.hpp"
#include "piezo/model.hpp"
#include "support.hpp"

using namespace piezo;
using piezo::testing::Gen;

TEST(XiWindow, ZeroDeltaAndRate) {
    const auto w = xi_window(0.0, 0.0);
    EXPECT_DOUBLE_EQ(w.lo, 0.0);
    EXPECT_DOUBLE_EQ(w.hi, 2.0);
}

TEST(XiWindow, HalfDelta) {
    const auto w = xi_window(0.5, 0.0);
    EXPECT_DOUBLE_EQ(w.lo, 0.5);
    EXPECT_DOUBLE_EQ(w.hi, 1.5);
}

TEST(XiWindow, NonzeroRate) {
    const auto w = xi_window(0.7, 0.5);
    EXPECT_NEAR(w.lo, 0.98994949366, 1e-10);
    EXPECT_NEAR(w.hi, 1.01005050634, 1e-10);
}

TEST(XiWindow, RejectsEmptyWindow) {
    EXPECT_THROW(xi_window(1.2, 0.2), InadmissibleError);
    EXPECT_THROW(xi_window(std::sqrt(0.5), 0.5), InadmissibleError);
    EXPECT_THROW(xi_window(-0.1, 0.0), std::invalid_argument);
    EXPECT_THROW(xi_window(0.1, 1.0), std::invalid_argument);
}

TEST(XiWindow, PropertyNonEmptyWithPositiveConstantsAtMidpoint) {
    Gen gen(11);
    for (int k = 0; k < 500; ++k) {
        const double d = gen.uniform(0.0, 0.99);
        const double delta = gen.uniform(0.0, 0.999) * std::sqrt(1.0 - d);
        const auto w = xi_window(delta, d);
        ASSERT_LT(w.lo, w.hi);
        EXPECT_NEAR(w.midpoint(), 1.0, 1e-12);
        const StabilityConstants sc{w.midpoint(), delta, d};
        EXPECT_GT(sc.C1(), 0.0);
        // C2 is smallest where tau' reaches its upper bound d
        EXPECT_GT(sc.C2(d), 0.0);
    }
}

TEST(Kappa, ConstantDelay) {
    const auto delay = DelaySpec::constant(0.5);
    for (double t : {0.0, 1.0, 17.5}) EXPECT_DOUBLE_EQ(kappa(t, delay), 1.0);
}

TEST(Kappa, AffineDelayWithSlope) {
    // tau(0) = 1 and tau' = 0.5 away from the clamp
    const auto delay = DelaySpec::affine_clamped(1.0, 0.5, 0.5, 10.0);
    EXPECT_NEAR(kappa(0.0, delay), std::sqrt(1.25) / 2.0, 1e-15);
    EXPECT_NEAR(kappa(0.0, delay), 0.5590170, 1e-7);
}

TEST(Kappa, LongDelay) { EXPECT_DOUBLE_EQ(kappa(3.0, DelaySpec::constant(2.0)), 0.25); }

TEST(Kappa, PropertyShiftInvariantForConstantDelay) {
    Gen gen(12);
    for (int k = 0; k < 200; ++k) {
        const auto delay = DelaySpec::constant(gen.uniform(0.05, 5.0));
        const double t = gen.uniform(0.0, 100.0), s = gen.uniform(0.0, 100.0);
        EXPECT_EQ(kappa(t, delay), kappa(t + s, delay));
    }
}

TEST(PhysicalParams, DerivedStiffness) {
    const PhysicalParams ph{2.0, 1.5, 0.4, 3.0, 1.0, 1.0};
    EXPECT_DOUBLE_EQ(ph.alpha(), 1.5 + 0.16 * 3.0);
    EXPECT_TRUE(ph.all_positive());
    EXPECT_FALSE((PhysicalParams{1, 1, 0, 1, 1, 1}.all_positive()));
}

TEST(DelaySpec, SinusoidalCertifiedConstants) {
    const auto delay = DelaySpec::sinusoidal(0.5, 0.2, 0.5);
    EXPECT_NEAR(delay.tau0(), 0.3, 1e-15);
    EXPECT_NEAR(delay.tau1(), 0.7, 1e-15);
    EXPECT_NEAR(delay.d(), 0.1, 1e-15);
    EXPECT_NEAR(delay.dtau_min(), -0.1, 1e-15);
    ASSERT_TRUE(delay.ddtau_bound(40.0).has_value());
    EXPECT_NEAR(*delay.ddtau_bound(40.0), 0.05, 1e-15);
}

TEST(DelaySpec, PropertyCertifiedBoundsHoldOnSamples) {
    Gen gen(13);
    for (int k = 0; k < 100; ++k) {
        const double mean = gen.uniform(0.5, 2.0);
        const auto delay = k % 2 ? DelaySpec::sinusoidal(mean, gen.uniform(0.0, 0.4), gen.uniform(0.1, 3.0))
                                 : DelaySpec::affine_clamped(mean, gen.uniform(-0.5, 0.5), 0.3, 2.5);
        for (int j = 0; j < 200; ++j) {
            const double t = gen.uniform(0.0, 50.0);
            EXPECT_GE(delay.tau(t), delay.tau0() - 1e-14);
            EXPECT_LE(delay.tau(t), delay.tau1() + 1e-14);
            EXPECT_LE(delay.dtau(t), delay.d() + 1e-14);
            EXPECT_GE(delay.dtau(t), delay.dtau_min() - 1e-14);
        }
    }
}

TEST(DelaySpec, DerivativesMatchFiniteDifferences) {
    const auto delay = DelaySpec::sinusoidal(0.5, 0.2, 0.5);
    const double h = 1e-5;
    for (double t : {0.3, 2.0, 7.7}) {
        EXPECT_NEAR(delay.dtau(t), (delay.tau(t + h) - delay.tau(t - h)) / (2 * h), 1e-9);
        EXPECT_NEAR(delay.ddtau(t), (delay.dtau(t + h) - delay.dtau(t - h)) / (2 * h), 1e-9);
    }
}

TEST(DelaySpec, AffineClampKinkBreaksRegularity) {
    // the corner at t = 2 lies inside [0, 5] but not inside [0, 1]
    const auto delay = DelaySpec::affine_clamped(0.5, 0.25, 0.5, 1.0);
    EXPECT_FALSE(delay.ddtau_bound(5.0).has_value());
    EXPECT_TRUE(delay.ddtau_bound(1.0).has_value());
}

TEST(DelaySpec, FromKind) {
    EXPECT_EQ(DelaySpec::from_kind("constant", {0.4}).kind_name(), "constant");
    EXPECT_EQ(DelaySpec::from_kind("sinusoidal", {0.5, 0.1, 1.0}).params(), (std::vector<double>{0.5, 0.1, 1.0}));
    EXPECT_THROW(DelaySpec::from_kind("sinusoidal", {0.5}), std::invalid_argument);
    EXPECT_THROW(DelaySpec::from_kind("cubic", {1.0}), std::invalid_argument);
}

TEST(DampingSpec, DerivativesMatchFiniteDifferences) {
    DampingSpec dm;
    dm.mu1_kind = RationalWeight{2.0, 0.5};
    dm.mu2_kind = SinusoidalWeight{0.1, 0.05, 2.0};
    const double h = 1e-5;
    for (double t : {0.0 + 1e-3, 1.0, 9.0}) {
        EXPECT_NEAR(dm.dmu1(t), (dm.mu1(t + h) - dm.mu1(t - h)) / (2 * h), 1e-8);
        EXPECT_NEAR(dm.dmu2(t), (dm.mu2(t + h) - dm.mu2(t - h)) / (2 * h), 1e-8);
    }
    dm.mu2_kind = ProportionalWeight{0.3};
    EXPECT_DOUBLE_EQ(dm.mu2(2.0), 0.3 * dm.mu1(2.0));
}

// ---------------------------------------------------------------------------

TEST(Admissibility, ConstantSchedulesPass) {
    auto pb = piezo::testing::constant_problem(1.0, 0.8, 0.5, 0.8);
    const auto rep = validate_admissibility(pb, 10.0);
    EXPECT_TRUE(rep.admissible()) << (rep.first_failure() ? rep.first_failure()->id : "");
}

TEST(Admissibility, DelayedWeightAboveInstantFails) {
    auto pb = piezo::testing::constant_problem(1.0, 1.2, 0.5, 0.99);
    const auto rep = validate_admissibility(pb, 10.0);
    ASSERT_FALSE(rep.admissible());
    EXPECT_EQ(rep.first_failure()->id, condition::delayed_weight_bound);
}

TEST(Admissibility, ReferenceConfigurationPasses) {
    const auto rep = validate_admissibility(piezo::testing::reference_problem(), 40.0);
    EXPECT_TRUE(rep.admissible());
    EXPECT_NEAR(rep.C1, 1.0 - 0.5 - 0.3 / (2 * std::sqrt(0.9)), 1e-12);
    // C2 is smallest where tau' = d = 0.1
    EXPECT_NEAR(rep.C2_min, 0.9 / 2 - 0.3 * std::sqrt(0.9) / 2, 1e-9);
    EXPECT_EQ(rep.conditions.size(), 11u);
}

TEST(Admissibility, CanonicalViolationsNamed) {
    auto pb = piezo::testing::reference_problem();
    pb.damping.delta = 1.2;
    pb.delay = DelaySpec::sinusoidal(0.5, 0.2, 1.0);
    EXPECT_EQ(validate_admissibility(pb, 40.0).first_failure()->id, condition::delta_window);

    pb = piezo::testing::reference_problem();
    pb.delay = DelaySpec::constant(0.0);
    EXPECT_EQ(validate_admissibility(pb, 40.0).first_failure()->id, condition::delay_bounds);

    pb = piezo::testing::reference_problem();
    pb.damping.mu1_kind = ExponentialWeight{1.0, -0.5, 1.0};
    EXPECT_EQ(validate_admissibility(pb, 40.0).first_failure()->id, condition::weight_monotone);
}

TEST(Admissibility, XiOutsideWindowFails) {
    auto pb = piezo::testing::reference_problem();
    pb.xi_bar = 1.9;
    const auto rep = validate_admissibility(pb, 40.0);
    ASSERT_FALSE(rep.admissible());
    EXPECT_EQ(rep.first_failure()->id, condition::xi_window);
}

TEST(Admissibility, NonFiniteScheduleIsUnevaluable) {
    auto pb = piezo::testing::reference_problem();
    pb.damping.mu1_kind = RationalWeight{1.0, -1.0};  // pole at t = 1
    const auto rep = validate_admissibility(pb, 4.0, 4);
    ASSERT_FALSE(rep.admissible());
    const auto* c = rep.find(condition::weight_monotone);
    ASSERT_NE(c, nullptr);
    EXPECT_NE(c->status, ConditionStatus::pass);
}

TEST(Admissibility, PropertyShrinkingDelayedWeightKeepsPass) {
    Gen gen(14);
    int passes = 0;
    for (int k = 0; k < 200; ++k) {
        auto pb = piezo::testing::reference_problem();
        const double factor = gen.uniform(-0.5, 0.5);
        pb.damping.mu2_kind = ProportionalWeight{factor};
        pb.damping.delta = gen.uniform(0.0, 0.6);
        pb.damping.M2 = gen.uniform(0.0, 0.6);
        const bool before = validate_admissibility(pb, 20.0, 128).admissible();
        pb.damping.mu2_kind = ProportionalWeight{factor * gen.uniform(0.0, 1.0)};
        const bool after = validate_admissibility(pb, 20.0, 128).admissible();
        if (before) {
            ++passes;
            EXPECT_TRUE(after) << "factor " << factor;
        }
    }
    EXPECT_GT(passes, 10);
}
