#include <gtest/gtest.h>

#include <random>

#include "flyatom/core_model.hpp"
#include "oracles.hpp"

using namespace flyatom;

namespace {

TrapParams reference_trap() { return TrapParams::from_millikelvin(constants::rb87_mass, 0.76, 0.5e-6); }

}  // namespace

TEST(TrapParams, FrequencyMatchesHandEvaluation) {
  const double hand = std::sqrt(2.0 * 0.76e-3 * oracle::kBoltzmann / (oracle::kRb87 * 0.25e-12));
  EXPECT_NEAR(reference_trap().omega(), hand, 1e-9 * hand);
  EXPECT_NEAR(reference_trap().omega(), 7.63e5, 0.005e5);
}

TEST(TrapParams, MaxAccelerationMatchesHandEvaluation) {
  const double hand = 0.76e-3 * oracle::kBoltzmann / (oracle::kRb87 * 0.5e-6);
  EXPECT_NEAR(reference_trap().a_max(), hand, 1e-9 * hand);
  EXPECT_NEAR(reference_trap().a_max(), 1.45e5, 0.01e5);
  const TrapParams t = reference_trap();
  EXPECT_NEAR(t.a_max(), t.width() * t.omega() * t.omega() / 2.0, 1e-9 * t.a_max());
}

TEST(TrapParams, RejectsNonPositive) {
  EXPECT_THROW(TrapParams(0.0, 1e-26, 1e-6), InvalidArgument);
  EXPECT_THROW(TrapParams(1e-25, -1.0, 1e-6), InvalidArgument);
  EXPECT_THROW(TrapParams(1e-25, 1e-26, 0.0), InvalidArgument);
  EXPECT_THROW(TrapParams(1e-25, std::nan(""), 1e-6), InvalidArgument);
}

TEST(MotionProfile, EqualThirdsTimes) {
  const double l = 12.6e-6, a = 5e4;
  const MotionProfile p(a, l);
  EXPECT_NEAR(p.t1(), std::sqrt(2 * l / (3 * a)), 1e-15);
  EXPECT_NEAR(p.t2(), std::sqrt(3 * l / (2 * a)), 1e-15);
  EXPECT_NEAR(p.tf(), std::sqrt(25 * l / (6 * a)), 1e-15);
  EXPECT_NEAR(p.position(p.t1()), l / 3, 1e-18);
  EXPECT_NEAR(p.position(p.t2()), 2 * l / 3, 1e-18);
  EXPECT_NEAR(p.position(p.tf()), l, 1e-18);
  EXPECT_NEAR(p.velocity(p.tf() * (1 - 1e-12)), 0.0, 1e-9);
}

TEST(MotionProfile, ReleaseSpeed) {
  const MotionProfile p(5.00e4, 12.6e-6);
  EXPECT_NEAR(p.release_speed(), std::sqrt(2 * 12.6e-6 * 5e4 / 3), 1e-12);
  EXPECT_NEAR(p.release_speed(), 0.648, 0.002);
}

TEST(MotionProfile, UnequalFractionsStopAtLength) {
  const MotionProfile p(1e5, 10e-6, {0.2, 0.5, 0.3});
  EXPECT_NEAR(p.decel(), 1e5 * 0.2 / 0.3, 1e-6);
  EXPECT_NEAR(p.position(p.tf() * (1 - 1e-14)), 10e-6, 1e-15);
  EXPECT_NEAR(p.velocity(p.tf() * (1 - 1e-12)), 0.0, 1e-6);
}

TEST(MotionProfile, RejectsBadInput) {
  EXPECT_THROW(MotionProfile(0.0, 1e-6), InvalidArgument);
  EXPECT_THROW(MotionProfile(1.0, -1e-6), InvalidArgument);
  EXPECT_THROW(MotionProfile(1.0, 1e-6, {0.5, 0.5, 0.5}), InvalidArgument);
  EXPECT_THROW(MotionProfile(1.0, 1e-6, {0.0, 0.5, 0.5}), InvalidArgument);
  EXPECT_THROW(MotionProfile(1.0, 1e-6, {}, -1.0), InvalidArgument);
  const TrapParams trap = reference_trap();
  EXPECT_THROW(MotionProfile(1.0, 1e-6, {}, 2 * trap.depth()).check_against(trap), InvalidArgument);
}

TEST(ClosedForm, MatchesRk4Oracle) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> frac(1e-3, 1.3), len(8.0, 40.0), off(-0.3, 0.3);
  const TrapParams trap = reference_trap();
  for (int k = 0; k < 20; ++k) {
    const double a = frac(gen) * trap.a_max();
    const double l = len(gen) * trap.width();
    PhaseState init;
    init.xi = off(gen) * trap.width();
    init.xi_dot = off(gen) * trap.width() * trap.omega();
    const MotionProfile p(a, l);
    const ThrowCatchSolution s = solve_throw_catch(trap, p, init);
    const oracle::Geometry g{trap.mass(), trap.depth(), trap.width(), l, a};
    const auto dense = oracle::rk4_trap_frame(g, init.xi, init.xi_dot, 4000);
    double worst = 0.0;
    for (std::size_t i = 0; i < dense.t.size(); ++i)
      worst = std::max(worst, std::abs(s.position(dense.t[i]) - dense.xi[i]));
    EXPECT_LT(worst, 1e-9 * trap.width()) << "a/amax=" << a / trap.a_max() << " l/d=" << l / trap.width();
  }
}

TEST(ClosedForm, SegmentEnergyConserved) {
  const TrapParams trap = reference_trap();
  const double w = trap.omega(), m = trap.mass();
  const MotionProfile p(0.3 * trap.a_max(), 12.6e-6);
  const ThrowCatchSolution s = solve_throw_catch(trap, p);
  auto energy = [&](double t, double eq) {
    const double x = s.position(t) - eq, v = s.velocity(t);
    return 0.5 * m * v * v + 0.5 * m * w * w * x * x;
  };
  const double eq1 = -p.accel() / (w * w), eq2 = p.decel() / (w * w);
  const double e1 = energy(0.0, eq1), e2 = energy(p.t2(), eq2);
  for (int i = 1; i <= 50; ++i) {
    EXPECT_NEAR(energy(p.t1() * i / 50.0, eq1), e1, 1e-9 * e1);
    EXPECT_NEAR(energy(p.t2() + (p.tf() - p.t2()) * i / 50.0, eq2), e2, 1e-9 * e2);
  }
}

TEST(ClosedForm, AdiabaticLimitStaysNearCentre) {
  const TrapParams trap = reference_trap();
  const double a = 1e-6 * trap.a_max();
  const MotionProfile p(a, 12.6e-6);
  const ThrowCatchSolution s = solve_throw_catch(trap, p);
  const double w2 = trap.omega() * trap.omega();
  for (int i = 0; i <= 400; ++i) {
    const double xi = s.position(p.t1() * i / 400.0);
    EXPECT_LE(xi, 1e-30);
    EXPECT_GE(xi, -2 * a / w2 * (1 + 1e-9));
  }
  EXPECT_EQ(s.outcome, Outcome::Success);
}

TEST(ClosedForm, ArcsinPhaseAgreesWithAtan2) {
  const TrapParams trap = reference_trap();
  for (double f : {0.05, 0.2, 0.3, 0.37, 0.5, 0.7, 0.9}) {
    const MotionProfile p(f * trap.a_max(), 12.6e-6);
    const ThrowCatchSolution s = solve_throw_catch(trap, p);
    const double th = recapture_phase_arcsin(trap, p.accel(), s.release.theta, s.recapture.xi);
    const double diff = std::remainder(th - s.recapture.theta, constants::two_pi);
    EXPECT_NEAR(diff, 0.0, 1e-9) << f;
  }
}

TEST(ClosedForm, RejectsGuidedFlight) {
  const TrapParams trap = reference_trap();
  EXPECT_THROW(solve_throw_catch(trap, MotionProfile(1e4, 12.6e-6, {}, 0.5 * trap.depth())), InvalidArgument);
}

TEST(ClosedForm, TrajectoryTruncatesAtExit) {
  const TrapParams trap = reference_trap();
  const MotionProfile p(0.6 * trap.a_max(), 12.6e-6);
  const Trajectory tr = analytic_trajectory(trap, p, {}, 1e-8);
  const ThrowCatchSolution s = solve_throw_catch(trap, p);
  ASSERT_NE(tr.outcome, Outcome::Success);
  ASSERT_TRUE(s.exit_time);
  EXPECT_LT(tr.samples.back().t, p.tf());
  EXPECT_EQ(tr.samples.back().t, *s.exit_time);
  EXPECT_GE(std::abs(tr.samples.back().state.xi), trap.width() * (1 - 1e-12));
}

TEST(Oscillation, ExtentAndFirstExit) {
  const Oscillation o = Oscillation::from_state(0.0, 2.0, 1.0, 0.0);
  EXPECT_NEAR(o.amplitude, 1.0, 1e-15);
  const auto e = o.extent(constants::pi);
  EXPECT_NEAR(e.min, -1.0, 1e-12);
  EXPECT_NEAR(e.max, 1.0, 1e-12);
  const auto exit = Oscillation::from_state(0.0, 1.0, 0.0, 1.0).first_exit(0.5, 10.0);
  ASSERT_TRUE(exit);
  EXPECT_NEAR(*exit, std::asin(0.5), 1e-12);
  EXPECT_FALSE(Oscillation::from_state(0.0, 1.0, 0.1, 0.0).first_exit(0.5, 10.0));
}
