#include <gtest/gtest.h>

#include "flyatom/escape_analysis.hpp"
#include "oracles.hpp"

using namespace flyatom;

namespace {

TrapParams reference_trap() { return TrapParams::from_millikelvin(constants::rb87_mass, 0.76, 0.5e-6); }

oracle::Verdict to_verdict(Outcome o) {
  switch (o) {
    case Outcome::Success: return oracle::Verdict::Success;
    case Outcome::EscapeDuringThrow: return oracle::Verdict::Throw;
    case Outcome::RecaptureFail: return oracle::Verdict::Recapture;
    default: return oracle::Verdict::Catch;
  }
}

}  // namespace

TEST(Classify, LowAccelerationSucceeds) {
  const TrapParams trap = reference_trap();
  const auto r = classify(trap, 12.6e-6, 0.1 * trap.a_max());
  EXPECT_EQ(r.outcome, Outcome::Success);
  const oracle::Geometry g{trap.mass(), trap.depth(), trap.width(), 12.6e-6, 0.1 * trap.a_max()};
  EXPECT_EQ(oracle::brute_classify(g), oracle::Verdict::Success);
}

TEST(Classify, AgreesWithBruteForceOracle) {
  const TrapParams trap = reference_trap();
  for (int i = 0; i < 40; ++i) {
    const double f = 1e-2 * std::pow(130.0, i / 39.0);
    const double a = f * trap.a_max();
    const oracle::Geometry g{trap.mass(), trap.depth(), trap.width(), 12.6e-6, a};
    EXPECT_EQ(to_verdict(classify(trap, 12.6e-6, a).outcome), oracle::brute_classify(g, 20000)) << f;
  }
}

TEST(Classify, CatchDisplacementIsAmplitudePlusOffset) {
  const TrapParams trap = reference_trap();
  const double w2 = trap.omega() * trap.omega();
  for (double f : {0.1, 0.3, 0.5, 0.9}) {
    const auto r = classify(trap, 12.6e-6, f * trap.a_max());
    if (r.outcome == Outcome::EscapeDuringThrow || r.outcome == Outcome::RecaptureFail) continue;
    EXPECT_NEAR(r.max_disp_catch, r.amplitude2 + f * trap.a_max() / w2, 1e-12 * trap.width()) << f;
  }
}

TEST(Classify, RejectsShortTravel) {
  const TrapParams trap = reference_trap();
  EXPECT_THROW(classify(trap, 3.0e-6, 0.1 * trap.a_max()), RegimeError);
}

TEST(Criticals, PhaseRatiosMatchHandFormula) {
  const TrapParams trap = reference_trap();
  const auto c = critical_accelerations(trap, 12.6e-6);
  const double hand3 = 4 * 12.6e-6 / (3 * 0.5e-6 * 9 * oracle::kPi * oracle::kPi);
  const double hand2 = 4 * 12.6e-6 / (3 * 0.5e-6 * 4 * oracle::kPi * oracle::kPi);
  EXPECT_NEAR(c.a_theta_3pi / c.a_max, hand3, 1e-9);
  EXPECT_NEAR(c.a_theta_2pi / c.a_max, hand2, 1e-9);
  EXPECT_NEAR(c.a_theta_3pi / c.a_max, 0.378, 0.005);
  EXPECT_NEAR(c.a_theta_2pi / c.a_max, 0.851, 0.005);
}

TEST(Criticals, GapRootsBracketTheGap) {
  const TrapParams trap = reference_trap();
  const double l = 12.6e-6;
  const auto c = critical_accelerations(trap, l);
  EXPECT_LT(c.a_gap_minus, c.a_gap_plus);
  EXPECT_NEAR(catch_margin(trap, l, c.a_gap_minus), 0.0, 1e-9 * trap.width());
  EXPECT_NEAR(catch_margin(trap, l, c.a_gap_plus), 0.0, 1e-9 * trap.width());
  EXPECT_EQ(classify(trap, l, c.a_gap_minus * 0.999).outcome, Outcome::Success);
  EXPECT_NE(classify(trap, l, c.a_gap_minus * 1.001).outcome, Outcome::Success);
  EXPECT_NE(classify(trap, l, c.a_gap_plus * 0.999).outcome, Outcome::Success);
  EXPECT_EQ(classify(trap, l, c.a_gap_plus * 1.001).outcome, Outcome::Success);
}

TEST(Criticals, FailsOutsideModeledRegime) {
  const TrapParams trap = reference_trap();
  EXPECT_THROW(critical_accelerations(trap, 2.0 * trap.width()), RegimeError);
}

TEST(PhasePortrait, ZeroAccelerationIsSinglePoint) {
  const TrapParams trap = reference_trap();
  const auto p = phase_portrait(trap, 12.6e-6, 0.0, 1e-8);
  ASSERT_EQ(p.points.size(), 1u);
  EXPECT_EQ(p.points[0].xi, 0.0);
  EXPECT_FALSE(p.report);
}

TEST(PhasePortrait, MarksReleaseAndRecapture) {
  const TrapParams trap = reference_trap();
  const auto p = phase_portrait(trap, 12.6e-6, 0.3 * trap.a_max(), 1e-8);
  int release = 0, recapture = 0;
  for (const auto& m : p.markers) {
    release += m.kind == MarkerKind::Release;
    recapture += m.kind == MarkerKind::Recapture;
  }
  EXPECT_EQ(release, 1);
  EXPECT_EQ(recapture, 1);
  EXPECT_GT(p.points.size(), 10u);
}
