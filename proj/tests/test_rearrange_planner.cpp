#include <gtest/gtest.h>

#include "flyatom/rearrange_planner.hpp"
#include "oracles.hpp"

using namespace flyatom;

namespace {

TrapParams reference_trap() { return TrapParams::from_millikelvin(constants::rb87_mass, 0.76, 0.5e-6); }

constexpr double kLambda = 4.2e-6;

ArrayProblem line(std::vector<char> occ, std::vector<char> tgt) {
  ArrayProblem p;
  p.dims = 1;
  p.extents = {static_cast<int>(occ.size())};
  p.spacing = kLambda;
  p.occupancy = std::move(occ);
  p.target = std::move(tgt);
  return p;
}

}  // namespace

TEST(Timing, UnitScootHandValue) {
  const TrapParams trap = reference_trap();
  const oracle::Geometry g{trap.mass(), trap.depth(), trap.width(), kLambda, 1.0};
  EXPECT_NEAR(unit_scoot_time(kLambda, trap.a_max()), 2.0 * std::sqrt(kLambda / g.amax()), 1e-18);
}

TEST(Timing, FlyingTrapezoidBranches) {
  const double a = 1e5;
  // short move: triangle profile
  EXPECT_NEAR(flying_move_time(kLambda, kLambda, a, a), 2.0 * std::sqrt(kLambda / a), 1e-18);
  // long move: cruise at sqrt(spacing * a_max)
  const double v = std::sqrt(kLambda * a);
  EXPECT_NEAR(flying_move_time(10 * kLambda, kLambda, a, a), 10 * kLambda / v + v / a, 1e-15);
}

TEST(Plan, ChainGuidedTimeIsClosedForm) {
  const TrapParams trap = reference_trap();
  for (int n : {10, 51, 200}) {
    const auto rep = plan_and_time(center_vacancy_chain(n, kLambda), Strategy::GuidedSequential, trap, 40.0);
    const int k = (n + 1) / 2;
    ASSERT_EQ(rep.moves.size(), 1u);
    EXPECT_EQ(rep.unit_moves, k);
    EXPECT_DOUBLE_EQ(rep.total_time, k * 2.0 * std::sqrt(kLambda / trap.a_max()));
    EXPECT_DOUBLE_EQ(rep.sequential_estimate_time, 2.0 * n * std::sqrt(kLambda / trap.a_max()));
  }
}

TEST(Plan, ChainFlyingHalvesGuided) {
  const TrapParams trap = reference_trap();
  const auto p = center_vacancy_chain(200, kLambda);
  const double tg = plan_and_time(p, Strategy::GuidedSequential, trap, 40.0).total_time;
  const double tf = plan_and_time(p, Strategy::Flying, trap, 40.0).total_time;
  EXPECT_NEAR(tf / tg, 0.5, 0.01);
}

TEST(Plan, AdjacentMoveSameForFlyingAndGuided) {
  const TrapParams trap = reference_trap();
  const auto p = line({1, 0}, {0, 1});
  const double tg = plan_and_time(p, Strategy::GuidedSequential, trap, 40.0).total_time;
  const double tf = plan_and_time(p, Strategy::Flying, trap, 40.0).total_time;
  EXPECT_NEAR(tf, tg, 1e-15);
}

TEST(Plan, FlyingNeverSlowerThanGuided) {
  const TrapParams trap = reference_trap();
  for (int dims = 1; dims <= 3; ++dims)
    for (std::uint64_t t = 0; t < 100; ++t) {
      CounterRng rng(77, static_cast<std::uint64_t>(dims), t);
      const auto p = random_half_filled(dims, 40, kLambda, rng);
      const double tg = plan_and_time(p, Strategy::GuidedSequential, trap, 40.0).total_time;
      const double tf = plan_and_time(p, Strategy::Flying, trap, 40.0).total_time;
      ASSERT_LE(tf, tg * (1 + 1e-12)) << dims << " " << t;
    }
}

TEST(Plan, HolographicIsLongestMoveOverSpeed) {
  const TrapParams trap = reference_trap();
  CounterRng rng(5);
  const auto p = random_half_filled(2, 30, kLambda, rng);
  const auto rep = plan_and_time(p, Strategy::Holographic, trap, 40.0);
  double longest = 0.0;
  for (const auto& m : rep.moves) longest = std::max(longest, m.distance);
  EXPECT_DOUBLE_EQ(rep.total_time, longest / (trap.width() * 40.0));
}

TEST(Plan, HolographicFixedLengthIgnoresN) {
  EXPECT_DOUBLE_EQ(holographic_time(3e-6, 1e-6, 40.0), 3e-6 / (1e-6 * 40.0));
  EXPECT_THROW(holographic_time(3e-6, 0.0, 40.0), InvalidArgument);
}

TEST(Plan, GreedyTakesNearestSpareForCentralVacancyFirst) {
  // sites 0..6, target 2..4, vacancies at 3 (central) and 4; spares at 0 and 6
  const auto p = line({1, 0, 1, 0, 0, 0, 1}, {0, 0, 1, 1, 1, 0, 0});
  const auto pairs = detail::greedy_assignment(p);
  ASSERT_EQ(pairs.size(), 2u);
  // vacancy 3 first: spares 0 and 6 tie at distance 3, lower index wins
  EXPECT_EQ(pairs[0], (std::pair<std::size_t, std::size_t>{0, 3}));
  EXPECT_EQ(pairs[1], (std::pair<std::size_t, std::size_t>{6, 4}));
}

TEST(Plan, InfeasibleTargetThrows) {
  const auto p = line({1, 0, 0}, {0, 1, 1});
  EXPECT_THROW(plan_and_time(p, Strategy::Flying, reference_trap(), 40.0), InfeasibleError);
  auto bad = line({1, 0}, {0, 1});
  bad.target.pop_back();
  EXPECT_THROW(plan_and_time(bad, Strategy::Flying, reference_trap(), 40.0), InvalidArgument);
}

TEST(Plan, FilledTargetNeedsNoMoves) {
  const auto rep = plan_and_time(line({1, 1, 1}, {1, 1, 1}), Strategy::Flying, reference_trap(), 40.0);
  EXPECT_TRUE(rep.moves.empty());
  EXPECT_EQ(rep.total_time, 0.0);
}

TEST(RandomProblem, HalfFilledAndDeterministic) {
  CounterRng a(3, 100, 0), b(3, 100, 0);
  const auto p = random_half_filled(2, 100, kLambda, a);
  const auto q = random_half_filled(2, 100, kLambda, b);
  EXPECT_EQ(p.occupancy, q.occupancy);
  std::size_t atoms = 0, targets = 0;
  for (std::size_t i = 0; i < p.site_count(); ++i) {
    atoms += p.occupancy[i];
    targets += p.target[i];
  }
  EXPECT_EQ(atoms, 100u);
  EXPECT_EQ(targets, 100u);
}

TEST(Scaling, RejectsNarrowSizeRange) {
  ScalingConfig cfg;
  cfg.sizes = {10, 20};
  EXPECT_THROW(scaling_experiment(cfg, reference_trap()), InvalidArgument);
}

TEST(Scaling, ThreadCountDoesNotChangeMean) {
  ScalingConfig cfg;
  cfg.dims = 2;
  cfg.trials = 20;
  cfg.seed = 4;
  const auto a = mean_plan_time(cfg, reference_trap(), 50);
  cfg.threads = 4;
  const auto b = mean_plan_time(cfg, reference_trap(), 50);
  EXPECT_EQ(a.mean_time, b.mean_time);
  EXPECT_EQ(a.sem, b.sem);
}

TEST(Crossover, LimitsOfTheSearch) {
  ScalingConfig cfg;
  cfg.dims = 2;
  cfg.trials = 10;
  const TrapParams trap = reference_trap();
  EXPECT_EQ(crossover(cfg, trap, 0.0, 4, 64).n_star, 4);
  EXPECT_FALSE(crossover(cfg, trap, 1e3, 4, 64).n_star);
  const double t = mean_plan_time(cfg, trap, 30).mean_time;
  const auto r = crossover(cfg, trap, t, 4, 200);
  ASSERT_TRUE(r.n_star);
  EXPECT_GT(mean_plan_time(cfg, trap, *r.n_star).mean_time, t);
  EXPECT_LE(mean_plan_time(cfg, trap, *r.n_star - 1).mean_time, t);
}

TEST(Fig5, ZeroTemperatureFlyingFillsGuidedKicks) {
  const TrapParams dyn = TrapParams::from_millikelvin(constants::rb87_mass, 1.94, 0.5e-6);
  const TrapParams st = TrapParams::from_millikelvin(constants::rb87_mass, 0.58, 0.5e-6);
  Fig5Options opts;
  opts.thermal.n_samples = 10;
  const auto fly = fig5_scene(dyn, st, Fig5Mode::Flying, opts);
  const auto guided = fig5_scene(dyn, st, Fig5Mode::Guided, opts);
  EXPECT_EQ(fly.defect_free.p_hat, 1.0);
  EXPECT_EQ(guided.defect_free.p_hat, 0.0);
  EXPECT_EQ(guided.b_retained.p_hat, 0.0);
}
