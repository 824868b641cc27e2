#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "flyatom/core_model.hpp"
#include "flyatom/dynamics_sim.hpp"
#include "flyatom/errors.hpp"
#include "flyatom/parallel.hpp"
#include "flyatom/rng.hpp"
#include "flyatom/thermal_mc.hpp"

namespace flyatom {

/// Rectangular lattice of 1 to 3 dimensions. Site index is row-major with the
/// first axis slowest.
struct ArrayProblem {
  int dims = 1;
  std::vector<int> extents;
  double spacing = 0.0;
  std::vector<char> occupancy;
  std::vector<char> target;

  std::size_t site_count() const {
    std::size_t n = 1;
    for (int e : extents) n *= static_cast<std::size_t>(e);
    return n;
  }

  std::array<int, 3> coords(std::size_t site) const {
    std::array<int, 3> c{0, 0, 0};
    for (int k = dims - 1; k >= 0; --k) {
      c[k] = static_cast<int>(site % static_cast<std::size_t>(extents[k]));
      site /= static_cast<std::size_t>(extents[k]);
    }
    return c;
  }

  std::size_t index(const std::array<int, 3>& c) const {
    std::size_t i = 0;
    for (int k = 0; k < dims; ++k) i = i * static_cast<std::size_t>(extents[k]) + static_cast<std::size_t>(c[k]);
    return i;
  }

  void validate() const {
    if (dims < 1 || dims > 3) throw InvalidArgument("array dims must be 1, 2 or 3");
    if (static_cast<int>(extents.size()) != dims) throw InvalidArgument("extents must have one entry per dimension");
    for (int e : extents)
      if (e < 1) throw InvalidArgument("lattice extents must be >= 1");
    if (!(spacing > 0.0)) throw InvalidArgument("lattice spacing must be > 0");
    if (occupancy.size() != site_count() || target.size() != site_count())
      throw InvalidArgument("occupancy and target must cover every site");
  }
};

enum class Strategy { GuidedSequential, Flying, Holographic };

inline std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::GuidedSequential: return "guided";
    case Strategy::Flying: return "flying";
    case Strategy::Holographic: return "holographic";
  }
  return "unknown";
}

struct Move {
  std::size_t from = 0;
  std::size_t to = 0;
  double distance = 0.0;  // m, straight line
  int unit_moves = 0;     // lattice steps (Manhattan)
  double duration = 0.0;  // s
};

struct PlanReport {
  Strategy strategy = Strategy::Flying;
  std::vector<Move> moves;
  double total_time = 0.0;
  bool success = false;
  int unit_moves = 0;               // total lattice steps over all moves
  double sequential_estimate_time = 0.0;  // 2 N sqrt(Lambda/a_max) with N the number of target sites
};

struct PlannerOptions {
  double flying_accel_fraction = 1.0;  // a/a_max for flying moves
  double holographic_width = 0.0;      // m, 0: trap width
};

/// Scoot time over one lattice spacing: half accelerating, half decelerating.
inline double unit_scoot_time(double spacing, double a_max) { return 2.0 * std::sqrt(spacing / a_max); }

/// Straight throw over `distance`: accelerate at `accel` up to at most the peak
/// speed of a unit scoot, sqrt(spacing * a_max), coast, and decelerate.
inline double flying_move_time(double distance, double spacing, double accel, double a_max) {
  const double v_cap = std::sqrt(spacing * a_max);
  if (distance <= v_cap * v_cap / accel) return 2.0 * std::sqrt(distance / accel);
  return distance / v_cap + v_cap / accel;
}

namespace detail {

inline double site_distance(const ArrayProblem& p, std::size_t a, std::size_t b, int* manhattan) {
  const auto ca = p.coords(a);
  const auto cb = p.coords(b);
  double s = 0.0;
  int m = 0;
  for (int k = 0; k < p.dims; ++k) {
    const int dk = ca[k] - cb[k];
    s += static_cast<double>(dk) * dk;
    m += std::abs(dk);
  }
  if (manhattan) *manhattan = m;
  return std::sqrt(s) * p.spacing;
}

/// Vacancies in order of distance from the target centroid, each taking the
/// nearest unused spare (ties broken by site index).
inline std::vector<std::pair<std::size_t, std::size_t>> greedy_assignment(const ArrayProblem& p) {
  std::vector<std::size_t> vacancies;
  std::vector<std::size_t> spares;
  std::array<double, 3> centroid{0.0, 0.0, 0.0};
  std::size_t n_target = 0;
  std::size_t n_atoms = 0;
  for (std::size_t i = 0; i < p.site_count(); ++i) {
    if (p.target[i]) {
      const auto c = p.coords(i);
      for (int k = 0; k < 3; ++k) centroid[k] += c[k];
      ++n_target;
      if (!p.occupancy[i]) vacancies.push_back(i);
    } else if (p.occupancy[i]) {
      spares.push_back(i);
    }
    n_atoms += p.occupancy[i] ? 1 : 0;
  }
  if (n_atoms < n_target)
    throw InfeasibleError("target needs " + std::to_string(n_target) + " atoms but only " + std::to_string(n_atoms) +
                          " are loaded");
  if (n_target > 0)
    for (double& c : centroid) c /= static_cast<double>(n_target);
  auto from_center = [&](std::size_t i) {
    const auto c = p.coords(i);
    double s = 0.0;
    for (int k = 0; k < p.dims; ++k) s += (c[k] - centroid[k]) * (c[k] - centroid[k]);
    return s;
  };
  std::vector<double> key(vacancies.size());
  for (std::size_t i = 0; i < vacancies.size(); ++i) key[i] = from_center(vacancies[i]);
  std::vector<std::size_t> order(vacancies.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });

  std::vector<std::array<int, 3>> spare_xyz(spares.size());
  for (std::size_t j = 0; j < spares.size(); ++j) spare_xyz[j] = p.coords(spares[j]);
  std::vector<char> used(spares.size(), 0);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(vacancies.size());
  for (std::size_t oi : order) {
    const std::size_t v = vacancies[oi];
    const auto cv = p.coords(v);
    long best_d2 = -1;
    std::size_t best = 0;
    for (std::size_t j = 0; j < spares.size(); ++j) {
      if (used[j]) continue;
      const auto& cs = spare_xyz[j];
      const long dx = cs[0] - cv[0], dy = cs[1] - cv[1], dz = cs[2] - cv[2];
      const long d2 = dx * dx + dy * dy + dz * dz;
      if (best_d2 < 0 || d2 < best_d2) {
        best_d2 = d2;
        best = j;
      }
    }
    used[best] = 1;
    pairs.emplace_back(spares[best], v);
  }
  return pairs;
}

}  // namespace detail

/// Kinematic rearrangement time. Every strategy uses the same spare-to-vacancy
/// assignment; guided and flying moves run one after another, holographic
/// moves run simultaneously at speed d * f_p.
inline PlanReport plan_and_time(const ArrayProblem& problem, Strategy strategy, const TrapParams& trap,
                                double frame_rate, const PlannerOptions& opts = {}) {
  problem.validate();
  if (strategy == Strategy::Holographic && !(frame_rate > 0.0))
    throw InvalidArgument("holographic frame rate must be > 0");
  if (!(opts.flying_accel_fraction > 0.0)) throw InvalidArgument("flying acceleration fraction must be > 0");
  const double a_max = trap.a_max();
  const double lambda = problem.spacing;
  const double holo_speed = (opts.holographic_width > 0.0 ? opts.holographic_width : trap.width()) * frame_rate;

  PlanReport rep;
  rep.strategy = strategy;
  std::size_t n_target = 0;
  for (char t : problem.target) n_target += t ? 1 : 0;
  rep.sequential_estimate_time = 2.0 * static_cast<double>(n_target) * std::sqrt(lambda / a_max);

  for (const auto& [from, to] : detail::greedy_assignment(problem)) {
    Move m;
    m.from = from;
    m.to = to;
    m.distance = detail::site_distance(problem, from, to, &m.unit_moves);
    switch (strategy) {
      case Strategy::GuidedSequential: m.duration = m.unit_moves * unit_scoot_time(lambda, a_max); break;
      case Strategy::Flying:
        m.duration = flying_move_time(m.distance, lambda, opts.flying_accel_fraction * a_max, a_max);
        break;
      case Strategy::Holographic: m.duration = m.distance / holo_speed; break;
    }
    rep.unit_moves += m.unit_moves;
    rep.moves.push_back(m);
  }
  for (const auto& m : rep.moves)
    rep.total_time = strategy == Strategy::Holographic ? std::max(rep.total_time, m.duration)
                                                       : rep.total_time + m.duration;
  rep.success = true;
  return rep;
}

/// Chain of n_target + 1 sites with the vacancy in the middle of sites
/// 1..n_target and the single spare at site 0.
inline ArrayProblem center_vacancy_chain(int n_target, double spacing) {
  if (n_target < 1) throw InvalidArgument("chain needs at least one target site");
  ArrayProblem p;
  p.dims = 1;
  p.extents = {n_target + 1};
  p.spacing = spacing;
  p.occupancy.assign(static_cast<std::size_t>(n_target + 1), 1);
  p.target.assign(static_cast<std::size_t>(n_target + 1), 1);
  p.target[0] = 0;
  p.occupancy[static_cast<std::size_t>((n_target + 1) / 2)] = 0;
  return p;
}

/// Half-filled random array: n atoms placed uniformly over the 2n sites
/// nearest the lattice centre; the target is the n sites nearest the centre.
inline ArrayProblem random_half_filled(int dims, int n, double spacing, CounterRng& rng) {
  if (dims < 1 || dims > 3) throw InvalidArgument("array dims must be 1, 2 or 3");
  if (n < 1) throw InvalidArgument("need at least one target site");
  const int side = static_cast<int>(std::ceil(std::pow(2.0 * n, 1.0 / dims))) + 3;
  ArrayProblem p;
  p.dims = dims;
  p.extents.assign(static_cast<std::size_t>(dims), side);
  p.spacing = spacing;
  const std::size_t sites = p.site_count();
  p.occupancy.assign(sites, 0);
  p.target.assign(sites, 0);

  const double mid = 0.5 * (side - 1);
  std::vector<double> r2(sites);
  for (std::size_t i = 0; i < sites; ++i) {
    const auto c = p.coords(i);
    double s = 0.0;
    for (int k = 0; k < dims; ++k) s += (c[k] - mid) * (c[k] - mid);
    r2[i] = s;
  }
  std::vector<std::size_t> order(sites);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return r2[a] < r2[b]; });
  const auto nn = static_cast<std::size_t>(n);
  for (std::size_t i = 0; i < nn; ++i) p.target[order[i]] = 1;
  std::vector<std::size_t> region(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(2 * nn));
  for (std::size_t i = region.size(); i > 1; --i) std::swap(region[i - 1], region[rng.below(i)]);
  for (std::size_t i = 0; i < nn; ++i) p.occupancy[region[i]] = 1;
  return p;
}

struct ScalingPoint {
  int n = 0;
  double mean_time = 0.0;
  double sem = 0.0;
};

struct ScalingResult {
  Strategy strategy = Strategy::Flying;
  int dims = 1;
  double exponent = 0.0;
  double exponent_se = 0.0;
  std::vector<ScalingPoint> points;
};

struct ScalingConfig {
  int dims = 1;
  std::vector<int> sizes;
  int trials = 200;
  std::uint64_t seed = 0;
  Strategy strategy = Strategy::Flying;
  double spacing = 4.2e-6;
  double frame_rate = 40.0;
  PlannerOptions planner;
  unsigned threads = 1;
};

/// Mean total time over random half-filled problems of size n. Trial t of
/// size n draws from CounterRng(seed, n, t).
inline ScalingPoint mean_plan_time(const ScalingConfig& cfg, const TrapParams& trap, int n) {
  if (cfg.trials < 1) throw InvalidArgument("need at least one trial");
  std::vector<double> times(static_cast<std::size_t>(cfg.trials));
  parallel_for(times.size(), cfg.threads, [&](std::size_t t) {
    CounterRng rng(cfg.seed, static_cast<std::uint64_t>(n), t);
    const ArrayProblem p = random_half_filled(cfg.dims, n, cfg.spacing, rng);
    times[t] = plan_and_time(p, cfg.strategy, trap, cfg.frame_rate, cfg.planner).total_time;
  });
  ScalingPoint pt;
  pt.n = n;
  double s = 0.0;
  for (double x : times) s += x;
  pt.mean_time = s / static_cast<double>(times.size());
  double v = 0.0;
  for (double x : times) v += (x - pt.mean_time) * (x - pt.mean_time);
  if (times.size() > 1) pt.sem = std::sqrt(v / static_cast<double>(times.size() - 1) / static_cast<double>(times.size()));
  return pt;
}

/// Log-log least-squares slope of mean time against N with its standard error.
inline ScalingResult scaling_experiment(const ScalingConfig& cfg, const TrapParams& trap) {
  if (cfg.sizes.size() < 2) throw InvalidArgument("scaling needs at least two sizes");
  const auto [lo, hi] = std::minmax_element(cfg.sizes.begin(), cfg.sizes.end());
  if (*lo < 1 || *hi < 10 * *lo) throw InvalidArgument("sizes must span at least one decade");
  ScalingResult res;
  res.strategy = cfg.strategy;
  res.dims = cfg.dims;
  for (int n : cfg.sizes) res.points.push_back(mean_plan_time(cfg, trap, n));

  const double m = static_cast<double>(res.points.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& p : res.points) {
    if (!(p.mean_time > 0.0)) throw NumericalError("zero mean time at N = " + std::to_string(p.n));
    sx += std::log(p.n);
    sy += std::log(p.mean_time);
  }
  const double mx = sx / m;
  const double my = sy / m;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& p : res.points) {
    sxx += (std::log(p.n) - mx) * (std::log(p.n) - mx);
    sxy += (std::log(p.n) - mx) * (std::log(p.mean_time) - my);
  }
  res.exponent = sxy / sxx;
  const double intercept = my - res.exponent * mx;
  double rss = 0.0;
  for (const auto& p : res.points) {
    const double r = std::log(p.mean_time) - intercept - res.exponent * std::log(p.n);
    rss += r * r;
  }
  res.exponent_se = m > 2.0 ? std::sqrt(rss / (m - 2.0) / sxx) : 0.0;
  return res;
}

/// Holographic time for a fixed travel length: l / (d * f_p).
inline double holographic_time(double length, double width, double frame_rate) {
  if (!(width > 0.0 && frame_rate > 0.0)) throw InvalidArgument("holographic width and frame rate must be > 0");
  return length / (width * frame_rate);
}

struct CrossoverResult {
  std::optional<int> n_star;  // smallest N with mean flying time above t_H
  double holographic_time = 0.0;
  std::vector<ScalingPoint> probes;
};

/// Binary search over [n_lo, n_hi] for the first N where flying is slower than
/// the holographic time `t_holo`. Assumes the mean flying time grows with N.
inline CrossoverResult crossover(const ScalingConfig& cfg, const TrapParams& trap, double t_holo, int n_lo, int n_hi) {
  if (!(n_lo >= 1 && n_hi >= n_lo)) throw InvalidArgument("crossover range must satisfy 1 <= n_lo <= n_hi");
  ScalingConfig fly = cfg;
  fly.strategy = Strategy::Flying;
  CrossoverResult res;
  res.holographic_time = t_holo;
  auto slower = [&](int n) {
    const ScalingPoint p = mean_plan_time(fly, trap, n);
    res.probes.push_back(p);
    return p.mean_time > t_holo;
  };
  if (slower(n_lo)) {
    res.n_star = n_lo;
    return res;
  }
  if (!slower(n_hi)) return res;
  int lo = n_lo, hi = n_hi;  // lo fast, hi slow
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    (slower(mid) ? hi : lo) = mid;
  }
  res.n_star = hi;
  return res;
}

enum class Fig5Mode { Flying, Guided };

inline std::string_view to_string(Fig5Mode m) { return m == Fig5Mode::Flying ? "flying" : "guided"; }

struct Fig5Options {
  double lattice_constant = 4.2e-6;
  double accel_fraction = 0.08;  // of the dynamic tweezer's a_max
  ThermalSpec thermal;
  unsigned threads = 1;
  RunOptions run;
  bool static_traps = true;
};

struct Fig5Result {
  Estimate defect_free;
  Estimate flyer_caught;
  Estimate b_retained;
};

struct Fig5Shot {
  bool flyer_caught = false;
  bool b_retained = false;
  bool others_retained = true;
  std::vector<AtomTrack> tracks;  // filled when run.record_every > 0
  bool defect_free() const { return flyer_caught && b_retained && others_retained; }
};

/// 3x3 lattice with the centre A empty. The flying atom A' starts one spacing
/// beyond B = (-Lambda, 0) and is carried to A through B. Atom ids: 0 is A',
/// 1 is B, 2..8 the other lattice atoms.
inline Fig5Shot fig5_shot(const TrapParams& trap_dynamic, const TrapParams& trap_static, Fig5Mode mode,
                          const Fig5Options& opts, CounterRng& rng) {
  const double lam = opts.lattice_constant;
  const double flight = mode == Fig5Mode::Flying ? 0.0 : trap_dynamic.depth();
  const MotionProfile profile(opts.accel_fraction * trap_dynamic.a_max(), 2.0 * lam, {}, flight);
  profile.check_against(trap_dynamic);
  const Vec3 origin{-2.0 * lam, 0.0, 0.0};

  PotentialField dyn = make_trap_field(trap_dynamic, TrapModel::Gaussian3D, opts.run.axial_aspect);
  dyn.center = CenterPath::along(profile, origin, {1.0, 0.0, 0.0});
  dyn.schedule = throw_catch_schedule(trap_dynamic, profile);

  Scene sc;
  sc.mass = trap_dynamic.mass();
  sc.fields = {dyn};
  sc.duration = profile.tf();
  sc.breakpoints = {profile.t1(), profile.t2()};
  sc.record_every = opts.run.record_every;

  ThermalSpec th = opts.thermal;
  th.dims = Dims::ThreeD;
  const PhaseState flyer = sample_initial(trap_dynamic, th, rng, opts.run.axial_aspect);
  sc.atoms.push_back({0, origin + to_lab(flyer), to_lab_velocity(flyer)});

  std::vector<Vec3> sites = {{-lam, 0.0, 0.0}};
  for (int i = -1; i <= 1; ++i)
    for (int j = -1; j <= 1; ++j)
      if (!(i == 0 && j == 0) && !(i == -1 && j == 0)) sites.push_back({i * lam, j * lam, 0.0});
  if (opts.static_traps) {
    for (std::size_t k = 0; k < sites.size(); ++k) {
      PotentialField st = make_trap_field(trap_static, TrapModel::Gaussian3D, opts.run.axial_aspect);
      st.center = CenterPath::fixed(sites[k]);
      sc.fields.push_back(st);
      const PhaseState s = sample_initial(trap_static, th, rng, opts.run.axial_aspect);
      sc.atoms.push_back({static_cast<int>(k + 1), sites[k] + to_lab(s), to_lab_velocity(s)});
    }
  }
  sc.dt = opts.run.dt > 0.0 ? opts.run.dt : min_period(sc.fields, sc.mass) / opts.run.steps_per_period;

  auto tracks = integrate(sc);
  Fig5Shot shot;
  shot.flyer_caught = tracks[0].captured_by && *tracks[0].captured_by == 0;
  if (opts.static_traps) {
    shot.b_retained = tracks[1].captured_by && *tracks[1].captured_by == 1;
    for (std::size_t k = 2; k < tracks.size(); ++k)
      shot.others_retained = shot.others_retained && tracks[k].captured_by && *tracks[k].captured_by == k;
  } else {
    shot.b_retained = true;
  }
  if (opts.run.record_every > 0) shot.tracks = std::move(tracks);
  return shot;
}

/// Defect-free probability of the 3x3 vacancy filling over a thermal
/// ensemble; shot i draws from CounterRng(seed, mode, i).
inline Fig5Result fig5_scene(const TrapParams& trap_dynamic, const TrapParams& trap_static, Fig5Mode mode,
                             const Fig5Options& opts = {}) {
  opts.thermal.validate();
  const std::size_t n = opts.thermal.temperature == 0.0 ? 1 : opts.thermal.n_samples;
  std::vector<Fig5Shot> shots(n);
  Fig5Options inner = opts;
  inner.run.record_every = 0;
  parallel_for(n, opts.threads, [&](std::size_t i) {
    CounterRng rng(opts.thermal.seed, mode == Fig5Mode::Flying ? 0 : 1, i);
    shots[i] = fig5_shot(trap_dynamic, trap_static, mode, inner, rng);
  });
  const std::size_t reps = opts.thermal.n_samples;
  auto count = [&](auto pred) {
    std::size_t c = 0;
    for (const auto& s : shots) c += pred(s) ? 1 : 0;
    return n == 1 ? c * reps : c;
  };
  Fig5Result r;
  r.defect_free = wilson_estimate(count([](const Fig5Shot& s) { return s.defect_free(); }), reps);
  r.flyer_caught = wilson_estimate(count([](const Fig5Shot& s) { return s.flyer_caught; }), reps);
  r.b_retained = wilson_estimate(count([](const Fig5Shot& s) { return s.b_retained; }), reps);
  return r;
}

}  // namespace flyatom
