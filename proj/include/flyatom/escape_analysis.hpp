#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "flyatom/constants.hpp"
#include "flyatom/core_model.hpp"
#include "flyatom/errors.hpp"

namespace flyatom {

struct EscapeReport {
  double accel = 0.0;
  double theta1 = 0.0;
  double max_disp_throw = 0.0;
  double xi2 = 0.0;
  double amplitude2 = 0.0;
  double max_disp_catch = 0.0;
  Outcome outcome = Outcome::Success;
};

struct CriticalAccels {
  double a_max = 0.0;
  double a_theta_3pi = 0.0;
  double a_theta_2pi = 0.0;
  double a_gap_minus = 0.0;
  double a_gap_plus = 0.0;
  double a_island_end = 0.0;        // upper edge of the success island
  Outcome gap_minus_binding = Outcome::EscapeDuringCatch;  // failure just above a_gap_minus
};

/// Shortest travel length for which the release phase exceeds pi at a < a_max.
inline double min_modeled_length(const TrapParams& trap) {
  return 3.0 * constants::pi * constants::pi * trap.width() / 4.0;
}

/// Acceleration at which omega*t1 equals theta (equal-thirds profile).
inline double accel_for_release_phase(const TrapParams& trap, double length, double theta) {
  const double w = trap.omega();
  return 2.0 * length * w * w / (3.0 * theta * theta);
}

namespace detail {

inline void require_modeled_length(const TrapParams& trap, double length) {
  if (!(length > min_modeled_length(trap)))
    throw RegimeError("travel length " + std::to_string(length) + " m must exceed 3*pi^2*d/4 = " +
                      std::to_string(min_modeled_length(trap)) + " m for the closed-form escape analysis");
}

}  // namespace detail

/// Escape cascade for a rest start: throw, then recapture, then catch.
inline EscapeReport classify(const TrapParams& trap, double length, double accel) {
  detail::require_modeled_length(trap, length);
  if (!(accel > 0.0)) throw InvalidArgument("acceleration must be > 0");
  const MotionProfile profile(accel, length);
  const ThrowCatchSolution s = solve_throw_catch(trap, profile);
  EscapeReport r;
  r.accel = accel;
  r.theta1 = s.release.theta;
  r.max_disp_throw = s.max_disp_throw;
  r.xi2 = s.recapture.xi;
  r.amplitude2 = s.catch_stage.amplitude;
  r.max_disp_catch = s.max_disp_catch;
  r.outcome = s.outcome;
  return r;
}

/// g(a) = A2(a) + a/omega^2 - d; positive where recapture or deceleration fails.
inline double catch_margin(const TrapParams& trap, double length, double accel) {
  const MotionProfile profile(accel, length);
  const ThrowCatchSolution s = solve_throw_catch(trap, profile);
  return s.catch_stage.amplitude + s.catch_stage.equilibrium - trap.width();
}

namespace detail {

template <class F>
double bisect(F&& f, double lo, double hi, double rel_tol = 1e-10) {
  double flo = f(lo);
  for (int it = 0; it < 400 && (hi - lo) > rel_tol * std::abs(hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct SignChange {
  double lo;
  double hi;
  bool rising;  // g goes from <= 0 to > 0
};

}  // namespace detail

inline CriticalAccels critical_accelerations(const TrapParams& trap, double length, int scan_points = 2000) {
  detail::require_modeled_length(trap, length);
  CriticalAccels c;
  c.a_max = trap.a_max();
  c.a_theta_3pi = accel_for_release_phase(trap, length, 3.0 * constants::pi);
  c.a_theta_2pi = accel_for_release_phase(trap, length, 2.0 * constants::pi);

  auto g = [&](double a) { return catch_margin(trap, length, a); };
  const double lo = 1e-4 * c.a_max;
  const double hi = 2.0 * c.a_max;
  std::vector<detail::SignChange> changes;
  std::string pattern;
  double prev_a = lo;
  double prev_g = g(lo);
  pattern += prev_g > 0.0 ? '+' : '-';
  for (int i = 1; i < scan_points; ++i) {
    const double a = lo * std::pow(hi / lo, static_cast<double>(i) / (scan_points - 1));
    const double ga = g(a);
    if ((ga > 0.0) != (prev_g > 0.0)) {
      changes.push_back({prev_a, a, ga > 0.0});
      pattern += ga > 0.0 ? '+' : '-';
    }
    prev_a = a;
    prev_g = ga;
  }

  auto nearest = [&](double target, bool rising, double above) -> std::optional<detail::SignChange> {
    std::optional<detail::SignChange> best;
    for (const auto& sc : changes) {
      if (sc.rising != rising || sc.lo < above) continue;
      if (!best || std::abs(std::log(sc.lo / target)) < std::abs(std::log(best->lo / target))) best = sc;
    }
    return best;
  };

  const auto minus = nearest(c.a_theta_3pi, true, 0.0);
  if (!minus) throw BracketError("no rising root of the catch margin near a(theta1=3pi); sign pattern " + pattern);
  c.a_gap_minus = detail::bisect(g, minus->lo, minus->hi);
  const auto plus = nearest(c.a_theta_2pi, false, c.a_gap_minus);
  if (!plus) throw BracketError("no falling root of the catch margin near a(theta1=2pi); sign pattern " + pattern);
  c.a_gap_plus = detail::bisect(g, plus->lo, plus->hi);

  c.a_island_end = c.a_max;
  for (const auto& sc : changes) {
    if (sc.rising && sc.lo >= c.a_gap_plus) {
      c.a_island_end = std::min(c.a_max, detail::bisect(g, sc.lo, sc.hi));
      break;
    }
  }
  if (!(c.a_gap_minus < c.a_gap_plus && c.a_gap_plus < c.a_max))
    throw BracketError("gap roots out of order; sign pattern " + pattern);
  c.gap_minus_binding = classify(trap, length, c.a_gap_minus * (1.0 + 1e-6)).outcome;
  return c;
}

struct PortraitPoint {
  double t;
  double xi;
  double xi_dot;
};

enum class MarkerKind { Release, Recapture, Escape, Equilibrium };

inline std::string_view to_string(MarkerKind k) {
  switch (k) {
    case MarkerKind::Release: return "release";
    case MarkerKind::Recapture: return "recapture";
    case MarkerKind::Escape: return "escape";
    case MarkerKind::Equilibrium: return "equilibrium";
  }
  return "unknown";
}

struct PortraitMarker {
  MarkerKind kind;
  double xi;
  double xi_dot;
};

struct PhasePortrait {
  std::vector<PortraitPoint> points;
  std::vector<PortraitMarker> markers;
  std::optional<EscapeReport> report;  // absent for a == 0
};

/// Trap-frame (xi, xi_dot) path of a rest-start throw and catch.
inline PhasePortrait phase_portrait(const TrapParams& trap, double length, double accel, double sample_dt) {
  detail::require_modeled_length(trap, length);
  if (!(sample_dt > 0.0)) throw InvalidArgument("sample_dt must be > 0");
  PhasePortrait p;
  if (accel == 0.0) {
    p.points.push_back({0.0, 0.0, 0.0});
    p.markers.push_back({MarkerKind::Equilibrium, 0.0, 0.0});
    return p;
  }
  p.report = classify(trap, length, accel);
  const MotionProfile profile(accel, length);
  const Trajectory traj = analytic_trajectory(trap, profile, {}, sample_dt);
  p.points.reserve(traj.samples.size());
  for (const auto& s : traj.samples) p.points.push_back({s.t, s.state.xi, s.state.xi_dot});

  const double w = trap.omega();
  p.markers.push_back({MarkerKind::Equilibrium, -accel / (w * w), 0.0});
  p.markers.push_back({MarkerKind::Equilibrium, profile.decel() / (w * w), 0.0});
  if (traj.release) p.markers.push_back({MarkerKind::Release, traj.release->xi, traj.release->xi_dot});
  if (traj.recapture) p.markers.push_back({MarkerKind::Recapture, traj.recapture->xi, traj.recapture->xi_dot});
  if (traj.outcome != Outcome::Success && !traj.samples.empty())
    p.markers.push_back({MarkerKind::Escape, traj.samples.back().state.xi, traj.samples.back().state.xi_dot});
  return p;
}

}  // namespace flyatom
