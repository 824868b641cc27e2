#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flyatom/constants.hpp"
#include "flyatom/errors.hpp"

namespace flyatom {

/// Truncated-harmonic optical tweezer: U(xi) = (U0/d^2)(xi^2 - d^2) for |xi| <= d.
/// All quantities SI.
class TrapParams {
 public:
  TrapParams(double mass, double depth, double width) : mass_(mass), depth_(depth), width_(width) {
    if (!(mass > 0.0) || !std::isfinite(mass)) throw InvalidArgument("trap mass must be > 0");
    if (!(depth > 0.0) || !std::isfinite(depth)) throw InvalidArgument("trap depth must be > 0");
    if (!(width > 0.0) || !std::isfinite(width)) throw InvalidArgument("trap width must be > 0");
    if (!std::isfinite(omega()) || !(omega() > 0.0)) throw InvalidArgument("trap frequency is not finite");
  }

  static TrapParams from_millikelvin(double mass, double depth_mk, double width) {
    return {mass, depth_mk * (1e-3 * constants::boltzmann), width};
  }

  double mass() const { return mass_; }
  double depth() const { return depth_; }
  double width() const { return width_; }

  double omega() const { return std::sqrt(2.0 * depth_ / (mass_ * width_ * width_)); }
  double a_max() const { return depth_ / (mass_ * width_); }

  friend bool operator==(const TrapParams&, const TrapParams&) = default;

 private:
  double mass_;
  double depth_;
  double width_;
};

inline double trap_frequency(const TrapParams& trap) { return trap.omega(); }
inline double max_acceleration(const TrapParams& trap) { return trap.a_max(); }

struct SegmentFractions {
  double accel = 1.0 / 3.0;
  double flight = 1.0 / 3.0;
  double decel = 1.0 / 3.0;

  friend bool operator==(const SegmentFractions&, const SegmentFractions&) = default;
};

/// Tweezer schedule: accelerate at +a over accel*l, coast over flight*l (depth
/// flight_depth, 0 = off), decelerate to rest over decel*l. The deceleration
/// magnitude is a*accel/decel so the tweezer stops exactly at l; with equal
/// fractions it is a.
class MotionProfile {
 public:
  MotionProfile(double accel, double length, SegmentFractions fractions = {}, double flight_depth = 0.0)
      : accel_(accel), length_(length), fr_(fractions), flight_depth_(flight_depth) {
    if (!(accel > 0.0) || !std::isfinite(accel)) throw InvalidArgument("acceleration must be > 0");
    if (!(length > 0.0) || !std::isfinite(length)) throw InvalidArgument("travel length must be > 0");
    if (fr_.accel <= 0.0 || fr_.decel <= 0.0 || fr_.flight < 0.0)
      throw InvalidArgument("segment fractions: accel and decel must be > 0, flight >= 0");
    if (std::abs(fr_.accel + fr_.flight + fr_.decel - 1.0) > 1e-12)
      throw InvalidArgument("segment fractions must sum to 1");
    if (!(flight_depth >= 0.0)) throw InvalidArgument("flight depth must be >= 0");

    t1_ = std::sqrt(2.0 * fr_.accel * length_ / accel_);
    v_ = accel_ * t1_;
    t2_ = t1_ + fr_.flight * length_ / v_;
    tf_ = t2_ + 2.0 * fr_.decel * length_ / v_;
  }

  double accel() const { return accel_; }
  double decel() const { return accel_ * fr_.accel / fr_.decel; }
  double length() const { return length_; }
  const SegmentFractions& fractions() const { return fr_; }
  double flight_depth() const { return flight_depth_; }

  double t1() const { return t1_; }
  double t2() const { return t2_; }
  double tf() const { return tf_; }
  double release_speed() const { return v_; }

  void check_against(const TrapParams& trap) const {
    if (flight_depth_ > trap.depth() * (1.0 + 1e-12))
      throw InvalidArgument("flight depth exceeds trap depth");
  }

  // Tweezer-centre kinematics; clamped to rest outside [0, tf].
  double position(double t) const {
    if (t <= 0.0) return 0.0;
    if (t <= t1_) return 0.5 * accel_ * t * t;
    const double x1 = fr_.accel * length_;
    if (t <= t2_) return x1 + v_ * (t - t1_);
    if (t >= tf_) return length_;
    const double s = t - t2_;
    return x1 + fr_.flight * length_ + v_ * s - 0.5 * decel() * s * s;
  }

  double velocity(double t) const {
    if (t <= 0.0 || t >= tf_) return 0.0;
    if (t <= t1_) return accel_ * t;
    if (t <= t2_) return v_;
    return v_ - decel() * (t - t2_);
  }

  double acceleration(double t) const {
    if (t <= 0.0 || t >= tf_) return 0.0;
    if (t < t1_) return accel_;
    if (t < t2_) return 0.0;
    return -decel();
  }

 private:
  double accel_;
  double length_;
  SegmentFractions fr_;
  double flight_depth_;
  double t1_ = 0.0;
  double t2_ = 0.0;
  double tf_ = 0.0;
  double v_ = 0.0;
};

/// Atom state relative to the tweezer centre; y and z are only populated in 3D.
struct PhaseState {
  double xi = 0.0;
  double xi_dot = 0.0;
  double y = 0.0;
  double y_dot = 0.0;
  double z = 0.0;
  double z_dot = 0.0;

  bool finite() const {
    return std::isfinite(xi) && std::isfinite(xi_dot) && std::isfinite(y) && std::isfinite(y_dot) &&
           std::isfinite(z) && std::isfinite(z_dot);
  }
  friend bool operator==(const PhaseState&, const PhaseState&) = default;
};

enum class Outcome { Success, EscapeDuringThrow, RecaptureFail, EscapeDuringCatch, EscapeTransverse };

inline std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Success: return "success";
    case Outcome::EscapeDuringThrow: return "escape_during_throw";
    case Outcome::RecaptureFail: return "recapture_fail";
    case Outcome::EscapeDuringCatch: return "escape_during_catch";
    case Outcome::EscapeTransverse: return "escape_transverse";
  }
  return "unknown";
}

struct TimedState {
  double t = 0.0;
  PhaseState state;
};

/// (xi, xi_dot, theta) at release (t1) or recapture (t2).
struct PhaseRecord {
  double xi = 0.0;
  double xi_dot = 0.0;
  double theta = 0.0;
};

struct Trajectory {
  std::vector<TimedState> samples;
  Outcome outcome = Outcome::Success;
  std::optional<PhaseRecord> release;
  std::optional<PhaseRecord> recapture;
};

/// xi(tau) = equilibrium + amplitude * cos(omega*tau + phase).
struct Oscillation {
  double equilibrium = 0.0;
  double amplitude = 0.0;
  double phase = 0.0;
  double omega = 1.0;

  static Oscillation from_state(double equilibrium, double omega, double xi0, double xi_dot0) {
    const double c = xi0 - equilibrium;
    const double s = xi_dot0 / omega;
    return {equilibrium, std::hypot(c, s), std::atan2(-s, c), omega};
  }

  double position(double tau) const { return equilibrium + amplitude * std::cos(omega * tau + phase); }
  double velocity(double tau) const { return -amplitude * omega * std::sin(omega * tau + phase); }

  struct Extent {
    double min;
    double max;
    double max_abs() const { return std::max(std::abs(min), std::abs(max)); }
  };

  /// Exact range of xi over tau in [0, span].
  Extent extent(double span) const {
    const double a0 = phase;
    const double a1 = phase + omega * span;
    const double p0 = position(0.0);
    const double p1 = position(span);
    Extent e{std::min(p0, p1), std::max(p0, p1)};
    // Crest at angle 2*pi*k, trough at pi + 2*pi*k.
    if (std::ceil(a0 / constants::two_pi) * constants::two_pi <= a1) e.max = equilibrium + amplitude;
    if (std::ceil((a0 - constants::pi) / constants::two_pi) * constants::two_pi + constants::pi <= a1)
      e.min = equilibrium - amplitude;
    return e;
  }

  /// Earliest tau in [0, span] where |xi| reaches `bound` on its way out, if any.
  std::optional<double> first_exit(double bound, double span) const {
    if (extent(span).max_abs() <= bound) return std::nullopt;
    if (std::abs(position(0.0)) > bound) return 0.0;
    double best = span;
    // Outside +bound: cos(angle) > c_plus; outside -bound: cos(angle - pi) > c_minus.
    auto scan = [&](double c, double offset) {
      if (amplitude <= 0.0 || c >= 1.0) return;
      const double half = c <= -1.0 ? constants::pi : std::acos(c);
      double r = std::fmod(phase - offset + half, constants::two_pi);
      if (r < 0.0) r += constants::two_pi;
      const double dangle = r < 2.0 * half ? 0.0 : constants::two_pi - r;
      best = std::min(best, dangle / omega);
    };
    if (amplitude > 0.0) {
      scan((bound - equilibrium) / amplitude, 0.0);
      scan((bound + equilibrium) / amplitude, constants::pi);
    }
    return std::min(best, span);
  }
};

/// Closed-form solution of the throw/flight/catch problem for one initial state.
struct ThrowCatchSolution {
  double omega = 0.0;
  double t1 = 0.0;
  double t2 = 0.0;
  double tf = 0.0;
  Oscillation throw_stage;
  Oscillation catch_stage;
  PhaseRecord release;
  PhaseRecord recapture;
  double max_disp_throw = 0.0;  // max |xi| on [0, t1]
  double max_disp_catch = 0.0;  // max |xi| on [t2, tf]
  Outcome outcome = Outcome::Success;
  std::optional<double> exit_time;

  double position(double t) const {
    if (t <= t1) return throw_stage.position(t);
    if (t <= t2) return release.xi + release.xi_dot * (t - t1);
    return catch_stage.position(t - t2);
  }
  double velocity(double t) const {
    if (t <= t1) return throw_stage.velocity(t);
    if (t <= t2) return release.xi_dot;
    return catch_stage.velocity(t - t2);
  }
};

/// Solves the 1D truncated-harmonic problem analytically. Requires the tweezer
/// to be off during flight.
inline ThrowCatchSolution solve_throw_catch(const TrapParams& trap, const MotionProfile& profile,
                                            const PhaseState& init = {}) {
  if (profile.flight_depth() != 0.0)
    throw InvalidArgument("analytic solution requires the tweezer off during flight; use the integrator");
  if (!init.finite()) throw InvalidArgument("initial state is not finite");

  const double w = trap.omega();
  const double d = trap.width();
  ThrowCatchSolution s;
  s.omega = w;
  s.t1 = profile.t1();
  s.t2 = profile.t2();
  s.tf = profile.tf();

  s.throw_stage = Oscillation::from_state(-profile.accel() / (w * w), w, init.xi, init.xi_dot);
  s.release = {s.throw_stage.position(s.t1), s.throw_stage.velocity(s.t1), w * s.t1 + s.throw_stage.phase};

  const double xi2 = s.release.xi + s.release.xi_dot * (s.t2 - s.t1);
  s.catch_stage = Oscillation::from_state(profile.decel() / (w * w), w, xi2, s.release.xi_dot);
  s.recapture = {xi2, s.release.xi_dot, s.catch_stage.phase};

  s.max_disp_throw = s.throw_stage.extent(s.t1).max_abs();
  s.max_disp_catch = s.catch_stage.extent(s.tf - s.t2).max_abs();

  if (s.max_disp_throw > d) {
    s.outcome = Outcome::EscapeDuringThrow;
    s.exit_time = s.throw_stage.first_exit(d, s.t1).value_or(s.t1);
  } else if (std::abs(xi2) > d) {
    s.outcome = Outcome::RecaptureFail;
    s.exit_time = s.t2;
  } else if (s.max_disp_catch > d) {
    s.outcome = Outcome::EscapeDuringCatch;
    s.exit_time = s.t2 + s.catch_stage.first_exit(d, s.tf - s.t2).value_or(s.tf - s.t2);
  } else {
    s.outcome = Outcome::Success;
  }
  return s;
}

/// Outcome only; the Monte Carlo hot path.
inline Outcome analytic_outcome(const TrapParams& trap, const MotionProfile& profile, const PhaseState& init = {}) {
  return solve_throw_catch(trap, profile, init).outcome;
}

/// Recapture phase theta2 from the arcsin relation, with the branch fixed by the
/// sign of (xi2 - a/omega^2) so that both position and velocity at t2 match.
inline double recapture_phase_arcsin(const TrapParams& trap, double accel, double theta1, double xi2) {
  const double w = trap.omega();
  const double eq = accel / (w * w);
  const double xi_dot2 = -(accel / w) * std::sin(theta1);
  const double a2 = std::hypot(xi2 - eq, xi_dot2 / w);
  if (a2 == 0.0) return 0.0;
  const double s = std::clamp(eq * std::sin(theta1) / a2, -1.0, 1.0);
  const double principal = std::asin(s);
  return xi2 - eq >= 0.0 ? principal : constants::pi - principal;
}

/// Sampled closed-form trajectory, truncated at the first point where |xi|
/// leaves [-d, d] while the tweezer is on.
inline Trajectory analytic_trajectory(const TrapParams& trap, const MotionProfile& profile, const PhaseState& init,
                                      double sample_dt) {
  if (!(sample_dt > 0.0)) throw InvalidArgument("sample_dt must be > 0");
  const ThrowCatchSolution s = solve_throw_catch(trap, profile, init);

  Trajectory traj;
  traj.outcome = s.outcome;
  const double end = s.exit_time.value_or(s.tf);
  if (end >= s.t1) traj.release = s.release;
  if (end >= s.t2) traj.recapture = s.recapture;

  std::vector<double> times;
  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * sample_dt;
    if (t >= end) break;
    times.push_back(t);
  }
  for (double t : {s.t1, s.t2, end})
    if (t <= end) times.push_back(t);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  traj.samples.reserve(times.size());
  for (double t : times) traj.samples.push_back({t, PhaseState{s.position(t), s.velocity(t)}});
  return traj;
}

}  // namespace flyatom
