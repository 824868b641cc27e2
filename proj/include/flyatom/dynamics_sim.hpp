#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "flyatom/constants.hpp"
#include "flyatom/core_model.hpp"
#include "flyatom/errors.hpp"
#include "flyatom/parallel.hpp"
#include "flyatom/vec3.hpp"

namespace flyatom {

enum class PotentialShape { TruncatedHarmonic, Gaussian };

/// Depth multiplier in [0, 1] over time. Piecewise-constant schedules hold
/// values[i] on [knots[i], knots[i+1]); linear ones interpolate. Both clamp
/// outside the knot range.
class DepthSchedule {
 public:
  enum class Interp { Constant, Linear };
  enum class Side { Left, Right };

  DepthSchedule() : knots_{0.0}, values_{1.0} {}

  static DepthSchedule constant(double value) { return DepthSchedule({0.0}, {value}, Interp::Constant); }

  DepthSchedule(std::vector<double> knots, std::vector<double> values, Interp interp)
      : knots_(std::move(knots)), values_(std::move(values)), interp_(interp) {
    if (knots_.empty() || knots_.size() != values_.size())
      throw InvalidArgument("depth schedule needs matching, non-empty knots and values");
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!(values_[i] >= 0.0 && values_[i] <= 1.0)) throw InvalidArgument("depth multiplier must be in [0, 1]");
      if (i > 0 && !(knots_[i] > knots_[i - 1])) throw InvalidArgument("depth schedule knots must increase");
    }
  }

  /// Value at t; at a knot of a piecewise-constant schedule, Left and Right
  /// select the one-sided limits.
  double at(double t, Side side = Side::Right) const {
    if (interp_ == Interp::Linear) {
      if (t <= knots_.front()) return values_.front();
      if (t >= knots_.back()) return values_.back();
      const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
      const std::size_t i = static_cast<std::size_t>(it - knots_.begin()) - 1;
      const double f = (t - knots_[i]) / (knots_[i + 1] - knots_[i]);
      return values_[i] + f * (values_[i + 1] - values_[i]);
    }
    const auto it = side == Side::Right ? std::upper_bound(knots_.begin(), knots_.end(), t)
                                        : std::lower_bound(knots_.begin(), knots_.end(), t);
    if (it == knots_.begin()) return values_.front();
    return values_[static_cast<std::size_t>(it - knots_.begin()) - 1];
  }

  double max_value() const { return *std::max_element(values_.begin(), values_.end()); }
  const std::vector<double>& knots() const { return knots_; }
  Interp interp() const { return interp_; }

 private:
  std::vector<double> knots_;
  std::vector<double> values_;
  Interp interp_ = Interp::Constant;
};

struct CenterPath {
  std::function<Vec3(double)> position;
  std::function<Vec3(double)> velocity;

  static CenterPath fixed(Vec3 p) {
    return {[p](double) { return p; }, [](double) { return Vec3{}; }};
  }

  /// Tweezer following `profile` from `origin` along the unit vector `direction`.
  static CenterPath along(const MotionProfile& profile, Vec3 origin, Vec3 direction) {
    return {[=](double t) { return origin + direction * profile.position(t); },
            [=](double t) { return direction * profile.velocity(t); }};
  }
};

/// One tweezer. `width` is d for the truncated harmonic and the waist w for the
/// Gaussian; `axial_width` is the matching length along z. With dims == 1 only
/// the x offset enters.
struct PotentialField {
  PotentialShape shape = PotentialShape::TruncatedHarmonic;
  int dims = 3;
  double depth = 0.0;
  double width = 0.0;
  double axial_width = 0.0;
  CenterPath center = CenterPath::fixed({});
  DepthSchedule schedule;

  static PotentialField truncated_harmonic_1d(double depth, double d) {
    return {PotentialShape::TruncatedHarmonic, 1, depth, d, d, CenterPath::fixed({}), DepthSchedule{}};
  }
  static PotentialField truncated_harmonic_3d(double depth, double d, double d_axial) {
    return {PotentialShape::TruncatedHarmonic, 3, depth, d, d_axial, CenterPath::fixed({}), DepthSchedule{}};
  }
  static PotentialField gaussian(double depth, double waist, double waist_axial, int dims = 3) {
    return {PotentialShape::Gaussian, dims, depth, waist, waist_axial, CenterPath::fixed({}), DepthSchedule{}};
  }

  /// Scaled squared radius: (x^2 + y^2)/width^2 + z^2/axial_width^2.
  double rho2(const Vec3& rel) const {
    if (dims == 1) return rel.x * rel.x / (width * width);
    return (rel.x * rel.x + rel.y * rel.y) / (width * width) + rel.z * rel.z / (axial_width * axial_width);
  }

  /// Potential at full depth; zero at infinity / outside the truncation.
  double potential(const Vec3& rel) const {
    const double r2 = rho2(rel);
    if (shape == PotentialShape::TruncatedHarmonic) return r2 <= 1.0 ? depth * (r2 - 1.0) : 0.0;
    return -depth * std::exp(-2.0 * r2);
  }

  Vec3 force(const Vec3& rel) const {
    const double iw2 = 1.0 / (width * width);
    const double iz2 = 1.0 / (axial_width * axial_width);
    if (shape == PotentialShape::TruncatedHarmonic) {
      if (rho2(rel) > 1.0) return {};
      const double k = -2.0 * depth;
      if (dims == 1) return {k * rel.x * iw2, 0.0, 0.0};
      return {k * rel.x * iw2, k * rel.y * iw2, k * rel.z * iz2};
    }
    const double u = potential(rel);  // negative
    const double k = 4.0 * u;
    if (dims == 1) return {k * rel.x * iw2, 0.0, 0.0};
    return {k * rel.x * iw2, k * rel.y * iw2, k * rel.z * iz2};
  }

  /// Inside the hard edge (truncated harmonic) or the waist (Gaussian).
  bool inside(const Vec3& rel) const { return rho2(rel) <= 1.0; }

  /// Bottom-of-well angular frequency across the beam at full depth.
  double omega_radial(double mass) const {
    const double k = shape == PotentialShape::TruncatedHarmonic ? 2.0 : 4.0;
    return std::sqrt(k * depth / (mass * width * width));
  }
  double omega_axial(double mass) const {
    const double k = shape == PotentialShape::TruncatedHarmonic ? 2.0 : 4.0;
    return std::sqrt(k * depth / (mass * axial_width * axial_width));
  }

  /// Binding energy of an atom relative to this field at depth multiplier s,
  /// or nullopt if it lies outside the capture basin.
  std::optional<double> bound_energy(const Vec3& rel, const Vec3& vrel, double mass, double s) const {
    if (s <= 0.0) return std::nullopt;
    const double u = s * potential(rel);
    const double e = 0.5 * mass * vrel.norm2() + u;
    if (!(e < 0.0)) return std::nullopt;
    if (shape == PotentialShape::TruncatedHarmonic && !inside(rel)) return std::nullopt;
    if (shape == PotentialShape::Gaussian && !(u < -1e-3 * s * depth)) return std::nullopt;
    return e;
  }
};

struct SceneAtom {
  int id = 0;
  Vec3 position;
  Vec3 velocity;
};

/// Records the first time an atom leaves `field`'s hard region while `armed`
/// (evaluated at the midpoint of each step) is true.
struct EscapeWatch {
  std::size_t field = 0;
  std::function<bool(double)> armed = [](double) { return true; };
};

struct Scene {
  std::vector<PotentialField> fields;
  std::vector<SceneAtom> atoms;
  double mass = constants::rb87_mass;
  double duration = 0.0;
  double dt = 0.0;
  std::size_t record_every = 0;  // 0 = final state only
  std::optional<EscapeWatch> watch;
  bool stop_on_exit = false;
  std::vector<double> breakpoints;  // steps land exactly on these times
};

struct SimSample {
  double t;
  Vec3 r;
  Vec3 v;
};

struct AtomTrack {
  int id = 0;
  std::vector<SimSample> samples;
  double final_time = 0.0;
  Vec3 final_position;
  Vec3 final_velocity;
  std::optional<std::size_t> captured_by;
  std::optional<double> exit_time;
  Vec3 exit_offset;
};

/// Largest step allowed for `fields`: a fiftieth of the shortest trap period.
inline double max_stable_dt(const std::vector<PotentialField>& fields, double mass) {
  double limit = std::numeric_limits<double>::infinity();
  for (const auto& f : fields) {
    const double s = f.schedule.max_value();
    if (s <= 0.0 || f.depth <= 0.0) continue;
    double w = f.omega_radial(mass);
    if (f.dims == 3) w = std::max(w, f.omega_axial(mass));
    limit = std::min(limit, constants::two_pi / (w * std::sqrt(s)) / 50.0);
  }
  return limit;
}

/// Shortest bottom-of-well period among fields at full depth.
inline double min_period(const std::vector<PotentialField>& fields, double mass) {
  return max_stable_dt(fields, mass) * 50.0;
}

namespace detail {

inline Vec3 total_accel(const Scene& sc, const Vec3& r, double t, DepthSchedule::Side side) {
  Vec3 f;
  for (const auto& field : sc.fields) {
    const double s = field.schedule.at(t, side);
    if (s <= 0.0) continue;
    f += s * field.force(r - field.center.position(t));
  }
  return f * (1.0 / sc.mass);
}

inline std::vector<double> step_targets(const Scene& sc) {
  std::set<double> pts;
  for (double b : sc.breakpoints)
    if (b > 0.0 && b < sc.duration) pts.insert(b);
  for (const auto& f : sc.fields)
    if (f.schedule.interp() == DepthSchedule::Interp::Constant)
      for (double b : f.schedule.knots())
        if (b > 0.0 && b < sc.duration) pts.insert(b);
  pts.insert(sc.duration);
  return {pts.begin(), pts.end()};
}

inline AtomTrack integrate_atom(const Scene& sc, const SceneAtom& atom, const std::vector<double>& targets) {
  using Side = DepthSchedule::Side;
  AtomTrack tr;
  tr.id = atom.id;
  Vec3 r = atom.position;
  Vec3 v = atom.velocity;
  double t = 0.0;
  const PotentialField* watched = sc.watch ? &sc.fields.at(sc.watch->field) : nullptr;

  auto check = [&](double at_t, double mid) {
    if (!watched || tr.exit_time || !sc.watch->armed(mid)) return;
    const Vec3 off = r - watched->center.position(at_t);
    if (!watched->inside(off)) {
      tr.exit_time = at_t;
      tr.exit_offset = off;
    }
  };
  auto record = [&] { tr.samples.push_back({t, r, v}); };

  if (sc.record_every > 0) record();
  Vec3 a = total_accel(sc, r, t, Side::Right);
  std::size_t step = 0;
  double prev = 0.0;
  for (double target : targets) {
    const double span = target - prev;
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(span / sc.dt * (1.0 - 1e-12))));
    const double h = span / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double t_new = k + 1 == n ? target : prev + static_cast<double>(k + 1) * h;
      const double mid = 0.5 * (t + t_new);
      check(t, mid);
      if (sc.stop_on_exit && tr.exit_time) break;
      r += v * h + a * (0.5 * h * h);
      const Vec3 a_new = total_accel(sc, r, t_new, Side::Left);
      v += (a + a_new) * (0.5 * h);
      a = a_new;
      t = t_new;
      if (!r.finite() || !v.finite()) throw IntegrationError("non-finite state at t = " + std::to_string(t));
      check(t, mid);
      ++step;
      if (sc.record_every > 0 && step % sc.record_every == 0) record();
    }
    if (sc.stop_on_exit && tr.exit_time) break;
    if (target < sc.duration) a = total_accel(sc, r, t, Side::Right);
    prev = target;
  }
  if (sc.record_every > 0 && (tr.samples.empty() || tr.samples.back().t != t)) record();

  tr.final_time = t;
  tr.final_position = r;
  tr.final_velocity = v;
  if (t >= sc.duration) {
    double best = 0.0;
    for (std::size_t i = 0; i < sc.fields.size(); ++i) {
      const auto& f = sc.fields[i];
      const auto e = f.bound_energy(r - f.center.position(t), v - f.center.velocity(t), sc.mass,
                                    f.schedule.at(t, Side::Left));
      if (e && (!tr.captured_by || *e < best)) {
        tr.captured_by = i;
        best = *e;
      }
    }
  }
  return tr;
}

}  // namespace detail

/// Velocity-Verlet integration of m r'' = -grad sum_i U_i(r, t) for every atom
/// independently. An atom is captured by the field whose well binds it most
/// deeply at the final time.
inline std::vector<AtomTrack> integrate(const Scene& scene, unsigned threads = 1) {
  if (!(scene.mass > 0.0)) throw InvalidArgument("scene mass must be > 0");
  if (!(scene.duration > 0.0)) throw InvalidArgument("scene duration must be > 0");
  if (!(scene.dt > 0.0)) throw InvalidArgument("scene dt must be > 0");
  {
    std::set<int> ids;
    for (const auto& a : scene.atoms)
      if (!ids.insert(a.id).second) throw InvalidArgument("duplicate atom id " + std::to_string(a.id));
  }
  const double guard = max_stable_dt(scene.fields, scene.mass);
  if (scene.dt > guard)
    throw IntegrationError("dt " + std::to_string(scene.dt) + " s exceeds the resolution guard " +
                           std::to_string(guard) + " s");
  const auto targets = detail::step_targets(scene);
  std::vector<AtomTrack> out(scene.atoms.size());
  parallel_for(scene.atoms.size(), threads,
               [&](std::size_t i) { out[i] = detail::integrate_atom(scene, scene.atoms[i], targets); });
  return out;
}

enum class TrapModel { Harmonic1D, Harmonic3D, Gaussian3D };

inline std::string_view to_string(TrapModel m) {
  switch (m) {
    case TrapModel::Harmonic1D: return "harmonic1d";
    case TrapModel::Harmonic3D: return "harmonic3d";
    case TrapModel::Gaussian3D: return "gaussian3d";
  }
  return "unknown";
}

struct RunOptions {
  double dt = 0.0;                 // 0: shortest period / steps_per_period
  double steps_per_period = 200.0;
  double axial_aspect = 5.0;       // axial width over radial width
  std::size_t record_every = 0;
};

/// Field representing `trap` under `model`. The Gaussian waist sqrt(2)*d
/// matches the truncated-harmonic depth and curvature.
inline PotentialField make_trap_field(const TrapParams& trap, TrapModel model, double axial_aspect) {
  switch (model) {
    case TrapModel::Harmonic1D: return PotentialField::truncated_harmonic_1d(trap.depth(), trap.width());
    case TrapModel::Harmonic3D:
      return PotentialField::truncated_harmonic_3d(trap.depth(), trap.width(), axial_aspect * trap.width());
    case TrapModel::Gaussian3D: {
      const double w = std::sqrt(2.0) * trap.width();
      return PotentialField::gaussian(trap.depth(), w, axial_aspect * w);
    }
  }
  throw InvalidArgument("unknown trap model");
}

/// Full depth while accelerating and decelerating, flight_depth/U0 in between.
inline DepthSchedule throw_catch_schedule(const TrapParams& trap, const MotionProfile& profile) {
  const double coast = profile.flight_depth() / trap.depth();
  if (profile.t2() > profile.t1())
    return DepthSchedule({0.0, profile.t1(), profile.t2()}, {1.0, std::min(coast, 1.0), 1.0},
                         DepthSchedule::Interp::Constant);
  return DepthSchedule::constant(1.0);
}

inline Vec3 to_lab(const PhaseState& s) { return {s.xi, s.y, s.z}; }
inline Vec3 to_lab_velocity(const PhaseState& s) { return {s.xi_dot, s.y_dot, s.z_dot}; }

namespace detail {

/// Maps a finished track onto the throw-and-catch outcome labels.
inline Outcome label_track(const AtomTrack& tr, const PotentialField& field, const MotionProfile& profile,
                           std::size_t field_index, bool hard_edge) {
  auto transverse = [&](const Vec3& off) {
    if (field.dims == 1) return false;
    const double ax = off.x / field.width;
    const double tr2 = (off.y * off.y) / (field.width * field.width) +
                       (off.z * off.z) / (field.axial_width * field.axial_width);
    return tr2 > ax * ax;
  };
  const bool caught = tr.captured_by && *tr.captured_by == field_index;
  if (caught && !(hard_edge && tr.exit_time)) return Outcome::Success;
  if (tr.exit_time) {
    if (transverse(tr.exit_offset)) return Outcome::EscapeTransverse;
    if (*tr.exit_time <= profile.t1()) return Outcome::EscapeDuringThrow;
    if (*tr.exit_time <= profile.t2()) return Outcome::RecaptureFail;
    return Outcome::EscapeDuringCatch;
  }
  const Vec3 off = tr.final_position - field.center.position(tr.final_time);
  return transverse(off) ? Outcome::EscapeTransverse : Outcome::EscapeDuringCatch;
}

}  // namespace detail

struct ThrowCatchResult {
  Outcome outcome = Outcome::Success;
  AtomTrack track;
};

/// Numerical throw and catch of one atom starting at trap-frame state `init`.
/// For the truncated-harmonic models, leaving |xi| <= d while the tweezer is
/// at full depth counts as escape; during a guided flight (flight depth > 0)
/// the atom may leave and re-enter the well freely.
inline ThrowCatchResult throw_catch_run(const TrapParams& trap, const MotionProfile& profile,
                                        const PhaseState& init, TrapModel model, const RunOptions& opts = {}) {
  profile.check_against(trap);
  if (!init.finite()) throw InvalidArgument("initial state is not finite");
  PotentialField field = make_trap_field(trap, model, opts.axial_aspect);
  field.center = CenterPath::along(profile, {}, {1.0, 0.0, 0.0});
  field.schedule = throw_catch_schedule(trap, profile);

  Scene sc;
  sc.mass = trap.mass();
  sc.fields = {field};
  sc.duration = profile.tf();
  sc.breakpoints = {profile.t1(), profile.t2()};
  sc.dt = opts.dt > 0.0 ? opts.dt : min_period(sc.fields, sc.mass) / opts.steps_per_period;
  sc.record_every = opts.record_every;
  const bool hard_edge = model != TrapModel::Gaussian3D;
  const double t1 = profile.t1();
  const double t2 = profile.t2();
  sc.watch = EscapeWatch{0, [t1, t2](double mid) { return mid < t1 || mid > t2; }};
  sc.stop_on_exit = hard_edge && opts.record_every == 0;
  SceneAtom atom{0, to_lab(init), to_lab_velocity(init)};
  if (model == TrapModel::Harmonic1D) atom.position.y = atom.position.z = atom.velocity.y = atom.velocity.z = 0.0;
  sc.atoms = {atom};

  ThrowCatchResult res;
  res.track = std::move(integrate(sc).front());
  res.outcome = detail::label_track(res.track, sc.fields.front(), profile, 0, hard_edge);
  return res;
}

struct ScatterOptions {
  double flight_depth_fraction = 0.0;  // 0: thrown, 1: guided through the static trap
  PhaseState thrown_init;
  PhaseState static_init;
  bool static_trap_present = true;
  RunOptions run;
};

struct ScatterResult {
  Outcome thrown = Outcome::Success;
  std::optional<bool> static_retained;  // set when the static trap held an atom
};

/// Throw along x past a static Gaussian tweezer centred at (l/2, b, 0). Both
/// tweezers are Gaussian3D; atoms do not interact with each other.
inline ScatterResult scattering_run(const TrapParams& trap_dynamic, const TrapParams& trap_static, double b,
                                    double accel, double length, bool occupied, const ScatterOptions& opts = {}) {
  if (!(opts.flight_depth_fraction >= 0.0 && opts.flight_depth_fraction <= 1.0))
    throw InvalidArgument("flight depth fraction must be in [0, 1]");
  const MotionProfile profile(accel, length, {}, opts.flight_depth_fraction * trap_dynamic.depth());
  PotentialField dyn = make_trap_field(trap_dynamic, TrapModel::Gaussian3D, opts.run.axial_aspect);
  dyn.center = CenterPath::along(profile, {}, {1.0, 0.0, 0.0});
  dyn.schedule = throw_catch_schedule(trap_dynamic, profile);

  Scene sc;
  sc.mass = trap_dynamic.mass();
  sc.fields = {dyn};
  const Vec3 static_center{0.5 * length, b, 0.0};
  if (opts.static_trap_present) {
    PotentialField st = make_trap_field(trap_static, TrapModel::Gaussian3D, opts.run.axial_aspect);
    st.center = CenterPath::fixed(static_center);
    sc.fields.push_back(st);
  }
  sc.duration = profile.tf();
  sc.breakpoints = {profile.t1(), profile.t2()};
  sc.dt = opts.run.dt > 0.0 ? opts.run.dt : min_period(sc.fields, sc.mass) / opts.run.steps_per_period;
  sc.record_every = opts.run.record_every;
  const double t1 = profile.t1();
  const double t2 = profile.t2();
  sc.watch = EscapeWatch{0, [t1, t2](double mid) { return mid < t1 || mid > t2; }};
  sc.atoms.push_back({0, to_lab(opts.thrown_init), to_lab_velocity(opts.thrown_init)});
  const bool with_static_atom = occupied && opts.static_trap_present;
  if (with_static_atom)
    sc.atoms.push_back({1, static_center + to_lab(opts.static_init), to_lab_velocity(opts.static_init)});

  const auto tracks = integrate(sc);
  ScatterResult res;
  res.thrown = detail::label_track(tracks[0], sc.fields[0], profile, 0, false);
  if (with_static_atom) res.static_retained = tracks[1].captured_by && *tracks[1].captured_by == 1;
  return res;
}

}  // namespace flyatom
