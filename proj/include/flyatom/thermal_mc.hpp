#pragma once

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flyatom/constants.hpp"
#include "flyatom/core_model.hpp"
#include "flyatom/dynamics_sim.hpp"
#include "flyatom/errors.hpp"
#include "flyatom/parallel.hpp"
#include "flyatom/rng.hpp"

namespace flyatom {

enum class Dims { OneD, ThreeD };

/// How the initial energy along the throw axis is drawn.
///  - MaxwellBoltzmann: E ~ Gamma(3/2, k_B T) (Maxwell-Boltzmann energy
///    density) spread over a uniformly random oscillation phase.
///  - PhaseSpaceGaussian: position and velocity independently Gaussian
///    (harmonic-well Boltzmann factor, mean energy k_B T).
/// Transverse axes are always phase-space Gaussian.
enum class EnergyModel { MaxwellBoltzmann, PhaseSpaceGaussian };

struct ThermalSpec {
  double temperature = 0.0;  // K
  std::size_t n_samples = 1;
  std::uint64_t seed = 0;
  Dims dims = Dims::OneD;
  EnergyModel energy_model = EnergyModel::MaxwellBoltzmann;

  void validate() const {
    if (!(temperature >= 0.0) || !std::isfinite(temperature)) throw InvalidArgument("temperature must be >= 0");
    if (n_samples < 1) throw InvalidArgument("need at least one sample");
  }
  friend bool operator==(const ThermalSpec&, const ThermalSpec&) = default;
};

namespace detail {

// Fraction of draws that are bound (E < U0) before rejection.
inline double bound_fraction(EnergyModel model, double depth_over_kt) {
  const double x = depth_over_kt;
  if (model == EnergyModel::MaxwellBoltzmann)
    return std::erf(std::sqrt(x)) - 2.0 * std::sqrt(x / constants::pi) * std::exp(-x);
  return 1.0 - std::exp(-x);
}

inline constexpr int kMaxRejections = 1'000'000;

}  // namespace detail

/// Thermal initial state in the trap frame, restricted to bound states
/// (energy above the well bottom below U0). T == 0 gives the rest state.
inline PhaseState sample_initial(const TrapParams& trap, const ThermalSpec& thermal, CounterRng& rng,
                                 double axial_aspect = 5.0) {
  thermal.validate();
  if (thermal.temperature == 0.0) return {};
  const double kt = constants::boltzmann * thermal.temperature;
  const double m = trap.mass();
  const double w = trap.omega();
  const double u0 = trap.depth();
  if (kt >= 0.5 * u0) {
    const double acc = detail::bound_fraction(thermal.energy_model, u0 / kt);
    throw SamplerStall("k_B T >= U0/2: bound-state rejection stalls (acceptance " + std::to_string(acc) + ")", acc);
  }
  const double sigma_v = std::sqrt(kt / m);
  auto energy = [m](double x, double v, double omega) { return 0.5 * m * (v * v + omega * omega * x * x); };

  const double wz = w / axial_aspect;
  // Whole-state rejection: the bound region is total energy below U0.
  for (int tries = 0;; ++tries) {
    if (tries == detail::kMaxRejections) throw SamplerStall("bound-state rejection limit reached", 0.0);
    PhaseState s;
    double ex = 0.0;
    if (thermal.energy_model == EnergyModel::MaxwellBoltzmann) {
      const double g1 = rng.normal();
      const double g2 = rng.normal();
      const double g3 = rng.normal();
      ex = 0.5 * kt * (g1 * g1 + g2 * g2 + g3 * g3);
      const double psi = constants::two_pi * rng.uniform();
      const double r = std::sqrt(2.0 * ex / (m * w * w));
      s.xi = r * std::cos(psi);
      s.xi_dot = -r * w * std::sin(psi);
    } else {
      s.xi = rng.normal() * sigma_v / w;
      s.xi_dot = rng.normal() * sigma_v;
      ex = energy(s.xi, s.xi_dot, w);
    }
    if (!(ex < u0)) continue;
    if (thermal.dims == Dims::OneD) return s;
    s.y = rng.normal() * sigma_v / w;
    s.y_dot = rng.normal() * sigma_v;
    s.z = rng.normal() * sigma_v / wz;
    s.z_dot = rng.normal() * sigma_v;
    if (ex + energy(s.y, s.y_dot, w) + energy(s.z, s.z_dot, wz) < u0) return s;
  }
}

inline constexpr double kWilsonZ95 = 1.959963984540054;

struct Estimate {
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n = 0;
  std::size_t successes = 0;

  double standard_error() const {
    return n == 0 ? 0.0 : std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(n));
  }
};

/// Wilson score interval.
inline Estimate wilson_estimate(std::size_t successes, std::size_t n, double z = kWilsonZ95) {
  if (n == 0) throw InvalidArgument("Wilson interval needs n >= 1");
  if (successes > n) throw InvalidArgument("successes exceed trials");
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  Estimate e;
  e.p_hat = p;
  e.n = n;
  e.successes = successes;
  e.ci_low = std::clamp(std::min(center - half, p), 0.0, 1.0);
  e.ci_high = std::clamp(std::max(center + half, p), 0.0, 1.0);
  return e;
}

enum class SimMode { Analytic1D, Numeric1D, Numeric3D };

inline std::string_view to_string(SimMode m) {
  switch (m) {
    case SimMode::Analytic1D: return "analytic1d";
    case SimMode::Numeric1D: return "numeric1d";
    case SimMode::Numeric3D: return "numeric3d";
  }
  return "unknown";
}

struct McOptions {
  unsigned threads = 1;
  std::uint64_t point_index = 0;
  TrapModel model_3d = TrapModel::Gaussian3D;
  RunOptions run;
};

/// Monte Carlo success probability with a 95% Wilson interval. Sample i of
/// point p draws from CounterRng(seed, p, i).
inline Estimate success_probability(const TrapParams& trap, double length, double accel,
                                    const ThermalSpec& thermal, SimMode mode, double flight_depth,
                                    const McOptions& opts = {}) {
  thermal.validate();
  if (mode == SimMode::Analytic1D && flight_depth != 0.0)
    throw InvalidArgument("analytic mode requires the tweezer off during flight");
  const MotionProfile profile(accel, length, {}, flight_depth);
  profile.check_against(trap);

  auto one = [&](std::size_t i) -> bool {
    CounterRng rng(thermal.seed, opts.point_index, i);
    const PhaseState init = sample_initial(trap, thermal, rng, opts.run.axial_aspect);
    switch (mode) {
      case SimMode::Analytic1D: return analytic_outcome(trap, profile, init) == Outcome::Success;
      case SimMode::Numeric1D:
        return throw_catch_run(trap, profile, init, TrapModel::Harmonic1D, opts.run).outcome == Outcome::Success;
      case SimMode::Numeric3D:
        return throw_catch_run(trap, profile, init, opts.model_3d, opts.run).outcome == Outcome::Success;
    }
    return false;
  };

  if (thermal.temperature == 0.0) return wilson_estimate(one(0) ? thermal.n_samples : 0, thermal.n_samples);
  std::vector<char> ok(thermal.n_samples, 0);
  parallel_for(thermal.n_samples, opts.threads, [&](std::size_t i) { ok[i] = one(i) ? 1 : 0; });
  std::size_t s = 0;
  for (char c : ok) s += static_cast<std::size_t>(c);
  return wilson_estimate(s, thermal.n_samples);
}

/// Small-acceleration success probability, valid for a/a_max <~ 0.01.
inline double low_accel_approx(const TrapParams& trap, double length, double accel, double temperature) {
  if (!(temperature > 0.0)) return 1.0;
  const double kt = constants::boltzmann * temperature;
  const double p = std::sqrt(4.0 * trap.width() / (constants::pi * length) * (trap.depth() / kt) *
                             (accel / trap.a_max()));
  return std::clamp(p, 0.0, 1.0);
}

/// Raw-data view of a simulated probability: adds false positives at rate
/// P(one atom | zero atoms).
inline double apply_false_positive(double p, double false_positive) { return p + (1.0 - p) * false_positive; }

enum class SweepKind { Acceleration, GuideDepth, ImpactParameter };

inline std::string_view control_name(SweepKind k) {
  switch (k) {
    case SweepKind::Acceleration: return "a_over_amax";
    case SweepKind::GuideDepth: return "uc_over_u0";
    case SweepKind::ImpactParameter: return "b_over_d";
  }
  return "control";
}

struct SweepPoint {
  double control_value = 0.0;
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n = 0;

  double standard_error() const {
    return n == 0 ? 0.0 : std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(n));
  }
  friend bool operator==(const SweepPoint&, const SweepPoint&) = default;
};

struct SweepFailure {
  double control_value = 0.0;
  std::string message;
};

struct SweepResult {
  std::string control_name;
  std::vector<SweepPoint> points;
  std::vector<SweepFailure> failures;
  std::string metadata_json;  // configuration snapshot, filled by the caller
};

/// Shared settings of a sweep; the swept quantity overrides its own field.
struct SweepConfig {
  TrapParams trap;
  double length = 0.0;
  ThermalSpec thermal;
  SimMode mode = SimMode::Analytic1D;
  double flight_depth_fraction = 0.0;  // Uc/U0 for acceleration and scattering sweeps
  double accel_fraction = 0.33;        // a/a_max for guide-depth and scattering sweeps
  std::optional<TrapParams> static_trap;
  bool occupied = false;
  McOptions mc;
};

/// Impact-parameter point: fraction of thermal throws caught after passing
/// the static tweezer at offset b.
inline Estimate scattering_probability(const SweepConfig& cfg, double b, std::uint64_t point_index) {
  if (!cfg.static_trap) throw InvalidArgument("scattering sweep needs a static trap");
  cfg.thermal.validate();
  ThermalSpec th3 = cfg.thermal;
  th3.dims = Dims::ThreeD;
  const double accel = cfg.accel_fraction * cfg.trap.a_max();
  auto one = [&](std::size_t i) -> bool {
    CounterRng rng(cfg.thermal.seed, point_index, i);
    ScatterOptions so;
    so.flight_depth_fraction = cfg.flight_depth_fraction;
    so.run = cfg.mc.run;
    so.thrown_init = sample_initial(cfg.trap, th3, rng, cfg.mc.run.axial_aspect);
    if (cfg.occupied) so.static_init = sample_initial(*cfg.static_trap, th3, rng, cfg.mc.run.axial_aspect);
    return scattering_run(cfg.trap, *cfg.static_trap, b, accel, cfg.length, cfg.occupied, so).thrown ==
           Outcome::Success;
  };
  const std::size_t n = cfg.thermal.n_samples;
  if (cfg.thermal.temperature == 0.0) return wilson_estimate(one(0) ? n : 0, n);
  std::vector<char> ok(n, 0);
  parallel_for(n, cfg.mc.threads, [&](std::size_t i) { ok[i] = one(i) ? 1 : 0; });
  std::size_t s = 0;
  for (char c : ok) s += static_cast<std::size_t>(c);
  return wilson_estimate(s, n);
}

/// One estimate per grid value (a/a_max, Uc/U0 or b/d). Point failures are
/// collected, not thrown.
inline SweepResult sweep(SweepKind kind, const std::vector<double>& grid, const SweepConfig& cfg) {
  if (grid.empty()) throw InvalidArgument("sweep grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw InvalidArgument("sweep grid must be strictly increasing");
  SweepResult out;
  out.control_name = std::string(control_name(kind));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double g = grid[i];
    McOptions mc = cfg.mc;
    mc.point_index = i;
    try {
      Estimate e;
      switch (kind) {
        case SweepKind::Acceleration:
          e = success_probability(cfg.trap, cfg.length, g * cfg.trap.a_max(), cfg.thermal, cfg.mode,
                                  cfg.flight_depth_fraction * cfg.trap.depth(), mc);
          break;
        case SweepKind::GuideDepth:
          e = success_probability(cfg.trap, cfg.length, cfg.accel_fraction * cfg.trap.a_max(), cfg.thermal,
                                  cfg.mode, g * cfg.trap.depth(), mc);
          break;
        case SweepKind::ImpactParameter:
          e = scattering_probability(cfg, g * cfg.trap.width(), i);
          break;
      }
      out.points.push_back({g, e.p_hat, e.ci_low, e.ci_high, e.n});
    } catch (const std::exception& ex) {
      out.failures.push_back({g, ex.what()});
    }
  }
  return out;
}

/// offset - alpha exp(-(b - gamma)^2 / beta) - alpha exp(-(b + gamma)^2 / beta)
struct DoubleGaussianFit {
  double offset = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double rms_residual = 0.0;

  double operator()(double b) const {
    return offset - alpha * (std::exp(-(b - gamma) * (b - gamma) / beta) + std::exp(-(b + gamma) * (b + gamma) / beta));
  }
};

class FitError : public NumericalError {
 public:
  FitError(const std::string& what, DoubleGaussianFit best) : NumericalError(what), best_(best) {}
  const DoubleGaussianFit& best() const { return best_; }

 private:
  DoubleGaussianFit best_;
};

namespace detail {

/// Nelder-Mead on a 2-vector; returns the best vertex and whether the simplex
/// collapsed below `xtol` before `max_iter`.
template <class F>
std::pair<std::array<double, 2>, bool> nelder_mead2(F&& f, std::array<double, 2> x0, std::array<double, 2> step,
                                                    double xtol, int max_iter) {
  using P = std::array<double, 2>;
  std::array<P, 3> v{x0, x0, x0};
  v[1][0] += step[0];
  v[2][1] += step[1];
  std::array<double, 3> fv{f(v[0]), f(v[1]), f(v[2])};
  auto lerp = [](const P& a, const P& b, double t) { return P{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])}; };
  for (int it = 0; it < max_iter; ++it) {
    std::array<int, 3> idx{0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    const P best = v[idx[0]], mid = v[idx[1]], worst = v[idx[2]];
    const double fb = fv[idx[0]], fm = fv[idx[1]], fw = fv[idx[2]];
    double size = 0.0;
    for (int k = 1; k < 3; ++k)
      size = std::max(size, std::max(std::abs(v[idx[k]][0] - best[0]), std::abs(v[idx[k]][1] - best[1])));
    if (size < xtol) return {best, true};
    const P c = lerp(best, mid, 0.5);
    const P xr = lerp(worst, c, 2.0);
    const double fr = f(xr);
    P next;
    double fnext;
    if (fr < fb) {
      const P xe = lerp(worst, c, 3.0);
      const double fe = f(xe);
      next = fe < fr ? xe : xr;
      fnext = std::min(fe, fr);
    } else if (fr < fm) {
      next = xr;
      fnext = fr;
    } else {
      const P xc = fr < fw ? lerp(worst, c, 1.5) : lerp(worst, c, 0.5);
      const double fc = f(xc);
      if (fc < std::min(fr, fw)) {
        next = xc;
        fnext = fc;
      } else {
        v = {best, lerp(best, mid, 0.5), lerp(best, worst, 0.5)};
        fv = {fb, f(v[1]), f(v[2])};
        continue;
      }
    }
    v = {best, mid, next};
    fv = {fb, fm, fnext};
  }
  int bi = 0;
  for (int k = 1; k < 3; ++k)
    if (fv[k] < fv[bi]) bi = k;
  return {v[bi], false};
}

}  // namespace detail

/// Least-squares double-Gaussian fit. offset and alpha enter linearly and are
/// solved exactly for each (beta, gamma); those two are found by a coarse grid
/// followed by Nelder-Mead. Units of beta and gamma follow those of b.
inline DoubleGaussianFit fit_double_gaussian(const std::vector<double>& b, const std::vector<double>& p) {
  if (b.size() != p.size()) throw InvalidArgument("fit needs matching b and p arrays");
  if (b.size() < 7) throw InvalidArgument("double-Gaussian fit needs at least 7 points");
  const std::size_t n = b.size();
  double scale = 0.0;
  for (double x : b) scale = std::max(scale, std::abs(x));
  if (!(scale > 0.0)) throw InvalidArgument("fit needs at least one nonzero b");
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = b[i] / scale;

  // theta = (log beta', gamma') in scaled units
  auto solve = [&](const std::array<double, 2>& th, double* sse) {
    const double beta = std::exp(th[0]);
    const double gamma = std::abs(th[1]);
    std::vector<double> h(n);
    double mh = 0.0, mp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      h[i] = std::exp(-(u[i] - gamma) * (u[i] - gamma) / beta) + std::exp(-(u[i] + gamma) * (u[i] + gamma) / beta);
      mh += h[i];
      mp += p[i];
    }
    mh /= static_cast<double>(n);
    mp /= static_cast<double>(n);
    double shh = 0.0, shp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      shh += (h[i] - mh) * (h[i] - mh);
      shp += (h[i] - mh) * (p[i] - mp);
    }
    const double slope = shh > 1e-300 ? shp / shh : 0.0;  // p = c + slope*h, alpha = -slope
    DoubleGaussianFit fit;
    fit.offset = mp - slope * mh;
    fit.alpha = -slope;
    fit.beta = beta * scale * scale;
    fit.gamma = gamma * scale;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = p[i] - (fit.offset + slope * h[i]);
      s += r * r;
    }
    if (sse) *sse = s;
    fit.rms_residual = std::sqrt(s / static_cast<double>(n));
    return fit;
  };
  auto objective = [&](const std::array<double, 2>& th) {
    double s = 0.0;
    solve(th, &s);
    return s;
  };

  std::array<double, 2> best{0.0, 0.0};
  double best_f = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 48; ++i) {
    const double lb = std::log(1e-3) + (std::log(10.0) - std::log(1e-3)) * i / 47.0;
    for (int j = 0; j < 41; ++j) {
      const std::array<double, 2> th{lb, 1.5 * j / 40.0};
      const double f = objective(th);
      if (f < best_f) {
        best_f = f;
        best = th;
      }
    }
  }
  const DoubleGaussianFit grid_fit = solve(best, nullptr);
  if (best_f < 1e-28) return grid_fit;

  bool converged = false;
  for (int round = 0; round < 3; ++round) {
    auto [x, ok] = detail::nelder_mead2(objective, best, {0.2, 0.05}, 1e-13, 20000);
    best = x;
    converged = ok;
  }
  const DoubleGaussianFit fit = solve(best, nullptr);
  if (!converged || !std::isfinite(fit.rms_residual)) throw FitError("double-Gaussian fit did not converge", grid_fit);
  return fit;
}

inline DoubleGaussianFit fit_double_gaussian(const SweepResult& sweep) {
  std::vector<double> b, p;
  for (const auto& pt : sweep.points) {
    b.push_back(pt.control_value);
    p.push_back(pt.p_hat);
  }
  return fit_double_gaussian(b, p);
}

}  // namespace flyatom
