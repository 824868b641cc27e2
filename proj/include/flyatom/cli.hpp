#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "flyatom/core_model.hpp"
#include "flyatom/dynamics_sim.hpp"
#include "flyatom/errors.hpp"
#include "flyatom/escape_analysis.hpp"
#include "flyatom/io/config.hpp"
#include "flyatom/io/csv.hpp"
#include "flyatom/io/svg.hpp"
#include "flyatom/io/units.hpp"
#include "flyatom/rearrange_planner.hpp"
#include "flyatom/thermal_mc.hpp"

namespace flyatom::cli {

enum ExitCode : int { kOk = 0, kConfig = 2, kNumerical = 3, kIo = 4, kInternal = 1 };

/// Flag values that override the config file when given.
struct Overrides {
  std::string config;
  std::optional<std::string> temperature, grid, out, mode, depth, width, length, energy_model, dims, strategy, sizes,
      problem, frame_rate;
  std::optional<std::size_t> samples;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<double> accel_fraction, flight_depth_fraction, spam;
  std::optional<int> trials, chain_length;
  bool no_plot = false;
};

namespace detail {

using io::json;
using io::Quantity;

inline void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "JSON config file");
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--threads", o.threads, "worker threads (0 = hardware)");
  sub->add_option("--seed", o.seed, "RNG seed");
  sub->add_option("--T", o.temperature, "temperature, e.g. 40uK");
  sub->add_option("--n", o.samples, "Monte Carlo samples per point");
  sub->add_option("--grid", o.grid, "grid: a,b,c or lin:start:stop:count or log:start:stop:count");
  sub->add_option("--mode", o.mode, "analytic1d | numeric1d | numeric3d");
  sub->add_option("--U0", o.depth, "trap depth, e.g. 0.76mK");
  sub->add_option("--d", o.width, "trap width, e.g. 0.5um");
  sub->add_option("--l", o.length, "travel length, e.g. 12.6um");
  sub->add_option("--a", o.accel_fraction, "acceleration in units of a_max");
  sub->add_option("--uc", o.flight_depth_fraction, "flight depth in units of U0");
  sub->add_option("--energy-model", o.energy_model, "maxwell-boltzmann | phase-space-gaussian");
  sub->add_option("--dims", o.dims, "thermal sampling dims (1d | 3d) or lattice dims (1 | 2 | 3)");
  sub->add_option("--spam", o.spam, "false-positive rate added to reported probabilities");
  sub->add_option("--strategy", o.strategy, "guided | flying | holographic");
  sub->add_option("--sizes", o.sizes, "comma-separated problem sizes");
  sub->add_option("--trials", o.trials, "random problems per size");
  sub->add_option("--N", o.chain_length, "chain length for plan");
  sub->add_option("--problem", o.problem, "occupancy-grid problem JSON");
  sub->add_option("--fp", o.frame_rate, "holographic frame rate, e.g. 40Hz");
  sub->add_flag("--no-plot", o.no_plot, "skip SVG output");
}

inline io::RunConfig resolve(const Overrides& o, bool lattice_dims) {
  io::RunConfig c = o.config.empty() ? io::RunConfig{} : io::load_config(o.config);
  auto q = [](const std::string& s, Quantity k) { return io::parse_quantity(s, k); };
  if (o.temperature) c.thermal.temperature = q(*o.temperature, Quantity::Temperature);
  if (o.samples) c.thermal.n_samples = *o.samples;
  if (o.seed) c.thermal.seed = *o.seed;
  if (o.threads) c.threads = *o.threads;
  if (o.grid) c.grid = *o.grid;
  if (o.out) c.output_dir = *o.out;
  if (o.mode) c.mode = io::detail::enum_from(io::detail::kModes, *o.mode, "--mode");
  if (o.depth) c.trap.depth = q(*o.depth, Quantity::Energy);
  if (o.width) c.trap.width = q(*o.width, Quantity::Length);
  if (o.length) c.length = q(*o.length, Quantity::Length);
  if (o.accel_fraction) c.accel_fraction = *o.accel_fraction;
  if (o.flight_depth_fraction) c.flight_depth_fraction = *o.flight_depth_fraction;
  if (o.energy_model) c.thermal.energy_model = io::detail::enum_from(io::detail::kEnergy, *o.energy_model, "--energy-model");
  if (o.dims) {
    if (lattice_dims) {
      const auto v = io::parse_double(*o.dims);
      if (!v || (*v != 1 && *v != 2 && *v != 3)) throw ConfigError("--dims must be 1, 2 or 3");
      c.planner_dims = static_cast<int>(*v);
    } else {
      c.thermal.dims = io::detail::enum_from(io::detail::kDims, *o.dims, "--dims");
    }
  }
  if (o.spam) c.spam_false_positive = *o.spam;
  if (o.strategy) c.strategy = io::detail::enum_from(io::detail::kStrategies, *o.strategy, "--strategy");
  if (o.sizes) {
    c.sizes.clear();
    for (double v : io::parse_grid(*o.sizes)) {
      if (v < 1 || v != std::floor(v)) throw ConfigError("--sizes entries must be integers >= 1");
      c.sizes.push_back(static_cast<int>(v));
    }
  }
  if (o.trials) c.trials = *o.trials;
  if (o.chain_length) c.chain_length = *o.chain_length;
  if (o.problem) c.problem_file = *o.problem;
  if (o.frame_rate) c.frame_rate = q(*o.frame_rate, Quantity::Frequency);
  if (o.no_plot) c.plot = false;
  if (!(c.spam_false_positive >= 0.0 && c.spam_false_positive < 1.0)) throw ConfigError("spam rate must be in [0, 1)");
  if (c.trials < 1) throw ConfigError("trials must be >= 1");
  return c;
}

inline std::string num(double v) { return io::format_double(v); }

inline std::string fixed(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

inline std::string sidecar(const io::RunConfig& c, const std::string& sub, const SweepResult* sweep, json extra) {
  json j;
  j["subcommand"] = sub;
  j["config"] = io::config_to_json(c);
  if (sweep) {
    j["control_name"] = sweep->control_name;
    json f = json::array();
    for (const auto& x : sweep->failures) f.push_back({{"control_value", x.control_value}, {"message", x.message}});
    j["failures"] = f;
  }
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  return j.dump(2) + "\n";
}

inline void apply_spam(SweepResult& s, double f) {
  if (f == 0.0) return;
  for (auto& p : s.points) {
    p.p_hat = apply_false_positive(p.p_hat, f);
    p.ci_low = apply_false_positive(p.ci_low, f);
    p.ci_high = apply_false_positive(p.ci_high, f);
  }
}

inline SweepConfig sweep_config(const io::RunConfig& c) {
  SweepConfig s{c.trap.params(), c.length,   c.thermal, c.mode, c.flight_depth_fraction, c.accel_fraction,
                c.static_trap.params(), c.occupied, McOptions{}};
  s.mc.threads = c.threads;
  s.mc.model_3d = c.model_3d;
  s.mc.run = c.run_options();
  return s;
}

inline int cmd_criticals(const io::RunConfig& c) {
  const TrapParams trap = c.trap.params();
  const CriticalAccels k = critical_accelerations(trap, c.length);
  const double am = k.a_max;
  std::string csv = "quantity,value_m_s2,over_a_max\n";
  const std::pair<const char*, double> rows[] = {{"a_max", am},
                                                 {"a_theta_3pi", k.a_theta_3pi},
                                                 {"a_gap_minus", k.a_gap_minus},
                                                 {"a_gap_plus", k.a_gap_plus},
                                                 {"a_theta_2pi", k.a_theta_2pi},
                                                 {"a_island_end", k.a_island_end}};
  std::string line;
  for (const auto& [name, v] : rows) {
    csv += std::string(name) + "," + num(v) + "," + num(v / am) + "\n";
    line += std::string(line.empty() ? "" : " ") + name + "=" + fixed(v, 5) + "m/s2(" + fixed(v / am, 4) + ")";
  }
  io::OutputDir out(c.output_dir);
  out.write("criticals.csv", csv);
  out.write("criticals.json", sidecar(c, "criticals", nullptr,
                                      {{"gap_minus_binding", std::string(to_string(k.gap_minus_binding))}}));
  std::cout << line << " gap_minus_binding=" << to_string(k.gap_minus_binding) << "\n";
  return kOk;
}

inline int cmd_trajectory(const io::RunConfig& c) {
  const TrapParams trap = c.trap.params();
  const double a = c.accel_fraction * trap.a_max();
  const MotionProfile profile(a, c.length, {}, c.flight_depth_fraction * trap.depth());
  const double period = constants::two_pi / trap.omega();
  std::vector<AtomTrack> tracks(1);
  Outcome outcome;
  io::Series portrait;
  portrait.name = "trap frame";
  portrait.line = true;
  portrait.markers = false;
  if (c.mode == SimMode::Analytic1D) {
    const Trajectory tr = analytic_trajectory(trap, profile, {}, period / 100.0);
    outcome = tr.outcome;
    for (const auto& s : tr.samples) {
      const double x = profile.position(s.t);
      const double v = profile.velocity(s.t);
      tracks[0].samples.push_back({s.t, {x + s.state.xi, 0.0, 0.0}, {v + s.state.xi_dot, 0.0, 0.0}});
      portrait.x.push_back(s.state.xi / trap.width());
      portrait.y.push_back(s.state.xi_dot / (trap.omega() * trap.width()));
    }
  } else {
    RunOptions ro = c.run_options();
    ro.record_every = 10;
    const TrapModel model = c.mode == SimMode::Numeric1D ? TrapModel::Harmonic1D : c.model_3d;
    ThrowCatchResult r = throw_catch_run(trap, profile, {}, model, ro);
    outcome = r.outcome;
    for (const auto& s : r.track.samples) {
      portrait.x.push_back((s.r.x - profile.position(s.t)) / trap.width());
      portrait.y.push_back((s.v.x - profile.velocity(s.t)) / (trap.omega() * trap.width()));
    }
    tracks[0] = std::move(r.track);
  }
  io::OutputDir out(c.output_dir);
  out.write("trajectory.csv", io::tracks_to_csv(tracks));
  out.write("trajectory.json",
            sidecar(c, "trajectory", nullptr,
                    {{"outcome", std::string(to_string(outcome))}, {"tf_s", profile.tf()}, {"release_speed_m_s", profile.release_speed()}}));
  if (c.plot) {
    io::PlotStyle st{"phase portrait", "xi / d", "xi_dot / (omega d)"};
    out.write("trajectory.svg", io::render_svg({portrait}, st));
  }
  std::cout << "outcome=" << to_string(outcome) << " a=" << fixed(a, 5) << "m/s2 tf=" << fixed(profile.tf() * 1e6, 5)
            << "us release_speed=" << fixed(profile.release_speed(), 4) << "m/s\n";
  return kOk;
}

inline int cmd_sweep(const io::RunConfig& c_in, SweepKind kind) {
  io::RunConfig c = c_in;
  const char* def_grid = kind == SweepKind::Acceleration ? "log:1e-3:1.35:60"
                         : kind == SweepKind::GuideDepth ? "lin:0:1:11"
                                                         : "lin:-3:3:25";
  const std::vector<double> grid = io::parse_grid(c.grid.empty() ? def_grid : c.grid);
  json extra = json::object();
  if (kind == SweepKind::GuideDepth && c.mode == SimMode::Analytic1D) {
    c.mode = SimMode::Numeric1D;
    extra["mode_used"] = "numeric1d";
  }
  const TrapParams trap = c.trap.params();
  SweepResult res = sweep(kind, grid, sweep_config(c));
  const SweepResult raw = res;
  apply_spam(res, c.spam_false_positive);

  std::vector<io::Series> overlays;
  io::PlotStyle style;
  const std::string stem = kind == SweepKind::Acceleration ? "sweep_a"
                           : kind == SweepKind::GuideDepth ? "sweep_guide"
                                                           : "sweep_scatter";
  if (kind == SweepKind::Acceleration) {
    style.log_x = true;
    style.title = "throw-and-catch probability vs acceleration";
    if (c.thermal.temperature > 0.0) {
      io::Series eq6;
      eq6.name = "low-acceleration formula";
      const double hi = std::min(grid.back(), 0.05);
      if (hi > grid.front())
        for (int i = 0; i < 40; ++i) {
          const double f = grid.front() * std::pow(hi / grid.front(), i / 39.0);
          eq6.x.push_back(f);
          eq6.y.push_back(apply_false_positive(low_accel_approx(trap, c.length, f * trap.a_max(), c.thermal.temperature),
                                               c.spam_false_positive));
        }
      if (!eq6.x.empty()) overlays.push_back(eq6);
    }
    if (c.length > min_modeled_length(trap)) {
      io::Series ind;
      ind.name = "T = 0";
      for (int i = 0; i < 400; ++i) {
        const double f = grid.front() * std::pow(grid.back() / grid.front(), i / 399.0);
        ind.x.push_back(f);
        ind.y.push_back(classify(trap, c.length, f * trap.a_max()).outcome == Outcome::Success ? 1.0 : 0.0);
      }
      overlays.push_back(ind);
    }
  } else if (kind == SweepKind::GuideDepth) {
    style.title = "success probability vs guide depth";
  } else {
    style.title = "success probability vs impact parameter";
    if (raw.points.size() >= 7) {
      std::vector<double> b_um, p;
      for (const auto& pt : res.points) {
        b_um.push_back(pt.control_value * c.trap.width * 1e6);
        p.push_back(pt.p_hat);
      }
      try {
        const DoubleGaussianFit f = fit_double_gaussian(b_um, p);
        extra["fit"] = {{"offset", f.offset}, {"alpha", f.alpha}, {"beta_um2", f.beta}, {"gamma_um", f.gamma},
                        {"rms_residual", f.rms_residual}};
        io::Series fs;
        fs.name = "double-Gaussian fit";
        for (int i = 0; i < 200; ++i) {
          const double x = grid.front() + (grid.back() - grid.front()) * i / 199.0;
          fs.x.push_back(x);
          fs.y.push_back(f(x * c.trap.width * 1e6));
        }
        overlays.push_back(fs);
      } catch (const FitError& e) {
        extra["fit_error"] = e.what();
      }
    }
  }

  io::OutputDir out(c.output_dir);
  out.write(stem + ".csv", io::sweep_to_csv(res));
  out.write(stem + ".json", sidecar(c, stem, &res, extra));
  if (c.plot && res.points.size() >= 2) out.write(stem + ".svg", io::emit_plot(res, style, overlays));

  std::size_t best = 0;
  for (std::size_t i = 1; i < res.points.size(); ++i)
    if (res.points[i].p_hat > res.points[best].p_hat) best = i;
  std::cout << stem << ": points=" << res.points.size() << " failures=" << res.failures.size();
  if (!res.points.empty())
    std::cout << " max_p=" << fixed(res.points[best].p_hat) << " at " << res.control_name << "="
              << fixed(res.points[best].control_value);
  std::cout << "\n";
  return res.points.empty() ? kNumerical : kOk;
}

inline int cmd_fig5(const io::RunConfig& c) {
  const TrapParams td(c.trap.mass, c.fig5_dynamic_depth, c.trap.width);
  const TrapParams ts(c.trap.mass, c.fig5_static_depth, c.trap.width);
  std::string csv = "mode,temperature_K,defect_free,ci_low,ci_high,n,b_retained,flyer_caught\n";
  std::string line = "fig5:";
  io::OutputDir out(c.output_dir);
  for (Fig5Mode mode : {Fig5Mode::Flying, Fig5Mode::Guided}) {
    for (double temp : {0.0, c.thermal.temperature}) {
      Fig5Options o;
      o.lattice_constant = c.fig5_lattice;
      o.accel_fraction = c.fig5_accel_fraction;
      o.thermal = c.thermal;
      o.thermal.temperature = temp;
      o.threads = c.threads;
      o.run = c.run_options();
      const Fig5Result r = fig5_scene(td, ts, mode, o);
      csv += std::string(to_string(mode)) + "," + num(temp) + "," + num(r.defect_free.p_hat) + "," +
             num(r.defect_free.ci_low) + "," + num(r.defect_free.ci_high) + "," + std::to_string(r.defect_free.n) +
             "," + num(r.b_retained.p_hat) + "," + num(r.flyer_caught.p_hat) + "\n";
      line += " " + std::string(to_string(mode)) + "@" + fixed(temp * 1e6, 3) + "uK=" + fixed(r.defect_free.p_hat);
      if (temp == 0.0) {
        o.run.record_every = 20;
        CounterRng rng(0);
        const Fig5Shot shot = fig5_shot(td, ts, mode, o, rng);
        out.write("fig5_" + std::string(to_string(mode)) + "_tracks.csv", io::tracks_to_csv(shot.tracks));
      }
      if (c.thermal.temperature == 0.0) break;
    }
  }
  out.write("fig5.csv", csv);
  out.write("fig5.json", sidecar(c, "fig5", nullptr, json::object()));
  std::cout << line << "\n";
  return kOk;
}

inline ArrayProblem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open problem file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  json j;
  try {
    j = json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("problem file is not valid JSON: ") + e.what());
  }
  return io::problem_from_json(j);
}

inline PlannerOptions planner_options(const io::RunConfig& c) {
  PlannerOptions p;
  p.flying_accel_fraction = c.flying_accel_fraction;
  p.holographic_width = c.holographic_width;
  return p;
}

inline int cmd_plan(const io::RunConfig& c) {
  const TrapParams trap = c.trap.params();
  const ArrayProblem problem =
      c.problem_file.empty() ? center_vacancy_chain(c.chain_length, c.spacing) : load_problem(c.problem_file);
  io::OutputDir out(c.output_dir);
  std::string csv = "strategy,total_time_s,moves,unit_moves,sequential_estimate_time_s\n";
  std::string line = "plan:";
  double t_g = 0.0;
  for (Strategy s : {Strategy::GuidedSequential, Strategy::Flying, Strategy::Holographic}) {
    const PlanReport r = plan_and_time(problem, s, trap, c.frame_rate, planner_options(c));
    csv += std::string(to_string(s)) + "," + num(r.total_time) + "," + std::to_string(r.moves.size()) + "," +
           std::to_string(r.unit_moves) + "," + num(r.sequential_estimate_time) + "\n";
    out.write("plan_moves_" + std::string(to_string(s)) + ".csv", io::plan_to_csv(r));
    line += " " + std::string(to_string(s)) + "=" + fixed(r.total_time, 5) + "s";
    if (s == Strategy::GuidedSequential) t_g = r.total_time;
    if (s == Strategy::Flying && t_g > 0.0) line += " (t_f/t_g=" + fixed(r.total_time / t_g) + ")";
  }
  out.write("plan.csv", csv);
  out.write("plan.json", sidecar(c, "plan", nullptr, json::object()));
  std::cout << line << "\n";
  return kOk;
}

inline ScalingConfig scaling_config(const io::RunConfig& c) {
  ScalingConfig s;
  s.dims = c.planner_dims;
  s.sizes = c.sizes;
  if (s.sizes.empty())
    s.sizes = c.planner_dims == 1 ? std::vector<int>{32, 64, 128, 256, 512, 1024, 2048}
                                  : std::vector<int>{64, 128, 256, 512, 1024, 2048, 4096};
  s.trials = c.trials;
  s.seed = c.thermal.seed;
  s.strategy = c.strategy;
  s.spacing = c.spacing;
  s.frame_rate = c.frame_rate;
  s.planner = planner_options(c);
  s.threads = c.threads;
  return s;
}

inline int cmd_scaling(const io::RunConfig& c) {
  const ScalingResult r = scaling_experiment(scaling_config(c), c.trap.params());
  io::OutputDir out(c.output_dir);
  out.write("scaling.csv", io::scaling_to_csv(r));
  out.write("scaling.json", sidecar(c, "scaling", nullptr, {{"exponent", r.exponent}, {"exponent_se", r.exponent_se}}));
  if (c.plot) {
    io::Series s;
    s.name = std::string(to_string(r.strategy)) + " " + std::to_string(r.dims) + "D";
    s.line = true;
    for (const auto& p : r.points) {
      s.x.push_back(p.n);
      s.y.push_back(std::log10(p.mean_time));
    }
    out.write("scaling.svg", io::render_svg({s}, {"rearrangement time scaling", "N", "log10(mean time / s)", 0, 0, true}));
  }
  std::cout << "scaling: strategy=" << to_string(r.strategy) << " dims=" << r.dims << " exponent=" << fixed(r.exponent)
            << " se=" << fixed(r.exponent_se, 2) << "\n";
  return kOk;
}

inline int cmd_crossover(const io::RunConfig& c) {
  const double t_h = holographic_time(c.holographic_length, c.holographic_width, c.frame_rate);
  const CrossoverResult r = crossover(scaling_config(c), c.trap.params(), t_h, c.crossover_min, c.crossover_max);
  std::vector<ScalingPoint> probes = r.probes;
  std::sort(probes.begin(), probes.end(), [](const auto& a, const auto& b) { return a.n < b.n; });
  std::string csv = "n,mean_flying_time_s,sem_s,holographic_time_s\n";
  for (const auto& p : probes) csv += std::to_string(p.n) + "," + num(p.mean_time) + "," + num(p.sem) + "," + num(t_h) + "\n";
  io::OutputDir out(c.output_dir);
  out.write("crossover.csv", csv);
  json extra = {{"holographic_time_s", t_h}};
  extra["n_star"] = r.n_star ? json(*r.n_star) : json(nullptr);
  out.write("crossover.json", sidecar(c, "crossover", nullptr, extra));
  std::cout << "crossover: dims=" << c.planner_dims << " t_H=" << fixed(t_h * 1e3) << "ms N*="
            << (r.n_star ? std::to_string(*r.n_star) : std::string("none")) << "\n";
  return kOk;
}

inline void report_error(const char* kind, const std::string& msg) {
  std::cerr << json({{"error", kind}, {"message", msg}}).dump() << std::endl;
}

}  // namespace detail

/// Runs one CLI invocation; `args` excludes the program name.
inline int run(const std::vector<std::string>& args) {
  CLI::App app{"Throw-and-catch transport of single atoms by optical tweezers", "flyatom"};
  app.require_subcommand(1);
  Overrides o;
  const char* names[] = {"criticals", "trajectory", "sweep-a", "sweep-guide", "sweep-scatter",
                         "fig5", "plan", "scaling", "crossover"};
  const char* help[] = {"critical accelerations", "single trajectory and phase portrait",
                        "success probability vs acceleration", "success probability vs guide depth",
                        "success probability vs impact parameter", "3x3 vacancy-filling scene",
                        "rearrangement timing", "scaling exponents", "flying vs holographic crossover"};
  std::vector<CLI::App*> subs;
  for (int i = 0; i < 9; ++i) {
    subs.push_back(app.add_subcommand(names[i], help[i]));
    detail::add_common(subs.back(), o);
  }
  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    detail::report_error("usage", e.what());
    return kConfig;
  }
  std::string sub;
  for (int i = 0; i < 9; ++i)
    if (subs[static_cast<std::size_t>(i)]->parsed()) sub = names[i];
  try {
    const bool lattice = sub == "plan" || sub == "scaling" || sub == "crossover";
    const io::RunConfig c = detail::resolve(o, lattice);
    if (sub == "criticals") return detail::cmd_criticals(c);
    if (sub == "trajectory") return detail::cmd_trajectory(c);
    if (sub == "sweep-a") return detail::cmd_sweep(c, SweepKind::Acceleration);
    if (sub == "sweep-guide") return detail::cmd_sweep(c, SweepKind::GuideDepth);
    if (sub == "sweep-scatter") return detail::cmd_sweep(c, SweepKind::ImpactParameter);
    if (sub == "fig5") return detail::cmd_fig5(c);
    if (sub == "plan") return detail::cmd_plan(c);
    if (sub == "scaling") return detail::cmd_scaling(c);
    if (sub == "crossover") return detail::cmd_crossover(c);
  } catch (const ConfigError& e) {
    detail::report_error("config", e.what());
    return kConfig;
  } catch (const InvalidArgument& e) {
    detail::report_error("config", e.what());
    return kConfig;
  } catch (const NumericalError& e) {
    detail::report_error("numerical", e.what());
    return kNumerical;
  } catch (const IoError& e) {
    detail::report_error("io", e.what());
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    detail::report_error("io", e.what());
    return kIo;
  } catch (const std::exception& e) {
    detail::report_error("internal", e.what());
    return kInternal;
  }
  detail::report_error("usage", "unknown subcommand");
  return kConfig;
}

}  // namespace flyatom::cli
