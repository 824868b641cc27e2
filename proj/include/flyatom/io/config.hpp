#pragma once

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "flyatom/constants.hpp"
#include "flyatom/core_model.hpp"
#include "flyatom/dynamics_sim.hpp"
#include "flyatom/errors.hpp"
#include "flyatom/io/units.hpp"
#include "flyatom/rearrange_planner.hpp"
#include "flyatom/thermal_mc.hpp"

namespace flyatom::io {

using json = nlohmann::ordered_json;

struct TrapBlock {
  double mass = constants::rb87_mass;
  double depth = 0.76e-3 * constants::boltzmann;
  double width = 0.5e-6;

  TrapParams params() const { return {mass, depth, width}; }
  friend bool operator==(const TrapBlock&, const TrapBlock&) = default;
};

/// Everything a subcommand needs, in SI units.
struct RunConfig {
  TrapBlock trap;
  double length = 12.6e-6;

  ThermalSpec thermal{40e-6, 20000, 7, Dims::OneD, EnergyModel::MaxwellBoltzmann};

  SimMode mode = SimMode::Analytic1D;
  TrapModel model_3d = TrapModel::Gaussian3D;
  double steps_per_period = 200.0;
  double axial_aspect = 5.0;
  double accel_fraction = 0.33;
  double flight_depth_fraction = 0.0;
  unsigned threads = 1;

  TrapBlock static_trap{constants::rb87_mass, 0.58e-3 * constants::boltzmann, 0.5e-6};
  bool occupied = false;

  std::string grid;  // empty: subcommand default
  double spam_false_positive = 0.0;

  std::string output_dir = "out";
  bool plot = true;

  double spacing = 4.2e-6;
  double frame_rate = 40.0;
  double holographic_width = 1e-6;
  double holographic_length = 3e-6;
  double flying_accel_fraction = 1.0;
  int planner_dims = 2;
  std::vector<int> sizes;
  int trials = 200;
  Strategy strategy = Strategy::Flying;
  int chain_length = 200;
  std::string problem_file;
  int crossover_min = 16;
  int crossover_max = 20000;

  double fig5_dynamic_depth = 1.94e-3 * constants::boltzmann;
  double fig5_static_depth = 0.58e-3 * constants::boltzmann;
  double fig5_accel_fraction = 0.08;
  double fig5_lattice = 4.2e-6;

  RunOptions run_options() const {
    RunOptions r;
    r.steps_per_period = steps_per_period;
    r.axial_aspect = axial_aspect;
    return r;
  }

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

namespace detail {

template <class E>
struct EnumName {
  E value;
  std::string_view name;
};

inline constexpr EnumName<SimMode> kModes[] = {
    {SimMode::Analytic1D, "analytic1d"}, {SimMode::Numeric1D, "numeric1d"}, {SimMode::Numeric3D, "numeric3d"}};
inline constexpr EnumName<TrapModel> kModels[] = {
    {TrapModel::Harmonic1D, "harmonic1d"}, {TrapModel::Harmonic3D, "harmonic3d"}, {TrapModel::Gaussian3D, "gaussian3d"}};
inline constexpr EnumName<Dims> kDims[] = {{Dims::OneD, "1d"}, {Dims::ThreeD, "3d"}};
inline constexpr EnumName<EnergyModel> kEnergy[] = {{EnergyModel::MaxwellBoltzmann, "maxwell-boltzmann"},
                                                    {EnergyModel::PhaseSpaceGaussian, "phase-space-gaussian"}};
inline constexpr EnumName<Strategy> kStrategies[] = {
    {Strategy::GuidedSequential, "guided"}, {Strategy::Flying, "flying"}, {Strategy::Holographic, "holographic"}};

template <class E, std::size_t N>
E enum_from(const EnumName<E> (&table)[N], std::string_view s, std::string_view what) {
  std::string allowed;
  for (const auto& e : table) {
    if (e.name == s) return e.value;
    allowed += (allowed.empty() ? "" : ", ") + std::string(e.name);
  }
  throw ConfigError(std::string(what) + " '" + std::string(s) + "' is not one of: " + allowed);
}

template <class E, std::size_t N>
std::string enum_to(const EnumName<E> (&table)[N], E v) {
  for (const auto& e : table)
    if (e.value == v) return std::string(e.name);
  return "unknown";
}

/// Reads one JSON object, rejecting keys that no handler claims.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + " must be an object");
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void quantity(const std::string& key, Quantity q, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw ConfigError(where(key) + " must be a string with a unit, e.g. \"0.76mK\"");
      try {
        out = parse_quantity(v->get<std::string>(), q);
      } catch (const ConfigError& e) {
        throw ConfigError(where(key) + ": " + e.what());
      }
    }
  }

  void number(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw ConfigError(where(key) + " must be a number");
      out = v->get<double>();
    }
  }

  template <class I>
  void integer(const std::string& key, I& out, long long lo) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) throw ConfigError(where(key) + " must be an integer");
      const long long x = v->get<long long>();
      if (x < lo) throw ConfigError(where(key) + " must be >= " + std::to_string(lo));
      out = static_cast<I>(x);
    }
  }

  void u64(const std::string& key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0))
        throw ConfigError(where(key) + " must be a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(where(key) + " must be true or false");
      out = v->get<bool>();
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw ConfigError(where(key) + " must be a string");
      out = v->get<std::string>();
    }
  }

  template <class E, std::size_t N>
  void enumeration(const std::string& key, const EnumName<E> (&table)[N], E& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw ConfigError(where(key) + " must be a string");
      out = enum_from(table, v->get<std::string>(), where(key));
    }
  }

  void int_list(const std::string& key, std::vector<int>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) throw ConfigError(where(key) + " must be an array of integers");
      out.clear();
      for (const auto& x : *v) {
        if (!x.is_number_integer() || x.get<long long>() < 1) throw ConfigError(where(key) + " entries must be integers >= 1");
        out.push_back(x.get<int>());
      }
    }
  }

  template <class F>
  void object(const std::string& key, F&& f) {
    if (const json* v = find(key)) {
      ObjectReader sub(*v, where(key));
      f(sub);
      sub.finish();
    }
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError("unknown key '" + where(it.key()) + "'");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline void read_trap(ObjectReader& r, TrapBlock& t) {
  r.quantity("mass", Quantity::Mass, t.mass);
  r.quantity("depth", Quantity::Energy, t.depth);
  r.quantity("width", Quantity::Length, t.width);
}

inline json write_trap(const TrapBlock& t) {
  return {{"mass", format_quantity(t.mass, Quantity::Mass)},
          {"depth", format_quantity(t.depth, Quantity::Energy)},
          {"width", format_quantity(t.width, Quantity::Length)}};
}

}  // namespace detail

inline RunConfig config_from_json(const json& j) {
  using detail::ObjectReader;
  RunConfig c;
  ObjectReader r(j, "");
  r.object("trap", [&](ObjectReader& o) { detail::read_trap(o, c.trap); });
  r.object("geometry", [&](ObjectReader& o) { o.quantity("length", Quantity::Length, c.length); });
  r.object("thermal", [&](ObjectReader& o) {
    o.quantity("temperature", Quantity::Temperature, c.thermal.temperature);
    o.integer("samples", c.thermal.n_samples, 1);
    o.u64("seed", c.thermal.seed);
    o.enumeration("dims", detail::kDims, c.thermal.dims);
    o.enumeration("energy_model", detail::kEnergy, c.thermal.energy_model);
  });
  r.object("simulation", [&](ObjectReader& o) {
    o.enumeration("mode", detail::kModes, c.mode);
    o.enumeration("model_3d", detail::kModels, c.model_3d);
    o.number("steps_per_period", c.steps_per_period);
    o.number("axial_aspect", c.axial_aspect);
    o.number("accel_fraction", c.accel_fraction);
    o.number("flight_depth_fraction", c.flight_depth_fraction);
    o.integer("threads", c.threads, 0);
  });
  r.object("scatter", [&](ObjectReader& o) {
    o.object("static_trap", [&](ObjectReader& s) { detail::read_trap(s, c.static_trap); });
    o.boolean("occupied", c.occupied);
  });
  r.object("sweep", [&](ObjectReader& o) {
    o.string("grid", c.grid);
    o.number("spam_false_positive", c.spam_false_positive);
  });
  r.object("output", [&](ObjectReader& o) {
    o.string("dir", c.output_dir);
    o.boolean("plot", c.plot);
  });
  r.object("planner", [&](ObjectReader& o) {
    o.quantity("spacing", Quantity::Length, c.spacing);
    o.quantity("frame_rate", Quantity::Frequency, c.frame_rate);
    o.quantity("holographic_width", Quantity::Length, c.holographic_width);
    o.quantity("holographic_length", Quantity::Length, c.holographic_length);
    o.number("flying_accel_fraction", c.flying_accel_fraction);
    o.integer("dims", c.planner_dims, 1);
    o.int_list("sizes", c.sizes);
    o.integer("trials", c.trials, 1);
    o.enumeration("strategy", detail::kStrategies, c.strategy);
    o.integer("chain_length", c.chain_length, 1);
    o.string("problem", c.problem_file);
    o.integer("crossover_min", c.crossover_min, 1);
    o.integer("crossover_max", c.crossover_max, 1);
  });
  r.object("fig5", [&](ObjectReader& o) {
    o.quantity("dynamic_depth", Quantity::Energy, c.fig5_dynamic_depth);
    o.quantity("static_depth", Quantity::Energy, c.fig5_static_depth);
    o.number("accel_fraction", c.fig5_accel_fraction);
    o.quantity("lattice_constant", Quantity::Length, c.fig5_lattice);
  });
  r.finish();
  return c;
}

inline json config_to_json(const RunConfig& c) {
  json sizes = json::array();
  for (int n : c.sizes) sizes.push_back(n);
  return {
      {"trap", detail::write_trap(c.trap)},
      {"geometry", {{"length", format_quantity(c.length, Quantity::Length)}}},
      {"thermal",
       {{"temperature", format_quantity(c.thermal.temperature, Quantity::Temperature)},
        {"samples", c.thermal.n_samples},
        {"seed", c.thermal.seed},
        {"dims", detail::enum_to(detail::kDims, c.thermal.dims)},
        {"energy_model", detail::enum_to(detail::kEnergy, c.thermal.energy_model)}}},
      {"simulation",
       {{"mode", detail::enum_to(detail::kModes, c.mode)},
        {"model_3d", detail::enum_to(detail::kModels, c.model_3d)},
        {"steps_per_period", c.steps_per_period},
        {"axial_aspect", c.axial_aspect},
        {"accel_fraction", c.accel_fraction},
        {"flight_depth_fraction", c.flight_depth_fraction},
        {"threads", c.threads}}},
      {"scatter", {{"static_trap", detail::write_trap(c.static_trap)}, {"occupied", c.occupied}}},
      {"sweep", {{"grid", c.grid}, {"spam_false_positive", c.spam_false_positive}}},
      {"output", {{"dir", c.output_dir}, {"plot", c.plot}}},
      {"planner",
       {{"spacing", format_quantity(c.spacing, Quantity::Length)},
        {"frame_rate", format_quantity(c.frame_rate, Quantity::Frequency)},
        {"holographic_width", format_quantity(c.holographic_width, Quantity::Length)},
        {"holographic_length", format_quantity(c.holographic_length, Quantity::Length)},
        {"flying_accel_fraction", c.flying_accel_fraction},
        {"dims", c.planner_dims},
        {"sizes", sizes},
        {"trials", c.trials},
        {"strategy", detail::enum_to(detail::kStrategies, c.strategy)},
        {"chain_length", c.chain_length},
        {"problem", c.problem_file},
        {"crossover_min", c.crossover_min},
        {"crossover_max", c.crossover_max}}},
      {"fig5",
       {{"dynamic_depth", format_quantity(c.fig5_dynamic_depth, Quantity::Energy)},
        {"static_depth", format_quantity(c.fig5_static_depth, Quantity::Energy)},
        {"accel_fraction", c.fig5_accel_fraction},
        {"lattice_constant", format_quantity(c.fig5_lattice, Quantity::Length)}}},
  };
}

inline RunConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

/// Parses an occupancy-grid problem:
/// {"dims": 2, "extents": [3, 3], "spacing": "4.2um",
///  "occupancy": [0/1 ...], "target": [0/1 ...]}
inline ArrayProblem problem_from_json(const json& j) {
  ArrayProblem p;
  detail::ObjectReader r(j, "problem");
  r.integer("dims", p.dims, 1);
  r.quantity("spacing", Quantity::Length, p.spacing);
  auto read_list = [&](const std::string& key, auto& out) {
    const json* v = r.find(key);
    if (!v || !v->is_array()) throw ConfigError(r.where(key) + " must be an array");
    out.clear();
    for (const auto& x : *v) {
      if (!x.is_number_integer()) throw ConfigError(r.where(key) + " entries must be integers");
      out.push_back(static_cast<typename std::decay_t<decltype(out)>::value_type>(x.get<int>()));
    }
  };
  read_list("extents", p.extents);
  read_list("occupancy", p.occupancy);
  read_list("target", p.target);
  r.finish();
  try {
    p.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("problem: ") + e.what());
  }
  return p;
}

}  // namespace flyatom::io
