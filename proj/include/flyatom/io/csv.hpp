#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "flyatom/dynamics_sim.hpp"
#include "flyatom/errors.hpp"
#include "flyatom/io/units.hpp"
#include "flyatom/rearrange_planner.hpp"
#include "flyatom/thermal_mc.hpp"

namespace flyatom::io {

inline constexpr std::string_view kSweepHeader = "control_value,p_hat,ci_low,ci_high,n";

inline std::string sweep_to_csv(const SweepResult& s) {
  std::string out(kSweepHeader);
  out += '\n';
  for (const auto& p : s.points) {
    out += format_double(p.control_value) + ',' + format_double(p.p_hat) + ',' + format_double(p.ci_low) + ',' +
           format_double(p.ci_high) + ',' + std::to_string(p.n) + '\n';
  }
  return out;
}

inline SweepResult sweep_from_csv(const std::string& text, std::string control_name = "") {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kSweepHeader) throw ConfigError("sweep CSV header mismatch");
  SweepResult s;
  s.control_name = std::move(control_name);
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 5) throw ConfigError("sweep CSV row " + std::to_string(row) + " needs 5 fields");
    SweepPoint p;
    double* dst[] = {&p.control_value, &p.p_hat, &p.ci_low, &p.ci_high};
    for (int k = 0; k < 4; ++k) {
      const auto v = parse_double(f[static_cast<std::size_t>(k)]);
      if (!v) throw ConfigError("sweep CSV row " + std::to_string(row) + ": bad number '" + f[static_cast<std::size_t>(k)] + "'");
      *dst[k] = *v;
    }
    const auto n = parse_double(f[4]);
    if (!n || *n < 0 || *n != std::floor(*n)) throw ConfigError("sweep CSV row " + std::to_string(row) + ": bad count");
    p.n = static_cast<std::size_t>(*n);
    s.points.push_back(p);
  }
  return s;
}

/// One row per sample: atom,t,x,y,z,vx,vy,vz (SI).
inline std::string tracks_to_csv(const std::vector<AtomTrack>& tracks) {
  std::string out = "atom,t,x,y,z,vx,vy,vz\n";
  for (const auto& tr : tracks)
    for (const auto& s : tr.samples)
      out += std::to_string(tr.id) + ',' + format_double(s.t) + ',' + format_double(s.r.x) + ',' +
             format_double(s.r.y) + ',' + format_double(s.r.z) + ',' + format_double(s.v.x) + ',' +
             format_double(s.v.y) + ',' + format_double(s.v.z) + '\n';
  return out;
}

inline std::string plan_to_csv(const PlanReport& r) {
  std::string out = "from_site,to_site,distance_m,unit_moves,duration_s\n";
  for (const auto& m : r.moves)
    out += std::to_string(m.from) + ',' + std::to_string(m.to) + ',' + format_double(m.distance) + ',' +
           std::to_string(m.unit_moves) + ',' + format_double(m.duration) + '\n';
  return out;
}

inline std::string scaling_to_csv(const ScalingResult& r) {
  std::string out = "n,mean_time_s,sem_s\n";
  for (const auto& p : r.points)
    out += std::to_string(p.n) + ',' + format_double(p.mean_time) + ',' + format_double(p.sem) + '\n';
  return out;
}

/// Writes files under one output directory. Each file is written to a
/// temporary sibling and renamed into place.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path dir) : dir_(std::move(dir)) {}

  const std::filesystem::path& path() const { return dir_; }

  std::filesystem::path write(const std::string& name, const std::string& content) const {
    if (name.empty() || name.find('/') != std::string::npos || name.find('\\') != std::string::npos ||
        name == "." || name == "..")
      throw IoError("output name '" + name + "' must be a plain file name");
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory '" + dir_.string() + "': " + ec.message());
    const auto final_path = dir_ / name;
    const auto tmp = dir_ / ("." + name + ".tmp");
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
      out.write(content.data(), static_cast<std::streamsize>(content.size()));
      out.flush();
      if (!out) {
        out.close();
        std::filesystem::remove(tmp, ec);
        throw IoError("write to '" + tmp.string() + "' failed");
      }
    }
    std::filesystem::rename(tmp, final_path, ec);
    if (ec) {
      std::filesystem::remove(tmp, ec);
      throw IoError("cannot move output into '" + final_path.string() + "'");
    }
    return final_path;
  }

 private:
  std::filesystem::path dir_;
};

}  // namespace flyatom::io
