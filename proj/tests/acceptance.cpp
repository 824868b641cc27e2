// Acceptance run: one PASS/FAIL line per criterion. Tolerances are fixed here.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "flyatom/cli.hpp"
#include "flyatom/flyatom.hpp"
#include "oracles.hpp"

using namespace flyatom;
namespace fs = std::filesystem;

namespace {

int g_failed = 0;

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); }
};

void report(int id, bool ok, const std::string& what, double seconds) {
  std::printf("%s [%2d] %s (%.2f s)\n", ok ? "PASS" : "FAIL", id, what.c_str(), seconds);
  std::fflush(stdout);
  if (!ok) ++g_failed;
}

std::string f(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

TrapParams trap_mk(double mk, double d = 0.5e-6) { return TrapParams::from_millikelvin(constants::rb87_mass, mk, d); }

constexpr double kL = 12.6e-6;

ThermalSpec thermal(double T, std::size_t n, std::uint64_t seed, Dims dims = Dims::OneD) {
  return {T, n, seed, dims, EnergyModel::MaxwellBoltzmann};
}

void criterion1() {
  Timer t;
  const TrapParams trap = trap_mk(0.76);
  const auto c = critical_accelerations(trap, kL);
  const double r3 = c.a_theta_3pi / c.a_max, r2 = c.a_theta_2pi / c.a_max;
  const oracle::Geometry g{trap.mass(), trap.depth(), trap.width(), kL, 1.0};
  const double h3 = oracle::accel_at_phase(g, 3 * oracle::kPi) / g.amax();
  const double h2 = oracle::accel_at_phase(g, 2 * oracle::kPi) / g.amax();
  const double s = t.seconds();
  const bool ok = std::abs(r3 - 0.378) <= 0.005 && std::abs(r2 - 0.851) <= 0.005 && std::abs(r3 - h3) < 1e-9 &&
                  std::abs(r2 - h2) < 1e-9 && s < 1.0;
  report(1, ok, "critical ratios a(3pi)/a_max=" + f(r3) + " a(2pi)/a_max=" + f(r2) + " (0.378/0.851 +-0.005)", s);
}

void criterion2() {
  Timer t;
  const double v = MotionProfile(5.00e4, kL).release_speed();
  const double s = t.seconds();
  report(2, std::abs(v - 0.648) <= 0.002 && s < 1.0, "release speed " + f(v) + " m/s (0.648 +-0.002)", s);
}

void criterion3() {
  Timer t;
  const double tf = MotionProfile(2.33e5, kL).tf();
  const double s = t.seconds();
  report(3, std::abs(tf - 15e-6) <= 1e-6 && s < 1.0, "tf at 2.33e5 m/s2 = " + f(tf * 1e6) + " us (15 +-1)", s);
}

void criterion4() {
  Timer t;
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> depth(0.3, 2.0), width(0.4e-6, 0.8e-6), ratio(15.0, 40.0);
  int disagreements = 0, total = 0;
  for (int geo = 0; geo < 5; ++geo) {
    const TrapParams trap = trap_mk(depth(gen), width(gen));
    const double l = ratio(gen) * trap.width();
    RunOptions ro;
    ro.dt = constants::two_pi / trap.omega() / 2000.0;
    for (int i = 0; i < 200; ++i) {
      const double a = 1e-3 * std::pow(1350.0, i / 199.0) * trap.a_max();
      const Outcome an = classify(trap, l, a).outcome;
      const Outcome nu = throw_catch_run(trap, MotionProfile(a, l), {}, TrapModel::Harmonic1D, ro).outcome;
      disagreements += an != nu;
      ++total;
    }
  }
  const double s = t.seconds();
  report(4, disagreements == 0 && s < 60.0,
         "analytic vs integrator outcomes: " + std::to_string(disagreements) + " disagreements of " +
             std::to_string(total),
         s);
}

void criterion5() {
  Timer t;
  const TrapParams trap = trap_mk(0.76);
  const auto c = critical_accelerations(trap, kL);
  const int n = 4000;
  std::vector<double> grid(n);
  std::vector<char> ok(n);
  for (int i = 0; i < n; ++i) {
    grid[i] = 1e-3 * std::pow(1.0 / 1e-3, i / (n - 1.0)) * trap.a_max();
    ok[i] = classify(trap, kL, grid[i]).outcome == Outcome::Success;
  }
  std::vector<std::pair<int, int>> regions;
  for (int i = 0; i < n; ++i)
    if (ok[i] && (i == 0 || !ok[i - 1])) regions.push_back({i, i});
    else if (ok[i]) regions.back().second = i;
  bool good = regions.size() == 2;
  std::string detail = std::to_string(regions.size()) + " regions";
  if (good) {
    const int e1 = regions[0].second, s2 = regions[1].first;
    good = grid[e1] <= c.a_gap_minus && c.a_gap_minus < grid[e1 + 1] && grid[s2 - 1] < c.a_gap_plus &&
           c.a_gap_plus <= grid[s2];
    detail += ", gap edges " + f(grid[e1] / trap.a_max()) + ".." + f(grid[s2] / trap.a_max()) + " vs roots " +
              f(c.a_gap_minus / trap.a_max()) + ".." + f(c.a_gap_plus / trap.a_max());
  }
  report(5, good, "T=0 indicator: " + detail, t.seconds());
}

void criterion6() {
  Timer t;
  const TrapParams trap = trap_mk(0.76);
  SweepConfig cfg{trap, kL, thermal(40e-6, 20000, 6), SimMode::Analytic1D, 0.0, 0.33, std::nullopt, false, McOptions{}};
  std::vector<double> grid;
  for (int i = 0; i < 100; ++i) grid.push_back(0.01 + 0.01 * i);
  const SweepResult r = sweep(SweepKind::Acceleration, grid, cfg);
  std::size_t best = 0;
  for (std::size_t i = 1; i < r.points.size(); ++i)
    if (r.points[i].p_hat > r.points[best].p_hat) best = i;
  const double arg = r.points[best].control_value;
  const double s = t.seconds();
  report(6, arg >= 0.25 && arg <= 0.40 && s < 300.0,
         "thermal optimum a/a_max=" + f(arg) + " P=" + f(r.points[best].p_hat) + " (in [0.25, 0.40])", s);
}

void criterion7() {
  Timer t;
  const TrapParams trap = trap_mk(0.76);
  double worst = 0.0;
  std::string detail;
  for (double fr : {1e-3, 2e-3, 5e-3}) {
    McOptions mc;
    mc.point_index = static_cast<std::uint64_t>(fr * 1e4);
    const Estimate e =
        success_probability(trap, kL, fr * trap.a_max(), thermal(40e-6, 20000, 7), SimMode::Analytic1D, 0.0, mc);
    const double approx = low_accel_approx(trap, kL, fr * trap.a_max(), 40e-6);
    worst = std::max(worst, std::abs(e.p_hat - approx) / approx);
    detail += " " + f(e.p_hat) + "/" + f(approx);
  }
  report(7, worst <= 0.20, "low-acceleration formula, MC/approx:" + detail + ", worst rel " + f(worst, 3) + " (<= 0.2)",
         t.seconds());
}

void criterion8() {
  Timer t;
  const TrapParams trap = trap_mk(0.76);
  const auto th = thermal(40e-6, 2000, 8, Dims::ThreeD);
  int bad = 0;
  double worst = -1e9;
  for (int i = 0; i < 12; ++i) {
    const double fr = 0.01 * std::pow(120.0, i / 11.0);
    McOptions mc;
    mc.point_index = static_cast<std::uint64_t>(i);
    const Estimate p1 = success_probability(trap, kL, fr * trap.a_max(), th, SimMode::Analytic1D, 0.0, mc);
    const Estimate p3 = success_probability(trap, kL, fr * trap.a_max(), th, SimMode::Numeric3D, 0.0, mc);
    const double se = std::hypot(p1.standard_error(), p3.standard_error());
    const double margin = se > 0 ? (p3.p_hat - p1.p_hat) / se : 0.0;
    worst = std::max(worst, margin);
    bad += p3.p_hat > p1.p_hat + 2 * se;
  }
  report(8, bad == 0, "transverse ordering P3D <= P1D + 2SE on 12 points, worst (P3D-P1D)/SE=" + f(worst, 3),
         t.seconds());
}

void criterion9() {
  Timer t;
  const TrapParams trap = trap_mk(0.76);
  SweepConfig cfg{trap, kL, thermal(40e-6, 5000, 9), SimMode::Analytic1D, 0.0, 0.33, std::nullopt, false, McOptions{}};
  cfg.mode = SimMode::Numeric1D;
  cfg.accel_fraction = 0.33;
  const SweepResult r = sweep(SweepKind::GuideDepth, {0.0, 0.25, 0.5, 0.75, 1.0}, cfg);
  bool ok = r.points.size() == 5 && r.failures.empty();
  std::string detail;
  if (ok) {
    const SweepPoint& p0 = r.points.front();
    for (const auto& p : r.points) {
      const double se = std::hypot(p.standard_error(), p0.standard_error());
      ok = ok && p.p_hat >= p0.p_hat - 2 * se;
      detail += " " + f(p.p_hat, 3);
    }
  }
  report(9, ok, "guide depth Uc/U0=0..1 P:" + detail, t.seconds());
}

void criterion10() {
  Timer t;
  // simulated P(b)
  const TrapParams trap = trap_mk(0.76);
  SweepConfig cfg{trap, kL, thermal(40e-6, 4000, 10, Dims::ThreeD), SimMode::Analytic1D, 0.0, 0.33, std::nullopt, false, McOptions{}};
  cfg.static_trap = trap_mk(0.58);
  cfg.accel_fraction = 0.33;
  // +b and -b share thermal draws (common random numbers), so the pair
  // difference measures asymmetry rather than sampling noise.
  std::vector<double> grid;
  for (int i = 0; i <= 24; ++i) grid.push_back(-3.0 + 0.25 * i);
  SweepResult r;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const std::uint64_t key = static_cast<std::uint64_t>(std::lround(std::abs(grid[i]) * 4));
    const Estimate e = scattering_probability(cfg, grid[i] * trap.width(), key);
    r.points.push_back({grid[i], e.p_hat, e.ci_low, e.ci_high, e.n});
  }
  bool sym = r.points.size() == grid.size();
  double worst_sym = 0.0;
  for (std::size_t i = 0; sym && i < r.points.size() / 2; ++i) {
    const auto& a = r.points[i];
    const auto& b = r.points[r.points.size() - 1 - i];
    const double se = std::hypot(a.standard_error(), b.standard_error());
    const double z = se > 0 ? std::abs(a.p_hat - b.p_hat) / se : (a.p_hat == b.p_hat ? 0.0 : 1e9);
    worst_sym = std::max(worst_sym, z);
  }
  sym = sym && worst_sym <= 2.0;
  const std::size_t mid = grid.size() / 2;
  std::size_t argmin = mid;
  for (std::size_t i = 0; i < r.points.size(); ++i)
    if (r.points[i].p_hat < r.points[argmin].p_hat) argmin = i;
  const double bmin = std::abs(r.points[argmin].control_value);
  // b = 0 is the maximum between the two dips
  bool central_max = true;
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    if (std::abs(r.points[i].control_value) >= bmin) continue;
    const double se = std::hypot(r.points[i].standard_error(), r.points[mid].standard_error());
    central_max = central_max && r.points[mid].p_hat >= r.points[i].p_hat - 2 * se;
  }
  const bool shape = sym && central_max && bmin >= 0.5 && bmin <= 2.0;

  // fit recovery on synthetic data with known parameters
  std::mt19937_64 gen(10);
  std::normal_distribution<double> noise(0.0, 0.02);
  std::vector<double> b, p;
  for (int i = 0; i < 41; ++i) {
    b.push_back(-3.0 + 0.15 * i);
    p.push_back(oracle::dg(b.back(), 0.82, 0.77, 0.36, 0.72) + noise(gen));
  }
  const DoubleGaussianFit fit = fit_double_gaussian(b, p);
  const double truth[] = {0.82, 0.77, 0.36, 0.72};
  const double got[] = {fit.offset, fit.alpha, fit.beta, fit.gamma};
  double worst_fit = 0.0;
  for (int k = 0; k < 4; ++k) worst_fit = std::max(worst_fit, std::abs(got[k] - truth[k]) / truth[k]);
  report(10, shape && worst_fit <= 0.10,
         "scattering: symmetry worst " + f(worst_sym, 3) + " SE, P(0)=" + f(r.points[mid].p_hat, 3) +
             " local max " + (central_max ? "yes" : "no") + ", min at |b|/d=" + f(bmin, 3) + "; fit worst rel err " +
             f(worst_fit, 3),
         t.seconds());
}

void criterion11() {
  Timer t;
  const TrapParams trap = trap_mk(0.76);
  const double lam = 4.2e-6;
  const oracle::Geometry g{trap.mass(), trap.depth(), trap.width(), lam, 1.0};
  bool exact = true;
  for (int n : {9, 50, 200}) {
    const auto rep = plan_and_time(center_vacancy_chain(n, lam), Strategy::GuidedSequential, trap, 40.0);
    exact = exact && rep.total_time == ((n + 1) / 2) * (2.0 * std::sqrt(lam / g.amax()));
  }
  exact = exact && holographic_time(3e-6, 1e-6, 40.0) == 3e-6 / (1e-6 * 40.0);
  const auto chain = center_vacancy_chain(200, lam);
  const double tg = plan_and_time(chain, Strategy::GuidedSequential, trap, 40.0).total_time;
  const double tf = plan_and_time(chain, Strategy::Flying, trap, 40.0).total_time;
  const double ratio = tf / tg;
  report(11, exact && std::abs(ratio - 0.5) <= 0.01,
         std::string("closed forms ") + (exact ? "exact" : "MISMATCH") + ", chain tf/tg=" + f(ratio) + " (0.5 +-0.01)",
         t.seconds());
}

void criterion12() {
  Timer t;
  const TrapParams trap = trap_mk(0.76);
  const double fly[] = {2.0, 1.5, 1.33}, holo[] = {1.0, 0.5, 0.33};
  bool ok = true;
  std::string detail;
  for (int dims = 1; dims <= 3; ++dims)
    for (Strategy st : {Strategy::Flying, Strategy::Holographic}) {
      ScalingConfig cfg;
      cfg.dims = dims;
      cfg.strategy = st;
      cfg.trials = 200;
      cfg.seed = 12;
      cfg.sizes = dims == 1 ? std::vector<int>{32, 64, 128, 256, 512, 1024}
                            : std::vector<int>{64, 128, 256, 512, 1024, 2048, 4096};
      const ScalingResult r = scaling_experiment(cfg, trap);
      const bool flying = st == Strategy::Flying;
      const double want = flying ? fly[dims - 1] : holo[dims - 1];
      const double tol = flying ? 0.25 : 0.15;
      ok = ok && std::abs(r.exponent - want) <= tol;
      detail += " " + std::to_string(dims) + "D-" + std::string(to_string(st)) + "=" + f(r.exponent, 3);
    }
  const double s = t.seconds();
  report(12, ok && s < 600.0, "scaling exponents:" + detail, s);
}

void criterion13() {
  Timer t;
  const TrapParams td = trap_mk(1.94), ts = trap_mk(0.58);
  Fig5Options cold;
  const auto fly0 = fig5_scene(td, ts, Fig5Mode::Flying, cold);
  const auto gui0 = fig5_scene(td, ts, Fig5Mode::Guided, cold);
  Fig5Options warm;
  warm.thermal = thermal(40e-6, 400, 13, Dims::ThreeD);
  const auto flyT = fig5_scene(td, ts, Fig5Mode::Flying, warm);
  const auto guiT = fig5_scene(td, ts, Fig5Mode::Guided, warm);
  const double se = std::hypot(flyT.defect_free.standard_error(), guiT.defect_free.standard_error());
  const double z = se > 0 ? (flyT.defect_free.p_hat - guiT.defect_free.p_hat) / se : 0.0;
  const bool ok = fly0.defect_free.p_hat == 1.0 && gui0.defect_free.p_hat == 0.0 && z > 5.0;
  report(13, ok,
         "vacancy filling T=0 flying " + f(fly0.defect_free.p_hat) + " guided " + f(gui0.defect_free.p_hat) +
             "; 40uK flying " + f(flyT.defect_free.p_hat, 3) + " guided " + f(guiT.defect_free.p_hat, 3) + " (" +
             f(z, 3) + " SE)",
         t.seconds());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion14() {
  Timer t;
  const fs::path root = fs::temp_directory_path() / "flyatom_acceptance";
  bool same = true;
  const std::vector<std::pair<std::string, std::vector<std::string>>> runs = {
      {"sweep_a.csv", {"sweep-a", "--grid", "log:1e-3:1.35:30", "--n", "4000", "--seed", "14"}},
      {"sweep_guide.csv", {"sweep-guide", "--grid", "lin:0:1:3", "--n", "300", "--seed", "14"}},
      {"sweep_scatter.csv", {"sweep-scatter", "--grid", "lin:-2:2:9", "--n", "100", "--seed", "14"}},
  };
  for (const auto& [file, base] : runs) {
    std::string first;
    for (const char* threads : {"1", "2", "5"}) {
      const fs::path dir = root / threads;
      fs::remove_all(dir);
      auto args = base;
      for (const char* extra : {"--threads", threads, "--out", "", "--no-plot"}) args.push_back(extra);
      args[args.size() - 2] = dir.string();
      std::ostringstream sink;
      auto* old = std::cout.rdbuf(sink.rdbuf());
      const int rc = cli::run(args);
      std::cout.rdbuf(old);
      const std::string csv = rc == 0 ? slurp(dir / file) : std::string();
      if (first.empty()) first = csv;
      same = same && rc == 0 && !csv.empty() && csv == first;
    }
  }
  fs::remove_all(root);
  report(14, same, "sweep CSVs byte-identical across 1/2/5 threads", t.seconds());
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  criterion11();
  criterion12();
  criterion13();
  criterion14();
  std::printf("%d of 14 criteria failed\n", g_failed);
  return g_failed == 0 ? 0 : 1;
}
