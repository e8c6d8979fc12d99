// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cowkin/commands.hpp"
#include "oracle.hpp"

using namespace cowkin;
namespace fs = std::filesystem;

namespace {

struct Criterion {
  std::string name;
  std::vector<std::string> failures;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  void within(double value, double target, double rel_tol, const std::string& what) {
    const double rel = std::abs(value - target) / std::abs(target);
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s = %.4e (target %.3g, off %.2f%%, tol %.0f%%)", what.c_str(), value, target,
                  100 * rel, 100 * rel_tol);
    notes.emplace_back(buf);
    check(rel <= rel_tol, buf);
  }
};

RunConfig paper() { return resolve(load_preset("paper-2013")); }

CowConfig with_g(CowConfig c, double g) {
  c.constants.g = g;
  return c;
}

CowConfig with_span(CowConfig c, double span) {
  c.span_x = span;
  return c;
}

// Max relative residual of a least-squares line y = a x + b.
double linear_fit_residual(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double a = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double b = (sy - a * sx) / n;
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (y[i] != 0.0) worst = std::max(worst, std::abs(a * x[i] + b - y[i]) / std::abs(y[i]));
  return worst;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void paper_numbers(Criterion& c) {
  const auto rc = paper();
  const auto r = run_cow_loop(rc.cow);
  c.within(r.dky_per_leg_rel, 2.7e-7, 0.03, "dky/ky");
  c.within(r.dkx_rel(), 1.8e-7, 0.04, "dkx/kx");
  c.within(r.defocus_rel_upper, 1.8e-7, 0.04, "(T3-T)/T");
  c.within(r.defocus_rel_lower, -1.8e-7, 0.04, "(T4-T)/T");
  c.within(r.closure_rel, 9.5e-14, 0.05, "(ky3-ky4)/ky");
  c.within(r.mirror_acceptance_margin(), 0.054, 0.10, "acceptance margin");
}

void flight_time_consistency(Criterion& c) {
  const auto rc = paper();
  const auto r = run_cow_loop(rc.cow);
  // T = l m / (hbar k cos theta_B), evaluated independently in long double
  using L = long double;
  const L k = 2 * std::numbers::pi_v<L> / rc.cow.lambda;
  const L theta_B = std::asin(L(rc.cow.lambda) / (2 * L(rc.cow.slab.d())));
  const L T_oracle = L(rc.cow.span_x) * L(rc.cow.species.mass) / (L(rc.cow.constants.hbar) * k * std::cos(theta_B));
  c.within(r.T, static_cast<double>(T_oracle), 0.03, "T vs oracle");
  c.within(r.T, 2.77e-5, 0.03, "T vs 2.77e-5 s");
}

void first_order_equivalence(Criterion& c) {
  auto cfg = paper().cow;
  cfg.mode = EngineMode::first_order;
  const auto r = run_cow_loop(cfg);
  c.check(r.path_upper.k_final == r.path_lower.k_final, "first_order COW closure port differs");
  c.check(r.path_upper.k_final_other == r.path_lower.k_final_other, "first_order COW second port differs");
  c.check(r.closure_rel == 0.0, "first_order closure_rel != 0");

  std::mt19937_64 rng(2013);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  const auto atom0 = *paper().atom;
  int open = 0;
  for (int i = 0; i < 2000; ++i) {
    auto a = atom0;
    a.k_transfer *= u(rng);
    a.span_time *= u(rng);
    a.lambda_dB *= u(rng);
    a.constants.g *= u(rng);
    a.initial_ky = (u(rng) - 5.0) * 1e6;
    const auto ar = run_atom_loop(a);
    if (!(ar.path_upper.k_final == ar.path_lower.k_final && ar.closure_rel == 0.0 && ar.defocus_rel_upper == 0.0))
      ++open;
  }
  c.check(open == 0, std::to_string(open) + " atom loops failed to close");
  c.notes.push_back("2000 randomized atom loops closed exactly");
}

void oracle_equivalence(Criterion& c) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> d_dist(1.0e-10, 4.0e-10), theta_dist(0.1, 1.3), dev_dist(-1e-5, 1e-5);
  std::bernoulli_distribution up(0.5);
  double worst_order = 0.0, worst_energy = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const auto slab = CrystalSlab::from_spacing(d_dist(rng), 5e-6);
    const double kx = slab.half_H() / std::tan(theta_dist(rng));
    const double sign = up(rng) ? 1.0 : -1.0;
    const WaveVector2 k{kx, sign * slab.half_H() * (1.0 + dev_dist(rng))};
    const double e = bragg_excess(k, slab);
    if (e != 0.0) {
      const double exact = delta_kx_exact(kx, e, slab.H());
      const double first = delta_kx_first_order(kx, e, slab.H());
      const double bound = 2.0 * std::abs(e) * slab.H() / (kx * kx);
      worst_order = std::max(worst_order, std::abs(first - exact) / std::abs(exact) / bound);
    }
    const auto out = laue_reflect(k, slab);
    worst_energy = std::max(worst_energy, std::abs(out.reflected.magnitude() - k.magnitude()) / k.magnitude());
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "max (first-order error / bound) = %.3f, max energy error = %.2e", worst_order,
                worst_energy);
  c.notes.emplace_back(buf);
  c.check(worst_order < 1.0, "first-order error exceeds 2|dky|H/kx^2");
  c.check(worst_energy < 1e-12, "laue_reflect energy error >= 1e-12");
}

void trivial_limits(Criterion& c) {
  for (auto mode : {EngineMode::exact, EngineMode::first_order}) {
    auto cfg = with_g(paper().cow, 0.0);
    cfg.mode = mode;
    const auto r = run_cow_loop(cfg);
    const auto diag = cow_diagnostics(cfg, r);
    for (const auto& [name, v] : diag) {
      if (name == "theta_bragg_rad" || name.rfind("T_", 0) == 0) continue;
      c.check(v == 0.0, "g = 0 leaves " + name + " nonzero (" + std::string(to_string(mode)) + ")");
    }
    c.check(r.path_upper.k_final == r.path_lower.k_final, "g = 0 paths differ");
  }
  auto atom = *paper().atom;
  atom.constants.g = 0.0;
  const auto ar = run_atom_loop(atom);
  c.check(ar.dky_per_leg_rel == 0.0 && ar.mean_drop == 0.0 && ar.closure_rel == 0.0, "g = 0 atom loop not trivial");

  const auto slab = paper().cow.slab;
  const WaveVector2 bragg{2.8e10, -slab.half_H()};
  const auto out = laue_reflect(bragg, slab);
  c.check(out.specular, "dky = 0 not specular");
  c.check(out.delta_kx == 0.0, "dky = 0 gives delta_kx != 0");
  c.check(delta_kx_exact(2.8e10, 0.0, slab.H()) == 0.0, "delta_kx_exact(0) != 0");
  c.check(delta_kx_first_order(2.8e10, 0.0, slab.H()) == 0.0, "delta_kx_first_order(0) != 0");

  const WaveVector2 k{1e10, -123456.0};
  c.check(laser_mirror_reflect(k, 0.0, +1) == k && laser_mirror_reflect(k, 0.0, -1) == k,
          "k_transfer = 0 laser mirror is not the identity");
}

void scaling(Criterion& c) {
  const auto base = paper().cow;
  std::vector<double> gs, ls, dky_g, dky_l;
  for (int i = 1; i <= 10; ++i) {
    gs.push_back(1.0 * i);
    dky_g.push_back(run_cow_loop(with_g(base, gs.back())).dky_per_leg_rel);
    ls.push_back(0.01 * i);
    dky_l.push_back(run_cow_loop(with_span(base, ls.back())).dky_per_leg_rel);
  }
  const double rg = linear_fit_residual(gs, dky_g);
  const double rl = linear_fit_residual(ls, dky_l);
  const double ratio = run_cow_loop(base).closure_rel / run_cow_loop(with_g(base, base.constants.g / 2)).closure_rel;
  char buf[200];
  std::snprintf(buf, sizeof buf, "fit residual g: %.2e, l: %.2e; closure(g)/closure(g/2) = %.6f", rg, rl, ratio);
  c.notes.emplace_back(buf);
  c.check(rg < 1e-10, "dky_per_leg_rel not linear in g");
  c.check(rl < 1e-10, "dky_per_leg_rel not linear in l");
  c.check(std::abs(ratio - 4.0) <= 1e-3, "closure_rel not quadratic in g");
}

void determinism(Criterion& c) {
  const auto dir = fs::temp_directory_path() / ("cowkin_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const ConfigSource src{std::nullopt, "paper-2013"};
  std::ostringstream sink, err;
  auto twice = [&](const std::string& label, const std::function<void(const fs::path&)>& produce) {
    produce(dir / (label + ".1"));
    produce(dir / (label + ".2"));
    const auto a = slurp(dir / (label + ".1"));
    c.check(!a.empty(), label + " produced no output");
    c.check(a == slurp(dir / (label + ".2")), label + " output differs between runs");
  };
  twice("paper-table.json", [&](const fs::path& p) { cmd_paper_table(src, true, p, sink, err); });
  twice("paper-table.txt", [&](const fs::path& p) {
    std::ofstream out(p, std::ios::binary);
    cmd_paper_table(src, false, std::nullopt, out, err);
  });
  twice("sweep.csv", [&](const fs::path& p) { cmd_sweep(src, "physics.g", 0.0, 9.81, 5, p, err); });
  twice("compare.json", [&](const fs::path& p) {
    std::ofstream out(p, std::ios::binary);
    cmd_compare(src, true, out, err);
  });
  fs::remove_all(dir);
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Criterion&)>>> criteria = {
      {"1 paper-number reproduction", paper_numbers},
      {"2 flight-time consistency", flight_time_consistency},
      {"3 first-order equivalence", first_order_equivalence},
      {"4 oracle equivalence", oracle_equivalence},
      {"5 trivial limits", trivial_limits},
      {"6 scaling properties", scaling},
      {"7 determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, body] : criteria) {
    Criterion c{name, {}, {}};
    try {
      body(c);
    } catch (const std::exception& e) {
      c.failures.push_back(std::string("exception: ") + e.what());
    }
    std::printf("[%s] %s\n", c.failures.empty() ? "PASS" : "FAIL", name.c_str());
    for (const auto& n : c.notes) std::printf("       %s\n", n.c_str());
    for (const auto& f : c.failures) std::printf("   !!  %s\n", f.c_str());
    failed += !c.failures.empty();
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
