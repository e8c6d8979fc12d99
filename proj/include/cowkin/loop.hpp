#pragma once

// Interferometer loops: the three-slab COW neutron loop and its three-pulse
// atom analogue.
//
// Path labels: "upper" is the beam reflected at the splitter (moves upward
// first), "lower" the transmitted one. The closure port is the one fed by the
// upper path's analyzer-reflected beam and the lower path's transmitted beam.
//
// Beams are carried as (order, deviation, kx_ref + dkx) rather than raw
// components: ky = order * q/2 + deviation, where q is H for slabs and
// k_transfer for laser pulses. Kicks then accumulate at their own scale, and
// two paths that saw the same kicks carry bit-identical wave vectors.

#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cowkin/core.hpp"
#include "cowkin/flight.hpp"
#include "cowkin/laue.hpp"

namespace cowkin {

enum class EngineMode { first_order, exact };

inline std::string_view to_string(EngineMode mode) {
  return mode == EngineMode::exact ? "exact" : "first_order";
}

enum class SlabRole { splitter, mirror, analyzer };
enum class Branch { reflected, transmitted };

inline std::string_view to_string(SlabRole role) {
  switch (role) {
    case SlabRole::splitter: return "splitter";
    case SlabRole::mirror: return "mirror";
    case SlabRole::analyzer: return "analyzer";
  }
  return "?";
}
inline std::string_view to_string(Branch b) {
  return b == Branch::reflected ? "reflected" : "transmitted";
}

struct SlabEvent {
  SlabRole role = SlabRole::splitter;
  Branch branch = Branch::transmitted;
  WaveVector2 k_in;
  WaveVector2 k_out;
  double deviation = 0.0;  // ky_in - Bragg (or resonant) value
  double delta_kx = 0.0;
  double acceptance_margin = 0.0;  // 0 for laser pulses
};

using TraceEvent = std::variant<SlabEvent, FlightLeg>;

struct PathTrace {
  std::vector<TraceEvent> events;  // slab, leg, slab, leg, slab
  WaveVector2 k_final;             // beam entering the closure port
  WaveVector2 k_final_other;       // beam entering the second port
  double total_time = 0.0;
  std::array<FlightLeg, 2> legs;
  double drop = 0.0;
};

struct LoopResult {
  PathTrace path_upper;
  PathTrace path_lower;
  double T = 0.0;  // reference leg time (first leg)
  double T_upper = 0.0;  // second-leg time on the upper path
  double T_lower = 0.0;
  double closure_rel = 0.0;
  double closure_rel_other = 0.0;
  double defocus_rel_upper = 0.0;
  double defocus_rel_lower = 0.0;
  double dky_per_leg_rel = 0.0;
  double dkx_rel_upper = 0.0;  // signed, at the mirror
  double dkx_rel_lower = 0.0;
  std::vector<double> acceptance_margins;  // splitter, mirror up/low, analyzer up/low
  double time_mismatch = 0.0;              // slowed-path minus sped-up-path second-leg time
  double mean_drop = 0.0;

  double dkx_rel() const { return std::max(std::abs(dkx_rel_upper), std::abs(dkx_rel_lower)); }
  double mirror_acceptance_margin() const {
    return acceptance_margins.size() > 2 ? std::max(acceptance_margins[1], acceptance_margins[2]) : 0.0;
  }
};

struct CowConfig {
  double lambda = 0.0;  // m
  CrystalSlab slab = CrystalSlab::from_spacing(1.0, 1.0);
  double span_x = 0.0;  // m
  ParticleSpecies species = ParticleSpecies::neutron();
  PhysicalConstants constants;
  EngineMode mode = EngineMode::exact;
  double theta = 0.0;  // incidence angle; 0 selects the Bragg angle

  void validate() const {
    constants.validate();
    if (!(lambda > 0.0) || !std::isfinite(lambda))
      throw Error(ErrorKind::ConfigInvalid, "CowConfig", "lambda must be positive");
    if (!(span_x > 0.0) || !std::isfinite(span_x))
      throw Error(ErrorKind::ConfigInvalid, "CowConfig", "span must be positive");
    if (!(species.mass > 0.0))
      throw Error(ErrorKind::ConfigInvalid, "CowConfig", "mass must be positive");
    if (theta < 0.0 || !std::isfinite(theta))
      throw Error(ErrorKind::ConfigInvalid, "CowConfig", "theta must be non-negative");
  }
};

struct AtomConfig {
  double lambda_dB = 0.0;   // m, horizontal de Broglie wavelength
  double k_transfer = 0.0;  // 1/m per mirror pulse
  double span_time = 0.0;   // s, pulse separation
  ParticleSpecies species = ParticleSpecies::cesium133();
  PhysicalConstants constants;
  double initial_ky = 0.0;  // 1/m

  void validate() const {
    constants.validate();
    if (!(lambda_dB > 0.0) || !std::isfinite(lambda_dB))
      throw Error(ErrorKind::ConfigInvalid, "AtomConfig", "lambda_dB must be positive");
    if (!(k_transfer > 0.0) || !std::isfinite(k_transfer))
      throw Error(ErrorKind::ConfigInvalid, "AtomConfig", "k_transfer must be positive");
    if (!(span_time > 0.0) || !std::isfinite(span_time))
      throw Error(ErrorKind::ConfigInvalid, "AtomConfig", "span_time must be positive");
    if (!(species.mass > 0.0))
      throw Error(ErrorKind::ConfigInvalid, "AtomConfig", "mass must be positive");
    if (!std::isfinite(initial_ky))
      throw Error(ErrorKind::ConfigInvalid, "AtomConfig", "initial_ky must be finite");
  }
};

// Laser pulse: momentum transferred along the laser only; energy not conserved.
inline WaveVector2 laser_mirror_reflect(const WaveVector2& k, double k_transfer, int direction) {
  return {k.kx, k.ky + direction * k_transfer};
}

namespace detail {

struct TrackedBeam {
  double base = 0.0;       // ky offset common to both paths
  double half_q = 0.0;     // H/2 or k_transfer/2
  int order = 0;           // ky = base + order * half_q + deviation
  double deviation = 0.0;  // accumulated gravity (and incident) deviation
  double kx_ref = 0.0;
  double dkx = 0.0;

  double kx() const { return kx_ref + dkx; }
  WaveVector2 k() const { return {kx(), base + order * half_q + deviation}; }
};

inline void push_leg(PathTrace& path, std::size_t index, TrackedBeam& beam, double time,
                     double span_x, const ParticleSpecies& species, const PhysicalConstants& constants) {
  FlightLeg leg = propagate_for(beam.k(), time, species, constants);
  leg.span_x = span_x;
  beam.deviation += leg.dky_gravity;
  leg.k_out = beam.k();
  path.legs[index] = leg;
  path.total_time += leg.time;
  path.drop += leg.drop;
  path.events.emplace_back(leg);
}

// Laue slab interaction on a tracked beam. Reflection flips the Bragg order and
// leaves the deviation alone; kx absorbs the energy balance.
inline SlabEvent slab_interact(TrackedBeam& beam, SlabRole role, Branch branch,
                               const CrystalSlab& slab, EngineMode mode) {
  SlabEvent ev;
  ev.role = role;
  ev.branch = branch;
  ev.k_in = beam.k();
  ev.deviation = beam.deviation;
  ev.acceptance_margin = acceptance_margin(beam.deviation, ev.k_in.ky, slab);
  if (branch == Branch::reflected) {
    const double excess = beam.order * beam.deviation;
    ev.delta_kx = mode == EngineMode::exact ? delta_kx_exact(beam.kx(), excess, slab.H())
                                            : delta_kx_first_order(beam.kx_ref, excess, slab.H());
    beam.dkx += ev.delta_kx;
    beam.order = -beam.order;
  }
  ev.k_out = beam.k();
  if (!(ev.k_out.kx > 0.0))
    throw Error(ErrorKind::EvanescentBranch, "run_cow_loop", "beam lost forward propagation");
  return ev;
}

inline SlabEvent laser_pulse(TrackedBeam& beam, SlabRole role, Branch branch, int orders) {
  SlabEvent ev;
  ev.role = role;
  ev.branch = branch;
  ev.k_in = beam.k();
  ev.deviation = beam.deviation;
  if (branch == Branch::reflected) beam.order += orders;
  ev.k_out = beam.k();
  return ev;
}

}  // namespace detail

inline LoopResult run_cow_loop(const CowConfig& config) {
  config.validate();
  const CrystalSlab& slab = config.slab;
  const double k_mag = kTwoPi / config.lambda;
  const double theta_B = bragg_angle(k_mag, slab);
  const double theta = config.theta > 0.0 ? config.theta : theta_B;
  const WaveVector2 k0 = wavevector_from_wavelength(config.lambda, theta);

  detail::TrackedBeam incident;
  incident.half_q = slab.half_H();
  incident.order = -1;  // descending
  // Bragg incidence is exact by construction; rounding in sin(asin(x)) is not a deviation.
  incident.deviation = config.theta > 0.0 ? k0.ky + slab.half_H() : 0.0;
  incident.kx_ref = k0.kx;

  const double T = flight_time(k0.kx, config.span_x, config.species, config.constants);
  auto leg_time = [&](const detail::TrackedBeam& b) {
    return config.mode == EngineMode::exact
               ? flight_time(b.kx(), config.span_x, config.species, config.constants)
               : T;
  };

  LoopResult result;
  result.T = T;
  const double ky_norm = std::abs(k0.ky);

  auto trace = [&](Branch first, PathTrace& path, double& dkx_rel, double& T2, double& defocus,
                   std::vector<double>& margins) {
    detail::TrackedBeam beam = incident;
    path.events.emplace_back(detail::slab_interact(beam, SlabRole::splitter, first, slab, config.mode));
    detail::push_leg(path, 0, beam, leg_time(beam), config.span_x, config.species, config.constants);
    auto mirror = detail::slab_interact(beam, SlabRole::mirror, Branch::reflected, slab, config.mode);
    margins.push_back(mirror.acceptance_margin);
    dkx_rel = mirror.delta_kx / k0.kx;
    path.events.emplace_back(mirror);
    T2 = leg_time(beam);
    // (T2 - T)/T = -dkx/kx without the cancellation in T2 - T
    defocus = config.mode == EngineMode::exact ? 0.0 - beam.dkx / beam.kx() : 0.0;  // 0 - x keeps g = 0 at +0
    detail::push_leg(path, 1, beam, T2, config.span_x, config.species, config.constants);

    detail::TrackedBeam other = beam;
    const Branch closure_branch = first == Branch::reflected ? Branch::reflected : Branch::transmitted;
    const Branch other_branch = closure_branch == Branch::reflected ? Branch::transmitted : Branch::reflected;
    auto analyzer = detail::slab_interact(beam, SlabRole::analyzer, closure_branch, slab, config.mode);
    margins.push_back(analyzer.acceptance_margin);
    path.events.emplace_back(analyzer);
    detail::slab_interact(other, SlabRole::analyzer, other_branch, slab, config.mode);
    path.k_final = beam.k();
    path.k_final_other = other.k();
    return std::pair{beam, other};
  };

  std::vector<double> up_margins, low_margins;
  auto [up_a, up_b] = trace(Branch::reflected, result.path_upper, result.dkx_rel_upper,
                            result.T_upper, result.defocus_rel_upper, up_margins);
  auto [low_a, low_b] = trace(Branch::transmitted, result.path_lower, result.dkx_rel_lower,
                              result.T_lower, result.defocus_rel_lower, low_margins);

  result.acceptance_margins = {std::get<SlabEvent>(result.path_upper.events.front()).acceptance_margin,
                               up_margins[0], low_margins[0], up_margins[1], low_margins[1]};
  result.dky_per_leg_rel = std::abs(result.path_upper.legs[0].dky_gravity) / ky_norm;
  // Slowed path first.
  result.time_mismatch = result.dkx_rel_upper <= result.dkx_rel_lower ? result.T_upper - result.T_lower
                                                                      : result.T_lower - result.T_upper;
  result.closure_rel = std::abs(up_a.deviation - low_a.deviation) / ky_norm;
  result.closure_rel_other = std::abs(up_b.deviation - low_b.deviation) / ky_norm;
  result.mean_drop = 0.5 * (result.path_upper.drop + result.path_lower.drop);
  return result;
}

// Three-pulse atom loop: splitter +-k/2, mirror -+k, recombiner +-k on the
// reflected branch. Pulses sit at fixed times, so horizontal momentum and leg
// durations are never altered.
inline LoopResult run_atom_loop(const AtomConfig& config) {
  config.validate();
  const auto& species = config.species;
  const auto& constants = config.constants;

  detail::TrackedBeam incident;
  incident.base = config.initial_ky;
  incident.half_q = 0.5 * config.k_transfer;
  incident.order = 0;
  incident.kx_ref = kTwoPi / config.lambda_dB;

  const double T = config.span_time;
  LoopResult result;
  result.T = result.T_upper = result.T_lower = T;

  auto trace = [&](int dir, PathTrace& path) {
    detail::TrackedBeam beam = incident;
    path.events.emplace_back(detail::laser_pulse(beam, SlabRole::splitter, Branch::reflected, dir));
    detail::push_leg(path, 0, beam, T, 0.0, species, constants);
    path.events.emplace_back(detail::laser_pulse(beam, SlabRole::mirror, Branch::reflected, -2 * dir));
    detail::push_leg(path, 1, beam, T, 0.0, species, constants);
    detail::TrackedBeam other = beam;
    // Closure port: upper beam reflected back up, lower beam left alone.
    const Branch closure_branch = dir > 0 ? Branch::reflected : Branch::transmitted;
    const Branch other_branch = dir > 0 ? Branch::transmitted : Branch::reflected;
    path.events.emplace_back(detail::laser_pulse(beam, SlabRole::analyzer, closure_branch, 2 * dir));
    detail::laser_pulse(other, SlabRole::analyzer, other_branch, 2 * dir);
    path.k_final = beam.k();
    path.k_final_other = other.k();
    return std::pair{beam, other};
  };

  auto [up_a, up_b] = trace(+1, result.path_upper);
  auto [low_a, low_b] = trace(-1, result.path_lower);

  const double ky_norm = incident.half_q;
  result.dky_per_leg_rel = std::abs(result.path_upper.legs[0].dky_gravity) / ky_norm;
  result.closure_rel = std::abs((up_a.k().ky - low_a.k().ky)) / ky_norm;
  result.closure_rel_other = std::abs((up_b.k().ky - low_b.k().ky)) / ky_norm;
  result.mean_drop = 0.5 * (result.path_upper.drop + result.path_lower.drop);
  return result;
}

struct ComparisonReport {
  LoopResult neutron;
  LoopResult neutron_first_order;
  LoopResult atom;
  bool first_order_equivalent = false;

  struct Residuals {
    double dkx_rel = 0.0;
    double defocus_rel_upper = 0.0;
    double defocus_rel_lower = 0.0;
    double closure_rel = 0.0;
  };
  static Residuals residuals_of(const LoopResult& r) {
    return {r.dkx_rel(), r.defocus_rel_upper, r.defocus_rel_lower, r.closure_rel};
  }
  Residuals neutron_residuals() const { return residuals_of(neutron); }
  Residuals atom_residuals() const { return residuals_of(atom); }
};

inline ComparisonReport compare_modes(const CowConfig& cow, const AtomConfig& atom) {
  ComparisonReport report;
  report.neutron = run_cow_loop(cow);
  CowConfig lowest = cow;
  lowest.mode = EngineMode::first_order;
  report.neutron_first_order = cow.mode == EngineMode::first_order ? report.neutron : run_cow_loop(lowest);
  report.atom = run_atom_loop(atom);
  const auto& n = report.neutron_first_order;
  report.first_order_equivalent = n.path_upper.k_final == n.path_lower.k_final &&
                                  n.path_upper.k_final_other == n.path_lower.k_final_other &&
                                  report.atom.path_upper.k_final == report.atom.path_lower.k_final &&
                                  report.atom.path_upper.k_final_other == report.atom.path_lower.k_final_other;
  return report;
}

}  // namespace cowkin
