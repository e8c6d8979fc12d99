#pragma once

// Symmetric Laue-case kinematics. Inside the crystal only the component normal
// to the lattice planes (y) can change, and only by a multiple of H; the
// reflected kx then follows from |k_H| = |k|.
//
// Near Bragg, kx^2 + ky^2 - k_Hy^2 is a 1e20-scale sum whose interesting part
// is ~1e14, so every kx update here is written in terms of the deviation from
// the Bragg value, which is exact in double precision for near-Bragg inputs.

#include <cmath>

#include "cowkin/core.hpp"

namespace cowkin {

inline constexpr double kSpecularTolerance = 1e-9;  // relative to H
inline constexpr double kFirstOrderLimit = 1e-3;

struct LaueOutcome {
  WaveVector2 reflected;
  WaveVector2 transmitted;
  double delta_kx = 0.0;     // k_Hx - kx
  double delta_ky_in = 0.0;  // ky - ky_Bragg, signed
  bool specular = false;
};

// Order of the reflection that reverses vertical propagation: +1 for a descending beam.
inline int reflection_order(const WaveVector2& k) { return k.ky < 0.0 ? +1 : -1; }

// Excess of |ky| over H/2, i.e. the deviation measured along the incident Bragg
// component. Positive excess means the reflected beam gains horizontal momentum.
inline double bragg_excess(const WaveVector2& k, const CrystalSlab& slab) {
  const int s = reflection_order(k);
  return -s * (k.ky + s * slab.half_H());
}

// Exact longitudinal change kx * (sqrt(1 + 2 e H / kx^2) - 1), rationalized.
// `excess` is the Bragg excess of the incident beam (see bragg_excess).
inline double delta_kx_exact(double kx, double excess, double H) {
  const double shift = 2.0 * excess * H;
  const double radicand = kx * kx + shift;
  if (!(radicand > 0.0))
    throw Error(ErrorKind::EvanescentBranch, "delta_kx_exact", "no propagating reflected wave");
  return shift / (std::sqrt(radicand) + kx) + 0.0;  // no -0 at the Bragg point
}

inline double delta_kx_first_order(double kx, double excess, double H) {
  if (!(std::abs(2.0 * excess * H / (kx * kx)) < kFirstOrderLimit))
    throw Error(ErrorKind::OutOfRegime, "delta_kx_first_order", "|2 dky H / kx^2| >= 1e-3");
  return excess * H / kx;
}

inline LaueOutcome laue_reflect(const WaveVector2& k, const CrystalSlab& slab) {
  if (!(k.kx > 0.0))
    throw Error(ErrorKind::InvalidInput, "laue_reflect", "beam must propagate forward (kx > 0)");
  if (k.ky == 0.0)
    throw Error(ErrorKind::DegenerateInput, "laue_reflect", "ky = 0 selects no reflection order");

  const int s = reflection_order(k);
  const double H = slab.H();
  const double k_hy = k.ky + s * H;

  // ky^2 - k_Hy^2 = (ky - k_Hy)(ky + k_Hy) = (-s H)(2 ky + s H); the second
  // factor is an exact subtraction near Bragg.
  const double twice_deviation = 2.0 * k.ky + s * H;
  const double shift = (-s * H) * twice_deviation;
  const double radicand = k.kx * k.kx + shift;
  if (!(radicand > 0.0))
    throw Error(ErrorKind::EvanescentBranch, "laue_reflect", "k^2 <= k_Hy^2");
  const double k_hx = std::sqrt(radicand);

  LaueOutcome out;
  out.reflected = {k_hx, k_hy};
  out.transmitted = k;
  out.delta_kx = shift / (k_hx + k.kx) + 0.0;  // no -0 at the Bragg point
  out.delta_ky_in = 0.5 * twice_deviation;
  out.specular = std::abs(out.delta_ky_in) <= kSpecularTolerance * H;
  return out;
}

// First-order angular deviation model: theta_H = theta_B - delta_theta.
inline double reflect_angle_deviation(double theta_B, double delta_theta) {
  if (!(std::abs(delta_theta) < kFirstOrderLimit))
    throw Error(ErrorKind::OutOfRegime, "reflect_angle_deviation", "|delta_theta| >= 1e-3 rad");
  return theta_B - delta_theta;
}

// |dky / ky| in units of the crystal's relative acceptance width.
inline double acceptance_margin(double delta_ky, double ky, const CrystalSlab& slab) {
  if (ky == 0.0)
    throw Error(ErrorKind::DegenerateInput, "acceptance_margin", "ky = 0");
  return std::abs(delta_ky / ky) / slab.sigma_ky_rel();
}

}  // namespace cowkin
