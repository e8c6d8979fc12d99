#pragma once

// Geometry conventions shared by every module:
//   x  horizontal, along the interferometer axis (normal to the slab surfaces)
//   y  vertical, normal to the horizontal lattice planes; gravity acts along -y
// All quantities are SI. Wave vectors are in 1/m.

#include <cmath>
#include <numbers>
#include <string>

#include "cowkin/error.hpp"

namespace cowkin {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct WaveVector2 {
  double kx = 0.0;
  double ky = 0.0;

  double magnitude() const { return std::hypot(kx, ky); }
  // Modulus of the angle between the beam and the lattice planes.
  double theta() const { return std::atan(std::abs(ky) / kx); }
  double wavelength() const { return kTwoPi / magnitude(); }

  friend bool operator==(const WaveVector2&, const WaveVector2&) = default;
};

// Symmetric Laue crystal. H is always derived from d so that H == 2*pi/d holds bit-for-bit.
class CrystalSlab {
 public:
  static CrystalSlab from_spacing(double d, double sigma_ky_rel) {
    if (!(d > 0.0) || !std::isfinite(d))
      throw Error(ErrorKind::InvalidInput, "CrystalSlab", "lattice spacing must be positive");
    if (!(sigma_ky_rel > 0.0) || !std::isfinite(sigma_ky_rel))
      throw Error(ErrorKind::InvalidInput, "CrystalSlab", "acceptance width must be positive");
    return CrystalSlab(d, sigma_ky_rel);
  }

  double d() const { return d_; }
  double H() const { return H_; }
  double half_H() const { return 0.5 * H_; }
  double sigma_ky_rel() const { return sigma_; }

 private:
  CrystalSlab(double d, double sigma) : d_(d), H_(kTwoPi / d), sigma_(sigma) {}

  double d_;
  double H_;
  double sigma_;
};

enum class SpeciesKind { neutron, atom };

struct ParticleSpecies {
  double mass = 0.0;  // kg
  SpeciesKind kind = SpeciesKind::neutron;
  std::string label;

  static ParticleSpecies neutron() { return {1.67492749804e-27, SpeciesKind::neutron, "neutron"}; }
  static ParticleSpecies atom(double mass, std::string label) {
    if (!(mass > 0.0))
      throw Error(ErrorKind::InvalidInput, "ParticleSpecies", "mass must be positive");
    return {mass, SpeciesKind::atom, std::move(label)};
  }
  // 133Cs, the usual Kasevich-Chu species.
  static ParticleSpecies cesium133() { return atom(2.2069469541e-25, "Cs-133"); }
};

struct PhysicalConstants {
  double hbar = 1.054571817e-34;  // J s
  double g = 9.81;                // m/s^2, magnitude, along -y

  void validate() const {
    if (!(hbar > 0.0) || !std::isfinite(hbar))
      throw Error(ErrorKind::InvalidInput, "PhysicalConstants", "hbar must be positive");
    if (!(g >= 0.0) || !std::isfinite(g))
      throw Error(ErrorKind::InvalidInput, "PhysicalConstants", "g must be non-negative");
  }
};

struct BeamState {
  WaveVector2 k;
  double theta = 0.0;
  const ParticleSpecies* species = nullptr;

  static BeamState of(WaveVector2 k, const ParticleSpecies& species) {
    return {k, k.theta(), &species};
  }
};

// Bragg angle theta_B with sin(theta_B) = H / (2 |k|).
inline double bragg_angle(double k_magnitude, const CrystalSlab& slab) {
  if (!(k_magnitude >= slab.half_H()))
    throw Error(ErrorKind::BraggUnreachable, "bragg_angle",
                "|k| < H/2, wavelength too long for this reflection");
  return std::asin(slab.half_H() / k_magnitude);
}

// Incident beam descending onto the planes: (k cos theta, -k sin theta).
inline WaveVector2 wavevector_from_wavelength(double lambda, double theta) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw Error(ErrorKind::InvalidInput, "wavevector_from_wavelength", "wavelength must be positive");
  if (!(theta > 0.0 && theta < std::numbers::pi / 2))
    throw Error(ErrorKind::InvalidInput, "wavevector_from_wavelength", "theta outside (0, pi/2)");
  const double k = kTwoPi / lambda;
  return {k * std::cos(theta), -k * std::sin(theta)};
}

}  // namespace cowkin
