#pragma once

#include "cowkin/core.hpp"

namespace cowkin {

// One free-fall segment between two slabs (or two laser pulses).
struct FlightLeg {
  WaveVector2 k_in;
  WaveVector2 k_out;
  double span_x = 0.0;       // m, 0 for time-parameterized legs
  double time = 0.0;         // s
  double dky_gravity = 0.0;  // 1/m, <= 0
  double drop = 0.0;         // m, vertical displacement (diagnostic only)
};

// T = l m / (hbar kx)
inline double flight_time(double kx, double span_x, const ParticleSpecies& species,
                          const PhysicalConstants& constants) {
  return span_x * species.mass / (constants.hbar * kx);
}

// hbar dky = -m g T
inline double gravity_kick(double time, const ParticleSpecies& species,
                           const PhysicalConstants& constants) {
  return -(species.mass * constants.g * time) / constants.hbar;
}

inline FlightLeg propagate_for(const WaveVector2& k, double time, const ParticleSpecies& species,
                               const PhysicalConstants& constants) {
  if (!(time > 0.0))
    throw Error(ErrorKind::InvalidInput, "propagate_for", "flight time must be positive");
  FlightLeg leg;
  leg.k_in = k;
  leg.time = time;
  leg.dky_gravity = gravity_kick(time, species, constants);
  leg.k_out = {k.kx, k.ky + leg.dky_gravity};
  const double vy = constants.hbar * k.ky / species.mass;
  leg.drop = vy * time - 0.5 * constants.g * time * time;
  return leg;
}

// Straight-leg approximation: the time uses the entry kx.
inline FlightLeg propagate_leg(const WaveVector2& k, double span_x, const ParticleSpecies& species,
                               const PhysicalConstants& constants) {
  if (!(k.kx > 0.0))
    throw Error(ErrorKind::InvalidInput, "propagate_leg", "beam must propagate forward (kx > 0)");
  if (!(span_x > 0.0))
    throw Error(ErrorKind::InvalidInput, "propagate_leg", "span must be positive");
  FlightLeg leg = propagate_for(k, flight_time(k.kx, span_x, species, constants), species, constants);
  leg.span_x = span_x;
  return leg;
}

}  // namespace cowkin
