#pragma once

#include "gpm/core.hpp"

namespace gpm {

/// Forward-simulation controls. oversample_factor > 1 propagates on a finer
/// replica of the thickness map and block-averages the intensity back down.
struct PropagationPlan {
  double distance_m = 0.0;
  int oversample_factor = 2;

  void validate() const;
};

/// Exit field of a pure-phase-plus-absorption object under a uniform incident
/// plane wave: sqrt(I0) * exp(-mu*T/2) * exp(-i*k*delta*T).
ComplexField transmission(const RealImage& thickness, const PhysicalConfig& cfg);

/// Paraxial free-space propagation: spectrum multiplied by
/// exp(-i*distance*(kx^2+ky^2)/(2k)). Unitary; distance 0 is the identity up
/// to transform round-off.
ComplexField propagate(const ComplexField& field, double distance_m, double wavelength_m);

/// |field|^2.
RealImage intensity(const ComplexField& field);

/// Pixel replication to a factor-times finer grid (pixel_m shrinks).
RealImage upsample_replicate(const RealImage& image, int factor);

/// Block average over factor x factor cells (pixel_m grows); dims must divide.
RealImage rebin_average(const RealImage& image, int factor);

/// thickness -> upsample -> transmission -> propagate -> intensity -> rebin.
/// Output dims equal input dims; output pixel equals the input pixel.
RealImage simulate_pbi(const RealImage& thickness, const PhysicalConfig& cfg,
                       const PropagationPlan& plan);

}  // namespace gpm
