#pragma once

#include "gpm/core.hpp"

namespace gpm {

/// Identifier of the generator behind random_binary; goes into run metadata so
/// outputs stay reproducible across builds and machines.
inline constexpr const char* kPhantomRngAlgorithm = "splitmix64-counter";

/// Seeded binary thickness pattern: independent block_px x block_px cells set
/// to thickness_m with probability fill_fraction, else 0. Bit-for-bit
/// deterministic in (seed, dims, fill, block).
struct BinaryPhantomSpec {
  int n1 = 0;
  int n2 = 0;
  double pixel_m = 0.0;
  double thickness_m = 0.0;
  double fill_fraction = 0.5;  // in [0, 1]
  int block_px = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

RealImage random_binary(const BinaryPhantomSpec& spec);

/// Two plateaus split at column edge_col: value low for m < edge_col, high after.
RealImage step_edge(int n1, int n2, double pixel_m, int edge_col, double low, double high);

/// amplitude * exp(-r^2/(2*sigma_px^2)) centered on pixel (n1/2, n2/2); the
/// peak sample equals amplitude exactly.
RealImage gaussian_bump(int n1, int n2, double pixel_m, double sigma_px, double amplitude);

/// amplitude inside radius_px of the center pixel, 0 outside.
RealImage disk(int n1, int n2, double pixel_m, double radius_px, double amplitude);

}  // namespace gpm
