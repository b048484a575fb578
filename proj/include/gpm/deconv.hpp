#pragma once

#include "gpm/core.hpp"

#include <vector>

namespace gpm {

struct KernelWidth {
  double sigma_m = 0.0;  // sqrt of the radially averaged second central moment
  double fwhm_m = 0.0;   // from linear interpolation of the radial profile
};

/// Width measures of a nonnegative kernel with positive mass (normalized
/// internally). Throws ParameterError on zero/negative mass.
KernelWidth kernel_width(const RealImage& kernel, double pixel_m);

struct KernelEstimate {
  RealImage kernel;              // kernel_size x kernel_size, unit mass
  int iterations_run = 0;
  bool diverged = false;         // objective rose persistently; best iterate kept
  double sigma_m = 0.0;
  double fwhm_m = 0.0;
  std::vector<double> objective;  // Kullback-Leibler objective per iteration
};

/// Richardson-Lucy estimate of the blur kernel linking a sharp reference to a
/// blurred observation: observation ~ reference (x) kernel, cyclic. The
/// reference plays the role of the point-spread input and the kernel is the
/// unknown. Multiplicative updates from a uniform start keep the kernel
/// nonnegative; it is renormalized to unit mass every iteration. Both images
/// are mean-offset and shifted to strictly positive values first. If the
/// objective rises five iterations in a row the estimate stops and the best
/// iterate is returned with diverged = true.
KernelEstimate estimate_kernel_rl(const RealImage& reference, const RealImage& observation,
                                  int kernel_size = 15, int iterations = 100);

}  // namespace gpm
