#pragma once

#include "gpm/core.hpp"
#include "gpm/filters.hpp"

namespace gpm::serial {

// Single-threaded twins of the parallel kernels. They call the same scalar
// code in the same per-element order, so results must match the parallel path
// bit for bit; tests assert that and the benchmark tool times both.

RealImage build_filter_grid(const FilterSpec& spec, double alpha_m2, double pixel_m,
                            int n1, int n2);
RealImage laplacian_5pt(const RealImage& image);
ComplexField transmission(const RealImage& thickness, const PhysicalConfig& cfg);
RealImage upsample_replicate(const RealImage& image, int factor);
RealImage rebin_average(const RealImage& image, int factor);
RealImage apply_spectral_grid(const RealImage& image, const RealImage& grid);

}  // namespace gpm::serial
