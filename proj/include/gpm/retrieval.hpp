#pragma once

#include "gpm/core.hpp"
#include "gpm/filters.hpp"

#include <cstdint>
#include <optional>

namespace gpm {

/// Controls for the filtered-logarithm thickness reconstruction.
struct RetrievalOptions {
  FilterSpec filter;

  /// Position-dependent flat field; when absent the scalar flat is used.
  std::optional<RealImage> flat;
  /// Scalar flat; 0 means "use cfg.incident_intensity".
  double flat_scalar = 0.0;

  /// Width of optional symmetric (mirror) padding, in pixels per side.
  int pad_px = 0;

  /// Clamp threshold for the filtered image before the logarithm, relative to
  /// its mean. Retrieval fails if more than 1% of pixels need clamping.
  double log_floor_rel = 1e-8;
};

struct RetrievalResult {
  RealImage thickness;
  std::int64_t clamped_pixels = 0;
};

inline constexpr double kMaxClampedFraction = 0.01;

/// Flat-field normalize, DFT, multiply by the selected filter grid, inverse
/// DFT, clamp, -log/mu. Image samples must be >= 0; image pixel pitch must
/// match cfg.pixel_m.
RetrievalResult retrieve_thickness(const RealImage& image, const PhysicalConfig& cfg,
                                   const RetrievalOptions& opts);

/// image / flat, elementwise; every flat sample must be > 0.
RealImage flat_field_correct(const RealImage& image, const RealImage& flat);
RealImage flat_field_correct(const RealImage& image, double flat);

/// t_pm + s*(t_gpm - t_pm). s = 0 and s = 1 return exact copies of the inputs.
RealImage unsharp_combination(const RealImage& t_pm, const RealImage& t_gpm, double s);

}  // namespace gpm
