#include "gpm/retrieval.hpp"

#include "gpm/fft.hpp"

#include <cmath>
#include <string>

namespace gpm {

namespace {

// Symmetric (edge-inclusive mirror) index: ..., 1, 0 | 0, 1, ..., N-1 | N-1, ...
int mirror_index(int i, int n) {
  const int period = 2 * n;
  int r = i % period;
  if (r < 0) r += period;
  return (r < n) ? r : period - 1 - r;
}

RealImage mirror_pad(const RealImage& image, int pad) {
  RealImage out =
      RealImage::zeros(image.width + 2 * pad, image.height + 2 * pad, image.pixel_m);
#pragma omp parallel for
  for (int n = 0; n < out.height; ++n) {
    const int src_n = mirror_index(n - pad, image.height);
    for (int m = 0; m < out.width; ++m)
      out.at(m, n) = image.at(mirror_index(m - pad, image.width), src_n);
  }
  return out;
}

RealImage crop_center(const RealImage& image, int pad, int width, int height) {
  RealImage out = RealImage::zeros(width, height, image.pixel_m);
#pragma omp parallel for
  for (int n = 0; n < height; ++n)
    for (int m = 0; m < width; ++m) out.at(m, n) = image.at(m + pad, n + pad);
  return out;
}

}  // namespace

RealImage flat_field_correct(const RealImage& image, const RealImage& flat) {
  image.validate("flat-field input");
  flat.validate("flat field");
  if (flat.width != image.width || flat.height != image.height)
    throw ParameterError("flat field dims must match the image");
  RealImage out = RealImage::zeros(image.width, image.height, image.pixel_m);
  for (int n = 0; n < image.height; ++n)
    for (int m = 0; m < image.width; ++m) {
      const double f = flat.at(m, n);
      if (!(f > 0.0))
        throw ParameterError("flat field must be > 0 everywhere; offending pixel (" +
                             std::to_string(m) + ", " + std::to_string(n) + ")");
      out.at(m, n) = image.at(m, n) / f;
    }
  return out;
}

RealImage flat_field_correct(const RealImage& image, double flat) {
  image.validate("flat-field input");
  if (!(std::isfinite(flat) && flat > 0.0))
    throw ParameterError("scalar flat must be > 0");
  RealImage out = RealImage::zeros(image.width, image.height, image.pixel_m);
  const std::size_t n = image.size();
#pragma omp parallel for
  for (long long i = 0; i < (long long)n; ++i) out.samples[i] = image.samples[i] / flat;
  return out;
}

RetrievalResult retrieve_thickness(const RealImage& image, const PhysicalConfig& cfg,
                                   const RetrievalOptions& opts) {
  image.validate("retrieval input");
  cfg.validate();
  opts.filter.validate();
  if (image.min() < 0.0) throw ParameterError("retrieval input must be >= 0");
  if (std::abs(image.pixel_m - cfg.pixel_m) > 1e-9 * cfg.pixel_m)
    throw ParameterError("image pixel pitch disagrees with cfg.pixel_m");
  if (opts.pad_px < 0) throw ParameterError("pad_px must be >= 0");
  if (!(std::isfinite(opts.flat_scalar) && opts.flat_scalar >= 0.0))
    throw ParameterError("flat_scalar must be >= 0 (0 selects cfg.incident_intensity)");
  if (!(std::isfinite(opts.log_floor_rel) && opts.log_floor_rel > 0.0))
    throw ParameterError("log_floor_rel must be > 0");

  // Flat-field correction happens before any padding.
  RealImage normalized =
      opts.flat ? flat_field_correct(image, *opts.flat)
                : flat_field_correct(image, opts.flat_scalar > 0.0 ? opts.flat_scalar
                                                                   : cfg.incident_intensity);

  const int pad = opts.pad_px;
  if (pad > 0) normalized = mirror_pad(normalized, pad);

  const RealImage grid =
      build_filter_grid(opts.filter, cfg, normalized.width, normalized.height);
  RealImage filtered = apply_spectral_grid(normalized, grid);
  if (pad > 0) filtered = crop_center(filtered, pad, image.width, image.height);

  const double floor = opts.log_floor_rel * filtered.mean();
  if (!(std::isfinite(floor) && floor > 0.0))
    throw NumericalError("retrieval: filtered image mean is not positive; cannot clamp");

  std::int64_t clamped = 0;
  for (double& v : filtered.samples)
    if (v < floor) {
      v = floor;
      ++clamped;
    }
  if (double(clamped) > kMaxClampedFraction * double(filtered.size()))
    throw NumericalError("retrieval: " + std::to_string(clamped) + " of " +
                         std::to_string(filtered.size()) +
                         " pixels fell below the log floor; input is inconsistent with a "
                         "low-pass forward model");

  const double inv_mu = 1.0 / cfg.mu();
  RetrievalResult result;
  result.clamped_pixels = clamped;
  result.thickness = RealImage::zeros(image.width, image.height, image.pixel_m);
  const std::size_t n = filtered.size();
#pragma omp parallel for
  for (long long i = 0; i < (long long)n; ++i)
    result.thickness.samples[i] = -std::log(filtered.samples[i]) * inv_mu;
  return result;
}

RealImage unsharp_combination(const RealImage& t_pm, const RealImage& t_gpm, double s) {
  t_pm.validate("unsharp input t_pm");
  t_gpm.validate("unsharp input t_gpm");
  if (t_pm.width != t_gpm.width || t_pm.height != t_gpm.height)
    throw ParameterError("unsharp: dims must match");
  if (!std::isfinite(s)) throw ParameterError("unsharp: s must be finite");
  if (s == 0.0) return t_pm;
  if (s == 1.0) return t_gpm;
  RealImage out = RealImage::zeros(t_pm.width, t_pm.height, t_pm.pixel_m);
  const std::size_t n = out.size();
#pragma omp parallel for
  for (long long i = 0; i < (long long)n; ++i)
    out.samples[i] = t_pm.samples[i] + s * (t_gpm.samples[i] - t_pm.samples[i]);
  return out;
}

}  // namespace gpm
