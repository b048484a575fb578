#include "gpm/deconv.hpp"

#include "gpm/fft.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gpm {

KernelWidth kernel_width(const RealImage& kernel, double pixel_m) {
  kernel.validate("kernel");
  if (!(std::isfinite(pixel_m) && pixel_m > 0.0))
    throw ParameterError("kernel_width: pixel_m must be > 0");
  double mass = 0.0;
  for (double v : kernel.samples) {
    if (v < 0.0) throw ParameterError("kernel_width: kernel must be nonnegative");
    mass += v;
  }
  if (!(mass > 0.0)) throw ParameterError("kernel_width: kernel mass must be positive");

  double cx = 0.0, cy = 0.0;
  for (int n = 0; n < kernel.height; ++n)
    for (int m = 0; m < kernel.width; ++m) {
      const double wgt = kernel.at(m, n) / mass;
      cx += wgt * m;
      cy += wgt * n;
    }
  double vx = 0.0, vy = 0.0;
  for (int n = 0; n < kernel.height; ++n)
    for (int m = 0; m < kernel.width; ++m) {
      const double wgt = kernel.at(m, n) / mass;
      vx += wgt * (m - cx) * (m - cx);
      vy += wgt * (n - cy) * (n - cy);
    }

  KernelWidth width;
  width.sigma_m = std::sqrt(0.5 * (vx + vy)) * pixel_m;

  // Azimuthally averaged profile in half-pixel radius bins around the centroid.
  const int max_bin = 2 * std::max(kernel.width, kernel.height);
  std::vector<double> sum(max_bin, 0.0);
  std::vector<int> cnt(max_bin, 0);
  for (int n = 0; n < kernel.height; ++n)
    for (int m = 0; m < kernel.width; ++m) {
      const double r = std::hypot(m - cx, n - cy);
      const int bin = int(std::lround(r * 2.0));
      if (bin < max_bin) {
        sum[bin] += kernel.at(m, n);
        ++cnt[bin];
      }
    }
  std::vector<std::pair<double, double>> profile;  // (radius_px, mean value)
  for (int b = 0; b < max_bin; ++b)
    if (cnt[b]) profile.emplace_back(0.5 * b, sum[b] / cnt[b]);

  const double half = 0.5 * profile.front().second;
  double r_half = profile.back().first;  // fallback: never crossed
  for (std::size_t i = 1; i < profile.size(); ++i) {
    if (profile[i].second <= half) {
      const auto [r0, v0] = profile[i - 1];
      const auto [r1, v1] = profile[i];
      r_half = (v0 == v1) ? r1 : r0 + (v0 - half) / (v0 - v1) * (r1 - r0);
      break;
    }
  }
  width.fwhm_m = 2.0 * r_half * pixel_m;
  return width;
}

namespace {

ComplexField forward_spectrum(const RealImage& img) { return dft2(img); }

// Cyclic convolution/correlation against a fixed reference spectrum.
RealImage convolve(const ComplexField& ref_spec, const RealImage& img, bool conjugate) {
  ComplexField spec = dft2(img);
  const std::size_t n = spec.size();
#pragma omp parallel for
  for (long long i = 0; i < (long long)n; ++i) {
    const auto r = conjugate ? std::conj(ref_spec.samples[i]) : ref_spec.samples[i];
    spec.samples[i] *= r;
  }
  return idft2_real(spec);
}

}  // namespace

KernelEstimate estimate_kernel_rl(const RealImage& reference, const RealImage& observation,
                                  int kernel_size, int iterations) {
  reference.validate("rl reference");
  observation.validate("rl observation");
  if (reference.width != observation.width || reference.height != observation.height)
    throw ParameterError("rl: image dims must match");
  if (kernel_size < 3 || kernel_size % 2 == 0)
    throw ParameterError("rl: kernel size must be an odd number >= 3");
  if (kernel_size > std::min(reference.width, reference.height))
    throw ParameterError("rl: kernel size exceeds image dims");
  if (iterations < 1) throw ParameterError("rl: iterations must be >= 1");

  const int w = reference.width, h = reference.height;
  const std::size_t npix = reference.size();

  // Remove the mean offsets, then shift both images by a common constant so
  // they are strictly positive (unit-mass convolution preserves the mean, so
  // the shift is model-consistent).
  RealImage ref = reference, obs = observation;
  const double mr = ref.mean(), mo = obs.mean();
  for (double& v : ref.samples) v -= mr;
  for (double& v : obs.samples) v -= mo;
  if (!(ref.max() > ref.min())) throw ParameterError("rl: reference image is constant");
  const double lo = std::min(ref.min(), obs.min());
  const double hi = std::max(ref.max(), obs.max());
  const double range = hi - lo;
  const double shift = -lo + 1e-3 * range;
  for (double& v : ref.samples) v += shift;
  for (double& v : obs.samples) v += shift;

  const ComplexField ref_spec = forward_spectrum(ref);
  double ref_mass = 0.0;
  for (double v : ref.samples) ref_mass += v;

  // Kernel lives on the full grid, centered at the origin with wrap-around;
  // multiplicative updates keep everything outside the support at zero.
  const int half = kernel_size / 2;
  auto on_support = [&](int m, int n) {
    const int sm = (m <= w / 2) ? m : m - w;
    const int sn = (n <= h / 2) ? n : n - h;
    return std::abs(sm) <= half && std::abs(sn) <= half;
  };
  RealImage kernel = RealImage::zeros(w, h, reference.pixel_m);
  const double init = 1.0 / double(kernel_size * kernel_size);
  for (int n = 0; n < h; ++n)
    for (int m = 0; m < w; ++m)
      if (on_support(m, n)) kernel.at(m, n) = init;

  const double model_floor = 1e-12 * obs.mean();

  KernelEstimate est;
  est.objective.reserve(iterations);
  RealImage best = kernel;
  double best_obj = std::numeric_limits<double>::infinity();
  double prev_obj = std::numeric_limits<double>::infinity();
  int rising = 0;

  for (int it = 0; it < iterations; ++it) {
    RealImage model = convolve(ref_spec, kernel, false);
    double objective = 0.0;
    RealImage ratio = RealImage::zeros(w, h, reference.pixel_m);
    for (std::size_t i = 0; i < npix; ++i) {
      const double m = std::max(model.samples[i], model_floor);
      const double d = obs.samples[i];
      objective += d * std::log(d / m) - d + m;
      ratio.samples[i] = d / m;
    }
    const RealImage update = convolve(ref_spec, ratio, true);
    double mass = 0.0;
    for (std::size_t i = 0; i < npix; ++i) {
      kernel.samples[i] *= update.samples[i] / ref_mass;
      mass += kernel.samples[i];
    }
    if (!(mass > 0.0)) throw NumericalError("rl: kernel mass collapsed to zero");
    for (double& v : kernel.samples) v /= mass;

    est.objective.push_back(objective);
    est.iterations_run = it + 1;
    if (objective < best_obj) {
      best_obj = objective;
      best = kernel;
    }
    // A plateau is a fixed point, not divergence; only strict rises count.
    rising = (objective > prev_obj) ? rising + 1 : 0;
    prev_obj = objective;
    if (rising >= 5) {
      est.diverged = true;
      break;
    }
  }

  // Cut the centered window out of the wrapped grid.
  est.kernel = RealImage::zeros(kernel_size, kernel_size, reference.pixel_m);
  double mass = 0.0;
  for (int dn = -half; dn <= half; ++dn)
    for (int dm = -half; dm <= half; ++dm) {
      const int m = (dm + w) % w, n = (dn + h) % h;
      const double v = best.at(m, n);
      est.kernel.at(dm + half, dn + half) = v;
      mass += v;
    }
  if (!(mass > 0.0)) throw NumericalError("rl: extracted kernel has no mass");
  for (double& v : est.kernel.samples) v /= mass;

  const KernelWidth width = kernel_width(est.kernel, reference.pixel_m);
  est.sigma_m = width.sigma_m;
  est.fwhm_m = width.fwhm_m;
  return est;
}

}  // namespace gpm
