#include "gpm/analysis.hpp"

#include "gpm/fft.hpp"
#include "gpm/filters.hpp"

#include <algorithm>
#include <cmath>

namespace gpm {

RealImage laplacian_5pt(const RealImage& image) {
  image.validate("laplacian input");
  const int w = image.width, h = image.height;
  const double inv_w2 = 1.0 / (image.pixel_m * image.pixel_m);
  RealImage out = RealImage::zeros(w, h, image.pixel_m);
#pragma omp parallel for
  for (int n = 0; n < h; ++n) {
    const int up = (n + h - 1) % h, down = (n + 1) % h;
    for (int m = 0; m < w; ++m) {
      const int left = (m + w - 1) % w, right = (m + 1) % w;
      out.at(m, n) = (image.at(left, n) + image.at(right, n) + image.at(m, up) +
                      image.at(m, down) - 4.0 * image.at(m, n)) *
                     inv_w2;
    }
  }
  return out;
}

RealImage gaussian_blur(const RealImage& image, double sigma_m) {
  image.validate("blur input");
  if (!(std::isfinite(sigma_m) && sigma_m >= 0.0))
    throw ParameterError("gaussian_blur: sigma must be >= 0");
  if (sigma_m == 0.0) return image;
  const FrequencyMesh mesh = build_frequency_mesh(image.width, image.height, image.pixel_m);
  RealImage grid = RealImage::zeros(image.width, image.height, image.pixel_m);
  const double half_s2 = 0.5 * sigma_m * sigma_m;
#pragma omp parallel for
  for (int q = 0; q < image.height; ++q) {
    const double ky2 = mesh.ky[q] * mesh.ky[q];
    double* row = grid.samples.data() + std::size_t(q) * image.width;
    for (int p = 0; p < image.width; ++p)
      row[p] = std::exp(-half_s2 * (mesh.kx[p] * mesh.kx[p] + ky2));
  }
  return apply_spectral_grid(image, grid);
}

double laplacian_signature_residual(const RealImage& image, double sigma1_m, double sigma2_m) {
  image.validate("signature input");
  if (!(sigma1_m > 0.0 && sigma2_m > sigma1_m))
    throw ParameterError("signature: need 0 < sigma1 < sigma2");
  const FrequencyMesh mesh = build_frequency_mesh(image.width, image.height, image.pixel_m);
  RealImage diff_grid = RealImage::zeros(image.width, image.height, image.pixel_m);
  RealImage target_grid = RealImage::zeros(image.width, image.height, image.pixel_m);
  const double h1 = 0.5 * sigma1_m * sigma1_m, h2 = 0.5 * sigma2_m * sigma2_m;
  const double coeff = h2 - h1;  // (sigma2^2 - sigma1^2)/2
#pragma omp parallel for
  for (int q = 0; q < image.height; ++q) {
    const double ky2 = mesh.ky[q] * mesh.ky[q];
    for (int p = 0; p < image.width; ++p) {
      const double k2 = mesh.kx[p] * mesh.kx[p] + ky2;
      diff_grid.at(p, q) = std::exp(-h2 * k2) - std::exp(-h1 * k2);
      target_grid.at(p, q) = -coeff * k2;
    }
  }
  const RealImage diff = apply_spectral_grid(image, diff_grid);
  const RealImage target = apply_spectral_grid(image, target_grid);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < diff.size(); ++i) {
    const double e = diff.samples[i] - target.samples[i];
    num += e * e;
    den += target.samples[i] * target.samples[i];
  }
  if (den == 0.0) return 0.0;
  return std::sqrt(num / den);
}

ValidityReport validity_report(double delta_beta, double fresnel_number, double aleph,
                               double nf_threshold) {
  if (!(std::isfinite(delta_beta) && delta_beta > 0.0))
    throw ParameterError("validity: delta/beta must be > 0");
  if (!(std::isfinite(fresnel_number) && fresnel_number > 0.0))
    throw ParameterError("validity: Fresnel number must be > 0");
  if (!(aleph > 0.0 && aleph < (kPi * kPi - 4.0) / 4.0))
    throw ParameterError("validity: aleph must lie in (0, (pi^2-4)/4)");
  if (!(std::isfinite(nf_threshold) && nf_threshold >= 1.0))
    throw ParameterError("validity: near-field threshold must be >= 1");
  ValidityReport rep;
  const double coeff = (kPi / 2.0 - 2.0 / kPi) / aleph - 2.0 / kPi;
  rep.gpm_worthwhile = delta_beta * coeff >= fresnel_number;
  rep.tie_valid = fresnel_number >= nf_threshold;
  rep.upsilon = delta_beta / (4.0 * kPi * fresnel_number);
  rep.r_max = r_max(rep.upsilon);
  return rep;
}

DeltaBand gpm_delta_band(double delta_beta, double wavelength_m, double pixel_m,
                         double aleph, bool rounded) {
  if (!(std::isfinite(delta_beta) && delta_beta > 0.0))
    throw ParameterError("validity: delta/beta must be > 0");
  if (!(wavelength_m > 0.0)) throw ParameterError("validity: wavelength must be > 0");
  if (!(pixel_m > 0.0)) throw ParameterError("validity: pixel size must be > 0");
  if (!(aleph > 0.0 && aleph < (kPi * kPi - 4.0) / 4.0))
    throw ParameterError("validity: aleph must lie in (0, (pi^2-4)/4)");
  const double coeff = rounded ? 10.0 : (kPi / 2.0 - 2.0 / kPi) / aleph - 2.0 / kPi;
  DeltaBand band;
  // N_F <= coeff*delta_beta bounds the distance from below; N_F >> 1 from above.
  band.min_m = pixel_m * pixel_m / (wavelength_m * coeff * delta_beta);
  band.max_m = pixel_m * pixel_m / wavelength_m;
  return band;
}

std::vector<std::pair<double, double>> line_profile_row(const RealImage& image, int row) {
  image.validate("profile input");
  if (row < 0 || row >= image.height)
    throw ParameterError("profile: row " + std::to_string(row) + " outside image of height " +
                         std::to_string(image.height));
  std::vector<std::pair<double, double>> out;
  out.reserve(image.width);
  for (int m = 0; m < image.width; ++m)
    out.emplace_back(double(m) * image.pixel_m, image.at(m, row));
  return out;
}

std::vector<std::pair<double, double>> line_profile_segment(const RealImage& image, int m0,
                                                            int n0, int m1, int n1) {
  image.validate("profile input");
  auto inside = [&](int m, int n) {
    return m >= 0 && m < image.width && n >= 0 && n < image.height;
  };
  if (!inside(m0, n0) || !inside(m1, n1))
    throw ParameterError("profile: segment endpoint outside image");
  const int steps = std::max(std::abs(m1 - m0), std::abs(n1 - n0));
  const double seg_len =
      std::hypot(double(m1 - m0), double(n1 - n0)) * image.pixel_m;
  std::vector<std::pair<double, double>> out;
  out.reserve(steps + 1);
  for (int i = 0; i <= steps; ++i) {
    const double t = steps ? double(i) / double(steps) : 0.0;
    const int m = int(std::lround(m0 + t * (m1 - m0)));
    const int n = int(std::lround(n0 + t * (n1 - n0)));
    out.emplace_back(t * seg_len, image.at(m, n));
  }
  return out;
}

RealImage difference_map(const RealImage& a, const RealImage& b) {
  a.validate("difference input a");
  b.validate("difference input b");
  if (a.width != b.width || a.height != b.height)
    throw ParameterError("difference: dims must match");
  RealImage out = RealImage::zeros(a.width, a.height, a.pixel_m);
  for (std::size_t i = 0; i < out.size(); ++i)
    out.samples[i] = a.samples[i] - b.samples[i];
  return out;
}

double pearson_correlation(const RealImage& a, const RealImage& b) {
  if (a.width != b.width || a.height != b.height)
    throw ParameterError("pearson: dims must match");
  const double ma = a.mean(), mb = b.mean();
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a.samples[i] - ma, db = b.samples[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace gpm
