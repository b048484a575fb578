#include "gpm/filters.hpp"

#include <cmath>
#include <exception>
#include <string>

namespace gpm {

namespace {

// Band-edge check with headroom for the rounding in W*(k built as u/W).
constexpr double kZoneTol = 1e-9;

void check_alpha(double alpha) {
  if (!(std::isfinite(alpha) && alpha >= 0.0))
    throw ParameterError("filter: alpha must be finite and >= 0");
}

void check_pixel(double pixel_m) {
  if (!(std::isfinite(pixel_m) && pixel_m > 0.0))
    throw ParameterError("filter: pixel_m must be > 0");
}

void check_zone(double ux, double uy) {
  if (!(std::abs(ux) <= kPi + kZoneTol && std::abs(uy) <= kPi + kZoneTol))
    throw ParameterError("filter: frequency outside the mesh zone |W*k| <= pi (W*kx=" +
                         std::to_string(ux) + ", W*ky=" + std::to_string(uy) + ")");
}

}  // namespace

void FilterSpec::validate() const {
  switch (kind) {
    case FilterKind::Pm:
    case FilterKind::Gpm:
      break;
    case FilterKind::Tunable:
      if (!(std::isfinite(tau) && tau >= 0.0))
        throw ParameterError("filter: tau must be finite and >= 0");
      break;
    case FilterKind::AnkaDeconv:
    case FilterKind::AnkaDeconvRevised:
      if (!(std::isfinite(anka_c) && anka_c > 0.0))
        throw ParameterError("filter: anka_c must be > 0");
      if (!(std::isfinite(anka_sigma_m) && anka_sigma_m >= 0.0))
        throw ParameterError("filter: anka_sigma_m must be >= 0");
      break;
  }
  if (!(std::isfinite(source_blur_m) && source_blur_m >= 0.0))
    throw ParameterError("filter: source_blur_m must be >= 0");
  if (source_blur_m > 0.0 &&
      (kind == FilterKind::AnkaDeconv || kind == FilterKind::AnkaDeconvRevised))
    throw ParameterError("filter: source blur applies to the low-pass kinds only");
}

double pm_filter(double kx, double ky, double alpha) {
  check_alpha(alpha);
  return 1.0 / (1.0 + alpha * (kx * kx + ky * ky));
}

double gpm_filter(double kx, double ky, double alpha, double pixel_m) {
  check_alpha(alpha);
  check_pixel(pixel_m);
  const double ux = pixel_m * kx, uy = pixel_m * ky;
  check_zone(ux, uy);
  const double bracket = std::cos(ux) + std::cos(uy) - 2.0;
  return 1.0 / (1.0 - 2.0 * alpha / (pixel_m * pixel_m) * bracket);
}

double tunable_filter(double kx, double ky, double alpha, double pixel_m, double tau) {
  check_alpha(alpha);
  check_pixel(pixel_m);
  if (!(std::isfinite(tau) && tau >= 0.0))
    throw ParameterError("filter: tau must be finite and >= 0");
  const double ux = pixel_m * kx, uy = pixel_m * ky;
  check_zone(ux, uy);
  const double phi = std::cos(ux) + std::cos(uy) - 2.0 + 0.5 * (ux * ux + uy * uy);
  const double denom =
      1.0 + alpha * (kx * kx + ky * ky) - 2.0 * alpha * tau / (pixel_m * pixel_m) * phi;
  if (!(denom > 0.0))
    throw NumericalError("tunable filter denominator is not positive at kx=" +
                         std::to_string(kx) + " 1/m, ky=" + std::to_string(ky) +
                         " 1/m (tau=" + std::to_string(tau) + ")");
  return 1.0 / denom;
}

double filter_ratio(double kx, double ky, double alpha, double pixel_m) {
  check_alpha(alpha);
  check_pixel(pixel_m);
  const double ux = pixel_m * kx, uy = pixel_m * ky;
  check_zone(ux, uy);
  const double bracket = std::cos(ux) + std::cos(uy) - 2.0;
  const double num = 1.0 + alpha * (kx * kx + ky * ky);
  const double den = 1.0 - 2.0 * alpha / (pixel_m * pixel_m) * bracket;
  return num / den;
}

double r_max(double upsilon) {
  if (!(std::isfinite(upsilon) && upsilon >= 0.0))
    throw ParameterError("r_max: upsilon must be finite and >= 0");
  return (1.0 + 2.0 * kPi * kPi * upsilon) / (1.0 + 8.0 * upsilon);
}

double quartic_ratio_approx(double kx, double ky, double alpha, double pixel_m) {
  check_alpha(alpha);
  check_pixel(pixel_m);
  const double kx2 = kx * kx, ky2 = ky * ky;
  return 1.0 + alpha * pixel_m * pixel_m * (kx2 * kx2 + ky2 * ky2) / 12.0;
}

double anka_filter(double kx, double ky, double c, double sigma_m) {
  if (!(std::isfinite(c) && c > 0.0)) throw ParameterError("anka filter: c must be > 0");
  if (!(std::isfinite(sigma_m) && sigma_m >= 0.0))
    throw ParameterError("anka filter: sigma must be >= 0");
  const double s2 = sigma_m * sigma_m;
  return (1.0 + c) / (c + std::exp(-kPi * s2 * (kx * kx + ky * ky)));
}

double anka_filter_revised(double kx, double ky, double c, double sigma_m) {
  if (!(std::isfinite(c) && c > 0.0)) throw ParameterError("anka filter: c must be > 0");
  if (!(std::isfinite(sigma_m) && sigma_m >= 0.0))
    throw ParameterError("anka filter: sigma must be >= 0");
  const double s4 = sigma_m * sigma_m * sigma_m * sigma_m;
  const double kx2 = kx * kx, ky2 = ky * ky;
  return (1.0 + c) / (c + std::exp(-s4 * (kx2 * kx2 + ky2 * ky2)));
}

double apply_source_blur(double alpha, double source_size_m, double distance_m) {
  check_alpha(alpha);
  if (!(std::isfinite(source_size_m) && source_size_m >= 0.0))
    throw ParameterError("source blur: S must be >= 0");
  if (source_size_m == 0.0) return alpha;
  if (!(distance_m > 0.0))
    throw ParameterError("source blur: needs a positive propagation distance");
  const double effective = alpha - 2.0 * source_size_m * source_size_m;
  if (effective < 0.0)
    throw ParameterError("source blur: effective alpha = " + std::to_string(alpha) + " - 2*(" +
                         std::to_string(source_size_m) +
                         ")^2 is negative; the filter would amplify instead of smoothing");
  return effective;
}

RealImage build_filter_grid(const FilterSpec& spec, double alpha_m2, double pixel_m,
                            int n1, int n2) {
  spec.validate();
  check_alpha(alpha_m2);
  const FrequencyMesh mesh = build_frequency_mesh(n1, n2, pixel_m);
  RealImage grid = RealImage::zeros(n1, n2, pixel_m);
  // Exceptions must not escape the parallel region; keep the first one.
  std::exception_ptr failure = nullptr;
#pragma omp parallel for
  for (int q = 0; q < n2; ++q) {
    try {
      const double ky = mesh.ky[q];
      double* row = grid.samples.data() + std::size_t(q) * n1;
      switch (spec.kind) {
        case FilterKind::Pm:
          for (int p = 0; p < n1; ++p) row[p] = pm_filter(mesh.kx[p], ky, alpha_m2);
          break;
        case FilterKind::Gpm:
          for (int p = 0; p < n1; ++p) row[p] = gpm_filter(mesh.kx[p], ky, alpha_m2, pixel_m);
          break;
        case FilterKind::Tunable:
          for (int p = 0; p < n1; ++p)
            row[p] = tunable_filter(mesh.kx[p], ky, alpha_m2, pixel_m, spec.tau);
          break;
        case FilterKind::AnkaDeconv:
          for (int p = 0; p < n1; ++p)
            row[p] = anka_filter(mesh.kx[p], ky, spec.anka_c, spec.anka_sigma_m);
          break;
        case FilterKind::AnkaDeconvRevised:
          for (int p = 0; p < n1; ++p)
            row[p] = anka_filter_revised(mesh.kx[p], ky, spec.anka_c, spec.anka_sigma_m);
          break;
      }
    } catch (...) {
#pragma omp critical(gpm_filter_grid_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return grid;
}

RealImage build_filter_grid(const FilterSpec& spec, const PhysicalConfig& cfg, int n1, int n2) {
  spec.validate();
  cfg.validate();
  double alpha = cfg.alpha();
  if (spec.kind == FilterKind::Pm || spec.kind == FilterKind::Gpm ||
      spec.kind == FilterKind::Tunable)
    alpha = apply_source_blur(alpha, spec.source_blur_m, cfg.distance_m);
  return build_filter_grid(spec, alpha, cfg.pixel_m, n1, n2);
}

}  // namespace gpm
