#include "gpm/fresnel.hpp"

#include "gpm/fft.hpp"

#include <cmath>

namespace gpm {

void PropagationPlan::validate() const {
  if (!(std::isfinite(distance_m) && distance_m >= 0.0))
    throw ParameterError("propagation plan: distance must be >= 0");
  if (oversample_factor < 1) throw ParameterError("propagation plan: oversample factor must be >= 1");
}

ComplexField transmission(const RealImage& thickness, const PhysicalConfig& cfg) {
  thickness.validate("thickness map");
  cfg.validate();
  if (thickness.min() < 0.0) throw ParameterError("transmission: thickness must be >= 0");
  const double amp0 = std::sqrt(cfg.incident_intensity);
  const double half_mu = 0.5 * cfg.mu();
  const double k_delta = cfg.wavenumber() * cfg.delta;
  ComplexField field = ComplexField::zeros(thickness.width, thickness.height, thickness.pixel_m);
  const std::size_t n = thickness.size();
#pragma omp parallel for
  for (long long i = 0; i < (long long)n; ++i) {
    const double t = thickness.samples[i];
    field.samples[i] = std::polar(amp0 * std::exp(-half_mu * t), -k_delta * t);
  }
  return field;
}

ComplexField propagate(const ComplexField& field, double distance_m, double wavelength_m) {
  field.validate("propagation input");
  if (!(std::isfinite(distance_m) && distance_m >= 0.0))
    throw ParameterError("propagate: distance must be >= 0");
  if (!(std::isfinite(wavelength_m) && wavelength_m > 0.0))
    throw ParameterError("propagate: wavelength must be > 0");
  const FrequencyMesh mesh = build_frequency_mesh(field.width, field.height, field.pixel_m);
  const double k = 2.0 * kPi / wavelength_m;
  const double prefactor = -distance_m / (2.0 * k);
  ComplexField spectrum = dft2(field);
#pragma omp parallel for
  for (int q = 0; q < field.height; ++q) {
    const double ky2 = mesh.ky[q] * mesh.ky[q];
    auto* row = spectrum.samples.data() + std::size_t(q) * field.width;
    for (int p = 0; p < field.width; ++p)
      row[p] *= std::polar(1.0, prefactor * (mesh.kx[p] * mesh.kx[p] + ky2));
  }
  return idft2(spectrum);
}

RealImage intensity(const ComplexField& field) {
  field.validate("intensity input");
  RealImage out = RealImage::zeros(field.width, field.height, field.pixel_m);
  const std::size_t n = field.size();
#pragma omp parallel for
  for (long long i = 0; i < (long long)n; ++i) out.samples[i] = std::norm(field.samples[i]);
  return out;
}

RealImage upsample_replicate(const RealImage& image, int factor) {
  image.validate("upsample input");
  if (factor < 1) throw ParameterError("upsample: factor must be >= 1");
  if (factor == 1) return image;
  RealImage out =
      RealImage::zeros(image.width * factor, image.height * factor, image.pixel_m / factor);
#pragma omp parallel for
  for (int n = 0; n < out.height; ++n) {
    const int src_n = n / factor;
    for (int m = 0; m < out.width; ++m) out.at(m, n) = image.at(m / factor, src_n);
  }
  return out;
}

RealImage rebin_average(const RealImage& image, int factor) {
  image.validate("rebin input");
  if (factor < 1) throw ParameterError("rebin: factor must be >= 1");
  if (factor == 1) return image;
  if (image.width % factor || image.height % factor)
    throw ParameterError("rebin: dims must be divisible by the factor");
  RealImage out =
      RealImage::zeros(image.width / factor, image.height / factor, image.pixel_m * factor);
  // Extended-precision block sums keep rebin(upsample(x)) == x bit-exact.
  const long double inv = 1.0L / (long double)(factor * factor);
#pragma omp parallel for
  for (int n = 0; n < out.height; ++n) {
    for (int m = 0; m < out.width; ++m) {
      long double acc = 0.0L;
      for (int j = 0; j < factor; ++j)
        for (int i = 0; i < factor; ++i) acc += image.at(m * factor + i, n * factor + j);
      out.at(m, n) = double(acc * inv);
    }
  }
  return out;
}

RealImage simulate_pbi(const RealImage& thickness, const PhysicalConfig& cfg,
                       const PropagationPlan& plan) {
  thickness.validate("thickness map");
  cfg.validate();
  plan.validate();
  const RealImage fine = upsample_replicate(thickness, plan.oversample_factor);
  const ComplexField exit_field = transmission(fine, cfg);
  const ComplexField at_detector = propagate(exit_field, plan.distance_m, cfg.wavelength_m);
  const RealImage fine_intensity = intensity(at_detector);
  return rebin_average(fine_intensity, plan.oversample_factor);
}

}  // namespace gpm
