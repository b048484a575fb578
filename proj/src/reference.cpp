#include "gpm/reference.hpp"

#include "gpm/fft.hpp"

#include <cmath>

namespace gpm::serial {

RealImage build_filter_grid(const FilterSpec& spec, double alpha_m2, double pixel_m,
                            int n1, int n2) {
  spec.validate();
  const FrequencyMesh mesh = build_frequency_mesh(n1, n2, pixel_m);
  RealImage grid = RealImage::zeros(n1, n2, pixel_m);
  for (int q = 0; q < n2; ++q) {
    const double ky = mesh.ky[q];
    double* row = grid.samples.data() + std::size_t(q) * n1;
    for (int p = 0; p < n1; ++p) {
      switch (spec.kind) {
        case FilterKind::Pm: row[p] = pm_filter(mesh.kx[p], ky, alpha_m2); break;
        case FilterKind::Gpm: row[p] = gpm_filter(mesh.kx[p], ky, alpha_m2, pixel_m); break;
        case FilterKind::Tunable:
          row[p] = tunable_filter(mesh.kx[p], ky, alpha_m2, pixel_m, spec.tau);
          break;
        case FilterKind::AnkaDeconv:
          row[p] = anka_filter(mesh.kx[p], ky, spec.anka_c, spec.anka_sigma_m);
          break;
        case FilterKind::AnkaDeconvRevised:
          row[p] = anka_filter_revised(mesh.kx[p], ky, spec.anka_c, spec.anka_sigma_m);
          break;
      }
    }
  }
  return grid;
}

RealImage laplacian_5pt(const RealImage& image) {
  image.validate("laplacian input");
  const int w = image.width, h = image.height;
  const double inv_w2 = 1.0 / (image.pixel_m * image.pixel_m);
  RealImage out = RealImage::zeros(w, h, image.pixel_m);
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

ComplexField transmission(const RealImage& thickness, const PhysicalConfig& cfg) {
  thickness.validate("thickness map");
  cfg.validate();
  if (thickness.min() < 0.0) throw ParameterError("transmission: thickness must be >= 0");
  const double amp0 = std::sqrt(cfg.incident_intensity);
  const double half_mu = 0.5 * cfg.mu();
  const double k_delta = cfg.wavenumber() * cfg.delta;
  ComplexField field = ComplexField::zeros(thickness.width, thickness.height, thickness.pixel_m);
  for (std::size_t i = 0; i < thickness.size(); ++i) {
    const double t = thickness.samples[i];
    field.samples[i] = std::polar(amp0 * std::exp(-half_mu * t), -k_delta * t);
  }
  return field;
}

RealImage upsample_replicate(const RealImage& image, int factor) {
  image.validate("upsample input");
  if (factor < 1) throw ParameterError("upsample: factor must be >= 1");
  if (factor == 1) return image;
  RealImage out =
      RealImage::zeros(image.width * factor, image.height * factor, image.pixel_m / factor);
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
  const long double inv = 1.0L / (long double)(factor * factor);
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

RealImage apply_spectral_grid(const RealImage& image, const RealImage& grid) {
  if (grid.width != image.width || grid.height != image.height)
    throw ParameterError("apply_spectral_grid: grid dims must match image dims");
  ComplexField spectrum = dft2(image);
  for (std::size_t i = 0; i < spectrum.size(); ++i) spectrum.samples[i] *= grid.samples[i];
  return idft2_real(spectrum);
}

}  // namespace gpm::serial
