#include "gpm/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gpm {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw ParameterError(msg);
}

}  // namespace

double PhysicalConfig::fresnel_number(double feature_m) const {
  require(std::isfinite(feature_m) && feature_m > 0.0, "fresnel_number: feature size must be > 0");
  if (distance_m == 0.0) return std::numeric_limits<double>::infinity();
  return feature_m * feature_m / (wavelength_m * distance_m);
}

void PhysicalConfig::validate() const {
  require(std::isfinite(wavelength_m) && wavelength_m > 0.0, "wavelength_m must be > 0");
  require(std::isfinite(delta) && delta >= 0.0, "delta must be >= 0");
  require(std::isfinite(beta) && beta > 0.0, "beta must be > 0");
  require(std::isfinite(distance_m) && distance_m >= 0.0, "distance_m must be >= 0");
  require(std::isfinite(pixel_m) && pixel_m > 0.0, "pixel_m must be > 0");
  require(std::isfinite(incident_intensity) && incident_intensity > 0.0,
          "incident_intensity must be > 0");
}

DerivedConstants derive_constants(const PhysicalConfig& cfg, double feature_m) {
  cfg.validate();
  DerivedConstants d{};
  d.wavenumber = cfg.wavenumber();
  d.mu = cfg.mu();
  d.alpha = cfg.alpha();
  d.upsilon = cfg.upsilon();
  d.fresnel_number = cfg.fresnel_number(feature_m);
  return d;
}

RealImage RealImage::zeros(int width, int height, double pixel_m) {
  return constant(width, height, pixel_m, 0.0);
}

RealImage RealImage::constant(int width, int height, double pixel_m, double value) {
  require(width >= 2 && height >= 2, "image dims must be >= 2");
  require(std::isfinite(pixel_m) && pixel_m > 0.0, "image pixel_m must be > 0");
  require(std::isfinite(value), "image fill value must be finite");
  RealImage img;
  img.width = width;
  img.height = height;
  img.pixel_m = pixel_m;
  img.samples.assign(std::size_t(width) * height, value);
  return img;
}

double RealImage::mean() const {
  double s = 0.0;
  for (double v : samples) s += v;
  return s / double(samples.size());
}

double RealImage::min() const { return *std::min_element(samples.begin(), samples.end()); }

double RealImage::max() const { return *std::max_element(samples.begin(), samples.end()); }

double RealImage::rms() const {
  double s = 0.0;
  for (double v : samples) s += v * v;
  return std::sqrt(s / double(samples.size()));
}

void RealImage::validate(const char* what) const {
  const std::string who = what ? what : "image";
  if (width < 2 || height < 2) throw ParameterError(who + ": dims must be >= 2");
  if (!(std::isfinite(pixel_m) && pixel_m > 0.0)) throw ParameterError(who + ": pixel_m must be > 0");
  if (samples.size() != std::size_t(width) * height)
    throw ParameterError(who + ": sample count does not match dims");
  for (double v : samples)
    if (!std::isfinite(v)) throw ParameterError(who + ": non-finite sample");
}

ComplexField ComplexField::zeros(int width, int height, double pixel_m) {
  require(width >= 2 && height >= 2, "field dims must be >= 2");
  require(std::isfinite(pixel_m) && pixel_m > 0.0, "field pixel_m must be > 0");
  ComplexField f;
  f.width = width;
  f.height = height;
  f.pixel_m = pixel_m;
  f.samples.assign(std::size_t(width) * height, {0.0, 0.0});
  return f;
}

void ComplexField::validate(const char* what) const {
  const std::string who = what ? what : "field";
  if (width < 2 || height < 2) throw ParameterError(who + ": dims must be >= 2");
  if (!(std::isfinite(pixel_m) && pixel_m > 0.0)) throw ParameterError(who + ": pixel_m must be > 0");
  if (samples.size() != std::size_t(width) * height)
    throw ParameterError(who + ": sample count does not match dims");
  for (const auto& v : samples)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw ParameterError(who + ": non-finite sample");
}

FrequencyMesh build_frequency_mesh(int n1, int n2, double pixel_m) {
  require(n1 >= 2 && n2 >= 2, "frequency mesh dims must be >= 2");
  require(std::isfinite(pixel_m) && pixel_m > 0.0, "frequency mesh pixel_m must be > 0");
  FrequencyMesh mesh;
  mesh.n1 = n1;
  mesh.n2 = n2;
  mesh.pixel_m = pixel_m;
  mesh.kx.resize(n1);
  mesh.ky.resize(n2);
  mesh.kx_scaled.resize(n1);
  mesh.ky_scaled.resize(n2);
  // Signed index p~ = p for p <= N/2, p - N above; even N keeps +N/2 (band edge +pi/W).
  auto fill = [pixel_m](std::vector<double>& k, std::vector<double>& scaled, int n) {
    for (int p = 0; p < n; ++p) {
      const int sp = (p <= n / 2) ? p : p - n;
      scaled[p] = 2.0 * kPi * double(sp) / double(n);
      k[p] = scaled[p] / pixel_m;
    }
  };
  fill(mesh.kx, mesh.kx_scaled, n1);
  fill(mesh.ky, mesh.ky_scaled, n2);
  return mesh;
}

namespace {
// hc in eV*m.
constexpr double kHcEvM = 1.23984193e-6;
}  // namespace

double wavelength_from_energy_kev(double energy_kev) {
  require(std::isfinite(energy_kev) && energy_kev > 0.0, "energy must be > 0");
  return kHcEvM / (energy_kev * 1e3);
}

double energy_kev_from_wavelength(double wavelength_m) {
  require(std::isfinite(wavelength_m) && wavelength_m > 0.0, "wavelength must be > 0");
  return kHcEvM / wavelength_m / 1e3;
}

}  // namespace gpm
