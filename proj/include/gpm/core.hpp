#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gpm {

inline constexpr double kPi = 3.14159265358979323846;

/// Physics/domain violation (bad parameter, out-of-zone frequency, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// File/stream problem.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure (singular filter denominator, clamp overflow, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Beam, sample and geometry parameters for a single-distance measurement.
/// All lengths are in meters; the complex refractive index is n = 1 - delta + i*beta.
struct PhysicalConfig {
  double wavelength_m = 0.0;
  double delta = 0.0;            // refractive index decrement
  double beta = 0.0;             // absorption index
  double distance_m = 0.0;       // sample-to-detector propagation distance
  double pixel_m = 0.0;          // detector pixel width W (square pixels)
  double incident_intensity = 1.0;

  double wavenumber() const { return 2.0 * kPi / wavelength_m; }
  double mu() const { return 2.0 * wavenumber() * beta; }
  double alpha() const { return delta * distance_m / mu(); }
  double upsilon() const { return alpha() / (pixel_m * pixel_m); }

  /// Fresnel number L^2/(lambda*distance) for a feature of size L.
  /// Returns +inf at zero distance.
  double fresnel_number(double feature_m) const;

  /// Throws ParameterError if any field is non-finite or out of range.
  void validate() const;
};

struct DerivedConstants {
  double wavenumber;       // k = 2*pi/lambda          [1/m]
  double mu;               // 2*k*beta                  [1/m]
  double alpha;            // delta*distance/mu         [m^2]
  double upsilon;          // alpha/W^2                 [-]
  double fresnel_number;   // L^2/(lambda*distance)     [-]
};

/// Evaluates the derived quantities for a feature of size feature_m.
DerivedConstants derive_constants(const PhysicalConfig& cfg, double feature_m);

/// Row-major grid of real samples; sample (m, n) = (x index, y index) lives at
/// samples[n*width + m]. width = N1, height = N2.
struct RealImage {
  int width = 0;
  int height = 0;
  double pixel_m = 0.0;
  std::vector<double> samples;

  static RealImage zeros(int width, int height, double pixel_m);
  static RealImage constant(int width, int height, double pixel_m, double value);

  double& at(int m, int n) { return samples[std::size_t(n) * width + m]; }
  double at(int m, int n) const { return samples[std::size_t(n) * width + m]; }
  std::size_t size() const { return samples.size(); }

  double mean() const;
  double min() const;
  double max() const;
  double rms() const;

  /// Throws ParameterError unless dims >= 2, pixel_m > 0 and every sample is finite.
  void validate(const char* what) const;
};

/// Complex-valued counterpart of RealImage; used by the propagation code only.
struct ComplexField {
  int width = 0;
  int height = 0;
  double pixel_m = 0.0;
  std::vector<std::complex<double>> samples;

  static ComplexField zeros(int width, int height, double pixel_m);

  std::complex<double>& at(int m, int n) { return samples[std::size_t(n) * width + m]; }
  const std::complex<double>& at(int m, int n) const { return samples[std::size_t(n) * width + m]; }
  std::size_t size() const { return samples.size(); }

  void validate(const char* what) const;
};

/// Angular spatial frequencies of an N1 x N2 DFT with square pixels W, in the
/// native bin order (DC first, negative frequencies in the upper half). For
/// even N the shared Nyquist bin carries +pi/W. kx_scaled/ky_scaled hold the
/// dimensionless products W*k, exact at the band edge.
struct FrequencyMesh {
  int n1 = 0;
  int n2 = 0;
  double pixel_m = 0.0;
  std::vector<double> kx, ky;                // [1/m]
  std::vector<double> kx_scaled, ky_scaled;  // W*k, in [-pi, pi]
};

FrequencyMesh build_frequency_mesh(int n1, int n2, double pixel_m);

/// Photon energy <-> wavelength (E in keV, lambda in meters).
double wavelength_from_energy_kev(double energy_kev);
double energy_kev_from_wavelength(double wavelength_m);

}  // namespace gpm
