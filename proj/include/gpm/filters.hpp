#pragma once

#include "gpm/core.hpp"

namespace gpm {

// Scalar Fourier filters for single-distance phase retrieval. alpha is the
// screening constant delta*distance/mu [m^2]; W is the pixel width [m]. The
// mesh-periodic (gpm/tunable) forms are defined on the first Brillouin zone
// |W*kx|, |W*ky| <= pi.

enum class FilterKind { Pm, Gpm, Tunable, AnkaDeconv, AnkaDeconvRevised };

struct FilterSpec {
  FilterKind kind = FilterKind::Pm;
  double tau = 0.0;            // Tunable: 0 -> pm, 1 -> gpm, > 1 allowed while positive
  double anka_c = 1.0;         // AnkaDeconv*: constant c > 0
  double anka_sigma_m = 0.0;   // AnkaDeconv*: blur width sigma >= 0
  double source_blur_m = 0.0;  // RMS source-size blur S >= 0 (pm/gpm/tunable only)

  void validate() const;
};

/// Lorentzian low-pass 1/(1 + alpha*(kx^2+ky^2)).
double pm_filter(double kx, double ky, double alpha);

/// Mesh-periodic low-pass 1/(1 - (2*alpha/W^2)*(cos(W*kx)+cos(W*ky)-2)).
double gpm_filter(double kx, double ky, double alpha, double pixel_m);

/// Continuous deformation between the two low-pass forms; denominator
/// 1 + alpha*k^2 - (2*alpha*tau/W^2)*Phi with
/// Phi = cos(W*kx)+cos(W*ky)-2+((W*kx)^2+(W*ky)^2)/2. Throws NumericalError
/// naming the frequency if the denominator is not positive.
double tunable_filter(double kx, double ky, double alpha, double pixel_m, double tau);

/// gpm/pm boost ratio; >= 1 on the zone, 1 at DC.
double filter_ratio(double kx, double ky, double alpha, double pixel_m);

/// Zone-corner boost (1 + 2*pi^2*u)/(1 + 8*u); -> pi^2/4 as u -> inf.
double r_max(double upsilon);

/// Small-k expansion of filter_ratio: 1 + alpha*W^2*(kx^4+ky^4)/12.
double quartic_ratio_approx(double kx, double ky, double alpha, double pixel_m);

/// Gaussian deblur boost (1+c)/(c + exp(-pi*sigma^2*(kx^2+ky^2))).
double anka_filter(double kx, double ky, double c, double sigma_m);

/// Quartic-exponent variant (1+c)/(c + exp(-sigma^4*(kx^4+ky^4))); matching
/// 12*sigma^4/(1+c) = W^2*alpha aligns its small-k boost with
/// quartic_ratio_approx.
double anka_filter_revised(double kx, double ky, double c, double sigma_m);

/// Effective screening constant under Gaussian source blur of RMS size S:
/// alpha - 2*S^2. Throws ParameterError when the result is negative (the
/// combined filter would stop being a low-pass).
double apply_source_blur(double alpha, double source_size_m, double distance_m);

/// Filter values over the N1 x N2 frequency mesh, native bin order. alpha_m2
/// is the effective screening constant (source blur already applied).
RealImage build_filter_grid(const FilterSpec& spec, double alpha_m2, double pixel_m,
                            int n1, int n2);

/// Convenience overload deriving alpha from cfg and applying spec.source_blur_m.
RealImage build_filter_grid(const FilterSpec& spec, const PhysicalConfig& cfg,
                            int n1, int n2);

}  // namespace gpm
