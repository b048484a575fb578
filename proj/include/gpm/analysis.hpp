#pragma once

#include "gpm/core.hpp"

#include <utility>
#include <vector>

namespace gpm {

/// Periodic five-point Laplacian: (left+right+up+down-4*center)/W^2.
/// Its DFT eigenvalues are (2/W^2)*(cos(W*kx)+cos(W*ky)-2), the bracket
/// appearing in the mesh-periodic filter denominator.
RealImage laplacian_5pt(const RealImage& image);

/// Spectral Gaussian blur: multiply the spectrum by exp(-(kx^2+ky^2)*sigma^2/2).
/// DC gain is one, so the image mean is preserved. sigma_m = 0 returns a copy.
RealImage gaussian_blur(const RealImage& image, double sigma_m);

/// Relative L2 residual of (blur(sigma2) - blur(sigma1)) against
/// (sigma2^2 - sigma1^2)/2 * (spectral Laplacian), the second-order
/// two-resolution signature. Zero for a constant image.
double laplacian_signature_residual(const RealImage& image, double sigma1_m, double sigma2_m);

struct ValidityReport {
  bool gpm_worthwhile = false;  // boost at the stated level is reachable
  bool tie_valid = false;       // near-field condition N_F >= threshold
  double r_max = 1.0;           // corner boost at the implied upsilon
  double upsilon = 0.0;
};

/// aleph is the demanded fractional corner boost (r_max >= 1 + aleph).
/// gpm_worthwhile tests delta_beta * ((pi/2 - 2/pi)/aleph - 2/pi) >= N_F.
ValidityReport validity_report(double delta_beta, double fresnel_number, double aleph,
                               double nf_threshold = 10.0);

struct DeltaBand {
  double min_m = 0.0;  // smallest distance with a worthwhile boost
  double max_m = 0.0;  // strict upper end: distance must stay well below this
};

/// Distance band for a worthwhile boost at pixel size W. rounded=true uses the
/// order-of-magnitude coefficient 10 (matching the usual back-of-envelope rule
/// 10*delta/beta >= N_F); rounded=false uses the exact aleph coefficient.
DeltaBand gpm_delta_band(double delta_beta, double wavelength_m, double pixel_m,
                         double aleph, bool rounded);

/// (position [m], value) pairs along row n (y index), ordered by x.
std::vector<std::pair<double, double>> line_profile_row(const RealImage& image, int row);

/// Nearest-sample profile along the segment (m0,n0)-(m1,n1) inclusive;
/// positions are distances from the start point in meters.
std::vector<std::pair<double, double>> line_profile_segment(const RealImage& image, int m0,
                                                            int n0, int m1, int n1);

/// a - b; dims must match.
RealImage difference_map(const RealImage& a, const RealImage& b);

/// Pearson correlation of two same-size images; 0 when either is constant.
double pearson_correlation(const RealImage& a, const RealImage& b);

}  // namespace gpm
