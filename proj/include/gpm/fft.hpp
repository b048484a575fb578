#pragma once

#include "gpm/core.hpp"

namespace gpm {

// Convention: forward transform is the plain (unnormalized) DFT with kernel
// exp(-i k.x); the inverse carries the 1/(N1*N2) factor. Bins are in native
// order (DC first), matching build_frequency_mesh.

ComplexField dft2(const ComplexField& in);
ComplexField dft2(const RealImage& in);
ComplexField idft2(const ComplexField& in);

/// Inverse transform, real part only (imaginary residue of Hermitian spectra
/// is discarded).
RealImage idft2_real(const ComplexField& in);

/// DFT -> elementwise multiply by a real grid in Fourier layout -> inverse,
/// real part. grid dims must match the image.
RealImage apply_spectral_grid(const RealImage& image, const RealImage& grid);

}  // namespace gpm
