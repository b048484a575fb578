#include "gpm/phantom.hpp"

#include <algorithm>
#include <cmath>

namespace gpm {

namespace {

// splitmix64 output for stream position n of a given seed. Pure function of
// (seed, n), so cells can be generated in any order or in parallel.
std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t n) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (n + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double unit_double(std::uint64_t bits) { return double(bits >> 11) * 0x1.0p-53; }

}  // namespace

void BinaryPhantomSpec::validate() const {
  if (n1 < 2 || n2 < 2) throw ParameterError("phantom: dims must be >= 2");
  if (!(std::isfinite(pixel_m) && pixel_m > 0.0))
    throw ParameterError("phantom: pixel_m must be > 0");
  if (!(std::isfinite(thickness_m) && thickness_m >= 0.0))
    throw ParameterError("phantom: thickness_m must be >= 0");
  if (!(fill_fraction >= 0.0 && fill_fraction <= 1.0))
    throw ParameterError("phantom: fill_fraction must lie in [0, 1]");
  if (block_px < 1) throw ParameterError("phantom: block_px must be >= 1");
}

RealImage random_binary(const BinaryPhantomSpec& spec) {
  spec.validate();
  RealImage img = RealImage::zeros(spec.n1, spec.n2, spec.pixel_m);
  const int nbx = (spec.n1 + spec.block_px - 1) / spec.block_px;
  const int nby = (spec.n2 + spec.block_px - 1) / spec.block_px;
#pragma omp parallel for
  for (int bj = 0; bj < nby; ++bj) {
    for (int bi = 0; bi < nbx; ++bi) {
      const std::uint64_t cell = std::uint64_t(bj) * std::uint64_t(nbx) + std::uint64_t(bi);
      const double u = unit_double(splitmix64_at(spec.seed, cell));
      if (u < spec.fill_fraction) {
        const int m_end = std::min(spec.n1, (bi + 1) * spec.block_px);
        const int n_end = std::min(spec.n2, (bj + 1) * spec.block_px);
        for (int n = bj * spec.block_px; n < n_end; ++n)
          for (int m = bi * spec.block_px; m < m_end; ++m) img.at(m, n) = spec.thickness_m;
      }
    }
  }
  return img;
}

RealImage step_edge(int n1, int n2, double pixel_m, int edge_col, double low, double high) {
  if (edge_col < 0 || edge_col > n1)
    throw ParameterError("step_edge: edge column outside image");
  RealImage img = RealImage::constant(n1, n2, pixel_m, low);
  for (int n = 0; n < n2; ++n)
    for (int m = edge_col; m < n1; ++m) img.at(m, n) = high;
  return img;
}

RealImage gaussian_bump(int n1, int n2, double pixel_m, double sigma_px, double amplitude) {
  if (!(std::isfinite(sigma_px) && sigma_px > 0.0))
    throw ParameterError("gaussian_bump: sigma_px must be > 0");
  if (!std::isfinite(amplitude)) throw ParameterError("gaussian_bump: amplitude must be finite");
  RealImage img = RealImage::zeros(n1, n2, pixel_m);
  const int cx = n1 / 2, cy = n2 / 2;
  const double inv = 1.0 / (2.0 * sigma_px * sigma_px);
#pragma omp parallel for
  for (int n = 0; n < n2; ++n)
    for (int m = 0; m < n1; ++m) {
      const double dx = m - cx, dy = n - cy;
      img.at(m, n) = amplitude * std::exp(-(dx * dx + dy * dy) * inv);
    }
  return img;
}

RealImage disk(int n1, int n2, double pixel_m, double radius_px, double amplitude) {
  if (!(std::isfinite(radius_px) && radius_px > 0.0))
    throw ParameterError("disk: radius_px must be > 0");
  if (!std::isfinite(amplitude)) throw ParameterError("disk: amplitude must be finite");
  RealImage img = RealImage::zeros(n1, n2, pixel_m);
  const int cx = n1 / 2, cy = n2 / 2;
  const double r2 = radius_px * radius_px;
  for (int n = 0; n < n2; ++n)
    for (int m = 0; m < n1; ++m) {
      const double dx = m - cx, dy = n - cy;
      if (dx * dx + dy * dy <= r2) img.at(m, n) = amplitude;
    }
  return img;
}

}  // namespace gpm
