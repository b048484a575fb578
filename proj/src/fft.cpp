#include "gpm/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <memory>
#include <mutex>
#include <unordered_map>

namespace gpm {

namespace {

// FFTW planning is not thread-safe; execution on distinct plans is. Each
// thread keeps its own in-place plans keyed by (n1, n2, sign) so repeated
// transforms of one size (e.g. iterative deconvolution) plan only once.
std::mutex g_planner_mutex;

struct Workspace {
  fftw_complex* buf = nullptr;
  fftw_plan plan = nullptr;

  Workspace(int n1, int n2, int sign) {
    std::lock_guard<std::mutex> lock(g_planner_mutex);
    buf = fftw_alloc_complex(std::size_t(n1) * n2);
    if (!buf) throw NumericalError("fft: allocation failed");
    // fftw wants the slow dimension first; rows are y.
    plan = fftw_plan_dft_2d(n2, n1, buf, buf, sign, FFTW_ESTIMATE);
    if (!plan) {
      fftw_free(buf);
      throw NumericalError("fft: planning failed");
    }
  }
  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;
  ~Workspace() {
    std::lock_guard<std::mutex> lock(g_planner_mutex);
    if (plan) fftw_destroy_plan(plan);
    if (buf) fftw_free(buf);
  }
};

Workspace& workspace_for(int n1, int n2, int sign) {
  thread_local std::unordered_map<std::uint64_t, std::unique_ptr<Workspace>> cache;
  const std::uint64_t key =
      (std::uint64_t(std::uint32_t(n1)) << 33) | (std::uint64_t(std::uint32_t(n2)) << 1) |
      (sign == FFTW_FORWARD ? 0u : 1u);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, std::make_unique<Workspace>(n1, n2, sign)).first;
  return *it->second;
}

ComplexField transform(const ComplexField& in, int sign) {
  in.validate("fft input");
  Workspace& ws = workspace_for(in.width, in.height, sign);
  // fftw_complex is double[2] and std::complex<double> is layout compatible.
  auto* buf = reinterpret_cast<std::complex<double>*>(ws.buf);
  std::copy(in.samples.begin(), in.samples.end(), buf);
  fftw_execute(ws.plan);
  ComplexField out = ComplexField::zeros(in.width, in.height, in.pixel_m);
  std::copy(buf, buf + in.size(), out.samples.begin());
  return out;
}

}  // namespace

ComplexField dft2(const ComplexField& in) { return transform(in, FFTW_FORWARD); }

ComplexField dft2(const RealImage& in) {
  in.validate("fft input");
  ComplexField promoted = ComplexField::zeros(in.width, in.height, in.pixel_m);
  const std::size_t n = in.size();
  for (std::size_t i = 0; i < n; ++i) promoted.samples[i] = in.samples[i];
  return transform(promoted, FFTW_FORWARD);
}

ComplexField idft2(const ComplexField& in) {
  ComplexField out = transform(in, FFTW_BACKWARD);
  const double scale = 1.0 / (double(in.width) * double(in.height));
  for (auto& v : out.samples) v *= scale;
  return out;
}

RealImage idft2_real(const ComplexField& in) {
  ComplexField out = transform(in, FFTW_BACKWARD);
  const double scale = 1.0 / (double(in.width) * double(in.height));
  RealImage img = RealImage::zeros(in.width, in.height, in.pixel_m);
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i) img.samples[i] = out.samples[i].real() * scale;
  return img;
}

RealImage apply_spectral_grid(const RealImage& image, const RealImage& grid) {
  if (grid.width != image.width || grid.height != image.height)
    throw ParameterError("apply_spectral_grid: grid dims must match image dims");
  ComplexField spectrum = dft2(image);
  const std::size_t n = spectrum.size();
#pragma omp parallel for
  for (long long i = 0; i < (long long)n; ++i)
    spectrum.samples[i] *= grid.samples[i];
  return idft2_real(spectrum);
}

}  // namespace gpm
