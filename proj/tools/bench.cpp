// Times the OpenMP kernels against their single-threaded twins and checks
// that both paths agree bit for bit. Wall times are medians over repeats.

#include "gpm/analysis.hpp"
#include "gpm/core.hpp"
#include "gpm/filters.hpp"
#include "gpm/fft.hpp"
#include "gpm/fresnel.hpp"
#include "gpm/phantom.hpp"
#include "gpm/reference.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

namespace {

using clock_type = std::chrono::steady_clock;

double median_ms(const std::function<void()>& fn, int repeats) {
  std::vector<double> times;
  times.reserve(repeats);
  for (int i = 0; i < repeats; ++i) {
    const auto t0 = clock_type::now();
    fn();
    const auto t1 = clock_type::now();
    times.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  std::sort(times.begin(), times.end());
  return times[times.size() / 2];
}

double max_abs_diff(const gpm::RealImage& a, const gpm::RealImage& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.samples.size(); ++i)
    worst = std::max(worst, std::abs(a.samples[i] - b.samples[i]));
  return worst;
}

double max_abs_diff(const gpm::ComplexField& a, const gpm::ComplexField& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.samples.size(); ++i)
    worst = std::max(worst, std::abs(a.samples[i] - b.samples[i]));
  return worst;
}

void report(const char* name, double serial_ms, double parallel_ms, double diff) {
  std::printf("%-22s %10.3f %12.3f %9.2fx %12.3g\n", name, serial_ms, parallel_ms,
              serial_ms / parallel_ms, diff);
}

}  // namespace

int main(int argc, char** argv) {
  int n = 2048;
  int repeats = 5;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--size" && i + 1 < argc)
      n = std::atoi(argv[++i]);
    else if (arg == "--repeats" && i + 1 < argc)
      repeats = std::atoi(argv[++i]);
    else {
      std::fprintf(stderr, "usage: gpm_bench [--size N] [--repeats R]\n");
      return 2;
    }
  }
  if (n < 16 || repeats < 1) {
    std::fprintf(stderr, "error: size must be >= 16 and repeats >= 1\n");
    return 2;
  }

#ifdef _OPENMP
  std::printf("threads: %d, grid: %dx%d, repeats: %d (median)\n", omp_get_max_threads(),
              n, n, repeats);
#else
  std::printf("threads: 1 (no OpenMP), grid: %dx%d, repeats: %d (median)\n", n, n,
              repeats);
#endif
  std::printf("%-22s %10s %12s %9s %12s\n", "kernel", "serial[ms]", "parallel[ms]",
              "speedup", "max|diff|");

  gpm::PhysicalConfig cfg;
  cfg.wavelength_m = 5e-11;
  cfg.delta = 5e-7;
  cfg.beta = 1e-9;
  cfg.distance_m = 0.1;
  cfg.pixel_m = 1e-5;

  gpm::BinaryPhantomSpec spec;
  spec.n1 = n;
  spec.n2 = n;
  spec.pixel_m = cfg.pixel_m;
  spec.thickness_m = 4e-5;
  spec.fill_fraction = 0.5;
  spec.block_px = 2;
  spec.seed = 1;
  const gpm::RealImage image = gpm::random_binary(spec);

  gpm::FilterSpec filter;
  filter.kind = gpm::FilterKind::Gpm;
  const double alpha = cfg.alpha();

  {
    gpm::RealImage par, ser;
    const double t_par = median_ms(
        [&] { par = gpm::build_filter_grid(filter, alpha, cfg.pixel_m, n, n); }, repeats);
    const double t_ser = median_ms(
        [&] { ser = gpm::serial::build_filter_grid(filter, alpha, cfg.pixel_m, n, n); },
        repeats);
    report("filter_grid", t_ser, t_par, max_abs_diff(par, ser));
  }
  {
    gpm::RealImage par, ser;
    const double t_par = median_ms([&] { par = gpm::laplacian_5pt(image); }, repeats);
    const double t_ser =
        median_ms([&] { ser = gpm::serial::laplacian_5pt(image); }, repeats);
    report("laplacian_5pt", t_ser, t_par, max_abs_diff(par, ser));
  }
  {
    gpm::ComplexField par, ser;
    const double t_par = median_ms([&] { par = gpm::transmission(image, cfg); }, repeats);
    const double t_ser =
        median_ms([&] { ser = gpm::serial::transmission(image, cfg); }, repeats);
    report("transmission", t_ser, t_par, max_abs_diff(par, ser));
  }
  {
    gpm::RealImage par, ser;
    const double t_par =
        median_ms([&] { par = gpm::upsample_replicate(image, 2); }, repeats);
    const double t_ser =
        median_ms([&] { ser = gpm::serial::upsample_replicate(image, 2); }, repeats);
    report("upsample_replicate", t_ser, t_par, max_abs_diff(par, ser));

    const gpm::RealImage fine = std::move(par);
    gpm::RealImage rpar, rser;
    const double rt_par = median_ms([&] { rpar = gpm::rebin_average(fine, 2); }, repeats);
    const double rt_ser =
        median_ms([&] { rser = gpm::serial::rebin_average(fine, 2); }, repeats);
    report("rebin_average", rt_ser, rt_par, max_abs_diff(rpar, rser));
  }
  {
    const gpm::RealImage grid = gpm::build_filter_grid(filter, alpha, cfg.pixel_m, n, n);
    gpm::RealImage par, ser;
    const double t_par =
        median_ms([&] { par = gpm::apply_spectral_grid(image, grid); }, repeats);
    const double t_ser =
        median_ms([&] { ser = gpm::serial::apply_spectral_grid(image, grid); }, repeats);
    report("apply_spectral_grid", t_ser, t_par, max_abs_diff(par, ser));
  }

  return 0;
}
