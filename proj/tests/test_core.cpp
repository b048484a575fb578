#include "doctest.h"

#include "gpm/core.hpp"
#include "gpm/fft.hpp"
#include "gpm/io.hpp"

#include "oracles.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <cstdlib>
#include <filesystem>

using namespace gpm;

namespace {

// Beam/sample settings used throughout: 0.5 angstrom, delta/beta = 500,
// 10 micron pixels, 0.1 m propagation.
PhysicalConfig reference_config() {
  PhysicalConfig cfg;
  cfg.wavelength_m = 0.5e-10;
  cfg.delta = 5e-7;
  cfg.beta = 1e-9;
  cfg.distance_m = 0.1;
  cfg.pixel_m = 10e-6;
  cfg.incident_intensity = 1.0;
  return cfg;
}

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("derived constants for the reference beam") {
  const PhysicalConfig cfg = reference_config();
  const DerivedConstants d = derive_constants(cfg, cfg.pixel_m);

  // mu = 4*pi*beta/lambda = 80*pi here; alpha = delta*dist/mu.
  const long double k_l = 2.0L * oracle::kPiL / 0.5e-10L;
  const long double mu_l = 80.0L * oracle::kPiL;
  const long double alpha_l = 5e-8L / mu_l;
  CHECK(oracle::rel_err(d.wavenumber, k_l) < 1e-14);
  CHECK(oracle::rel_err(d.mu, mu_l) < 1e-14);
  CHECK(oracle::rel_err(d.alpha, alpha_l) < 1e-14);
  CHECK(oracle::rel_err(d.upsilon, alpha_l / 1e-10L) < 1e-14);
  CHECK(d.fresnel_number == doctest::Approx(20.0).epsilon(1e-12));

  // Spot values.
  CHECK(d.mu == doctest::Approx(251.327).epsilon(1e-5));
  CHECK(d.alpha == doctest::Approx(1.98944e-10).epsilon(1e-5));
  CHECK(d.upsilon == doctest::Approx(1.98944).epsilon(1e-5));

  // upsilon = (delta/beta)/(4*pi*N_F) identity.
  const double via_nf = (cfg.delta / cfg.beta) / (4.0 * kPi * d.fresnel_number);
  CHECK(d.upsilon == doctest::Approx(via_nf).epsilon(1e-12));
}

TEST_CASE("derived constants edge cases") {
  PhysicalConfig cfg = reference_config();
  cfg.distance_m = 0.0;
  const DerivedConstants d = derive_constants(cfg, cfg.pixel_m);
  CHECK(d.alpha == 0.0);
  CHECK(d.upsilon == 0.0);
  CHECK(std::isinf(d.fresnel_number));

  cfg = reference_config();
  cfg.delta = 0.0;
  CHECK(derive_constants(cfg, cfg.pixel_m).alpha == 0.0);

  // Doubling the pixel divides upsilon by 4 and multiplies N_F by 4.
  cfg = reference_config();
  PhysicalConfig wide = cfg;
  wide.pixel_m = 2.0 * cfg.pixel_m;
  CHECK(wide.upsilon() == doctest::Approx(cfg.upsilon() / 4.0).epsilon(1e-12));
  CHECK(wide.fresnel_number(wide.pixel_m) ==
        doctest::Approx(4.0 * cfg.fresnel_number(cfg.pixel_m)).epsilon(1e-12));
}

TEST_CASE("config validation rejects bad values") {
  PhysicalConfig cfg = reference_config();
  cfg.wavelength_m = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ParameterError);
  cfg = reference_config();
  cfg.beta = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ParameterError);
  cfg = reference_config();
  cfg.pixel_m = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ParameterError);
  cfg = reference_config();
  cfg.delta = -1e-9;
  CHECK_THROWS_AS(cfg.validate(), ParameterError);
  cfg = reference_config();
  cfg.incident_intensity = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ParameterError);
}

TEST_CASE("energy/wavelength conversion") {
  // 24.79683860 keV <-> 0.5 angstrom.
  CHECK(wavelength_from_energy_kev(24.7968386) == doctest::Approx(0.5e-10).epsilon(1e-8));
  CHECK(energy_kev_from_wavelength(0.5e-10) == doctest::Approx(24.7968386).epsilon(1e-8));
  CHECK(wavelength_from_energy_kev(energy_kev_from_wavelength(1.3e-10)) ==
        doctest::Approx(1.3e-10).epsilon(1e-14));
  CHECK_THROWS_AS(wavelength_from_energy_kev(0.0), ParameterError);
}

TEST_CASE("frequency mesh layout") {
  const FrequencyMesh mesh4 = build_frequency_mesh(4, 4, 1.0);
  CHECK(mesh4.kx[0] == 0.0);
  CHECK(mesh4.kx[1] == doctest::Approx(kPi / 2).epsilon(1e-15));
  CHECK(mesh4.kx[2] == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(mesh4.kx[3] == doctest::Approx(-kPi / 2).epsilon(1e-15));

  const FrequencyMesh mesh2 = build_frequency_mesh(2, 2, 1.0);
  CHECK(mesh2.kx[0] == 0.0);
  CHECK(mesh2.kx[1] == doctest::Approx(kPi).epsilon(1e-15));

  // Even N: the band edge W*k is exactly pi. Odd N stays strictly inside.
  const FrequencyMesh mesh256 = build_frequency_mesh(256, 64, 1e-5);
  double max_scaled = 0.0;
  for (double u : mesh256.kx_scaled) max_scaled = std::max(max_scaled, std::abs(u));
  CHECK(max_scaled == kPi);
  double max_abs_k = 0.0;
  for (double k : mesh256.kx) max_abs_k = std::max(max_abs_k, std::abs(k));
  CHECK(max_abs_k == doctest::Approx(kPi / 1e-5).epsilon(1e-14));

  const FrequencyMesh mesh5 = build_frequency_mesh(5, 5, 1.0);
  double max5 = 0.0;
  for (double u : mesh5.kx_scaled) max5 = std::max(max5, std::abs(u));
  CHECK(max5 < kPi);
  CHECK(max5 == doctest::Approx(2.0 * kPi * 2.0 / 5.0).epsilon(1e-15));

  CHECK_THROWS_AS(build_frequency_mesh(1, 4, 1.0), ParameterError);
  CHECK_THROWS_AS(build_frequency_mesh(4, 4, 0.0), ParameterError);
}

TEST_CASE("image construction and stats") {
  RealImage img = RealImage::constant(4, 3, 1e-6, 2.5);
  CHECK(img.size() == 12);
  CHECK(img.mean() == doctest::Approx(2.5));
  img.at(1, 2) = -3.5;
  CHECK(img.min() == -3.5);
  CHECK(img.max() == 2.5);
  CHECK_NOTHROW(img.validate("img"));
  img.samples[0] = std::nan("");
  CHECK_THROWS_AS(img.validate("img"), ParameterError);
  CHECK_THROWS_AS(RealImage::zeros(1, 8, 1.0), ParameterError);
  CHECK_THROWS_AS(RealImage::zeros(8, 8, 0.0), ParameterError);
}

TEST_CASE("dft matches the direct definition and round-trips") {
  const int n1 = 12, n2 = 8;
  const RealImage img = oracle::random_image(n1, n2, 1.0, 7u, -1.0, 1.0);
  ComplexField promoted = ComplexField::zeros(n1, n2, 1.0);
  for (std::size_t i = 0; i < img.size(); ++i) promoted.samples[i] = img.samples[i];

  const ComplexField fast = dft2(promoted);
  const auto direct = oracle::dft2_direct(promoted.samples, n1, n2);
  double max_err = 0.0, max_mag = 0.0;
  for (std::size_t i = 0; i < direct.size(); ++i) {
    max_err = std::max(max_err, std::abs(fast.samples[i] - direct[i]));
    max_mag = std::max(max_mag, std::abs(direct[i]));
  }
  CHECK(max_err / max_mag < 1e-12);

  // Forward picks up no normalization: DC equals the plain sample sum.
  double sum = 0.0;
  for (double v : img.samples) sum += v;
  CHECK(fast.samples[0].real() == doctest::Approx(sum).epsilon(1e-12));

  // Inverse carries 1/(N1*N2): round trip is the identity.
  const ComplexField back = idft2(fast);
  double rt = 0.0;
  for (std::size_t i = 0; i < img.size(); ++i)
    rt = std::max(rt, std::abs(back.samples[i] - promoted.samples[i]));
  CHECK(rt < 1e-12);

  const RealImage back_real = idft2_real(dft2(img));
  double rt2 = 0.0;
  for (std::size_t i = 0; i < img.size(); ++i)
    rt2 = std::max(rt2, std::abs(back_real.samples[i] - img.samples[i]));
  CHECK(rt2 < 1e-12);
}

TEST_CASE("spectral grid application matches manual filtering") {
  const int n = 16;
  const RealImage img = oracle::random_image(n, n, 1.0, 11u);
  RealImage grid = RealImage::constant(n, n, 1.0, 1.0);  // identity filter
  const RealImage same = apply_spectral_grid(img, grid);
  for (std::size_t i = 0; i < img.size(); ++i)
    CHECK(same.samples[i] == doctest::Approx(img.samples[i]).epsilon(1e-12));

  RealImage half = RealImage::constant(n, n, 1.0, 0.5);
  const RealImage halved = apply_spectral_grid(img, half);
  for (std::size_t i = 0; i < img.size(); ++i)
    CHECK(halved.samples[i] == doctest::Approx(0.5 * img.samples[i]).epsilon(1e-12));

  RealImage wrong = RealImage::constant(8, 8, 1.0, 1.0);
  CHECK_THROWS_AS(apply_spectral_grid(img, wrong), ParameterError);
}

TEST_CASE("float tiff round trip") {
  const std::string path = temp_path("gpm_test_roundtrip.tif");
  RealImage img = oracle::random_image(33, 17, 7.2e-7, 23u, -4.0, 4.0);
  write_tiff_f32(path, img);
  const RealImage back = read_tiff_f32(path);
  REQUIRE(back.width == img.width);
  REQUIRE(back.height == img.height);
  CHECK(back.pixel_m == doctest::Approx(img.pixel_m).epsilon(1e-14));
  for (std::size_t i = 0; i < img.size(); ++i)
    CHECK(back.samples[i] == doctest::Approx(double(float(img.samples[i]))).epsilon(1e-12));

  // Explicit pitch wins over the file metadata.
  const RealImage forced = read_tiff_f32(path, 5e-6);
  CHECK(forced.pixel_m == 5e-6);
  std::remove(path.c_str());

  CHECK_THROWS_AS(read_tiff_f32(temp_path("gpm_no_such_file.tif")), IoError);
}

TEST_CASE("raw round trip and size check") {
  const std::string path = temp_path("gpm_test_roundtrip.raw");
  RealImage img = oracle::random_image(9, 5, 1e-5, 29u, 0.0, 2.0);
  write_raw_f32(path, img);
  const RealImage back = read_raw_f32(path, 9, 5, 1e-5);
  for (std::size_t i = 0; i < img.size(); ++i)
    CHECK(back.samples[i] == doctest::Approx(double(float(img.samples[i]))).epsilon(1e-12));
  CHECK_THROWS_AS(read_raw_f32(path, 9, 6, 1e-5), IoError);
  std::remove(path.c_str());
}

TEST_CASE("csv writer emits one header and round-trip precision values") {
  const std::string path = temp_path("gpm_test.csv");
  write_csv(path, {"a", "b"}, {{1.0, 0.1}, {2.0, 1.0 / 3.0}});
  std::FILE* f = std::fopen(path.c_str(), "rb");
  REQUIRE(f);
  char buf[256];
  REQUIRE(std::fgets(buf, sizeof buf, f));
  CHECK(std::string(buf) == "a,b\n");
  REQUIRE(std::fgets(buf, sizeof buf, f));
  CHECK(std::string(buf) == "1,0.10000000000000001\n");
  REQUIRE(std::fgets(buf, sizeof buf, f));
  std::fclose(f);
  const double third = std::strtod(std::strchr(buf, ',') + 1, nullptr);
  CHECK(third == 1.0 / 3.0);  // bit-exact round trip
  std::remove(path.c_str());
}
