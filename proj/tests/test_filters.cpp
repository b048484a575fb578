#include "doctest.h"

#include "gpm/core.hpp"
#include "gpm/filters.hpp"
#include "gpm/reference.hpp"

#include "oracles.hpp"

#include <cmath>
#include <random>
#include <string>

using namespace gpm;

namespace {

PhysicalConfig reference_config() {
  PhysicalConfig cfg;
  cfg.wavelength_m = 0.5e-10;
  cfg.delta = 5e-7;
  cfg.beta = 1e-9;
  cfg.distance_m = 0.1;
  cfg.pixel_m = 10e-6;
  return cfg;
}

}  // namespace

TEST_CASE("low-pass filter values at reference conditions") {
  const PhysicalConfig cfg = reference_config();
  const double a = cfg.alpha();
  const double w = cfg.pixel_m;
  const double corner = kPi / w;

  CHECK(pm_filter(0.0, 0.0, a) == 1.0);
  CHECK(gpm_filter(0.0, 0.0, a, w) == 1.0);
  CHECK(tunable_filter(0.0, 0.0, a, w, 0.7) == 1.0);

  // Zone-corner responses against long double closed forms.
  const long double al = 5e-8L / (80.0L * oracle::kPiL);
  const long double cl = oracle::kPiL / 10e-6L;
  CHECK(oracle::rel_err(pm_filter(corner, corner, a), oracle::pm_filter_ld(cl, cl, al)) < 1e-13);
  CHECK(oracle::rel_err(gpm_filter(corner, corner, a, w),
                        oracle::gpm_filter_ld(cl, cl, al, 10e-6L)) < 1e-13);

  // Spot values for these conditions.
  CHECK(pm_filter(corner, corner, a) == doctest::Approx(0.0248324380523).epsilon(1e-9));
  CHECK(gpm_filter(corner, corner, a, w) == doctest::Approx(0.0591173974417).epsilon(1e-9));

  // The periodic filter keeps strictly more contrast everywhere off DC.
  CHECK(gpm_filter(corner, corner, a, w) > pm_filter(corner, corner, a));
}

TEST_CASE("mesh zone boundary handling") {
  const double w = 10e-6;
  const double a = 2e-10;
  const double edge = kPi / w;

  CHECK_NOTHROW(gpm_filter(edge, -edge, a, w));
  CHECK_NOTHROW(tunable_filter(edge, edge, a, w, 1.0));
  CHECK_NOTHROW(filter_ratio(-edge, edge, a, w));

  CHECK_THROWS_AS(gpm_filter(edge * 1.01, 0.0, a, w), ParameterError);
  CHECK_THROWS_AS(tunable_filter(0.0, -edge * 1.01, a, w, 0.5), ParameterError);
  CHECK_THROWS_AS(filter_ratio(edge * 1.01, 0.0, a, w), ParameterError);
  CHECK_THROWS_WITH_AS(gpm_filter(edge * 2.0, 0.0, a, w),
                       doctest::Contains("W*kx"), ParameterError);
}

TEST_CASE("tunable filter deforms between the closed forms") {
  const PhysicalConfig cfg = reference_config();
  const double a = cfg.alpha();
  const double w = cfg.pixel_m;

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-kPi / w, kPi / w);
  for (int i = 0; i < 300; ++i) {
    const double kx = u(rng), ky = u(rng);
    // tau = 0 shares the quadratic denominator shape, bit for bit.
    CHECK(tunable_filter(kx, ky, a, w, 0.0) == pm_filter(kx, ky, a));
    // tau = 1 is the cosine form written with the quadratic split out.
    const double g = gpm_filter(kx, ky, a, w);
    CHECK(std::abs(tunable_filter(kx, ky, a, w, 1.0) - g) <= 1e-13 * g);
  }

  // Intermediate tau lands strictly between the endpoints away from DC.
  const double w10 = 10e-6;
  const double a10 = 10.0 * w10 * w10;  // upsilon = 10
  const double corner = kPi / w10;
  const double lo = pm_filter(corner, corner, a10);
  const double hi = gpm_filter(corner, corner, a10, w10);
  const double mid = tunable_filter(corner, corner, a10, w10, 0.5);
  CHECK(lo == doctest::Approx(0.00504052359129).epsilon(1e-9));
  CHECK(hi == doctest::Approx(0.0123456790123).epsilon(1e-9));
  CHECK(mid == doctest::Approx(0.00715839884429).epsilon(1e-9));
  CHECK(mid > lo);
  CHECK(mid < hi);
}

TEST_CASE("tunable filter rejects a vanishing denominator") {
  // Overdriven deformation: at upsilon = 10 and tau = 2 the corner
  // denominator is about -36.4.
  const double w = 10e-6;
  const double a = 10.0 * w * w;
  const double corner = kPi / w;
  CHECK_THROWS_AS(tunable_filter(corner, corner, a, w, 2.0), NumericalError);
  try {
    tunable_filter(corner, corner, a, w, 2.0);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("kx=") != std::string::npos);
    CHECK(msg.find("tau=") != std::string::npos);
  }
}

TEST_CASE("boost ratio properties over the zone") {
  const double w = 10e-6;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-kPi / w, kPi / w);

  for (double upsilon : {0.01, 0.1, 1.0, 10.0}) {
    const double a = upsilon * w * w;
    CHECK(filter_ratio(0.0, 0.0, a, w) == 1.0);
    for (int i = 0; i < 500; ++i) {
      const double kx = u(rng), ky = u(rng);
      const double r = filter_ratio(kx, ky, a, w);
      CHECK(r >= 1.0 - 1e-15);
      // Consistency with the two filters it compares.
      const double direct = gpm_filter(kx, ky, a, w) / pm_filter(kx, ky, a);
      CHECK(std::abs(r - direct) <= 1e-13 * direct);
    }
    // The corner attains the closed-form maximum.
    const double corner = kPi / w;
    CHECK(oracle::rel_err(filter_ratio(corner, corner, a, w), oracle::r_max_ld(upsilon)) <
          1e-13);
    CHECK(std::abs(filter_ratio(corner, corner, a, w) - r_max(upsilon)) <=
          1e-12 * r_max(upsilon));
  }
}

TEST_CASE("corner boost closed form") {
  CHECK(r_max(0.0) == 1.0);

  // upsilon = 10: (1 + 20*pi^2) / 81.
  const long double exact10 = (1.0L + 20.0L * oracle::kPiL * oracle::kPiL) / 81.0L;
  CHECK(oracle::rel_err(r_max(10.0), exact10) < 1e-15);
  CHECK(r_max(10.0) == doctest::Approx(2.4492850373060145).epsilon(1e-14));

  // Reference conditions: upsilon ~ 1.9894.
  const PhysicalConfig cfg = reference_config();
  CHECK(r_max(cfg.upsilon()) == doctest::Approx(2.38065216622108).epsilon(1e-11));

  // Large screening saturates toward pi^2/4 from below.
  const double limit = kPi * kPi / 4.0;
  CHECK(r_max(1e6) < limit);
  CHECK(std::abs(r_max(1e6) - limit) < 1e-3);

  // Monotone growth in upsilon.
  double prev = r_max(0.0);
  for (double upsilon : {0.01, 0.1, 0.5, 1.0, 2.0, 10.0, 100.0}) {
    const double r = r_max(upsilon);
    CHECK(r > prev);
    prev = r;
  }
  CHECK_THROWS_AS(r_max(-1.0), ParameterError);
}

TEST_CASE("quartic small-frequency expansion of the boost") {
  const double w = 10e-6;
  const double a = 1.0 * w * w;  // upsilon = 1

  // Diagonal sample point W*k = (0.3, 0.3): the approximation overshoots by
  // 2.0806e-4 in absolute terms.
  const double kd = 0.3 / w;
  const double err_diag =
      quartic_ratio_approx(kd, kd, a, w) - filter_ratio(kd, kd, a, w);
  CHECK(err_diag == doctest::Approx(2.08056348384e-4).epsilon(1e-6));

  // On-axis at the same |W*k| component the error is about 5.72e-5.
  const double err_axis =
      quartic_ratio_approx(kd, 0.0, a, w) - filter_ratio(kd, 0.0, a, w);
  CHECK(err_axis == doctest::Approx(5.72073282166e-5).epsilon(1e-6));

  // Sixth-order remainder: halving the frequency shrinks the error ~64x.
  const double e1 = quartic_ratio_approx(0.1 / w, 0.1 / w, a, w) -
                    filter_ratio(0.1 / w, 0.1 / w, a, w);
  const double e2 = quartic_ratio_approx(0.05 / w, 0.05 / w, a, w) -
                    filter_ratio(0.05 / w, 0.05 / w, a, w);
  CHECK(e1 == doctest::Approx(3.3197622e-7).epsilon(1e-5));
  CHECK(e1 / e2 == doctest::Approx(63.02).epsilon(0.01));

  // DC is exact.
  CHECK(quartic_ratio_approx(0.0, 0.0, a, w) == 1.0);
}

TEST_CASE("gaussian deblur boosts") {
  const double c = 1.0;
  const double sigma = 7e-6;
  CHECK(anka_filter(0.0, 0.0, c, sigma) == 1.0);
  CHECK(anka_filter_revised(0.0, 0.0, c, sigma) == 1.0);

  // Closed forms in long double at a sample frequency.
  const double kx = 2.1e5, ky = -1.3e5;
  {
    const long double s2 = (long double)(sigma) * sigma;
    const long double want =
        (1.0L + (long double)(c)) /
        ((long double)(c) +
         std::exp(-oracle::kPiL * s2 * ((long double)(kx) * kx + (long double)(ky) * ky)));
    CHECK(oracle::rel_err(anka_filter(kx, ky, c, sigma), want) < 1e-14);
  }
  {
    const long double s4 = std::pow((long double)(sigma), 4.0L);
    const long double kx2 = (long double)(kx) * kx, ky2 = (long double)(ky) * ky;
    const long double want =
        (1.0L + (long double)(c)) /
        ((long double)(c) + std::exp(-s4 * (kx2 * kx2 + ky2 * ky2)));
    CHECK(oracle::rel_err(anka_filter_revised(kx, ky, c, sigma), want) < 1e-14);
  }

  // Monotone boost away from DC.
  CHECK(anka_filter(kx, ky, c, sigma) > 1.0);
  CHECK(anka_filter_revised(kx, ky, c, sigma) > 1.0);

  // Matching 12*sigma^4/(1+c) = W^2*alpha aligns the revised low-frequency
  // boost with the quartic boost expansion.
  const PhysicalConfig cfg = reference_config();
  const double a = cfg.alpha();
  const double w = cfg.pixel_m;
  const double matched_sigma = std::pow(w * w * a * (1.0 + c) / 12.0, 0.25);
  CHECK(matched_sigma == doctest::Approx(7.58830404275e-6).epsilon(1e-9));
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-0.1 / w, 0.1 / w);
  for (int i = 0; i < 200; ++i) {
    const double fx = u(rng), fy = u(rng);
    const double boost = anka_filter_revised(fx, fy, c, matched_sigma);
    const double quart = quartic_ratio_approx(fx, fy, a, w);
    CHECK(std::abs(boost - quart) <= 1e-8);
  }

  CHECK_THROWS_AS(anka_filter(0.0, 0.0, 0.0, sigma), ParameterError);
  CHECK_THROWS_AS(anka_filter_revised(0.0, 0.0, 1.0, -1e-6), ParameterError);
}

TEST_CASE("source blur folds into the screening constant") {
  CHECK(apply_source_blur(2e-10, 5e-6, 0.1) == doctest::Approx(1.5e-10).epsilon(1e-14));
  // S = 0 is the identity and needs no distance.
  CHECK(apply_source_blur(3e-10, 0.0, 0.0) == 3e-10);
  // Blur too strong for the available screening.
  CHECK_THROWS_AS(apply_source_blur(2e-10, 1e-5, 0.1), ParameterError);
  // Blur without propagation distance makes no sense.
  CHECK_THROWS_AS(apply_source_blur(2e-10, 5e-6, 0.0), ParameterError);
}

TEST_CASE("filter grids match the scalar forms bin by bin") {
  const double w = 10e-6;
  const double a = 2.0 * w * w;
  const int n1 = 14, n2 = 9;
  const FrequencyMesh mesh = build_frequency_mesh(n1, n2, w);

  FilterSpec spec;
  for (FilterKind kind : {FilterKind::Pm, FilterKind::Gpm, FilterKind::Tunable,
                          FilterKind::AnkaDeconv, FilterKind::AnkaDeconvRevised}) {
    spec.kind = kind;
    spec.tau = 0.4;
    spec.anka_c = 0.8;
    spec.anka_sigma_m = 6e-6;
    const RealImage grid = build_filter_grid(spec, a, w, n1, n2);
    REQUIRE(grid.width == n1);
    REQUIRE(grid.height == n2);
    for (int q = 0; q < n2; ++q)
      for (int p = 0; p < n1; ++p) {
        double want = 0.0;
        switch (kind) {
          case FilterKind::Pm: want = pm_filter(mesh.kx[p], mesh.ky[q], a); break;
          case FilterKind::Gpm: want = gpm_filter(mesh.kx[p], mesh.ky[q], a, w); break;
          case FilterKind::Tunable:
            want = tunable_filter(mesh.kx[p], mesh.ky[q], a, w, spec.tau);
            break;
          case FilterKind::AnkaDeconv:
            want = anka_filter(mesh.kx[p], mesh.ky[q], spec.anka_c, spec.anka_sigma_m);
            break;
          case FilterKind::AnkaDeconvRevised:
            want = anka_filter_revised(mesh.kx[p], mesh.ky[q], spec.anka_c,
                                       spec.anka_sigma_m);
            break;
        }
        CHECK(grid.at(p, q) == want);
      }
  }
}

TEST_CASE("filter grid structure") {
  const double w = 10e-6;
  const double a = 2.0 * w * w;
  const int n1 = 16, n2 = 12;

  FilterSpec pm_spec;
  pm_spec.kind = FilterKind::Pm;
  FilterSpec gpm_spec;
  gpm_spec.kind = FilterKind::Gpm;
  const RealImage pm_grid = build_filter_grid(pm_spec, a, w, n1, n2);
  const RealImage gpm_grid = build_filter_grid(gpm_spec, a, w, n1, n2);

  // DC bin passes through untouched and is the global maximum.
  CHECK(pm_grid.at(0, 0) == 1.0);
  CHECK(gpm_grid.at(0, 0) == 1.0);
  CHECK(pm_grid.max() == 1.0);
  CHECK(gpm_grid.max() == 1.0);

  for (int q = 0; q < n2; ++q)
    for (int p = 0; p < n1; ++p) {
      // All bins positive, none above DC.
      CHECK(pm_grid.at(p, q) > 0.0);
      CHECK(pm_grid.at(p, q) <= 1.0);
      // The periodic form suppresses no more than the quadratic form.
      CHECK(gpm_grid.at(p, q) >= pm_grid.at(p, q) * (1.0 - 1e-14));
      // Real filters of |k| are symmetric under frequency negation.
      const int pr = (n1 - p) % n1, qr = (n2 - q) % n2;
      CHECK(pm_grid.at(p, q) == doctest::Approx(pm_grid.at(pr, qr)).epsilon(1e-15));
      CHECK(gpm_grid.at(p, q) == doctest::Approx(gpm_grid.at(pr, qr)).epsilon(1e-15));
    }

  // Stronger screening means stronger suppression off DC.
  const RealImage gpm_strong = build_filter_grid(gpm_spec, 2.0 * a, w, n1, n2);
  for (int q = 0; q < n2; ++q)
    for (int p = 0; p < n1; ++p) {
      if (p == 0 && q == 0) {
        CHECK(gpm_strong.at(p, q) == 1.0);
      } else {
        CHECK(gpm_strong.at(p, q) < gpm_grid.at(p, q));
      }
    }
}

TEST_CASE("filter grid from the physical configuration") {
  PhysicalConfig cfg = reference_config();
  const int n1 = 10, n2 = 8;

  FilterSpec spec;
  spec.kind = FilterKind::Gpm;
  spec.source_blur_m = 5e-6;
  const RealImage via_cfg = build_filter_grid(spec, cfg, n1, n2);
  const double effective = apply_source_blur(cfg.alpha(), spec.source_blur_m, cfg.distance_m);
  FilterSpec plain = spec;
  plain.source_blur_m = 0.0;
  const RealImage via_alpha = build_filter_grid(plain, effective, cfg.pixel_m, n1, n2);
  for (std::size_t i = 0; i < via_cfg.samples.size(); ++i)
    CHECK(via_cfg.samples[i] == via_alpha.samples[i]);

  // The deblur kinds ignore the physical screening entirely.
  FilterSpec anka;
  anka.kind = FilterKind::AnkaDeconv;
  anka.anka_c = 1.0;
  anka.anka_sigma_m = 6e-6;
  const RealImage anka_cfg = build_filter_grid(anka, cfg, n1, n2);
  const RealImage anka_direct = build_filter_grid(anka, 0.0, cfg.pixel_m, n1, n2);
  for (std::size_t i = 0; i < anka_cfg.samples.size(); ++i)
    CHECK(anka_cfg.samples[i] == anka_direct.samples[i]);
}

TEST_CASE("filter grid parallel and serial paths agree bitwise") {
  const double w = 10e-6;
  const double a = 1.3 * w * w;
  FilterSpec spec;
  for (FilterKind kind : {FilterKind::Pm, FilterKind::Gpm, FilterKind::Tunable}) {
    spec.kind = kind;
    spec.tau = 0.6;
    const RealImage par = build_filter_grid(spec, a, w, 33, 17);
    const RealImage ser = serial::build_filter_grid(spec, a, w, 33, 17);
    REQUIRE(par.samples.size() == ser.samples.size());
    for (std::size_t i = 0; i < par.samples.size(); ++i)
      CHECK(par.samples[i] == ser.samples[i]);
  }
}

TEST_CASE("filter grid propagates worker errors") {
  // Overdriven tunable deformation fails inside the parallel fill; the error
  // must surface as the library exception, not terminate().
  const double w = 10e-6;
  const double a = 10.0 * w * w;
  FilterSpec spec;
  spec.kind = FilterKind::Tunable;
  spec.tau = 2.0;
  CHECK_THROWS_AS(build_filter_grid(spec, a, w, 64, 64), NumericalError);
}

TEST_CASE("filter spec validation") {
  FilterSpec spec;
  spec.kind = FilterKind::Tunable;
  spec.tau = -0.1;
  CHECK_THROWS_AS(spec.validate(), ParameterError);

  spec = FilterSpec{};
  spec.kind = FilterKind::AnkaDeconv;
  spec.anka_c = 0.0;
  CHECK_THROWS_AS(spec.validate(), ParameterError);

  spec = FilterSpec{};
  spec.kind = FilterKind::AnkaDeconvRevised;
  spec.anka_sigma_m = -1.0;
  CHECK_THROWS_AS(spec.validate(), ParameterError);

  spec = FilterSpec{};
  spec.kind = FilterKind::AnkaDeconv;
  spec.anka_sigma_m = 5e-6;
  spec.source_blur_m = 1e-6;
  CHECK_THROWS_AS(spec.validate(), ParameterError);

  spec = FilterSpec{};
  spec.kind = FilterKind::Gpm;
  spec.source_blur_m = 1e-6;
  CHECK_NOTHROW(spec.validate());
}
