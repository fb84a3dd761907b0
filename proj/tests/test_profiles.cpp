#include <doctest.h>

#include <cmath>

#include "spn/common.hpp"
#include "spn/profiles.hpp"

using namespace spn;

namespace {

// Central-difference check of analytic derivatives at random interior points.
void check_derivatives(const WarpingProfile& p, int n_points, std::uint64_t seed,
                       double rel_tol = 1e-6, double abs_floor = 1e-9) {
  Rng rng(seed);
  const double h = 1e-5 * (p.hi() - p.lo());
  for (int i = 0; i < n_points; ++i) {
    const double r = rng.uniform(p.lo() + 2 * h, p.hi() - 2 * h);
    const ProfileSample s = p(r);
    const double fd1 = (p.value(r + h) - p.value(r - h)) / (2 * h);
    const double fd2 = (p.value(r + h) - 2 * s.value + p.value(r - h)) / (h * h);
    CHECK(std::abs(s.d1 - fd1) <= rel_tol * std::max(std::abs(fd1), 1.0) + abs_floor);
    CHECK(std::abs(s.d2 - fd2) <= 5e-5 * std::max(std::abs(fd2), 1.0) + 1e-5);
  }
}

}  // namespace

TEST_CASE("bump mu endpoint values and symmetry") {
  CHECK(bump_mu(0.0).value == 0.0);
  CHECK(bump_mu(1.0).value == 1.0);
  CHECK(bump_mu(-3.0).value == 0.0);
  CHECK(bump_mu(7.0).value == 1.0);
  CHECK(bump_mu(0.5).value == doctest::Approx(0.5).epsilon(1e-15));
  // mu(x) + mu(1-x) = 1
  for (double x : {0.1, 0.25, 0.7, 0.93})
    CHECK(bump_mu(x).value + bump_mu(1.0 - x).value == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("bump mu is monotone with flat tails") {
  double prev = -1;
  for (int i = 0; i <= 2000; ++i) {
    const double t = -0.5 + 2.0 * i / 2000;
    const ProfileSample s = bump_mu(t);
    CHECK(s.value >= prev - 1e-15);
    CHECK(s.d1 >= -1e-15);
    prev = s.value;
  }
  CHECK(bump_mu(1e-9).d1 == 0.0);  // flushed tail
  CHECK(bump_mu(1.0 - 1e-9).d2 == 0.0);
}

TEST_CASE("bump mu derivative consistency") {
  WarpingProfile mu([](double t) { return bump_mu(t); }, 0.05, 0.95, 0.0);
  check_derivatives(mu, 100, 42);
}

TEST_CASE("mu_L rescaling") {
  CHECK_THROWS_AS(mu_L(0.0, 1.0), Error);
  CHECK(mu_L(2.0, 1.0).value == 0.0);
  CHECK(mu_L(2.0, 2.0).value == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(mu_L(2.0, 3.0).value == 1.0);
  // chain rule against the unscaled bump
  const double L = 3.0, t = 2.2;
  const ProfileSample base = bump_mu((t - 1.0) / L);
  const ProfileSample s = mu_L(L, t);
  CHECK(s.d1 == doctest::Approx(base.d1 / L).epsilon(1e-14));
  CHECK(s.d2 == doctest::Approx(base.d2 / (L * L)).epsilon(1e-14));
}

TEST_CASE("mu derivative suprema match a dense scan") {
  // sup |mu_L'| must equal sup|mu'|/L; the cached suprema feed that bound.
  CHECK(mu_sup_d1() == doctest::Approx(2.0).epsilon(1e-5));
  CHECK(mu_sup_d2() > mu_sup_d1());
  double m1 = 0;
  for (int i = 0; i <= 20000; ++i) m1 = std::max(m1, std::abs(bump_mu(i / 20000.0).d1));
  CHECK(mu_sup_d1() == doctest::Approx(m1).epsilon(1e-6));
}

TEST_CASE("torpedo profile piecewise structure") {
  const double delta = 1.0;
  // sine cap
  CHECK(torpedo_eta(delta, 0.0, kPi / 4.0).value ==
        doctest::Approx(std::sin(kPi / 4.0)).epsilon(1e-12));
  CHECK(torpedo_eta(delta, 0.0, 0.1).value == doctest::Approx(std::sin(0.1)).epsilon(1e-14));
  // plateau at C*delta past pi*delta/2
  const double C = torpedo_constant(1e-10);
  CHECK(torpedo_eta(1.0, 1.0, kPi / 2.0 + 0.5).value == doctest::Approx(C).epsilon(1e-9));
  CHECK(torpedo_eta(1.0, 1.0, kPi / 2.0 + 0.5).d1 == 0.0);
  CHECK(torpedo_eta(1.0, 1.0, kPi / 2.0 + 0.5).d2 == 0.0);
  // domain error outside [0, pi delta/2 + lambda]
  CHECK_THROWS_AS(torpedo_eta(1.0, 0.0, kPi), Error);
  CHECK_THROWS_AS(torpedo_eta(1.0, 0.0, -0.5), Error);
}

TEST_CASE("torpedo profile is concave with vanishing derivatives at the cap end") {
  const WarpingProfile eta = torpedo_profile(0.7, 0.4);
  for (int i = 0; i <= 1000; ++i) {
    const double r = eta.lo() + (eta.hi() - eta.lo()) * i / 1000;
    CHECK(eta.d2(r) <= 1e-12);
  }
  // eta <= delta sin(r/delta), eta' <= cos(r/delta) on the transition band
  const double delta = 0.7;
  for (int i = 1; i < 100; ++i) {
    const double r = kPi * delta / 4.0 + (kPi * delta / 4.0) * i / 100;
    const ProfileSample s = eta(r);
    CHECK(s.value <= delta * std::sin(r / delta) + 1e-12);
    CHECK(s.d1 <= std::cos(r / delta) + 1e-12);
  }
  CHECK(eta.value(0.0) == 0.0);
  CHECK(eta.d1(0.0) == doctest::Approx(1.0).epsilon(1e-14));
  // all derivatives die at pi*delta/2
  CHECK(std::abs(eta.d1(kPi * delta / 2.0)) < 1e-15);
  CHECK(std::abs(eta.d2(kPi * delta / 2.0)) < 1e-15);
}

TEST_CASE("torpedo derivative consistency") {
  check_derivatives(torpedo_profile(1.0, 0.5), 100, 7);
  check_derivatives(torpedo_profile(0.37, 0.0), 100, 8);
}

TEST_CASE("torpedo constant") {
  const double C = torpedo_constant(1e-10);
  CHECK(C == doctest::Approx(0.916).epsilon(1.1e-3));
  // scale invariance of the defining integral
  for (double delta : {1.0, 0.37}) {
    const double scaled = adaptive_simpson(
        [delta](double u) {
          return std::cos(u / delta) * bump_mu(2.0 - 4.0 * u / (delta * kPi)).value;
        },
        0.0, kPi * delta / 2.0, 1e-12) / delta;
    CHECK(std::abs(scaled - C) < 1e-9);
  }
  // brute-force composite rule agrees
  CHECK(std::abs(torpedo_constant_composite(1000000) - C) < 1e-8);
  CHECK_THROWS_AS(torpedo_constant(-1.0), Error);
}

TEST_CASE("alpha companion of sin is cos") {
  const WarpingProfile beta = sine_profile(1.0, 0.0, kPi);
  const WarpingProfile alpha = alpha_from_beta(beta, kPi);
  double worst = 0;
  for (int i = 0; i <= 1000; ++i) {
    const double r = kPi * i / 1000;
    worst = std::max(worst, std::abs(alpha.value(r) - std::cos(r)));
  }
  CHECK(worst < 1e-8);
  CHECK(std::abs(alpha.value(kPi / 2.0)) < 1e-12);  // empty integral at b/2
  // (alpha')^2 + (beta')^2 = 1
  for (int i = 0; i <= 1000; ++i) {
    const double r = kPi * i / 1000;
    const double a1 = alpha.d1(r), b1 = beta.d1(r);
    CHECK(a1 * a1 + b1 * b1 == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("alpha second derivative matches cos at the closed ends") {
  const WarpingProfile beta = sine_profile(1.0, 0.0, kPi);
  const WarpingProfile alpha = alpha_from_beta(beta, kPi);
  // true alpha'' = -cos r, including the slope-degenerate ends
  for (double r : {0.0, 0.3, kPi / 2, 2.5, kPi}) {
    CHECK(alpha.d2(r) == doctest::Approx(-std::cos(r)).epsilon(5e-4));
  }
}

TEST_CASE("alpha slope violation") {
  const WarpingProfile steep = WarpingProfile(
      [](double r) { return ProfileSample{2.0 * r, 2.0, 0.0}; }, 0.0, 1.0, 0.0);
  CHECK_THROWS_AS(alpha_from_beta(steep, 1.0)(0.5), Error);
}

TEST_CASE("toe warping branches") {
  const WarpingProfile beta = torpedo_profile(1.0, 0.5);
  const WarpingProfile alpha = alpha_anchored(beta, beta.hi(), beta.hi());
  const TwoVarProfile omega = toe_omega(alpha);
  const double r = 0.8;
  CHECK(omega.value(r, -1.5) == 1.0);
  CHECK(omega(r, -1.5).dr == 0.0);
  CHECK(omega.value(r, kPi / 4.0) == doctest::Approx(alpha.value(r)).epsilon(1e-14));
  CHECK(omega.value(r, kPi / 2.0 + 1.5) == 1.0);
  // omega_r is a nonnegative multiple of alpha_r and alpha_r beta_r <= 0
  for (int i = 0; i <= 40; ++i)
    for (int j = 0; j <= 40; ++j) {
      const double rr = beta.lo() + (beta.hi() - beta.lo()) * i / 40;
      const double tt = -2.0 + (kPi / 2.0 + 4.0) * j / 40;
      const TwoVarSample s = omega(rr, tt);
      CHECK(s.dr * beta.d1(rr) <= 1e-12);
      CHECK(s.drr <= 1e-10);  // concave alpha scaled by the activation
    }
}

TEST_CASE("bend warping branches and bounds") {
  const WarpingProfile eta = torpedo_profile(1.0, 0.5);
  const WarpingProfile beta = reversed_profile(eta);
  const WarpingProfile alpha = alpha_anchored(beta, beta.hi(), 0.0);
  const double amax = profile_max_abs(alpha, 0);
  const double Lambda = 10.0;
  CHECK_THROWS_AS(bend_omega(amax * 0.5, alpha), Error);
  const TwoVarProfile omega = bend_omega(Lambda, alpha);

  const double r = 0.9;
  CHECK(omega.value(r, -2.5) == 1.0);
  CHECK(omega(r, -2.5).dr == 0.0);
  CHECK(omega.value(r, -1.0) == doctest::Approx(Lambda).epsilon(1e-14));
  CHECK(omega.value(r, kPi / 4.0) ==
        doctest::Approx(Lambda + alpha.value(r)).epsilon(1e-14));
  CHECK(omega.value(r, kPi / 2.0 + 1.0) == doctest::Approx(Lambda).epsilon(1e-14));
  CHECK(omega.value(r, kPi / 2.0 + 2.5) == 1.0);

  const double a1max = profile_max_abs(alpha, 1);
  const double a2max = profile_max_abs(alpha, 2);
  double vmin = 1e300;
  for (int i = 0; i <= 60; ++i)
    for (int j = 0; j <= 120; ++j) {
      const double rr = beta.lo() + (beta.hi() - beta.lo()) * i / 60;
      const double tt = -3.0 + (kPi + 6.0) * j / 120;
      const TwoVarSample s = omega(rr, tt);
      if (tt > -1.5 && tt < kPi / 2.0 + 1.5) vmin = std::min(vmin, s.value);
      // dr vanishes outside the turn band
      if (tt <= -0.5 || tt >= kPi / 2.0 + 0.5) CHECK(std::abs(s.dr) < 1e-15);
      CHECK(std::abs(s.dr) <= a1max + 1e-12);
      CHECK(std::abs(s.drr) <= std::abs(alpha.d2(rr)) + 1e-10);
      (void)a2max;
    }
  CHECK(vmin >= Lambda - amax - 1e-12);
}

TEST_CASE("profile csv dump format") {
  const WarpingProfile beta = torpedo_profile(1.0, 0.0);
  const std::string path = "profile_test.csv";
  dump_profile_csv(beta, path, 16);
  std::FILE* f = std::fopen(path.c_str(), "rb");
  REQUIRE(f != nullptr);
  char line[256];
  REQUIRE(std::fgets(line, sizeof line, f) != nullptr);
  CHECK(std::string(line) == "r,value,d1,d2\n");
  std::fclose(f);
  std::remove(path.c_str());
}
