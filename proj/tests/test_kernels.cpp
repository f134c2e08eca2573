#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"
#include "satk/kernels.hpp"
#include "satk/specfun.hpp"

using namespace satk;

namespace {

double sine(double x) { return x == 0.0 ? 1.0 : std::sin(kPi * x) / (kPi * x); }

std::complex<double> G(std::complex<double> z, double q) {
  std::complex<double> p = 1.0;
  double qj = 1.0;
  for (int j = 1; j <= 50; ++j) {
    qj *= q;
    p *= (1.0 - qj * z) * (1.0 - qj / z);
  }
  return p;
}

// product-series form of the (S,S) kernel, a = 1
double lss_product_oracle(double d, double u, double v) {
  const double q = std::exp(-kPi / d);
  std::complex<double> s = 0.0;
  for (int n = -20; n <= 20; ++n) {
    const std::complex<double> z =
        (n % 2 ? -1.0 : 1.0) * std::exp(-kPi * (u - v) / d);
    s += std::exp(std::complex<double>(-kPi * d * n * n / 2.0,
                                       -kPi * n * (u + v))) *
         G(z, q);
  }
  return (std::exp(-kPi * (u - v) * (u - v) / (2.0 * d)) * s / G(1.0, q))
      .real();
}

double bessel_direct(double nu, double x, double y) {
  using boost::math::cyl_bessel_j;
  const double sx = std::sqrt(x), sy = std::sqrt(y);
  return (sx * cyl_bessel_j(nu + 1, sx) * cyl_bessel_j(nu, sy) -
          cyl_bessel_j(nu, sx) * sy * cyl_bessel_j(nu + 1, sy)) /
         (2.0 * (x - y));
}

}  // namespace

TEST_CASE("sine kernel") {
  KernelHandle k = sine_kernel(1.0);
  CHECK(k(0.3, 0.3) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(k(0.0, 0.5) - 2.0 / kPi) < 1e-15);
  CHECK(std::abs(k(0.0, 1.0)) < 1e-16);
  KernelHandle k2 = sine_kernel(2.5);
  CHECK(std::abs(k2(1.0, 1.0) - 0.4) < 1e-15);
  CHECK(std::abs(k2(1.0, 1.0 + 1e-5) - std::sin(kPi * 1e-5 / 2.5) / (kPi * 1e-5)) < 1e-15);
}

TEST_CASE("LS: large d tends to the sine kernel") {
  const double d = 1e3;
  double sup = 0.0;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      double x = 0.5 * i, y = 0.5 * j;
      sup = std::max(sup, std::abs(ls_series(d, x, y) - sine(x - y)));
    }
  CHECK(sup < 2e-3);
}

TEST_CASE("LS: density") {
  const double d = 2.0;
  KernelHandle k = kernel_LS(EquidistantModel::from_d(d));
  CHECK(std::abs(k(0.0, 0.0) - (1.0 + 1.0 / (kPi * d))) <= 2.0 * std::exp(-2.0 * kPi * d) / d);
  CHECK_THROWS_AS(ls_series(d, 0.0, 0.0, 0.0), std::domain_error);
}

TEST_CASE("LS approx") {
  const double d = 1.5;
  double sup = 0.0;
  for (double x = -2.0; x <= 2.0; x += 0.25)
    for (double y = -2.0; y <= 2.0; y += 0.25)
      sup = std::max(sup, std::abs(ls_series(d, x, y) - ls_approx(d, x, y)));
  CHECK(sup < 10.0 * std::exp(-2.0 * kPi * d));
  for (double x : {0.0, 0.17, 0.5, 1.3})
    CHECK(std::abs(ls_approx(d, x, x) - (1.0 + std::cos(2 * kPi * x) / (kPi * d))) < 1e-15);
  for (double x = -1.0; x <= 1.0; x += 0.3)
    for (double y = -1.0; y <= 1.0; y += 0.35) {
      double defect = ls_approx(d, x, y) - ls_approx(d, y, x);
      double expect = 2.0 * (y - x) * std::sin(kPi * (x + y)) /
                      (kPi * (d * d + (y - x) * (y - x)));
      CHECK(std::abs(defect - expect) < 1e-14);
    }
}

TEST_CASE("LSS theta form") {
  for (double d : {1.5, 2.0, 3.0}) {
    double sup = 0.0;
    for (double u = -2.0; u <= 2.0; u += 0.25)
      for (double v = -2.0; v <= 2.0; v += 0.25)
        sup = std::max(sup, std::abs(lss_theta(d, u, v) - lss_approx(d, u, v)));
    CHECK(sup < 10.0 * std::exp(-2.0 * kPi * d));
  }
  double sup = 0.0;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      double x = 0.5 * i, y = 0.5 * j;
      sup = std::max(sup, std::abs(lss_theta(1e3, x, y) - sine(x - y)));
    }
  CHECK(sup < 5e-3);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-2.0, 2.0), D(0.5, 3.0);
  for (int i = 0; i < 10; ++i) {
    double d = D(rng), u = U(rng), v = U(rng);
    CHECK(std::abs(lss_theta(d, u, v) - lss_product_oracle(d, u, v)) < 1e-10);
  }
  // diagonal through the theta_1' limit
  CHECK(std::abs(lss_theta(1.0, 0.4, 0.4) - lss_product_oracle(1.0, 0.4, 0.4)) < 1e-10);
}

TEST_CASE("LSS approx") {
  const double d = 1.0;
  for (double x : {0.0, 0.3, 0.8})
    CHECK(std::abs(lss_approx(d, x, x) - (1.0 + std::cos(2 * kPi * x) / (2 * d))) < 1e-15);
  const double y = 10.0 * d;
  CHECK(std::abs(lss_approx(d, 0.0, y)) <= 2.0 / d * std::exp(-kPi * y / (2 * d)));
  double sup = 0.0;
  for (double u = -1.5; u <= 1.5; u += 0.25)
    for (double v = -1.5; v <= 1.5; v += 0.25)
      sup = std::max(sup, std::abs(lss_theta(2.0, u, v) - lss_approx(2.0, u, v)));
  CHECK(sup < 10.0 * std::exp(-4.0 * kPi));
}

TEST_CASE("boundary combinations") {
  EquidistantModel m = EquidistantModel::from_d(1.0);
  KernelHandle ab = boundary_combine(kernel_LS(m), Boundary::absorbing);
  KernelHandle re = boundary_combine(kernel_LS(m), Boundary::reflecting);
  for (double v : {0.0, 0.3, 1.7, 4.0}) {
    CHECK(ab(0.0, v) == 0.0);
    const double h = 1e-5;
    CHECK(std::abs((re(h, v) - re(-h, v)) / (2 * h)) < 1e-6);
  }
  CHECK(ab.lo == 0.0);

  // S/a^2 = 1e3 at a = 1
  EquidistantModel big;
  big.a = 1.0;
  big.S = 1e3;
  KernelHandle ab2 = boundary_combine(kernel_LS(big), Boundary::absorbing);
  double sup = 0.0;
  for (double u = 0.0; u <= 2.0; u += 0.5)
    for (double v = 0.0; v <= 2.0; v += 0.5)
      sup = std::max(sup, std::abs(ab2(u, v) - (sine(u - v) - sine(u + v))));
  CHECK(sup < 5e-3);
}

TEST_CASE("averaged pair products") {
  const double d = 2.0, a = 1.0;
  EquidistantModel m = EquidistantModel::from_d(d, a);
  CHECK(std::abs(averaged_pair_product(m, PairFamily::LS, 0.0) -
                 (1.0 + 1.0 / (2 * kPi * kPi * d * d))) < 1e-15);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  for (int i = 0; i < 10; ++i) {
    double x = U(rng), y = U(rng);
    double s = 0.0, s2 = 0.0;
    for (int k = 0; k < 32; ++k) {
      EquidistantModel mk = m;
      mk.Delta = a * k / 32.0;
      KernelHandle K = kernel_LS_approx(mk), K2 = kernel_LSS_approx(mk);
      s += K(x, y) * K(y, x);
      s2 += K2(x, y) * K2(y, x);
    }
    CHECK(std::abs(s / 32 - averaged_pair_product(m, PairFamily::LS, x - y)) < 1e-8);
    CHECK(std::abs(s2 / 32 - averaged_pair_product(m, PairFamily::LSS, x - y)) < 1e-8);
  }
  const double r = 20.0 * a * d;
  const double ratio = averaged_pair_product(m, PairFamily::LSS, r) /
                       std::exp(-kPi * r / (a * d));
  CHECK(ratio > 0.5 / (d * d) * 0.99);
  CHECK(ratio < 1.5 / (d * d));
}

TEST_CASE("Bessel kernels") {
  for (int i = 0; i < 20; ++i) {
    double x = 0.05 + 0.13 * i, y = 2.4 - 0.11 * i;
    if (std::abs(x - y) < 1e-9) continue;
    CHECK(std::abs(rescaled_bessel(0.5, x, y) - (sine(x - y) - sine(x + y))) < 1e-10);
    CHECK(std::abs(rescaled_bessel(-0.5, x, y) - (sine(x - y) + sine(x + y))) < 1e-10);
  }
  // diagonal against an extrapolated off-diagonal oracle
  const double h = 1e-3;
  const double b1 = bessel_direct(0.0, 1.0, 1.0 + h),
               b2 = bessel_direct(0.0, 1.0, 1.0 + 2 * h),
               b4 = bessel_direct(0.0, 1.0, 1.0 + 4 * h);
  const double extrap = (8.0 * b1 - 6.0 * b2 + b4) / 3.0;
  CHECK(std::abs(bessel_kernel(0.0, 1.0, 1.0) - extrap) < 1e-8);
  CHECK(std::abs(bessel_kernel(1.0, 2.0, 2.0 + 1e-7) - bessel_kernel(1.0, 2.0, 2.0)) < 1e-8);
  CHECK(std::abs(rescaled_bessel(0.5, 0.7, 0.7) - (1.0 - sine(1.4))) < 1e-10);
  CHECK_THROWS_AS(bessel_kernel(1.5, 1.0, 2.0), std::domain_error);
}

TEST_CASE("rescale") {
  KernelHandle s = sine_kernel(1.0);
  KernelHandle id = rescale(s, [](double x) { return x; }, [](double) { return 1.0; });
  CHECK(id(0.2, 0.9) == s(0.2, 0.9));
  KernelHandle dbl = rescale(s, [](double x) { return 2 * x; }, [](double) { return 2.0; });
  for (double x : {-1.0, 0.0, 0.37}) CHECK(std::abs(dbl(x, x) - 2.0) < 1e-15);
  auto G = [](double x) { return x * x + x; };
  auto Gp = [](double x) { return 2 * x + 1; };
  KernelHandle base = kernel_LS(EquidistantModel::from_d(1.0));
  KernelHandle r = rescale(base, G, Gp);
  CHECK(std::abs(r(0.6, 0.6) - base(G(0.6), G(0.6)) * Gp(0.6)) < 1e-15);
  CHECK_THROWS_AS(r(-1.0, 0.0), std::domain_error);
}
