#include <cmath>
#include <random>

#include "doctest.h"
#include "nwtd/error.hpp"
#include "nwtd/kernels.hpp"
#include "oracles.hpp"

using namespace nwtd;

TEST_CASE("kernel_eval matches the standard normal density") {
  const KernelSpec k;
  CHECK(kernel_eval(k, 0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-15));
  CHECK(kernel_eval(k, 2.0) == doctest::Approx(0.0539909665131880).epsilon(1e-14));
  CHECK(kernel_eval(k, 1.0) == kernel_eval(k, -1.0));
  CHECK(kernel_eval(k, 30.0) > 0.0);
  CHECK_THROWS_AS(kernel_eval(k, NAN), std::domain_error);
  CHECK_THROWS_AS(kernel_eval(k, INFINITY), std::domain_error);
}

TEST_CASE("kernel integrates to one and has the Gaussian L2 norm") {
  const KernelSpec k;
  const double mass = oracle::simpson([&](double u) { return kernel_eval(k, u); }, -10, 10, 4000);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
  const double sq = oracle::simpson([&](double u) { return std::pow(kernel_eval(k, u), 2); }, -10, 10, 4000);
  CHECK(sq == doctest::Approx(1.0 / (2.0 * std::sqrt(oracle::kPi))).epsilon(1e-10));
}

TEST_CASE("kernel_scaled") {
  const KernelSpec k;
  CHECK(kernel_scaled(k, Bandwidth(1.0), 0.0) == doctest::Approx(0.3989422804).epsilon(1e-10));
  CHECK(kernel_scaled(k, Bandwidth(0.5), 0.0) == doctest::Approx(0.7978845608).epsilon(1e-10));
  const double mass = oracle::simpson([&](double u) { return kernel_scaled(k, Bandwidth(0.1), u); },
                                      -0.8, 0.8, 4000);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));

  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> hu(1e-3, 1.0), uu(-5.0, 5.0);
  for (int rep = 0; rep < 10000; ++rep) {
    const double h = hu(gen), u = uu(gen);
    const double a = kernel_scaled(k, Bandwidth(h), u);
    const double b = kernel_eval(k, u / h) / h;
    REQUIRE(std::abs(a - b) <= 1e-15 * std::abs(b));
    REQUIRE(gauss_scaled(h, u) == doctest::Approx(b).epsilon(1e-15));
  }
}

TEST_CASE("Bandwidth accepts (0, 1] only") {
  CHECK(Bandwidth(1.0).value() == 1.0);
  CHECK(Bandwidth(1e-9).value() == 1e-9);
  CHECK_THROWS_AS(Bandwidth(0.0), std::domain_error);
  CHECK_THROWS_AS(Bandwidth(-0.1), std::domain_error);
  CHECK_THROWS_AS(Bandwidth(1.0000001), std::domain_error);
  CHECK_THROWS_AS(Bandwidth(NAN), std::domain_error);
}

TEST_CASE("BandwidthGrid") {
  const auto g = BandwidthGrid::arithmetic(0.02, 30);
  CHECK(g.size() == 30);
  CHECK(g.h0() == 0.02);
  CHECK(g.values().back() == doctest::Approx(0.6));
  for (std::size_t k = 1; k < g.size(); ++k) CHECK(g.values()[k] > g.values()[k - 1]);
  CHECK_THROWS_AS(BandwidthGrid({}), ConfigError);
  CHECK_THROWS(BandwidthGrid({0.2, 0.1}));
  CHECK_THROWS(BandwidthGrid({0.1, 0.1}));
  CHECK_THROWS(BandwidthGrid({0.1, 1.5}));
}

TEST_CASE("kernel_conv closed form") {
  CHECK(kernel_conv(Bandwidth(0.1), Bandwidth(0.1), 0.0) ==
        doctest::Approx(2.82094791773878).epsilon(1e-13));
  for (double x : {-0.7, 0.0, 0.3}) {
    CHECK(kernel_conv(Bandwidth(0.3), Bandwidth(0.05), x) ==
          kernel_conv(Bandwidth(0.05), Bandwidth(0.3), -x));
  }
  const double mass = oracle::simpson(
      [](double x) { return kernel_conv(Bandwidth(0.2), Bandwidth(0.02), x); }, -3, 3, 6000);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("kernel_conv agrees with a numerical convolution") {
  for (auto [h1, h2, x] : {std::tuple{0.1, 0.1, 0.0}, {0.2, 0.02, 0.5}, {0.6, 0.3, -1.1}}) {
    const double num = oracle::trapezoid(
        [&](double u) { return oracle::kh(h1, x - u) * oracle::kh(h2, u); }, -10.0, 10.0, 200000);
    CHECK(std::abs(kernel_conv(Bandwidth(h1), Bandwidth(h2), x) - num) < 1e-6);
  }
  CHECK(kernel_conv(Bandwidth(0.2), Bandwidth(0.02), 0.5) ==
        doctest::Approx(0.0899469531255881).epsilon(1e-12));
}

TEST_CASE("kernel_conv tends to the scaled kernel as one bandwidth vanishes") {
  const KernelSpec k;
  for (double x : {0.0, 0.1, 0.4}) {
    CHECK(std::abs(kernel_conv(Bandwidth(0.2), Bandwidth(1e-6), x) -
                   kernel_scaled(k, Bandwidth(0.2), x)) < 1e-4);
  }
}

TEST_CASE("product_kernel factorizes") {
  const KernelSpec k;
  CHECK(product_kernel(Bandwidth(1), Bandwidth(1), 0, 0) == doctest::Approx(0.1591549431).epsilon(1e-10));
  const double want = oracle::kh(0.1, 0.05) * oracle::kh(0.2, 0.1);
  CHECK(product_kernel(Bandwidth(0.1), Bandwidth(0.2), 0.05, 0.1) == doctest::Approx(want).epsilon(1e-12));
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> hu(0.01, 1.0), uu(-2.0, 2.0);
  for (int rep = 0; rep < 1000; ++rep) {
    const Bandwidth h1(hu(gen)), h2(hu(gen));
    const double dx = uu(gen), dy = uu(gen);
    REQUIRE(product_kernel(h1, h2, dx, dy) ==
            doctest::Approx(kernel_scaled(k, h1, dx) * kernel_scaled(k, h2, dy)).epsilon(1e-15));
  }
}
