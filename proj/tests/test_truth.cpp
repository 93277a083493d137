#include <cmath>
#include <random>

#include "doctest.h"
#include "nwtd/diffusion.hpp"
#include "nwtd/truth.hpp"
#include "oracles.hpp"

using namespace nwtd;

TEST_CASE("bessel_i against the standard library") {
  CHECK(bessel_i(2.0, 0.0) == 0.0);
  CHECK(bessel_i(0.0, 0.0) == 1.0);
  CHECK(bessel_i(2.0, 1.0) == doctest::Approx(0.135747669767038).epsilon(1e-13));
  for (double nu : {0.0, 0.5, 1.0, 2.0, 3.5}) {
    for (double x : {1e-3, 0.5, 3.0, 12.0, 19.99, 20.0, 20.01, 45.0, 120.0, 500.0}) {
      const double want = std::cyl_bessel_i(nu, x);
      INFO("nu=" << nu << " x=" << x);
      CHECK(bessel_i(nu, x) == doctest::Approx(want).epsilon(1e-10));
      CHECK(bessel_i_scaled(nu, x) == doctest::Approx(want * std::exp(-x)).epsilon(1e-10));
    }
  }
  CHECK(std::isfinite(bessel_i_scaled(2.0, 1e6)));
  CHECK_THROWS_AS(bessel_i(2.0, -1.0), std::domain_error);
  CHECK_THROWS_AS(bessel_i(-1.0, 1.0), std::domain_error);
}

TEST_CASE("bessel branches agree at the switchover") {
  for (double nu : {0.0, 1.0, 2.0}) {
    CHECK(bessel_i_scaled_series(nu, 20.0) ==
          doctest::Approx(bessel_i_scaled_asymptotic(nu, 20.0)).epsilon(1e-9));
  }
}

TEST_CASE("OU transition") {
  // sqrt(1 / (pi (1 - e^-2)))
  CHECK(ou_transition(2, 2, 1, 0, 0) == doctest::Approx(0.606737998837383).epsilon(1e-13));
  const double var = (1.0 - std::exp(-2.0)) / 2.0;
  for (double x : {-1.0, 0.0, 2.0}) {
    for (double y : {-2.0, 0.3, 1.7}) {
      CHECK(ou_transition(2, 2, 1, x, y) ==
            doctest::Approx(oracle::normal_pdf(y, x * std::exp(-1.0), var)).epsilon(1e-13));
    }
    const double mass = oracle::simpson([&](double y) { return ou_transition(2, 2, 1, x, y); }, -8, 8, 4000);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
  }
  CHECK(std::abs(ou_transition(2, 2, 50, 1.0, 0.4) - oracle::normal_pdf(0.4, 0.0, 0.5)) < 1e-10);
  CHECK_THROWS_AS(ou_transition(2, 2, 0, 0, 0), std::domain_error);
}

TEST_CASE("tanh OU transition") {
  CHECK(tanh_ou_transition(4, 1, 1, 0, 0) == doctest::Approx(ou_transition(4, 1, 1, 0, 0)).epsilon(1e-15));
  CHECK(tanh_ou_transition(4, 1, 1, 0.3, -0.2) ==
        doctest::Approx(tanh_ou_transition(4, 1, 1, -0.3, 0.2)).epsilon(1e-14));
  for (double x : {-0.5, 0.0, 0.7}) {
    const double mass = oracle::simpson(
        [&](double y) { return std::abs(y) < 1.0 ? tanh_ou_transition(4, 1, 1, x, y) : 0.0; }, -1, 1, 20000);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-7));
  }
  CHECK_THROWS_AS(tanh_ou_transition(4, 1, 1, 1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(tanh_ou_transition(4, 1, 1, 0.0, -1.0), std::domain_error);
}

TEST_CASE("CIR transition") {
  for (double x : {0.5, 1.5, 3.0}) {
    const double mass = oracle::simpson([&](double y) { return cir_transition(6, 1, 1, 1, x, y); }, 0, 30, 20000);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-7));
    const double m1 = oracle::simpson([&](double y) { return y * cir_transition(6, 1, 1, 1, x, y); }, 0, 30, 20000);
    CHECK(std::abs(m1 - (x * std::exp(-1.0) + 1.5 * (1.0 - std::exp(-1.0)))) < 1e-6);
  }
  // Chapman-Kolmogorov at (s, t, x, y) = (0.5, 0.5, 1, 1).
  const double ck = oracle::simpson(
      [](double z) { return z > 0.0 ? cir_transition(6, 1, 1, 0.5, 1.0, z) * cir_transition(6, 1, 1, 0.5, z, 1.0) : 0.0; },
      0, 30, 20000);
  CHECK(std::abs(ck - cir_transition(6, 1, 1, 1.0, 1.0, 1.0)) < 1e-5);
  CHECK(cir_transition(6, 1, 1, 1, 1, -0.1) == 0.0);
  CHECK(cir_transition(6, 1, 1, 1, 1, 0.0) == 0.0);
  const double far = cir_transition(6, 1, 1, 0.01, 300.0, 297.0);
  CHECK(std::isfinite(far));
  CHECK(far > 0.0);
  CHECK_THROWS_AS(cir_transition(6, 1, 1, 1, 0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(cir_transition(1, 1, 1, 1, 1.0, 1.0), std::domain_error);
}

TEST_CASE("stationary densities") {
  const auto ou = ModelSpec::defaults(ModelKind::ou);
  const auto th = ModelSpec::defaults(ModelKind::tanh_ou);
  const auto cir = ModelSpec::defaults(ModelKind::cir);
  CHECK(stationary_density(ou, 0.0) == doctest::Approx(0.564189583547756).epsilon(1e-13));
  CHECK(stationary_density(ou, 1.0) == doctest::Approx(0.207553748710297).epsilon(1e-13));
  // Gamma(3, rate 2): 4 x^2 e^{-2x}
  CHECK(stationary_density(cir, 1.3) == doctest::Approx(4 * 1.69 * std::exp(-2.6)).epsilon(1e-13));
  CHECK(stationary_density(cir, -0.5) == 0.0);
  CHECK_THROWS_AS(stationary_density(th, 1.0), std::domain_error);

  CHECK(oracle::simpson([&](double x) { return stationary_density(ou, x); }, -8, 8, 4000) ==
        doctest::Approx(1.0).epsilon(1e-8));
  CHECK(oracle::simpson([&](double x) { return std::abs(x) < 1 ? stationary_density(th, x) : 0.0; }, -1, 1, 20000) ==
        doctest::Approx(1.0).epsilon(1e-8));
  CHECK(oracle::simpson([&](double x) { return stationary_density(cir, x); }, 0, 40, 20000) ==
        doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("stationary law is invariant under the transition") {
  const auto ou = ModelSpec::defaults(ModelKind::ou);
  const auto cir = ModelSpec::defaults(ModelKind::cir);
  for (double y : {-1.0, 0.2, 1.4}) {
    const double v = oracle::simpson(
        [&](double x) { return stationary_density(ou, x) * transition_density(ou, 1.0, x, y); }, -9, 9, 6000);
    CHECK(v == doctest::Approx(stationary_density(ou, y)).epsilon(1e-9));
  }
  for (double y : {0.3, 1.5, 4.0}) {
    const double v = oracle::simpson(
        [&](double x) { return x > 0 ? stationary_density(cir, x) * transition_density(cir, 1.0, x, y) : 0.0; },
        0, 40, 20000);
    CHECK(v == doctest::Approx(stationary_density(cir, y)).epsilon(1e-7));
  }
}

TEST_CASE("densities are nonnegative on random inputs") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-4, 4), v(-0.999, 0.999), w(1e-4, 20), t(0.01, 5);
  const auto ou = ModelSpec::defaults(ModelKind::ou);
  const auto th = ModelSpec::defaults(ModelKind::tanh_ou);
  const auto cir = ModelSpec::defaults(ModelKind::cir);
  for (int k = 0; k < 100000; ++k) {
    const double tt = t(gen);
    REQUIRE(transition_density(ou, tt, u(gen), u(gen)) >= 0.0);
    REQUIRE(transition_density(th, tt, v(gen), v(gen)) >= 0.0);
    const double c = transition_density(cir, tt, w(gen), w(gen));
    REQUIRE(c >= 0.0);
    REQUIRE(std::isfinite(c));
  }
}

TEST_CASE("simulated one-step conditional law matches the closed form") {
  // X_{s+t} given X_s near x*: compare binned frequencies with p_t(x*, .).
  const double t = 0.2;
  const std::size_t n = 100000;
  for (auto kind : {ModelKind::ou, ModelKind::cir}) {
    const auto model = ModelSpec::defaults(kind);
    const auto ens = simulate_ensemble(model, n, 10, 0.02, 1234);
    const double xstar = kind == ModelKind::ou ? 0.3 : 1.2;
    const double half = 0.01;
    std::vector<double> ys;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(ens.at(i, 0) - xstar) < half) ys.push_back(ens.at(i, 10));
    }
    REQUIRE(ys.size() > 500);
    // Ten bins on the central part of the conditional law.
    const double mu = kind == ModelKind::ou ? xstar * std::exp(-t) : xstar * std::exp(-t) + 1.5 * (1 - std::exp(-t));
    const double lo = mu - 0.6, hi = mu + 0.6;
    const int bins = 10;
    std::vector<double> count(bins, 0.0);
    double inside = 0;
    for (double y : ys) {
      if (y < lo || y >= hi) continue;
      count[static_cast<int>((y - lo) / (hi - lo) * bins)] += 1;
      inside += 1;
    }
    std::vector<double> prob(bins);
    double ptot = 0;
    for (int b = 0; b < bins; ++b) {
      const double a = lo + (hi - lo) * b / bins, c = a + (hi - lo) / bins;
      prob[b] = oracle::simpson(
          [&](double y) {
            // Average the closed form over the conditioning window.
            return oracle::simpson([&](double x) { return transition_density(model, t, x, y); }, xstar - half,
                                   xstar + half, 8) / (2 * half);
          },
          a, c, 20);
      ptot += prob[b];
    }
    double chi2 = 0;
    for (int b = 0; b < bins; ++b) {
      const double e = inside * prob[b] / ptot;
      chi2 += (count[b] - e) * (count[b] - e) / e;
    }
    // 99th percentile of chi-square with 9 degrees of freedom.
    CHECK(chi2 < 21.666);
  }
}
