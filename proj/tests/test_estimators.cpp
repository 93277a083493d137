#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "helpers.hpp"
#include "nwtd/compute/common.hpp"
#include "nwtd/error.hpp"
#include "nwtd/estimators.hpp"
#include "nwtd/pco.hpp"
#include "nwtd/truth.hpp"
#include "oracles.hpp"

using namespace nwtd;
using testing_util::make_pairs;
using testing_util::random_pairs;

TEST_CASE("EvalGrid construction and validation") {
  const auto l = EvalGrid::linspace(-1, 1, 5);
  CHECK(l == std::vector<double>{-1, -0.5, 0, 0.5, 1});
  CHECK(EvalGrid::linspace(2, 3, 1) == std::vector<double>{2});
  const auto r = EvalGrid::rect(0, 1, 3, -2, 2, 4);
  CHECK(r.is_2d());
  CHECK(r.y.size() == 4);
  CHECK_THROWS(EvalGrid{{1, 0}, {}}.validate());
  CHECK_THROWS(EvalGrid{{}, {}}.validate());
  CHECK_THROWS(EvalGrid{{0, NAN}, {}}.validate());
}

TEST_CASE("estimate_f on a constant path") {
  const auto p = make_pairs(1, 6, std::vector<double>(6, 0.4), std::vector<double>(6, -0.1));
  const auto f = estimate_f(p, Bandwidth(0.3), EvalGrid::line(0.4, 0.4, 1));
  CHECK(f.at(0) == doctest::Approx(1.0 / (0.3 * std::sqrt(2 * oracle::kPi))).epsilon(1e-14));
  CHECK(f.meta.kind == "f");
  CHECK(f.meta.ell == 0.3);
  CHECK_THROWS(estimate_f(PairSample{}, Bandwidth(0.3), EvalGrid::line(0, 1, 3)));
}

TEST_CASE("estimate_s on a single sample point") {
  const auto p = make_pairs(1, 1, {0.2}, {-0.3});
  const auto g = EvalGrid::rect(-1, 1, 5, -1, 1, 7);
  const auto s = estimate_s(p, Bandwidth(0.25), Bandwidth(0.4), g);
  for (std::size_t j = 0; j < 5; ++j) {
    for (std::size_t k = 0; k < 7; ++k) {
      CHECK(s.at(j, k) == doctest::Approx(oracle::kh(0.25, 0.2 - g.x[j]) * oracle::kh(0.4, -0.3 - g.y[k])).epsilon(1e-14));
    }
  }
  CHECK_THROWS(estimate_s(p, Bandwidth(0.25), Bandwidth(0.4), EvalGrid::line(0, 1, 3)));
}

TEST_CASE("matrix-product path equals the naive triple loop") {
  for (unsigned seed : {1u, 2u, 3u}) {
    const auto p = random_pairs(3, 5, seed);
    const auto t = testing_util::tiny(p);
    const auto g = EvalGrid::rect(-1.5, 1.2, 4, -0.9, 1.7, 3);
    const auto s = estimate_s(p, Bandwidth(0.3), Bandwidth(0.15), g);
    const auto f = estimate_f(p, Bandwidth(0.2), EvalGrid{g.x, {}});
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(f.at(j) == doctest::Approx(oracle::f_hat(t, 0.2, g.x[j])).epsilon(1e-12));
      for (std::size_t k = 0; k < 3; ++k) {
        CHECK(s.at(j, k) == doctest::Approx(oracle::s_hat(t, 0.3, 0.15, g.x[j], g.y[k])).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("estimators integrate to one") {
  const auto ens = simulate_ensemble(ModelSpec::defaults(ModelKind::ou), 50, 1000, 0.02, 3);
  const auto p = extract_pairs(ens, 0, 10, 1);
  const auto gx = EvalGrid::line(-6, 6, 601);
  const auto f = estimate_f(p, Bandwidth(0.2), gx);
  double mass = 0;
  for (std::size_t j = 0; j < 601; ++j) mass += f.at(j) * 0.02;
  CHECK(std::abs(mass - 1.0) < 1e-3);

  const auto g2 = EvalGrid::rect(-6, 6, 241, -6, 6, 241);
  const auto s = estimate_s(p, Bandwidth(0.2), Bandwidth(0.2), g2);
  double m2 = 0;
  for (double v : s.values) m2 += v * 0.05 * 0.05;
  CHECK(std::abs(m2 - 1.0) < 1e-2);
}

TEST_CASE("estimate_f recovers the OU invariant density") {
  const auto ens = simulate_ensemble(ModelSpec::defaults(ModelKind::ou), 1000, 1000, 0.02, 17);
  const auto p = extract_pairs(ens, 0, 10, 1);
  const auto f = estimate_f(p, Bandwidth(0.2), EvalGrid::line(-2, 2, 81));
  double sup = 0;
  for (std::size_t j = 0; j < 81; ++j) sup = std::max(sup, std::abs(f.at(j) - oracle::normal_pdf(f.grid.x[j], 0, 0.5)));
  CHECK(sup <= 0.05);
  const double m = estimate_m(f, -1, 1);
  CHECK(std::abs(m - 0.207553748710297) < 0.05);
}

TEST_CASE("estimate_m") {
  EstimatorGrid c;
  c.grid = EvalGrid::line(0, 1, 5);
  c.values = std::vector<double>(5, 0.7);
  CHECK(estimate_m(c, 0, 1) == 0.7);
  c.values = {5, 4, 3, 2, 1};
  CHECK(estimate_m(c, 0.2, 0.8) == 2);
  CHECK(estimate_m(c, 0, 1) == 1);
  CHECK_THROWS(estimate_m(c, 0.3, 0.4));
}

TEST_CASE("estimate_p truncation and exact ratio") {
  EstimatorGrid f, s;
  f.grid = EvalGrid::line(0, 1, 3);
  f.values = {0.5, 1.0, 2.0};
  s.grid = EvalGrid::rect(0, 1, 3, 0, 1, 2);
  const std::vector<double> g{0.25, 3.0};
  for (std::size_t j = 0; j < 3; ++j) {
    for (double v : g) s.values.push_back(f.values[j] * v);
  }
  const auto p = estimate_p(s, f, TruncationSpec::fixed(1.5));
  CHECK(p.at(0, 0) == 0.0);
  CHECK(p.at(0, 1) == 0.0);
  for (std::size_t j = 1; j < 3; ++j) {
    CHECK(p.at(j, 0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(p.at(j, 1) == doctest::Approx(3.0).epsilon(1e-15));
  }
  CHECK(p.meta.m == 1.5);

  const auto zero = estimate_p(s, f, TruncationSpec::fixed(4.0));
  for (double v : zero.values) CHECK(v == 0.0);

  // Plug-in: m = min over [0, 0.5] = 0.5, so every row passes.
  const auto q = estimate_p(s, f, TruncationSpec::plugin(0, 0.5));
  CHECK(q.meta.m == 0.5);
  CHECK(q.at(0, 1) == doctest::Approx(3.0));

  EstimatorGrid other = f;
  other.grid.x = {0, 0.5, 0.9};
  CHECK_THROWS(estimate_p(s, other, TruncationSpec::fixed(1)));
  CHECK_THROWS(TruncationSpec::fixed(0));
  CHECK_THROWS(TruncationSpec::plugin(1, 1));
}

TEST_CASE("evaluate_p agrees with the grid path") {
  const auto p = random_pairs(3, 40, 8);
  const auto g = EvalGrid::rect(-0.5, 0.5, 3, -0.2, 0.4, 2);
  const auto s = estimate_s(p, Bandwidth(0.3), Bandwidth(0.2), g);
  const auto f = estimate_f(p, Bandwidth(0.25), EvalGrid{g.x, {}});
  const auto grid_p = estimate_p(s, f, TruncationSpec::fixed(0.05));
  CHECK(evaluate_p(p, Bandwidth(0.3), Bandwidth(0.2), Bandwidth(0.25), 0.05, g.x[1], g.y[1]) ==
        doctest::Approx(grid_p.at(1, 1)).epsilon(1e-14));
}

TEST_CASE("estimators are linear in copies") {
  const auto a = random_pairs(3, 20, 4);
  const auto b = random_pairs(5, 20, 5);
  auto ab = a;
  ab.n_copies = 8;
  ab.from.insert(ab.from.end(), b.from.begin(), b.from.end());
  ab.to.insert(ab.to.end(), b.to.begin(), b.to.end());
  const auto g = EvalGrid::rect(-1, 1, 6, -1, 1, 5);
  const auto sa = estimate_s(a, Bandwidth(0.2), Bandwidth(0.2), g);
  const auto sb = estimate_s(b, Bandwidth(0.2), Bandwidth(0.2), g);
  const auto sab = estimate_s(ab, Bandwidth(0.2), Bandwidth(0.2), g);
  for (std::size_t k = 0; k < sab.values.size(); ++k) {
    CHECK(sab.values[k] == doctest::Approx((3 * sa.values[k] + 5 * sb.values[k]) / 8).epsilon(1e-12));
  }
}

TEST_CASE("smaller ell means rougher f_hat") {
  const auto ens = simulate_ensemble(ModelSpec::defaults(ModelKind::ou), 30, 1000, 0.02, 12);
  const auto p = extract_pairs(ens, 0, 10, 1);
  const auto g = EvalGrid::line(-2.5, 2.5, 501);
  double prev = 0;
  for (double ell : {0.6, 0.3, 0.1, 0.05}) {
    const auto f = estimate_f(p, Bandwidth(ell), g);
    double tv = 0;
    for (std::size_t j = 1; j < 501; ++j) tv += std::abs(f.at(j) - f.at(j - 1));
    CHECK(tv > prev);
    prev = tv;
  }
}

TEST_CASE("p_hat rows integrate to about one at PCO bandwidths") {
  const auto model = ModelSpec::defaults(ModelKind::ou);
  const auto ens = simulate_ensemble(model, 1000, 1000, 0.02, 31);
  const auto p = extract_pairs(ens, 0, 10, 1);
  PcoConfig cfg;
  const auto h = select_h(p, cfg).chosen;
  const auto ell = select_ell(p, cfg).chosen.first;
  // std of X_{t+1} given X_t = 0 is sqrt(0.432); grid to +-4 std.
  const double sd = std::sqrt((1 - std::exp(-2.0)) / 2);
  const auto g = EvalGrid::rect(-0.1, 0.1, 3, -4 * sd, 4 * sd, 401);
  const auto s = estimate_s(p, Bandwidth(h.first), Bandwidth(h.second), g);
  const auto f = estimate_f(p, Bandwidth(ell), EvalGrid{g.x, {}});
  const auto ph = estimate_p(s, f, TruncationSpec::fixed(0.05));
  double row = 0;
  for (std::size_t k = 0; k < 401; ++k) row += ph.at(1, k) * (8 * sd / 400);
  CHECK(row > 0.9);
  CHECK(row < 1.1);
}

TEST_CASE("estimates do not depend on the thread count") {
  const auto p = random_pairs(40, 300, 6);
  const auto g = EvalGrid::rect(-2, 2, 37, -2, 2, 29);
  const int before = compute::max_threads();
  compute::set_threads(1);
  const auto s1 = estimate_s(p, Bandwidth(0.1), Bandwidth(0.2), g);
  const auto f1 = estimate_f(p, Bandwidth(0.1), EvalGrid{g.x, {}});
  compute::set_threads(4);
  const auto s4 = estimate_s(p, Bandwidth(0.1), Bandwidth(0.2), g);
  const auto f4 = estimate_f(p, Bandwidth(0.1), EvalGrid{g.x, {}});
  compute::set_threads(before);
  CHECK(s1.values == s4.values);
  CHECK(f1.values == f4.values);
}

TEST_CASE("grid CSV round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "nwtd_test_grid";
  std::filesystem::create_directories(dir);
  const auto p = random_pairs(2, 30, 2);
  const auto g = EvalGrid::rect(-1.1, 0.7, 9, -0.3, 1.9, 11);
  const auto s = estimate_s(p, Bandwidth(0.17), Bandwidth(0.23), g);
  write_grid_csv(s, dir / "s.csv");
  const auto back = read_grid_csv(dir / "s.csv");
  CHECK(back.values == s.values);
  CHECK(back.grid.x == s.grid.x);
  CHECK(back.grid.y == s.grid.y);
  CHECK(back.meta.h1 == s.meta.h1);
  CHECK(back.meta.kind == "s");
  const auto f = estimate_f(p, Bandwidth(0.17), EvalGrid{g.x, {}});
  write_grid_csv(f, dir / "f.csv");
  const auto fb = read_grid_csv(dir / "f.csv");
  CHECK(fb.values == f.values);
  CHECK_FALSE(fb.grid.is_2d());
  CHECK_THROWS_AS(read_grid_csv(dir / "nope.csv"), IoError);
  std::filesystem::remove_all(dir);
}
