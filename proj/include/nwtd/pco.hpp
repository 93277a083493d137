#pragma once

#include <optional>
#include <vector>

#include "json.hpp"
#include "nwtd/diffusion.hpp"
#include "nwtd/estimators.hpp"
#include "nwtd/kernels.hpp"

namespace nwtd {

/// How the squared L2 distances to the overfitting estimator are computed.
///  - exact: closed-form Gaussian pair sums over R (or R^2), evaluated with
///    parallel::cross_sums.
///  - grid: Riemann sums of estimator grids over `l2_domain`.
enum class L2Method { exact, grid };

struct Rectangle {
  double x_lo = 0.0;
  double x_hi = 0.0;
  double y_lo = 0.0;
  double y_hi = 0.0;

  friend bool operator==(const Rectangle&, const Rectangle&) = default;
};

struct PcoConfig {
  BandwidthGrid grid_h = BandwidthGrid::arithmetic(0.02, 30);
  BandwidthGrid grid_ell = BandwidthGrid::arithmetic(0.02, 30);
  L2Method l2_method = L2Method::exact;
  std::optional<Rectangle> l2_domain;  // grid method; default from the data
  std::size_t l2_resolution = 256;
  std::size_t pen_time_subsample = 1;
  bool isotropic = true;

  void validate() const;

  friend bool operator==(const PcoConfig&, const PcoConfig&) = default;
};

struct CriterionRow {
  double h1 = 0.0;
  double h2 = 0.0;  // equals h1 for ell and isotropic rows
  double l2_term = 0.0;
  double penalty = 0.0;
  double total = 0.0;
};

struct PcoSelection {
  BandwidthPair chosen{0.0, 0.0};
  std::vector<CriterionRow> table;
  std::vector<BandwidthPair> ties;

  nlohmann::json to_json() const;
};

/// pen^dagger(ell) = (2 / N^2) sum_i (1/n^2) sum_{s,u} (K_ell * K_h0)(X^i_s - X^i_u)
/// over the time points kept by `stride`.
double pen_dagger(const PairSample& pairs, Bandwidth ell, Bandwidth h0, std::size_t stride = 1);
std::vector<double> pen_dagger_batch(const PairSample& pairs, const std::vector<double>& ells,
                                     double h0, std::size_t stride = 1);

/// pen(h): same-copy inner products of the product-kernel smoothers at h and h0.
double pen_numerator(const PairSample& pairs, BandwidthPair h, BandwidthPair h0,
                     std::size_t stride = 1);
std::vector<double> pen_numerator_batch(const PairSample& pairs,
                                        const std::vector<BandwidthPair>& hs, BandwidthPair h0,
                                        std::size_t stride = 1);

/// Squared L2 distance between two estimates on the same grid (trapezoid weights).
double l2_distance_sq(const EstimatorGrid& a, const EstimatorGrid& b);

/// Sample quantile range [0.1%, 99.9%] per axis widened by 3 * max_bandwidth.
Rectangle default_l2_domain(const PairSample& pairs, double max_bandwidth);

/// argmin over grid_ell of ||f_ell - f_h0||^2 + pen^dagger(ell); ties go to
/// the smallest bandwidth.
PcoSelection select_ell(const PairSample& pairs, const PcoConfig& config);

/// argmin over (h, h) (or H x H when !isotropic) of
/// ||s_h - s_h0||^2 + pen(h).
PcoSelection select_h(const PairSample& pairs, const PcoConfig& config);

}  // namespace nwtd
