#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nwtd/diffusion.hpp"
#include "nwtd/kernels.hpp"

namespace nwtd {

/// Evaluation points. `y` is empty for one-dimensional estimators.
struct EvalGrid {
  std::vector<double> x;
  std::vector<double> y;

  /// `count` equispaced points from lo to hi inclusive.
  static std::vector<double> linspace(double lo, double hi, std::size_t count);
  static EvalGrid line(double lo, double hi, std::size_t count);
  static EvalGrid rect(double x_lo, double x_hi, std::size_t mx, double y_lo, double y_hi,
                       std::size_t my);

  bool is_2d() const noexcept { return !y.empty(); }
  void validate() const;
};

struct EstimatorMeta {
  std::string kind;  // "f", "s", "p" or "truth"
  double h1 = 0.0;
  double h2 = 0.0;
  double ell = 0.0;
  double m = 0.0;  // truncation threshold applied by estimate_p
  double t = 0.0;
  double t0 = 0.0;
  double T = 0.0;
  std::size_t n_copies = 0;
  std::size_t n_time = 0;
};

/// Values on an EvalGrid, row-major x by y (or just x).
struct EstimatorGrid {
  EvalGrid grid;
  std::vector<double> values;
  EstimatorMeta meta;

  std::size_t cols() const noexcept { return grid.is_2d() ? grid.y.size() : 1; }
  double at(std::size_t j, std::size_t k = 0) const { return values[j * cols() + k]; }
};

enum class TruncationSource { fixed, plugin };

/// Threshold m of the indicator f_hat > m / 2. With `plugin`, m is the
/// minimum of f_hat over [lo, hi].
struct TruncationSpec {
  double m = 0.0;
  TruncationSource source = TruncationSource::fixed;
  double lo = 0.0;
  double hi = 0.0;

  static TruncationSpec fixed(double m);
  static TruncationSpec plugin(double lo, double hi);
};

/// f_hat_ell(x) = (1 / (N n_time)) sum_{i, s} K_ell(X^i_s - x). Time
/// integrals use equal weights on the n_time mesh points of [t0, T].
EstimatorGrid estimate_f(const PairSample& pairs, Bandwidth ell, const EvalGrid& grid);

/// s_hat_h(x, y) = (1 / (N n_time)) sum_{i, s} K_h1(X^i_s - x) K_h2(X^i_{s+t} - y).
EstimatorGrid estimate_s(const PairSample& pairs, Bandwidth h1, Bandwidth h2,
                         const EvalGrid& grid);

/// min of f over its grid points inside [lo, hi].
double estimate_m(const EstimatorGrid& f_grid, double lo, double hi);

/// p_hat = s_hat / f_hat where f_hat > m / 2, zero elsewhere.
EstimatorGrid estimate_p(const EstimatorGrid& s_grid, const EstimatorGrid& f_grid,
                         const TruncationSpec& trunc);

/// Single-point p_hat(x, y) with a fixed threshold m.
double evaluate_p(const PairSample& pairs, Bandwidth h1, Bandwidth h2, Bandwidth ell, double m,
                  double x, double y);

/// CSV with "# key=value" metadata lines, a header row of y values and one
/// row per x. One-dimensional grids are written as "x,value" rows.
void write_grid_csv(const EstimatorGrid& grid, const std::filesystem::path& file);
EstimatorGrid read_grid_csv(const std::filesystem::path& file);

}  // namespace nwtd
