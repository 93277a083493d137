#include "nwtd/pco.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nwtd/compute/parallel.hpp"
#include "nwtd/error.hpp"
#include "nwtd/stats.hpp"

namespace nwtd {

using compute::Axes;
using compute::Variances;

void PcoConfig::validate() const {
  if (l2_resolution < 32) throw ConfigError("pco.l2_resolution must be at least 32");
  if (pen_time_subsample < 1) throw ConfigError("pco.pen_stride must be at least 1");
  if (l2_domain) {
    const auto& d = *l2_domain;
    if (!(d.x_lo < d.x_hi) || !(d.y_lo < d.y_hi) || !std::isfinite(d.x_lo) ||
        !std::isfinite(d.x_hi) || !std::isfinite(d.y_lo) || !std::isfinite(d.y_hi)) {
      throw ConfigError("pco.l2_domain must be a finite nonempty rectangle");
    }
  }
}

nlohmann::json PcoSelection::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table) {
    rows.push_back({{"h1", r.h1}, {"h2", r.h2}, {"l2_term", r.l2_term}, {"penalty", r.penalty},
                    {"total", r.total}});
  }
  nlohmann::json tie_list = nlohmann::json::array();
  for (const auto& t : ties) tie_list.push_back({t.first, t.second});
  return {{"candidates", rows}, {"chosen", {chosen.first, chosen.second}}, {"ties", tie_list}};
}

namespace {

double time_count(const PairSample& pairs, std::size_t stride) {
  return static_cast<double>((pairs.n_time + stride - 1) / stride);
}

double penalty_scale(const PairSample& pairs, std::size_t stride) {
  const double n = static_cast<double>(pairs.n_copies);
  const double m = time_count(pairs, stride);
  return 2.0 / (n * n * m * m);
}

void check_pairs(const PairSample& pairs) {
  if (pairs.empty()) throw std::invalid_argument("PCO needs a nonempty sample");
}

/// Picks the first minimum in table order and lists every row attaining it.
PcoSelection finish(std::vector<CriterionRow> table, BandwidthPair overfit) {
  PcoSelection sel;
  double best = table.front().total;
  std::size_t arg = 0;
  for (std::size_t k = 1; k < table.size(); ++k) {
    if (table[k].total < best) {
      best = table[k].total;
      arg = k;
    }
  }
  sel.chosen = {table[arg].h1, table[arg].h2};
  for (const auto& r : table) {
    if (r.total == best) sel.ties.emplace_back(r.h1, r.h2);
    if (r.h1 == overfit.first && r.h2 == overfit.second && r.l2_term != 0.0) {
      throw std::logic_error("PCO: distance of the overfitting estimator to itself is nonzero");
    }
  }
  sel.table = std::move(table);
  return sel;
}

/// Trapezoid weights of a strictly increasing axis.
std::vector<double> trapezoid(const std::vector<double>& x) {
  if (x.size() < 2) throw std::invalid_argument("l2_distance_sq needs at least two points per axis");
  std::vector<double> w(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double left = j > 0 ? x[j] - x[j - 1] : 0.0;
    const double right = j + 1 < x.size() ? x[j + 1] - x[j] : 0.0;
    w[j] = 0.5 * (left + right);
  }
  return w;
}

Rectangle domain_for(const PairSample& pairs, const PcoConfig& config, double max_bw) {
  return config.l2_domain ? *config.l2_domain : default_l2_domain(pairs, max_bw);
}

}  // namespace

std::vector<double> pen_dagger_batch(const PairSample& pairs, const std::vector<double>& ells,
                                     double h0, std::size_t stride) {
  check_pairs(pairs);
  std::vector<Variances> vars;
  for (double ell : ells) vars.push_back({ell * ell + h0 * h0, ell * ell + h0 * h0});
  auto sums = parallel::same_copy_sums(pairs, Axes::x, stride, vars);
  const double scale = penalty_scale(pairs, stride);
  for (auto& s : sums) s *= scale;
  return sums;
}

double pen_dagger(const PairSample& pairs, Bandwidth ell, Bandwidth h0, std::size_t stride) {
  return pen_dagger_batch(pairs, {ell.value()}, h0.value(), stride).front();
}

std::vector<double> pen_numerator_batch(const PairSample& pairs,
                                        const std::vector<BandwidthPair>& hs, BandwidthPair h0,
                                        std::size_t stride) {
  check_pairs(pairs);
  std::vector<Variances> vars;
  for (const auto& [h1, h2] : hs) {
    vars.push_back({h1 * h1 + h0.first * h0.first, h2 * h2 + h0.second * h0.second});
  }
  auto sums = parallel::same_copy_sums(pairs, Axes::xy, stride, vars);
  const double scale = penalty_scale(pairs, stride);
  for (auto& s : sums) s *= scale;
  return sums;
}

double pen_numerator(const PairSample& pairs, BandwidthPair h, BandwidthPair h0,
                     std::size_t stride) {
  Bandwidth(h.first), Bandwidth(h.second), Bandwidth(h0.first), Bandwidth(h0.second);
  return pen_numerator_batch(pairs, {h}, h0, stride).front();
}

double l2_distance_sq(const EstimatorGrid& a, const EstimatorGrid& b) {
  if (a.grid.x != b.grid.x || a.grid.y != b.grid.y || a.values.size() != b.values.size()) {
    throw std::invalid_argument("l2_distance_sq: grids differ");
  }
  const auto wx = trapezoid(a.grid.x);
  if (!a.grid.is_2d()) {
    std::vector<double> terms(wx.size());
    for (std::size_t j = 0; j < wx.size(); ++j) {
      const double d = a.at(j) - b.at(j);
      terms[j] = wx[j] * d * d;
    }
    return compute::pairwise_sum(terms);
  }
  const auto wy = trapezoid(a.grid.y);
  std::vector<double> rows(wx.size());
  std::vector<double> terms(wy.size());
  for (std::size_t j = 0; j < wx.size(); ++j) {
    for (std::size_t k = 0; k < wy.size(); ++k) {
      const double d = a.at(j, k) - b.at(j, k);
      terms[k] = wy[k] * d * d;
    }
    rows[j] = wx[j] * compute::pairwise_sum(terms);
  }
  return compute::pairwise_sum(rows);
}

Rectangle default_l2_domain(const PairSample& pairs, double max_bandwidth) {
  check_pairs(pairs);
  const double pad = 3.0 * max_bandwidth;
  return {quantile(pairs.from, 0.001) - pad, quantile(pairs.from, 0.999) + pad,
          quantile(pairs.to, 0.001) - pad, quantile(pairs.to, 0.999) + pad};
}

PcoSelection select_ell(const PairSample& pairs, const PcoConfig& config) {
  check_pairs(pairs);
  config.validate();
  const auto& ells = config.grid_ell.values();
  const double h0 = config.grid_ell.h0();
  const auto pens = pen_dagger_batch(pairs, ells, h0, config.pen_time_subsample);

  std::vector<double> l2(ells.size());
  if (config.l2_method == L2Method::exact) {
    // ||f_ell - f_h0||^2 = (F(2 ell^2) - 2 F(ell^2 + h0^2) + F(2 h0^2)) / P^2
    std::vector<Variances> vars;
    for (double ell : ells) {
      vars.push_back({2.0 * ell * ell, 0.0});
      vars.push_back({ell * ell + h0 * h0, 0.0});
    }
    vars.push_back({2.0 * h0 * h0, 0.0});
    const auto sums = parallel::cross_sums(pairs, Axes::x, vars);
    const double p = static_cast<double>(pairs.size());
    for (std::size_t k = 0; k < ells.size(); ++k) {
      l2[k] = (sums[2 * k] - 2.0 * sums[2 * k + 1] + sums.back()) / (p * p);
    }
  } else {
    const auto dom = domain_for(pairs, config, ells.back());
    const auto grid = EvalGrid::line(dom.x_lo, dom.x_hi, config.l2_resolution);
    const auto base = estimate_f(pairs, Bandwidth(h0), grid);
    for (std::size_t k = 0; k < ells.size(); ++k) {
      l2[k] = ells[k] == h0 ? 0.0 : l2_distance_sq(estimate_f(pairs, Bandwidth(ells[k]), grid), base);
    }
  }

  std::vector<CriterionRow> table;
  for (std::size_t k = 0; k < ells.size(); ++k) {
    table.push_back({ells[k], ells[k], l2[k], pens[k], l2[k] + pens[k]});
  }
  return finish(std::move(table), {h0, h0});
}

PcoSelection select_h(const PairSample& pairs, const PcoConfig& config) {
  check_pairs(pairs);
  config.validate();
  const auto& hs = config.grid_h.values();
  const double h0 = config.grid_h.h0();

  std::vector<BandwidthPair> cands;
  if (config.isotropic) {
    for (double h : hs) cands.emplace_back(h, h);
  } else {
    for (double a : hs) {
      for (double b : hs) cands.emplace_back(a, b);
    }
  }
  const auto pens = pen_numerator_batch(pairs, cands, {h0, h0}, config.pen_time_subsample);

  std::vector<double> l2(cands.size());
  if (config.l2_method == L2Method::exact) {
    std::vector<Variances> vars;
    for (const auto& [a, b] : cands) {
      vars.push_back({2.0 * a * a, 2.0 * b * b});
      vars.push_back({a * a + h0 * h0, b * b + h0 * h0});
    }
    vars.push_back({2.0 * h0 * h0, 2.0 * h0 * h0});
    const auto sums = parallel::cross_sums(pairs, Axes::xy, vars);
    const double p = static_cast<double>(pairs.size());
    for (std::size_t k = 0; k < cands.size(); ++k) {
      l2[k] = (sums[2 * k] - 2.0 * sums[2 * k + 1] + sums.back()) / (p * p);
    }
  } else {
    const auto dom = domain_for(pairs, config, hs.back());
    const auto grid = EvalGrid::rect(dom.x_lo, dom.x_hi, config.l2_resolution, dom.y_lo, dom.y_hi,
                                     config.l2_resolution);
    const auto base = estimate_s(pairs, Bandwidth(h0), Bandwidth(h0), grid);
    for (std::size_t k = 0; k < cands.size(); ++k) {
      const auto [a, b] = cands[k];
      l2[k] = (a == h0 && b == h0)
                  ? 0.0
                  : l2_distance_sq(estimate_s(pairs, Bandwidth(a), Bandwidth(b), grid), base);
    }
  }

  std::vector<CriterionRow> table;
  for (std::size_t k = 0; k < cands.size(); ++k) {
    table.push_back({cands[k].first, cands[k].second, l2[k], pens[k], l2[k] + pens[k]});
  }
  return finish(std::move(table), {h0, h0});
}

}  // namespace nwtd
