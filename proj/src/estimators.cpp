#include "nwtd/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "nwtd/compute/parallel.hpp"
#include "nwtd/error.hpp"

namespace nwtd {

std::vector<double> EvalGrid::linspace(double lo, double hi, std::size_t count) {
  if (count == 0) return {};
  if (count == 1) return {lo};
  std::vector<double> v(count);
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t j = 0; j < count; ++j) v[j] = lo + step * static_cast<double>(j);
  v.back() = hi;
  return v;
}

EvalGrid EvalGrid::line(double lo, double hi, std::size_t count) {
  EvalGrid g{linspace(lo, hi, count), {}};
  g.validate();
  return g;
}

EvalGrid EvalGrid::rect(double x_lo, double x_hi, std::size_t mx, double y_lo, double y_hi,
                        std::size_t my) {
  EvalGrid g{linspace(x_lo, x_hi, mx), linspace(y_lo, y_hi, my)};
  g.validate();
  return g;
}

namespace {

void check_axis(const std::vector<double>& v, const char* name) {
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (!std::isfinite(v[j])) throw std::invalid_argument(std::string(name) + " grid has a non-finite point");
    if (j > 0 && !(v[j] > v[j - 1])) {
      throw std::invalid_argument(std::string(name) + " grid must be strictly increasing");
    }
  }
}

EstimatorMeta base_meta(const PairSample& pairs, const char* kind) {
  EstimatorMeta m;
  m.kind = kind;
  m.t = pairs.t;
  m.t0 = pairs.t0;
  m.T = pairs.T;
  m.n_copies = pairs.n_copies;
  m.n_time = pairs.n_time;
  return m;
}

}  // namespace

void EvalGrid::validate() const {
  if (x.empty()) throw std::invalid_argument("evaluation grid needs at least one x point");
  check_axis(x, "x");
  check_axis(y, "y");
}

TruncationSpec TruncationSpec::fixed(double m) {
  if (!(m > 0.0)) throw std::invalid_argument("truncation threshold m must be positive");
  return {m, TruncationSource::fixed, 0.0, 0.0};
}

TruncationSpec TruncationSpec::plugin(double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("plug-in truncation interval needs lo < hi");
  return {0.0, TruncationSource::plugin, lo, hi};
}

EstimatorGrid estimate_f(const PairSample& pairs, Bandwidth ell, const EvalGrid& grid) {
  if (pairs.empty()) throw std::invalid_argument("estimate_f: empty sample");
  grid.validate();
  EstimatorGrid out;
  out.grid = EvalGrid{grid.x, {}};
  out.values = parallel::smooth_1d(pairs.from, ell.value(), grid.x);
  out.meta = base_meta(pairs, "f");
  out.meta.ell = ell.value();
  return out;
}

EstimatorGrid estimate_s(const PairSample& pairs, Bandwidth h1, Bandwidth h2,
                         const EvalGrid& grid) {
  if (pairs.empty()) throw std::invalid_argument("estimate_s: empty sample");
  grid.validate();
  if (!grid.is_2d()) throw std::invalid_argument("estimate_s needs a two-dimensional grid");
  EstimatorGrid out;
  out.grid = grid;
  out.values = parallel::smooth_2d(pairs.from, pairs.to, h1.value(), h2.value(), grid.x, grid.y);
  out.meta = base_meta(pairs, "s");
  out.meta.h1 = h1.value();
  out.meta.h2 = h2.value();
  return out;
}

double estimate_m(const EstimatorGrid& f_grid, double lo, double hi) {
  double m = std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t j = 0; j < f_grid.grid.x.size(); ++j) {
    const double x = f_grid.grid.x[j];
    if (x >= lo && x <= hi) {
      m = std::min(m, f_grid.at(j));
      any = true;
    }
  }
  if (!any) {
    std::ostringstream msg;
    msg << "estimate_m: no grid point inside [" << lo << ", " << hi << "]";
    throw std::invalid_argument(msg.str());
  }
  return m;
}

EstimatorGrid estimate_p(const EstimatorGrid& s_grid, const EstimatorGrid& f_grid,
                         const TruncationSpec& trunc) {
  if (s_grid.grid.x != f_grid.grid.x) throw std::invalid_argument("estimate_p: x grids differ");
  if (!s_grid.grid.is_2d()) throw std::invalid_argument("estimate_p: numerator must be 2D");
  const double m = trunc.source == TruncationSource::plugin
                       ? estimate_m(f_grid, trunc.lo, trunc.hi)
                       : trunc.m;
  EstimatorGrid out;
  out.grid = s_grid.grid;
  out.meta = s_grid.meta;
  out.meta.kind = "p";
  out.meta.ell = f_grid.meta.ell;
  out.meta.m = m;
  const std::size_t my = s_grid.grid.y.size();
  out.values.assign(s_grid.values.size(), 0.0);
  for (std::size_t j = 0; j < s_grid.grid.x.size(); ++j) {
    const double f = f_grid.at(j);
    if (!(f > 0.5 * m)) continue;
    for (std::size_t k = 0; k < my; ++k) out.values[j * my + k] = s_grid.values[j * my + k] / f;
  }
  return out;
}

double evaluate_p(const PairSample& pairs, Bandwidth h1, Bandwidth h2, Bandwidth ell, double m,
                  double x, double y) {
  const EvalGrid g{{x}, {y}};
  const auto s = estimate_s(pairs, h1, h2, g);
  const auto f = estimate_f(pairs, ell, g);
  return estimate_p(s, f, TruncationSpec::fixed(m)).values[0];
}

void write_grid_csv(const EstimatorGrid& grid, const std::filesystem::path& file) {
  std::ofstream os(file);
  if (!os) throw IoError("cannot open " + file.string() + " for writing");
  os << std::setprecision(17);
  const auto& m = grid.meta;
  os << "# kind=" << m.kind << "\n# h1=" << m.h1 << "\n# h2=" << m.h2 << "\n# ell=" << m.ell
     << "\n# m=" << m.m << "\n# t=" << m.t << "\n# t0=" << m.t0 << "\n# T=" << m.T
     << "\n# n_copies=" << m.n_copies << "\n# n_time=" << m.n_time << '\n';
  if (grid.grid.is_2d()) {
    os << "x\\y";
    for (double y : grid.grid.y) os << ',' << y;
    os << '\n';
    for (std::size_t j = 0; j < grid.grid.x.size(); ++j) {
      os << grid.grid.x[j];
      for (std::size_t k = 0; k < grid.grid.y.size(); ++k) os << ',' << grid.at(j, k);
      os << '\n';
    }
  } else {
    os << "x,value\n";
    for (std::size_t j = 0; j < grid.grid.x.size(); ++j) os << grid.grid.x[j] << ',' << grid.at(j) << '\n';
  }
  if (!os) throw IoError("write failed for " + file.string());
}

namespace {

std::vector<double> parse_row(const std::string& line, const std::filesystem::path& file,
                              std::size_t lineno, bool skip_first) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string cell;
  bool first = true;
  while (std::getline(ss, cell, ',')) {
    if (first && skip_first) {
      first = false;
      continue;
    }
    first = false;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw IoError(file.string() + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
    }
  }
  return out;
}

}  // namespace

EstimatorGrid read_grid_csv(const std::filesystem::path& file) {
  std::ifstream is(file);
  if (!is) throw IoError("cannot open " + file.string());
  EstimatorGrid out;
  std::string line;
  std::size_t lineno = 0;
  bool two_d = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.rfind("# ", 0) == 0) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = line.substr(2, eq - 2);
      const std::string val = line.substr(eq + 1);
      auto& m = out.meta;
      try {
        if (key == "kind") m.kind = val;
        else if (key == "h1") m.h1 = std::stod(val);
        else if (key == "h2") m.h2 = std::stod(val);
        else if (key == "ell") m.ell = std::stod(val);
        else if (key == "m") m.m = std::stod(val);
        else if (key == "t") m.t = std::stod(val);
        else if (key == "t0") m.t0 = std::stod(val);
        else if (key == "T") m.T = std::stod(val);
        else if (key == "n_copies") m.n_copies = std::stoull(val);
        else if (key == "n_time") m.n_time = std::stoull(val);
      } catch (const std::exception&) {
        throw IoError(file.string() + ":" + std::to_string(lineno) + ": bad value for " + key);
      }
      continue;
    }
    if (line.rfind("x\\y", 0) == 0) {
      two_d = true;
      out.grid.y = parse_row(line, file, lineno, true);
      continue;
    }
    if (line.rfind("x,value", 0) == 0 || line.empty()) continue;
    auto row = parse_row(line, file, lineno, false);
    const std::size_t expect = two_d ? out.grid.y.size() + 1 : 2;
    if (row.size() != expect) {
      throw IoError(file.string() + ":" + std::to_string(lineno) + ": expected " +
                    std::to_string(expect) + " values");
    }
    out.grid.x.push_back(row[0]);
    out.values.insert(out.values.end(), row.begin() + 1, row.end());
  }
  if (out.grid.x.empty()) throw IoError(file.string() + ": no grid rows");
  return out;
}

}  // namespace nwtd
