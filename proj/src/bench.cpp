#include "nwtd/bench.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "nwtd/compute/common.hpp"
#include "nwtd/error.hpp"
#include "nwtd/rng.hpp"
#include "nwtd/truth.hpp"

namespace nwtd {

namespace {

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key + ": " + what);
}

bool open_unit(double v) { return v > 0.0 && v < 1.0; }

}  // namespace

void ExperimentConfig::validate() const {
  model.validate();
  require(N >= 1, "bench.N", "need at least one copy");
  require(std::isfinite(T) && T > 0.0, "time.T", "must be positive");
  require(std::isfinite(t0) && t0 >= 0.0 && t0 < T, "time.t0", "must lie in [0, T)");
  require(std::isfinite(t) && t > 0.0 && t <= T, "time.t", "must lie in (0, T]");
  require(std::isfinite(delta) && delta > 0.0, "time.delta", "must be positive");
  require(static_cast<double>(n_steps) * delta >= T + t - 1e-9 * delta, "time.n_steps",
          "paths must reach T + t");
  require(M >= 2, "bench.M", "must be at least 2");
  require(repetitions >= 1, "bench.repetitions", "must be at least 1");
  require(open_unit(levels.x_lo) && open_unit(levels.x_hi) && levels.x_lo < levels.x_hi,
          "bench.quantiles_x", "need 0 < lo < hi < 1");
  require(open_unit(levels.y_lo) && open_unit(levels.y_hi) && levels.y_lo < levels.y_hi,
          "bench.quantiles_y", "need 0 < lo < hi < 1");
  pco.validate();
  require(static_cast<double>(N) * pco.grid_h.h0() >= 1.0 - 1e-12, "pco.grid_h",
          "N * h0 must be at least 1");
  require(static_cast<double>(N) * pco.grid_ell.h0() >= 1.0 - 1e-12, "pco.grid_ell",
          "N * h0 must be at least 1");
  // Alignment of t0, T, t with the mesh.
  grid_index(t0, delta, "time.t0");
  grid_index(T, delta, "time.T");
  grid_index(t, delta, "time.t");
}

std::vector<std::string> ExperimentConfig::warnings() const {
  std::vector<std::string> out;
  if (t0 == 0.0) out.emplace_back("t0 = 0: the PCO risk bounds assume t0 > 0");
  return out;
}

std::uint64_t ExperimentConfig::repetition_seed(std::size_t rep) const {
  return mix64(seed ^ mix64(0x6a09e667f3bcc909ULL + rep));
}

void MiseReport::aggregate() {
  std::vector<double> mise, h, ell;
  for (const auto& r : records) {
    if (r.failed) continue;
    mise.push_back(r.mise);
    h.push_back(r.h);
    ell.push_back(r.ell);
  }
  n_failed = records.size() - mise.size();
  if (mise.empty()) throw std::domain_error("every repetition failed");
  mean_mise = mean(mise);
  std_mise = sample_sd(mise);
  median_mise = median(mise);
  mean_h = mean(h);
  mean_ell = mean(ell);
}

nlohmann::json MiseReport::to_json() const {
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& r : records) {
    nlohmann::json j = {{"index", r.index}, {"failed", r.failed}};
    if (r.failed) {
      j["failure"] = r.failure;
    } else {
      j.update({{"mise", r.mise}, {"h", r.h}, {"ell", r.ell},
                {"bounds", {r.ax, r.bx, r.ay, r.by}}});
    }
    recs.push_back(j);
  }
  return {{"model", to_string(config.model.kind)},
          {"N", config.N},
          {"repetitions", config.repetitions},
          {"seed", config.seed},
          {"failed", n_failed},
          {"mean_mise", mean_mise},
          {"std_mise", std_mise},
          {"median_mise", median_mise},
          {"mean_mise_x100", 100.0 * mean_mise},
          {"std_mise_x100", 100.0 * std_mise},
          {"median_mise_x100", 100.0 * median_mise},
          {"mean_h", mean_h},
          {"mean_ell", mean_ell},
          {"records", recs}};
}

EstimatorGrid truth_surface(const ModelSpec& model, double t, const EvalGrid& grid) {
  if (!grid.is_2d()) throw std::invalid_argument("truth_surface needs a 2-D grid");
  EstimatorGrid out;
  out.grid = grid;
  out.meta.kind = "truth";
  out.meta.t = t;
  out.values.resize(grid.x.size() * grid.y.size());
  for (std::size_t j = 0; j < grid.x.size(); ++j) {
    for (std::size_t k = 0; k < grid.y.size(); ++k) {
      out.values[j * grid.y.size() + k] = transition_density(model, t, grid.x[j], grid.y[k]);
    }
  }
  return out;
}

double riemann_mise(const EstimatorGrid& estimate, const ModelSpec& model, double t) {
  const auto& g = estimate.grid;
  if (!g.is_2d() || g.x.size() < 2 || g.y.size() < 2) {
    throw std::invalid_argument("riemann_mise needs a 2-D grid");
  }
  const double dxy = (g.x.back() - g.x.front()) * (g.y.back() - g.y.front());
  std::vector<double> rows(g.x.size());
  std::vector<double> terms(g.y.size());
  for (std::size_t j = 0; j < g.x.size(); ++j) {
    for (std::size_t k = 0; k < g.y.size(); ++k) {
      const double d = estimate.at(j, k) - transition_density(model, t, g.x[j], g.y[k]);
      terms[k] = d * d;
    }
    rows[j] = compute::pairwise_sum(terms);
  }
  return dxy / static_cast<double>(g.x.size() * g.y.size()) * compute::pairwise_sum(rows);
}

SurfaceRun run_repetition(const ExperimentConfig& config, std::size_t rep) {
  SurfaceRun run;
  auto& rec = run.record;
  rec.index = rep;

  const auto ens = simulate_ensemble(config.model, config.N, config.n_steps, config.delta,
                                     config.repetition_seed(rep));
  const auto xs = ens.column(grid_index(config.t, config.delta, "time.t"));
  const auto ys = ens.column(grid_index(2.0 * config.t, config.delta, "time.t"));
  rec.ax = quantile(xs, config.levels.x_lo);
  rec.bx = quantile(xs, config.levels.x_hi);
  rec.ay = quantile(ys, config.levels.y_lo);
  rec.by = quantile(ys, config.levels.y_hi);
  if (!(rec.ax < rec.bx) || !(rec.ay < rec.by)) {
    rec.failed = true;
    rec.failure = "degenerate quantile interval";
    return run;
  }

  const auto pairs = extract_pairs(ens, config.t0, config.T, config.t);
  run.ell_selection = select_ell(pairs, config.pco);
  run.h_selection = select_h(pairs, config.pco);
  rec.ell = run.ell_selection.chosen.first;
  rec.h = run.h_selection.chosen.first;

  const auto grid = EvalGrid::rect(rec.ax, rec.bx, config.M, rec.ay, rec.by, config.M);
  const auto f = estimate_f(pairs, Bandwidth(rec.ell), EvalGrid::line(rec.ax, rec.bx, config.M));
  const auto s = estimate_s(pairs, Bandwidth(run.h_selection.chosen.first),
                            Bandwidth(run.h_selection.chosen.second), grid);
  run.estimate = estimate_p(s, f, TruncationSpec::plugin(rec.ax, rec.bx));
  run.truth = truth_surface(config.model, config.t, grid);
  rec.mise = riemann_mise(run.estimate, config.model, config.t);
  return run;
}

RepetitionRecord mise_once(const ExperimentConfig& config, std::size_t rep) {
  return run_repetition(config, rep).record;
}

MiseReport run_experiment(const ExperimentConfig& config, const ProgressFn& progress) {
  config.validate();
  MiseReport report;
  report.config = config;
  const std::size_t n = config.repetitions;
  report.records.resize(n);
  std::vector<std::exception_ptr> errors(n);
  std::size_t done = 0;

#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t rep = 0; rep < n; ++rep) {
    try {
      report.records[rep] = mise_once(config, rep);
    } catch (...) {
      errors[rep] = std::current_exception();
    }
    if (progress) {
#pragma omp critical(nwtd_progress)
      progress(++done, n);
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  report.aggregate();
  return report;
}

namespace {

void make_parent(const std::filesystem::path& file) {
  if (file.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(file.parent_path(), ec);
  }
}

std::ofstream open_out(const std::filesystem::path& file) {
  make_parent(file);
  std::ofstream out(file);
  if (!out) throw IoError("cannot write " + file.string());
  return out;
}

}  // namespace

SurfaceRun export_surface(const ExperimentConfig& config, std::size_t rep,
                          const SurfacePaths& paths) {
  config.validate();
  auto run = run_repetition(config, rep);
  if (run.record.failed) throw std::domain_error("surface repetition failed: " + run.record.failure);
  make_parent(paths.truth);
  make_parent(paths.estimate);
  write_grid_csv(run.truth, paths.truth);
  write_grid_csv(run.estimate, paths.estimate);
  nlohmann::json side = {{"model", to_string(config.model.kind)},
                         {"N", config.N},
                         {"t", config.t},
                         {"repetition", rep},
                         {"seed", config.repetition_seed(rep)},
                         {"h", run.record.h},
                         {"ell", run.record.ell},
                         {"m", run.estimate.meta.m},
                         {"mise", run.record.mise},
                         {"mise_x100", 100.0 * run.record.mise},
                         {"truth", paths.truth.filename().string()},
                         {"estimate", paths.estimate.filename().string()},
                         {"pco_h", run.h_selection.to_json()},
                         {"pco_ell", run.ell_selection.to_json()}};
  auto out = open_out(paths.sidecar);
  out << side.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + paths.sidecar.string());
  return run;
}

void write_report_json(const MiseReport& report, const std::filesystem::path& file) {
  auto out = open_out(file);
  out << report.to_json().dump(2) << '\n';
  if (!out) throw IoError("write failed: " + file.string());
}

void write_table_csv(const std::vector<MiseReport>& reports, const std::filesystem::path& file) {
  auto out = open_out(file);
  out << "model,N,mean_x100,std_x100,median_x100,mean_h,mean_ell,failed\n";
  out.precision(17);
  for (const auto& r : reports) {
    out << to_string(r.config.model.kind) << ',' << r.config.N << ',' << 100.0 * r.mean_mise
        << ',' << 100.0 * r.std_mise << ',' << 100.0 * r.median_mise << ',' << r.mean_h << ','
        << r.mean_ell << ',' << r.n_failed << '\n';
  }
  if (!out) throw IoError("write failed: " + file.string());
}

std::string format_table(const std::vector<MiseReport>& reports) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-8s %6s %18s %10s %8s %8s\n", "model", "N",
                "100*MISE (std)", "median", "mean h", "mean l");
  os << line;
  for (const auto& r : reports) {
    std::snprintf(line, sizeof line, "%-8s %6zu %8.3f (%7.3f) %10.3f %8.3f %8.3f\n",
                  to_string(r.config.model.kind).c_str(), r.config.N, 100.0 * r.mean_mise,
                  100.0 * r.std_mise, 100.0 * r.median_mise, r.mean_h, r.mean_ell);
    os << line;
  }
  return os.str();
}

}  // namespace nwtd
