#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nwtd/diffusion.hpp"
#include "nwtd/estimators.hpp"
#include "nwtd/pco.hpp"
#include "nwtd/stats.hpp"

namespace nwtd {

struct QuantileLevels {
  double x_lo = 0.02;
  double x_hi = 0.98;
  double y_lo = 0.01;
  double y_hi = 0.99;

  friend bool operator==(const QuantileLevels&, const QuantileLevels&) = default;
};

struct ExperimentConfig {
  ModelSpec model = ModelSpec::defaults(ModelKind::ou);
  std::size_t N = 100;
  double T = 10.0;
  double t0 = 0.0;
  double t = 1.0;
  double delta = 0.02;
  std::size_t n_steps = 1000;
  std::size_t M = 100;
  std::size_t repetitions = 200;
  QuantileLevels levels;
  PcoConfig pco;
  std::uint64_t seed = 1;

  /// Throws ConfigError naming the offending key.
  void validate() const;
  /// Non-fatal remarks, e.g. t0 = 0 lies outside the range covered by the
  /// risk bounds.
  std::vector<std::string> warnings() const;

  /// Ensemble seed of repetition `rep`.
  std::uint64_t repetition_seed(std::size_t rep) const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

struct RepetitionRecord {
  std::size_t index = 0;
  bool failed = false;
  std::string failure;
  double mise = 0.0;
  double h = 0.0;
  double ell = 0.0;
  double ax = 0.0;
  double bx = 0.0;
  double ay = 0.0;
  double by = 0.0;
};

struct MiseReport {
  ExperimentConfig config;
  std::vector<RepetitionRecord> records;
  std::size_t n_failed = 0;
  double mean_mise = 0.0;
  double std_mise = 0.0;
  double median_mise = 0.0;
  double mean_h = 0.0;
  double mean_ell = 0.0;

  /// Recomputes the aggregates from `records`.
  void aggregate();
  nlohmann::json to_json() const;
};

/// Truth p_t on a two-dimensional grid.
EstimatorGrid truth_surface(const ModelSpec& model, double t, const EvalGrid& grid);

/// (DXY / M^2) sum_{j,k} (p_hat - p_t)^2 with DXY the area of the grid's
/// bounding rectangle and M^2 the number of grid points.
double riemann_mise(const EstimatorGrid& estimate, const ModelSpec& model, double t);

/// One seeded repetition, with the estimate and truth kept.
struct SurfaceRun {
  RepetitionRecord record;
  EstimatorGrid estimate;
  EstimatorGrid truth;
  PcoSelection h_selection;
  PcoSelection ell_selection;
};

SurfaceRun run_repetition(const ExperimentConfig& config, std::size_t rep);

RepetitionRecord mise_once(const ExperimentConfig& config, std::size_t rep);

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

MiseReport run_experiment(const ExperimentConfig& config, const ProgressFn& progress = {});

struct SurfacePaths {
  std::filesystem::path truth;
  std::filesystem::path estimate;
  std::filesystem::path sidecar;
};

SurfaceRun export_surface(const ExperimentConfig& config, std::size_t rep,
                          const SurfacePaths& paths);

void write_report_json(const MiseReport& report, const std::filesystem::path& file);

/// One row per report: model, N, mean, std, median (all x100), mean_h, mean_ell.
void write_table_csv(const std::vector<MiseReport>& reports, const std::filesystem::path& file);
std::string format_table(const std::vector<MiseReport>& reports);

}  // namespace nwtd
