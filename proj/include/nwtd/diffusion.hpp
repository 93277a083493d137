#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace nwtd {

/// dU = -(r/2) U dt + (gamma/2) dW in dimension d.
struct OuParams {
  double r = 2.0;
  double gamma = 2.0;
  int d = 1;

  void validate() const;
  /// gamma^2 / (4 r), per coordinate.
  double stationary_variance() const noexcept { return gamma * gamma / (4.0 * r); }

  friend bool operator==(const OuParams&, const OuParams&) = default;
};

enum class ModelKind { ou, tanh_ou, cir };

/// One of the three benchmark observables built on the OU process:
/// X = U (ou), X = tanh(U) (tanh_ou), X = |U|^2 (cir).
struct ModelSpec {
  ModelKind kind = ModelKind::ou;
  OuParams params;

  /// Parameters used in the benchmark study for each model.
  static ModelSpec defaults(ModelKind kind);

  void validate() const;
  /// Maps a d-dimensional OU state to the observed scalar.
  double observe(std::span<const double> state) const;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& tag);

/// N discretized paths on [0, n * delta], row-major N x (n + 1).
struct PathEnsemble {
  ModelSpec model;
  std::size_t n_copies = 0;
  std::size_t n_steps = 0;
  double delta = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> values;

  std::size_t n_columns() const noexcept { return n_steps + 1; }
  double at(std::size_t copy, std::size_t step) const { return values[copy * n_columns() + step]; }
  std::span<const double> path(std::size_t copy) const {
    return {values.data() + copy * n_columns(), n_columns()};
  }
  /// Values of every copy at one time index.
  std::vector<double> column(std::size_t step) const;
};

/// Exact one-step transition: e^{-r delta/2} state + sd * noise.
std::vector<double> simulate_ou_step(const OuParams& params, std::span<const double> state,
                                     double delta, std::span<const double> noise);

/// Standard deviation of the exact one-step OU innovation.
double ou_innovation_sd(const OuParams& params, double delta);

/// Copy i draws from NormalStream(seed, i); the result does not depend on
/// the number of threads.
PathEnsemble simulate_ensemble(const ModelSpec& model, std::size_t n_copies, std::size_t n_steps,
                               double delta, std::uint64_t seed);

/// Mesh index of `time`, or AlignmentError naming `what`.
std::size_t grid_index(double time, double delta, const char* what);

/// (X_s, X_{s+t}) for s on the mesh inside [t0, T], flattened copy-major:
/// entry p = copy * n_time + j.
struct PairSample {
  std::size_t n_copies = 0;
  std::size_t n_time = 0;
  std::size_t first_index = 0;
  std::size_t lag_steps = 0;
  double t0 = 0.0;
  double T = 0.0;
  double t = 0.0;
  double delta = 0.0;
  std::vector<double> from;
  std::vector<double> to;

  std::size_t size() const noexcept { return from.size(); }
  bool empty() const noexcept { return from.empty(); }
  std::span<const double> from_copy(std::size_t i) const {
    return {from.data() + i * n_time, n_time};
  }
  std::span<const double> to_copy(std::size_t i) const { return {to.data() + i * n_time, n_time}; }
};

PairSample extract_pairs(const PathEnsemble& ensemble, double t0, double T, double t);

/// CSV: one header row with the values N,n,delta,seed,model,r,gamma,d, then
/// one row of n + 1 values per copy, 17 significant digits.
void save_ensemble_csv(const PathEnsemble& ensemble, const std::filesystem::path& file);
PathEnsemble load_ensemble_csv(const std::filesystem::path& file);

}  // namespace nwtd
