#include "nwtd/diffusion.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "nwtd/error.hpp"
#include "nwtd/rng.hpp"

namespace nwtd {

void OuParams::validate() const {
  if (!(r > 0.0) || !std::isfinite(r)) throw ConfigError("model.r must be positive");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("model.gamma must be positive");
  if (d < 1) throw ConfigError("model.d must be at least 1");
}

ModelSpec ModelSpec::defaults(ModelKind kind) {
  switch (kind) {
    case ModelKind::ou:
      return {kind, {2.0, 2.0, 1}};
    case ModelKind::tanh_ou:
      return {kind, {4.0, 1.0, 1}};
    case ModelKind::cir:
      return {kind, {1.0, 1.0, 6}};
  }
  throw std::logic_error("unknown model kind");
}

void ModelSpec::validate() const {
  params.validate();
  if (kind != ModelKind::cir && params.d != 1) {
    throw ConfigError("model.d must be 1 for the " + to_string(kind) + " model");
  }
  if (kind == ModelKind::cir && params.d < 2) throw ConfigError("model.d must be at least 2 for cir");
}

double ModelSpec::observe(std::span<const double> state) const {
  switch (kind) {
    case ModelKind::ou:
      return state[0];
    case ModelKind::tanh_ou:
      return std::tanh(state[0]);
    case ModelKind::cir: {
      double sq = 0.0;
      for (double u : state) sq += u * u;
      return sq;
    }
  }
  throw std::logic_error("unknown model kind");
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::ou:
      return "ou";
    case ModelKind::tanh_ou:
      return "tanh_ou";
    case ModelKind::cir:
      return "cir";
  }
  return "?";
}

ModelKind parse_model_kind(const std::string& tag) {
  if (tag == "ou" || tag == "1") return ModelKind::ou;
  if (tag == "tanh_ou" || tag == "2") return ModelKind::tanh_ou;
  if (tag == "cir" || tag == "3") return ModelKind::cir;
  throw ConfigError("unknown model kind '" + tag + "' (expected ou, tanh_ou or cir)");
}

std::vector<double> PathEnsemble::column(std::size_t step) const {
  std::vector<double> out(n_copies);
  for (std::size_t i = 0; i < n_copies; ++i) out[i] = at(i, step);
  return out;
}

double ou_innovation_sd(const OuParams& params, double delta) {
  if (!(delta > 0.0)) throw std::domain_error("time step must be positive");
  return 0.5 * params.gamma * std::sqrt(-std::expm1(-params.r * delta) / params.r);
}

std::vector<double> simulate_ou_step(const OuParams& params, std::span<const double> state,
                                     double delta, std::span<const double> noise) {
  const double sd = ou_innovation_sd(params, delta);
  if (noise.size() != state.size()) throw std::invalid_argument("noise and state sizes differ");
  const double decay = std::exp(-0.5 * params.r * delta);
  std::vector<double> next(state.size());
  for (std::size_t k = 0; k < state.size(); ++k) next[k] = decay * state[k] + sd * noise[k];
  return next;
}

PathEnsemble simulate_ensemble(const ModelSpec& model, std::size_t n_copies, std::size_t n_steps,
                               double delta, std::uint64_t seed) {
  model.validate();
  if (n_copies < 1) throw ConfigError("n_copies must be at least 1");
  if (n_steps < 2) throw ConfigError("n_steps must be at least 2");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ConfigError("delta must be positive");

  PathEnsemble out;
  out.model = model;
  out.n_copies = n_copies;
  out.n_steps = n_steps;
  out.delta = delta;
  out.seed = seed;
  out.values.resize(n_copies * (n_steps + 1));

  const auto d = static_cast<std::size_t>(model.params.d);
  const double decay = std::exp(-0.5 * model.params.r * delta);
  const double step_sd = ou_innovation_sd(model.params, delta);
  const double start_sd = std::sqrt(model.params.stationary_variance());
  const auto n = static_cast<std::ptrdiff_t>(n_copies);

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    NormalStream normals(seed, static_cast<std::uint64_t>(i));
    std::vector<double> state(d);
    for (auto& u : state) u = start_sd * normals.next();
    double* row = out.values.data() + static_cast<std::size_t>(i) * (n_steps + 1);
    row[0] = model.observe(state);
    for (std::size_t j = 1; j <= n_steps; ++j) {
      for (auto& u : state) u = decay * u + step_sd * normals.next();
      row[j] = model.observe(state);
    }
  }
  return out;
}

std::size_t grid_index(double time, double delta, const char* what) {
  if (!std::isfinite(time) || time < 0.0) {
    std::ostringstream msg;
    msg << what << " = " << time << " must be a finite nonnegative time";
    throw AlignmentError(msg.str());
  }
  const double k = std::round(time / delta);
  if (std::abs(k * delta - time) > 1e-9 * std::max(1.0, std::abs(time))) {
    std::ostringstream msg;
    msg << what << " = " << time << " is not a multiple of the mesh " << delta;
    throw AlignmentError(msg.str());
  }
  return static_cast<std::size_t>(k);
}

PairSample extract_pairs(const PathEnsemble& ensemble, double t0, double T, double t) {
  if (!(t0 >= 0.0 && t0 < T)) throw ConfigError("time window requires 0 <= t0 < T");
  if (!(t > 0.0 && t <= T)) throw ConfigError("lag requires 0 < t <= T");
  const std::size_t j0 = grid_index(t0, ensemble.delta, "t0");
  const std::size_t j1 = grid_index(T, ensemble.delta, "T");
  const std::size_t lag = grid_index(t, ensemble.delta, "t");
  grid_index(T + t, ensemble.delta, "T + t");
  if (j1 + lag > ensemble.n_steps) {
    std::ostringstream msg;
    msg << "T + t = " << T + t << " exceeds the simulated horizon "
        << static_cast<double>(ensemble.n_steps) * ensemble.delta;
    throw ConfigError(msg.str());
  }

  PairSample out;
  out.n_copies = ensemble.n_copies;
  out.n_time = j1 - j0 + 1;
  out.first_index = j0;
  out.lag_steps = lag;
  out.t0 = t0;
  out.T = T;
  out.t = t;
  out.delta = ensemble.delta;
  out.from.resize(out.n_copies * out.n_time);
  out.to.resize(out.n_copies * out.n_time);
  for (std::size_t i = 0; i < out.n_copies; ++i) {
    const auto path = ensemble.path(i);
    for (std::size_t j = 0; j < out.n_time; ++j) {
      out.from[i * out.n_time + j] = path[j0 + j];
      out.to[i * out.n_time + j] = path[j0 + j + lag];
    }
  }
  return out;
}

void save_ensemble_csv(const PathEnsemble& ensemble, const std::filesystem::path& file) {
  std::ofstream os(file);
  if (!os) throw IoError("cannot open " + file.string() + " for writing");
  os << std::setprecision(17);
  const auto& p = ensemble.model.params;
  os << ensemble.n_copies << ',' << ensemble.n_steps << ',' << ensemble.delta << ',' << ensemble.seed
     << ',' << to_string(ensemble.model.kind) << ',' << p.r << ',' << p.gamma << ',' << p.d << '\n';
  for (std::size_t i = 0; i < ensemble.n_copies; ++i) {
    const auto path = ensemble.path(i);
    for (std::size_t j = 0; j < path.size(); ++j) os << (j ? "," : "") << path[j];
    os << '\n';
  }
  if (!os) throw IoError("write failed for " + file.string());
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

double parse_double(const std::string& s, const std::filesystem::path& file, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw IoError(file.string() + ":" + std::to_string(line) + ": bad number '" + s + "'");
  }
}

}  // namespace

PathEnsemble load_ensemble_csv(const std::filesystem::path& file) {
  std::ifstream is(file);
  if (!is) throw IoError("cannot open " + file.string());
  std::string line;
  if (!std::getline(is, line)) throw IoError(file.string() + ": missing header row");
  const auto head = split_csv(line);
  if (head.size() != 8) throw IoError(file.string() + ":1: header must have 8 fields");

  PathEnsemble out;
  try {
    out.n_copies = std::stoull(head[0]);
    out.n_steps = std::stoull(head[1]);
    out.seed = std::stoull(head[3]);
    out.model.kind = parse_model_kind(head[4]);
    out.model.params.d = std::stoi(head[7]);
  } catch (const std::exception& e) {
    throw IoError(file.string() + ":1: " + e.what());
  }
  out.delta = parse_double(head[2], file, 1);
  out.model.params.r = parse_double(head[5], file, 1);
  out.model.params.gamma = parse_double(head[6], file, 1);
  out.values.reserve(out.n_copies * out.n_columns());

  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != out.n_columns()) {
      throw IoError(file.string() + ":" + std::to_string(lineno) + ": expected " +
                    std::to_string(out.n_columns()) + " values");
    }
    for (const auto& c : cells) out.values.push_back(parse_double(c, file, lineno));
  }
  if (out.values.size() != out.n_copies * out.n_columns()) {
    throw IoError(file.string() + ": expected " + std::to_string(out.n_copies) + " copy rows");
  }
  return out;
}

}  // namespace nwtd
