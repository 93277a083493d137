#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nwtd/bench.hpp"
#include "nwtd/compute/common.hpp"
#include "nwtd/config.hpp"
#include "nwtd/error.hpp"

namespace fs = std::filesystem;
using namespace nwtd;

namespace {

struct Options {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir = ".";
  int threads = 0;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  bool verbose = false;
  bool print_config = false;
  std::size_t rep = 0;
  std::string ensemble_path;
  std::vector<std::size_t> sizes;
};

void log(const Options& o, const std::string& msg) {
  if (!o.quiet) std::cerr << msg << '\n';
}

AppConfig load(const Options& o) {
  auto overrides = o.overrides;
  if (o.seed) overrides.push_back("bench.seed=" + std::to_string(*o.seed));
  AppConfig cfg = o.config_path.empty() ? default_config(overrides) : parse_config(o.config_path, overrides);
  for (const auto& w : cfg.experiment.warnings()) log(o, "warning: " + w);
  return cfg;
}

fs::path prepare_out(const Options& o) {
  fs::path dir(o.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
  return dir;
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream out(file);
  if (!out) throw IoError("cannot write " + file.string());
  out << text;
  if (!out) throw IoError("write failed: " + file.string());
}

void echo(const Options& o, const AppConfig& cfg, const fs::path& dir) {
  write_text(dir / "config.toml", echo_config(cfg));
  if (o.print_config) std::cout << echo_config(cfg);
}

PathEnsemble ensemble_for(const Options& o, const ExperimentConfig& x) {
  if (!o.ensemble_path.empty()) {
    auto ens = load_ensemble_csv(o.ensemble_path);
    if (o.verbose) log(o, "loaded " + std::to_string(ens.n_copies) + " paths from " + o.ensemble_path);
    return ens;
  }
  return simulate_ensemble(x.model, x.N, x.n_steps, x.delta, x.repetition_seed(o.rep));
}

int run_simulate(const Options& o) {
  const auto cfg = load(o);
  const auto dir = prepare_out(o);
  echo(o, cfg, dir);
  const auto& x = cfg.experiment;
  const auto ens = simulate_ensemble(x.model, x.N, x.n_steps, x.delta, x.repetition_seed(o.rep));
  save_ensemble_csv(ens, dir / "ensemble.csv");
  log(o, "wrote " + (dir / "ensemble.csv").string());
  return 0;
}

std::array<double, 2> range_or(const std::optional<std::array<double, 2>>& given,
                               const std::vector<double>& sample, double lo, double hi) {
  if (given) return *given;
  return {quantile(sample, lo), quantile(sample, hi)};
}

int run_estimate(const Options& o) {
  const auto cfg = load(o);
  const auto dir = prepare_out(o);
  echo(o, cfg, dir);
  const auto& x = cfg.experiment;
  const auto& e = cfg.estimate;
  const auto ens = ensemble_for(o, x);
  const auto pairs = extract_pairs(ens, x.t0, x.T, x.t);
  const auto xr = range_or(e.x_range, ens.column(grid_index(x.t, ens.delta, "time.t")), x.levels.x_lo,
                           x.levels.x_hi);
  const auto yr = range_or(e.y_range, ens.column(grid_index(2.0 * x.t, ens.delta, "time.t")),
                           x.levels.y_lo, x.levels.y_hi);
  const auto grid = EvalGrid::rect(xr[0], xr[1], e.points, yr[0], yr[1], e.points);
  const auto f = estimate_f(pairs, Bandwidth(e.ell), EvalGrid::line(xr[0], xr[1], e.points));
  const auto s = estimate_s(pairs, Bandwidth(e.h1), Bandwidth(e.h2), grid);
  const auto trunc = e.m ? TruncationSpec::fixed(*e.m) : TruncationSpec::plugin(xr[0], xr[1]);
  const auto p = estimate_p(s, f, trunc);
  write_grid_csv(f, dir / "f.csv");
  write_grid_csv(s, dir / "s.csv");
  write_grid_csv(p, dir / "p.csv");
  log(o, "wrote f.csv, s.csv, p.csv to " + dir.string() + " (m = " + std::to_string(p.meta.m) + ")");
  return 0;
}

int run_select(const Options& o) {
  const auto cfg = load(o);
  const auto dir = prepare_out(o);
  echo(o, cfg, dir);
  const auto& x = cfg.experiment;
  const auto ens = ensemble_for(o, x);
  const auto pairs = extract_pairs(ens, x.t0, x.T, x.t);
  const auto ell = select_ell(pairs, x.pco);
  const auto h = select_h(pairs, x.pco);
  nlohmann::json report = {{"h", h.to_json()}, {"ell", ell.to_json()}};
  write_text(dir / "select.json", report.dump(2) + "\n");
  std::printf("h = (%.4g, %.4g)  ell = %.4g\n", h.chosen.first, h.chosen.second, ell.chosen.first);
  return 0;
}

int run_bench(const Options& o) {
  const auto cfg = load(o);
  const auto dir = prepare_out(o);
  echo(o, cfg, dir);
  auto sizes = o.sizes;
  if (sizes.empty()) sizes.push_back(cfg.experiment.N);
  std::vector<MiseReport> reports;
  for (auto n : sizes) {
    auto x = cfg.experiment;
    x.N = n;
    ProgressFn progress;
    if (!o.quiet) {
      progress = [&](std::size_t done, std::size_t total) {
        std::fprintf(stderr, "\r%s N=%zu: %zu/%zu", to_string(x.model.kind).c_str(), n, done, total);
        if (done == total) std::fputc('\n', stderr);
      };
    }
    reports.push_back(run_experiment(x, progress));
    const auto name = "report_" + to_string(x.model.kind) + "_N" + std::to_string(n) + ".json";
    write_report_json(reports.back(), dir / name);
    if (reports.back().n_failed > 0) {
      log(o, "warning: " + std::to_string(reports.back().n_failed) + " repetitions failed");
    }
  }
  write_table_csv(reports, dir / "table.csv");
  std::cout << format_table(reports);
  return 0;
}

int run_surface(const Options& o) {
  const auto cfg = load(o);
  const auto dir = prepare_out(o);
  echo(o, cfg, dir);
  const auto run = export_surface(cfg.experiment, o.rep,
                                  {dir / "truth.csv", dir / "estimate.csv", dir / "surface.json"});
  std::printf("h = %.4g  ell = %.4g  100*MISE = %.4f\n", run.record.h, run.record.ell,
              100.0 * run.record.mise);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nadaraya-Watson transition density estimation with PCO bandwidth selection"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--config", o.config_path, "Experiment config file (TOML-style)");
  app.add_option("--set", o.overrides, "Override a config key, section.key=value (repeatable)");
  app.add_option("--out", o.out_dir, "Output directory");
  app.add_option("--threads", o.threads, "Worker threads (0 = OpenMP default)")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", o.seed, "Base seed (overrides bench.seed)");
  auto* quiet = app.add_flag("--quiet,-q", o.quiet, "Only print results");
  app.add_flag("--verbose,-v", o.verbose, "More progress output")->excludes(quiet);
  app.add_flag("--print-config", o.print_config, "Print the effective config");

  auto* sim = app.add_subcommand("simulate", "Simulate one ensemble and write it as CSV");
  sim->add_option("--rep", o.rep, "Repetition index used to derive the ensemble seed");
  auto* est = app.add_subcommand("estimate", "Estimate f, s and p with the [estimate] bandwidths");
  auto* sel = app.add_subcommand("select", "Run PCO bandwidth selection and write the criterion tables");
  for (auto* sub : {est, sel}) {
    sub->add_option("--ensemble", o.ensemble_path, "Ensemble CSV (default: simulate one)");
    sub->add_option("--rep", o.rep, "Repetition index used when simulating");
  }
  auto* bench = app.add_subcommand("bench", "Monte Carlo MISE study");
  bench->add_option("--sizes", o.sizes, "Copy counts to run in turn (default: bench.N)")->delimiter(',');
  auto* surf = app.add_subcommand("surface", "Export truth and estimate surfaces of one repetition");
  surf->add_option("--rep", o.rep, "Repetition index");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (o.threads > 0) compute::set_threads(o.threads);
    if (*sim) return run_simulate(o);
    if (*est) return run_estimate(o);
    if (*sel) return run_select(o);
    if (*bench) return run_bench(o);
    if (*surf) return run_surface(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return 4;
  } catch (const std::domain_error& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
