#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nwtd/bench.hpp"

namespace nwtd {

/// Fixed-bandwidth estimation settings used by `nwtd estimate`.
struct EstimateConfig {
  double h1 = 0.1;
  double h2 = 0.1;
  double ell = 0.1;
  std::optional<double> m;  // fixed threshold; plug-in over the x range when empty
  std::size_t points = 100;
  std::optional<std::array<double, 2>> x_range;  // default: bench x quantiles
  std::optional<std::array<double, 2>> y_range;

  void validate() const;
  friend bool operator==(const EstimateConfig&, const EstimateConfig&) = default;
};

struct AppConfig {
  ExperimentConfig experiment;
  EstimateConfig estimate;

  void validate() const;
  friend bool operator==(const AppConfig&, const AppConfig&) = default;
};

/// Parses the TOML-style text:
///
///   # comment
///   [model]
///   kind = "cir"        # ou | tanh_ou | cir (or 1 | 2 | 3)
///   d = 6
///   [pco]
///   grid_h = [0.02, 0.04, 0.06]
///
/// Sections: model, time, pco, bench, estimate. Setting model.kind resets the
/// model parameters to that model's defaults before the other model keys are
/// applied. `overrides` are "section.key=value" strings applied after the
/// file. Errors are ConfigError and name the key path and line.
AppConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides = {},
                            const std::string& source = "<config>");

/// Reads `path` (ConfigError when missing or unreadable) and parses it.
AppConfig parse_config(const std::filesystem::path& path,
                       const std::vector<std::string>& overrides = {});

/// Defaults with `overrides` applied.
AppConfig default_config(const std::vector<std::string>& overrides = {});

/// Complete config in the same format; parse_config_text(echo_config(c)) == c.
std::string echo_config(const AppConfig& config);

}  // namespace nwtd
