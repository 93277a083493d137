#include "nwtd/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "nwtd/error.hpp"

namespace nwtd {

namespace {

struct Value {
  enum class Kind { scalar, string, array };
  Kind kind = Kind::scalar;
  std::string text;
  std::vector<Value> items;
};

struct Entry {
  std::string key;
  Value value;
  std::string where;  // "file:line" or "--set"
};

[[noreturn]] void fail(const Entry& e, const std::string& msg) {
  throw ConfigError(e.where + ": " + e.key + ": " + msg);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

class ValueParser {
 public:
  explicit ValueParser(std::string_view s) : s_(s) {}

  Value parse_all() {
    Value v = parse();
    skip_ws();
    if (pos_ != s_.size()) throw std::invalid_argument("trailing characters after value");
    return v;
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r')) ++pos_;
  }

  Value parse() {
    skip_ws();
    if (pos_ >= s_.size()) throw std::invalid_argument("missing value");
    if (s_[pos_] == '"') return parse_string();
    if (s_[pos_] == '[') return parse_array();
    const auto start = pos_;
    while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != ']') ++pos_;
    Value v;
    v.text = trim(s_.substr(start, pos_ - start));
    if (v.text.empty()) throw std::invalid_argument("missing value");
    return v;
  }

  Value parse_string() {
    Value v;
    v.kind = Value::Kind::string;
    ++pos_;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) ++pos_;
      v.text.push_back(s_[pos_++]);
    }
    if (pos_ >= s_.size()) throw std::invalid_argument("unterminated string");
    ++pos_;
    return v;
  }

  Value parse_array() {
    Value v;
    v.kind = Value::Kind::array;
    ++pos_;
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == ']') {
      ++pos_;
      return v;
    }
    for (;;) {
      v.items.push_back(parse());
      skip_ws();
      if (pos_ >= s_.size()) throw std::invalid_argument("unterminated array");
      if (s_[pos_] == ']') {
        ++pos_;
        return v;
      }
      if (s_[pos_] != ',') throw std::invalid_argument("expected ',' or ']' in array");
      ++pos_;
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == ']') {
        ++pos_;
        return v;
      }
    }
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    if (line[k] == '\\' && quoted) {
      ++k;
    } else if (line[k] == '"') {
      quoted = !quoted;
    } else if (line[k] == '#' && !quoted) {
      return line.substr(0, k);
    }
  }
  return line;
}

double to_double(const Entry& e, const Value& v) {
  if (v.kind != Value::Kind::scalar) fail(e, "expected a number");
  double out = 0.0;
  const auto* end = v.text.data() + v.text.size();
  auto [p, ec] = std::from_chars(v.text.data(), end, out);
  if (ec != std::errc() || p != end || !std::isfinite(out)) {
    fail(e, "expected a number, got '" + v.text + "'");
  }
  return out;
}

std::uint64_t to_uint(const Entry& e, const Value& v) {
  if (v.kind != Value::Kind::scalar) fail(e, "expected a non-negative integer");
  std::uint64_t out = 0;
  const auto* end = v.text.data() + v.text.size();
  auto [p, ec] = std::from_chars(v.text.data(), end, out);
  if (ec != std::errc() || p != end) fail(e, "expected a non-negative integer, got '" + v.text + "'");
  return out;
}

bool to_bool(const Entry& e, const Value& v) {
  if (v.kind == Value::Kind::scalar && v.text == "true") return true;
  if (v.kind == Value::Kind::scalar && v.text == "false") return false;
  fail(e, "expected true or false");
}

std::string to_text(const Entry& e, const Value& v) {
  if (v.kind == Value::Kind::array) fail(e, "expected a string");
  return v.text;
}

std::vector<double> to_doubles(const Entry& e, const Value& v, std::size_t want = 0) {
  if (v.kind != Value::Kind::array) fail(e, "expected an array of numbers");
  if (want != 0 && v.items.size() != want) {
    fail(e, "expected " + std::to_string(want) + " numbers, got " + std::to_string(v.items.size()));
  }
  std::vector<double> out;
  for (const auto& item : v.items) out.push_back(to_double(e, item));
  return out;
}

bool is_auto(const Value& v, const char* word) {
  return v.kind != Value::Kind::array && v.text == word;
}

BandwidthGrid to_grid(const Entry& e, const Value& v) {
  try {
    return BandwidthGrid(to_doubles(e, v));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& ex) {
    fail(e, ex.what());
  }
}

struct GridSteps {
  std::optional<double> step;
  std::optional<std::uint64_t> count;
};

struct Pending {
  GridSteps h;
  GridSteps ell;
};

using Setter = std::function<void(AppConfig&, Pending&, const Entry&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    t["model.kind"] = [](AppConfig&, Pending&, const Entry&) {};  // handled first
    t["model.r"] = [](AppConfig& c, Pending&, const Entry& e) {
      c.experiment.model.params.r = to_double(e, e.value);
    };
    t["model.gamma"] = [](AppConfig& c, Pending&, const Entry& e) {
      c.experiment.model.params.gamma = to_double(e, e.value);
    };
    t["model.d"] = [](AppConfig& c, Pending&, const Entry& e) {
      const auto d = to_uint(e, e.value);
      if (d < 1 || d > 1000) fail(e, "must be between 1 and 1000");
      c.experiment.model.params.d = static_cast<int>(d);
    };
    t["time.T"] = [](AppConfig& c, Pending&, const Entry& e) { c.experiment.T = to_double(e, e.value); };
    t["time.t0"] = [](AppConfig& c, Pending&, const Entry& e) { c.experiment.t0 = to_double(e, e.value); };
    t["time.t"] = [](AppConfig& c, Pending&, const Entry& e) { c.experiment.t = to_double(e, e.value); };
    t["time.delta"] = [](AppConfig& c, Pending&, const Entry& e) {
      c.experiment.delta = to_double(e, e.value);
    };
    t["time.n_steps"] = [](AppConfig& c, Pending&, const Entry& e) {
      c.experiment.n_steps = to_uint(e, e.value);
    };
    t["pco.grid_h"] = [](AppConfig& c, Pending&, const Entry& e) {
      c.experiment.pco.grid_h = to_grid(e, e.value);
    };
    t["pco.grid_ell"] = [](AppConfig& c, Pending&, const Entry& e) {
      c.experiment.pco.grid_ell = to_grid(e, e.value);
    };
    t["pco.grid_h_step"] = [](AppConfig&, Pending& p, const Entry& e) { p.h.step = to_double(e, e.value); };
    t["pco.grid_h_count"] = [](AppConfig&, Pending& p, const Entry& e) { p.h.count = to_uint(e, e.value); };
    t["pco.grid_ell_step"] = [](AppConfig&, Pending& p, const Entry& e) {
      p.ell.step = to_double(e, e.value);
    };
    t["pco.grid_ell_count"] = [](AppConfig&, Pending& p, const Entry& e) {
      p.ell.count = to_uint(e, e.value);
    };
    t["pco.l2_method"] = [](AppConfig& c, Pending&, const Entry& e) {
      const auto s = to_text(e, e.value);
      if (s == "exact") {
        c.experiment.pco.l2_method = L2Method::exact;
      } else if (s == "grid") {
        c.experiment.pco.l2_method = L2Method::grid;
      } else {
        fail(e, "expected \"exact\" or \"grid\", got '" + s + "'");
      }
    };
    t["pco.l2_resolution"] = [](AppConfig& c, Pending&, const Entry& e) {
      c.experiment.pco.l2_resolution = to_uint(e, e.value);
    };
    t["pco.l2_domain"] = [](AppConfig& c, Pending&, const Entry& e) {
      if (is_auto(e.value, "auto")) {
        c.experiment.pco.l2_domain.reset();
        return;
      }
      const auto v = to_doubles(e, e.value, 4);
      c.experiment.pco.l2_domain = Rectangle{v[0], v[1], v[2], v[3]};
    };
    t["pco.pen_stride"] = [](AppConfig& c, Pending&, const Entry& e) {
      c.experiment.pco.pen_time_subsample = to_uint(e, e.value);
    };
    t["pco.isotropic"] = [](AppConfig& c, Pending&, const Entry& e) {
      c.experiment.pco.isotropic = to_bool(e, e.value);
    };
    t["bench.N"] = [](AppConfig& c, Pending&, const Entry& e) { c.experiment.N = to_uint(e, e.value); };
    t["bench.M"] = [](AppConfig& c, Pending&, const Entry& e) { c.experiment.M = to_uint(e, e.value); };
    t["bench.repetitions"] = [](AppConfig& c, Pending&, const Entry& e) {
      c.experiment.repetitions = to_uint(e, e.value);
    };
    t["bench.seed"] = [](AppConfig& c, Pending&, const Entry& e) { c.experiment.seed = to_uint(e, e.value); };
    t["bench.quantiles_x"] = [](AppConfig& c, Pending&, const Entry& e) {
      const auto v = to_doubles(e, e.value, 2);
      c.experiment.levels.x_lo = v[0];
      c.experiment.levels.x_hi = v[1];
    };
    t["bench.quantiles_y"] = [](AppConfig& c, Pending&, const Entry& e) {
      const auto v = to_doubles(e, e.value, 2);
      c.experiment.levels.y_lo = v[0];
      c.experiment.levels.y_hi = v[1];
    };
    t["estimate.h1"] = [](AppConfig& c, Pending&, const Entry& e) { c.estimate.h1 = to_double(e, e.value); };
    t["estimate.h2"] = [](AppConfig& c, Pending&, const Entry& e) { c.estimate.h2 = to_double(e, e.value); };
    t["estimate.ell"] = [](AppConfig& c, Pending&, const Entry& e) { c.estimate.ell = to_double(e, e.value); };
    t["estimate.m"] = [](AppConfig& c, Pending&, const Entry& e) {
      if (is_auto(e.value, "plugin")) {
        c.estimate.m.reset();
      } else {
        c.estimate.m = to_double(e, e.value);
      }
    };
    t["estimate.points"] = [](AppConfig& c, Pending&, const Entry& e) {
      c.estimate.points = to_uint(e, e.value);
    };
    t["estimate.x_range"] = [](AppConfig& c, Pending&, const Entry& e) {
      if (is_auto(e.value, "auto")) {
        c.estimate.x_range.reset();
        return;
      }
      const auto v = to_doubles(e, e.value, 2);
      c.estimate.x_range = std::array<double, 2>{v[0], v[1]};
    };
    t["estimate.y_range"] = [](AppConfig& c, Pending&, const Entry& e) {
      if (is_auto(e.value, "auto")) {
        c.estimate.y_range.reset();
        return;
      }
      const auto v = to_doubles(e, e.value, 2);
      c.estimate.y_range = std::array<double, 2>{v[0], v[1]};
    };
    return t;
  }();
  return table;
}

Entry parse_override(const std::string& text) {
  Entry e;
  e.where = "--set";
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw ConfigError("--set: expected key=value, got '" + text + "'");
  e.key = trim(std::string_view(text).substr(0, eq));
  if (e.key.find('.') == std::string::npos) {
    throw ConfigError("--set: key '" + e.key + "' must be section.key");
  }
  try {
    e.value = ValueParser(std::string_view(text).substr(eq + 1)).parse_all();
  } catch (const std::invalid_argument& ex) {
    fail(e, ex.what());
  }
  return e;
}

std::vector<Entry> parse_entries(const std::string& text, const std::string& source) {
  static const std::vector<std::string> sections = {"model", "time", "pco", "bench", "estimate"};
  std::vector<Entry> out;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string where = source + ":" + std::to_string(lineno);
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (std::find(sections.begin(), sections.end(), section) == sections.end()) {
        throw ConfigError(where + ": unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    if (section.empty()) throw ConfigError(where + ": key outside of a section");
    Entry e;
    e.where = where;
    e.key = section + "." + trim(std::string_view(line).substr(0, eq));
    try {
      e.value = ValueParser(std::string_view(line).substr(eq + 1)).parse_all();
    } catch (const std::invalid_argument& ex) {
      fail(e, ex.what());
    }
    out.push_back(std::move(e));
  }
  return out;
}

AppConfig apply(std::vector<Entry> entries) {
  const auto& table = setters();
  for (const auto& e : entries) {
    if (!table.contains(e.key)) fail(e, "unknown key");
  }
  AppConfig config;
  for (const auto& e : entries) {
    if (e.key != "model.kind") continue;
    try {
      config.experiment.model = ModelSpec::defaults(parse_model_kind(to_text(e, e.value)));
    } catch (const ConfigError& ex) {
      if (std::string(ex.what()).rfind(e.where, 0) == 0) throw;
      fail(e, ex.what());
    }
  }
  Pending pending;
  for (const auto& e : entries) table.at(e.key)(config, pending, e);

  auto rebuild = [](BandwidthGrid& grid, const GridSteps& g, const char* key) {
    if (!g.step && !g.count) return;
    const double step = g.step.value_or(grid.h0());
    const auto count = g.count.value_or(grid.size());
    if (!(step > 0.0) || count < 1 || static_cast<double>(count) * step > 1.0 + 1e-12) {
      throw ConfigError(std::string(key) + ": need step > 0, count >= 1 and step * count <= 1");
    }
    grid = BandwidthGrid::arithmetic(step, static_cast<int>(count));
  };
  rebuild(config.experiment.pco.grid_h, pending.h, "pco.grid_h_step/count");
  rebuild(config.experiment.pco.grid_ell, pending.ell, "pco.grid_ell_step/count");

  config.validate();
  return config;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string num_list(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) out += ", ";
    out += num(v[k]);
  }
  return out + "]";
}

}  // namespace

void EstimateConfig::validate() const {
  auto bw = [](double h, const char* key) {
    if (!(h > 0.0 && h <= 1.0)) throw ConfigError(std::string(key) + ": bandwidth must lie in (0, 1]");
  };
  bw(h1, "estimate.h1");
  bw(h2, "estimate.h2");
  bw(ell, "estimate.ell");
  if (m && !(*m >= 0.0)) throw ConfigError("estimate.m: must be non-negative");
  if (points < 2) throw ConfigError("estimate.points: must be at least 2");
  if (x_range && !((*x_range)[0] < (*x_range)[1])) throw ConfigError("estimate.x_range: need lo < hi");
  if (y_range && !((*y_range)[0] < (*y_range)[1])) throw ConfigError("estimate.y_range: need lo < hi");
}

void AppConfig::validate() const {
  experiment.validate();
  estimate.validate();
}

AppConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides,
                            const std::string& source) {
  auto entries = parse_entries(text, source);
  for (const auto& o : overrides) entries.push_back(parse_override(o));
  return apply(std::move(entries));
}

AppConfig parse_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), overrides, path.string());
}

AppConfig default_config(const std::vector<std::string>& overrides) {
  return parse_config_text("", overrides);
}

std::string echo_config(const AppConfig& config) {
  const auto& x = config.experiment;
  std::ostringstream os;
  os << "[model]\n"
     << "kind = \"" << to_string(x.model.kind) << "\"\n"
     << "r = " << num(x.model.params.r) << "\n"
     << "gamma = " << num(x.model.params.gamma) << "\n"
     << "d = " << x.model.params.d << "\n\n";
  os << "[time]\n"
     << "T = " << num(x.T) << "\n"
     << "t0 = " << num(x.t0) << "\n"
     << "t = " << num(x.t) << "\n"
     << "delta = " << num(x.delta) << "\n"
     << "n_steps = " << x.n_steps << "\n\n";
  os << "[pco]\n"
     << "grid_h = " << num_list(x.pco.grid_h.values()) << "\n"
     << "grid_ell = " << num_list(x.pco.grid_ell.values()) << "\n"
     << "l2_method = \"" << (x.pco.l2_method == L2Method::exact ? "exact" : "grid") << "\"\n"
     << "l2_resolution = " << x.pco.l2_resolution << "\n";
  if (x.pco.l2_domain) {
    const auto& d = *x.pco.l2_domain;
    os << "l2_domain = " << num_list({d.x_lo, d.x_hi, d.y_lo, d.y_hi}) << "\n";
  } else {
    os << "l2_domain = \"auto\"\n";
  }
  os << "pen_stride = " << x.pco.pen_time_subsample << "\n"
     << "isotropic = " << (x.pco.isotropic ? "true" : "false") << "\n\n";
  os << "[bench]\n"
     << "N = " << x.N << "\n"
     << "M = " << x.M << "\n"
     << "repetitions = " << x.repetitions << "\n"
     << "seed = " << x.seed << "\n"
     << "quantiles_x = " << num_list({x.levels.x_lo, x.levels.x_hi}) << "\n"
     << "quantiles_y = " << num_list({x.levels.y_lo, x.levels.y_hi}) << "\n\n";
  const auto& e = config.estimate;
  os << "[estimate]\n"
     << "h1 = " << num(e.h1) << "\n"
     << "h2 = " << num(e.h2) << "\n"
     << "ell = " << num(e.ell) << "\n"
     << "m = " << (e.m ? num(*e.m) : std::string("\"plugin\"")) << "\n"
     << "points = " << e.points << "\n"
     << "x_range = " << (e.x_range ? num_list({(*e.x_range)[0], (*e.x_range)[1]}) : "\"auto\"") << "\n"
     << "y_range = " << (e.y_range ? num_list({(*e.y_range)[0], (*e.y_range)[1]}) : "\"auto\"") << "\n";
  return os.str();
}

}  // namespace nwtd
