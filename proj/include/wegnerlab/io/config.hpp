#pragma once

/// Run configuration: TOML (primary) or JSON files, read through one schema.
///
/// TOML is converted to JSON first; the source line of every key is kept so
/// that schema errors can point at the offending line.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <toml.hpp>

#include "wegnerlab/errors.hpp"
#include "wegnerlab/model.hpp"
#include "wegnerlab/operator.hpp"
#include "wegnerlab/verify.hpp"

namespace wegnerlab::io {

using nlohmann::json;

/// Source line of each dotted key path ("model.site", "wegner.eps[2]").
using LineMap = std::map<std::string, int>;

/// A configuration error with its location resolved.
struct Diagnostic {
  std::string file;
  int line = 0;  // 0 when unknown
  std::string field;
  std::string message;

  std::string str() const {
    std::ostringstream s;
    s << file;
    if (line > 0) s << ':' << line;
    s << ": ";
    if (!field.empty()) s << field << ": ";
    s << message;
    return s.str();
  }
};

/// Thrown by the config reader; carries a resolved diagnostic.
class ConfigFileError : public ConfigError {
 public:
  explicit ConfigFileError(Diagnostic d) : ConfigError(d.str(), d.field), diagnostic_(std::move(d)) {}
  const Diagnostic& diagnostic() const noexcept { return diagnostic_; }

 private:
  Diagnostic diagnostic_;
};

struct IdsSettings {
  double energy_min = 0.0;
  double energy_max = 20.0;
  std::size_t points = 201;
};

struct WegnerSettings {
  double energy = 0.2;
  std::vector<double> widths{0.002, 0.005, 0.01, 0.02, 0.05, 0.1};
  std::vector<int> lengths{16, 32, 64};
};

struct VerifySettings {
  std::vector<int> lengths{16, 32, 64};
  std::size_t hf_cases = 200;
  int hf_length = 16;
  double hf_delta = 1e-4;  // relative to w+
  double hf_tolerance = 1e-5;
  std::size_t eder_realizations = 10;
  double window_lo = 0.0;
  double window_hi = 10.0;
  double c_floor = 1e-6;
  double stability_factor = 2.0;
  std::size_t bracketing_realizations = 100;
  std::size_t bracketing_energies = 200;
  int bracketing_length = 16;
  double bracketing_energy_lo = -1.0;
  double bracketing_energy_hi = 100.0;
};

struct LocalizeSettings {
  double energy_min = 0.0;
  double energy_max = 2.0;
  std::size_t points = 41;
  long chain_cells = 20000;
  int box_length = 256;
  std::size_t states = 5;
};

/// Fully resolved run configuration.
struct RunConfig {
  std::string command;
  ModelSpec raw;
  CanonicalModel model;
  GridSpec grid;
  std::vector<int> lengths{64};  // grid.l, possibly a list
  std::uint64_t seed = 1;
  std::size_t realizations = 1000;
  unsigned workers = 0;  // 0: WEGNERLAB_WORKERS or hardware
  std::string out = "out";
  Fault fault = Fault::none;
  IdsSettings ids;
  WegnerSettings wegner;
  VerifySettings verify;
  LocalizeSettings localize;
};

namespace detail {

inline int line_of(const LineMap& lines, std::string field) {
  while (!field.empty()) {
    if (auto it = lines.find(field); it != lines.end()) return it->second;
    const auto cut = field.find_last_of(".[");
    if (cut == std::string::npos) break;
    field.resize(cut);
  }
  return 0;
}

inline json toml_to_json(const toml::node& node, const std::string& path, LineMap& lines) {
  if (!path.empty()) lines.emplace(path, static_cast<int>(node.source().begin.line));
  if (const auto* t = node.as_table()) {
    json out = json::object();
    for (auto&& [key, value] : *t) {
      const std::string k(key.str());
      out[k] = toml_to_json(value, path.empty() ? k : path + "." + k, lines);
    }
    return out;
  }
  if (const auto* a = node.as_array()) {
    json out = json::array();
    std::size_t i = 0;
    for (auto&& value : *a) out.push_back(toml_to_json(value, path + "[" + std::to_string(i++) + "]", lines));
    return out;
  }
  if (const auto* v = node.as_integer()) return v->get();
  if (const auto* v = node.as_floating_point()) return v->get();
  if (const auto* v = node.as_boolean()) return v->get();
  if (const auto* v = node.as_string()) return v->get();
  throw ConfigError("unsupported TOML value (dates and times are not used)", path);
}

/// Parse "name" or "name(a, b, ...)" with numeric arguments.
inline std::optional<std::pair<std::string, std::vector<double>>> parse_call(const std::string& text) {
  static const std::regex form(R"(^\s*([A-Za-z_]+)\s*(?:\(([^()]*)\))?\s*$)");
  std::smatch m;
  if (!std::regex_match(text, m, form)) return std::nullopt;
  std::vector<double> args;
  if (m[2].matched) {
    std::stringstream list(m[2].str());
    std::string item;
    while (std::getline(list, item, ',')) {
      const auto b = item.find_first_not_of(" \t");
      const auto e = item.find_last_not_of(" \t");
      if (b == std::string::npos) return std::nullopt;
      const std::string trimmed = item.substr(b, e - b + 1);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(trimmed.data(), trimmed.data() + trimmed.size(), v);
      if (ec != std::errc() || ptr != trimmed.data() + trimmed.size()) return std::nullopt;
      args.push_back(v);
    }
  }
  return std::pair{m[1].str(), args};
}

/// Typed access to the JSON tree with located errors and unknown-key checks.
class Reader {
 public:
  Reader(const json& root, const LineMap& lines, std::string file)
      : root_(root), lines_(lines), file_(std::move(file)) {}

  [[noreturn]] void fail(const std::string& field, const std::string& message) const {
    throw ConfigFileError({file_, line_of(lines_, field), field, message});
  }

  const json* find(const std::string& section, const std::string& key) const {
    const auto s = root_.find(section);
    if (s == root_.end()) return nullptr;
    if (!s->is_object()) fail(section, "must be a table");
    const auto k = s->find(key);
    return k == s->end() ? nullptr : &*k;
  }

  void allow(const std::string& section, std::set<std::string> keys) const {
    const auto s = root_.find(section);
    if (s == root_.end()) return;
    if (!s->is_object()) fail(section, "must be a table");
    for (const auto& [k, v] : s->items())
      if (!keys.count(k)) fail(section + "." + k, "unknown key");
  }

  void allow_sections(std::set<std::string> names) const {
    if (!root_.is_object()) fail("", "configuration must be a table");
    for (const auto& [k, v] : root_.items())
      if (!names.count(k)) fail(k, "unknown section");
  }

  double number(const std::string& field, const json& v) const {
    if (!v.is_number()) fail(field, "expected a number");
    return v.get<double>();
  }

  std::int64_t integer(const std::string& field, const json& v) const {
    if (!v.is_number_integer()) fail(field, "expected an integer");
    return v.get<std::int64_t>();
  }

  std::vector<double> numbers(const std::string& field, const json& v) const {
    if (!v.is_array()) fail(field, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i)
      out.push_back(number(field + "[" + std::to_string(i) + "]", v[i]));
    return out;
  }

  std::vector<int> lengths(const std::string& field, const json& v) const {
    std::vector<int> out;
    auto one = [&](const std::string& f, const json& x) {
      const auto l = integer(f, x);
      if (l <= 0 || l > 1000000) fail(f, "box length must be a positive integer");
      out.push_back(static_cast<int>(l));
    };
    if (v.is_array()) {
      if (v.empty()) fail(field, "needs at least one box length");
      for (std::size_t i = 0; i < v.size(); ++i) one(field + "[" + std::to_string(i) + "]", v[i]);
    } else {
      one(field, v);
    }
    return out;
  }

  void set(const std::string& section, const std::string& key, double& target) const {
    if (const auto* v = find(section, key)) target = number(section + "." + key, *v);
  }
  void set(const std::string& section, const std::string& key, std::size_t& target,
           std::int64_t min = 0) const {
    if (const auto* v = find(section, key)) {
      const auto x = integer(section + "." + key, *v);
      if (x < min) fail(section + "." + key, "must be at least " + std::to_string(min));
      target = static_cast<std::size_t>(x);
    }
  }
  void set(const std::string& section, const std::string& key, int& target, std::int64_t min) const {
    if (const auto* v = find(section, key)) {
      const auto x = integer(section + "." + key, *v);
      if (x < min || x > 100000000) fail(section + "." + key, "out of range");
      target = static_cast<int>(x);
    }
  }
  void set(const std::string& section, const std::string& key, long& target, std::int64_t min) const {
    if (const auto* v = find(section, key)) {
      const auto x = integer(section + "." + key, *v);
      if (x < min) fail(section + "." + key, "must be at least " + std::to_string(min));
      target = static_cast<long>(x);
    }
  }

  const std::string& file() const { return file_; }

 private:
  const json& root_;
  const LineMap& lines_;
  std::string file_;
};

inline PeriodicPotential read_periodic(const Reader& in, const json& v) {
  const std::string field = "model.periodic";
  if (v.is_string()) {
    const auto call = parse_call(v.get<std::string>());
    if (call && call->first == "zero" && call->second.empty()) return PeriodicPotential::zero();
    if (call && call->first == "harmonic" && call->second.size() == 1)
      return PeriodicPotential::harmonic(call->second[0]);
    in.fail(field, "expected \"zero\", \"harmonic(A)\" or an array of samples");
  }
  if (v.is_array()) {
    PeriodicPotential p;
    p.values = in.numbers(field, v);
    if (p.values.empty()) in.fail(field, "needs at least one sample");
    return p;
  }
  if (v.is_object() && v.contains("values")) {
    for (const auto& [k, x] : v.items())
      if (k != "values") in.fail(field + "." + k, "unknown key");
    PeriodicPotential p;
    p.values = in.numbers(field + ".values", v["values"]);
    if (p.values.empty()) in.fail(field, "needs at least one sample");
    return p;
  }
  in.fail(field, "expected \"zero\", \"harmonic(A)\" or an array of samples");
}

inline SingleSitePotential read_site(const Reader& in, const json& v) {
  const std::string field = "model.site";
  if (v.is_string()) {
    const auto call = parse_call(v.get<std::string>());
    if (call && call->first == "indicator" && call->second.size() == 1 && call->second[0] > 0.0)
      return SingleSitePotential::indicator(call->second[0]);
    in.fail(field, "expected \"indicator(R)\" with R > 0 or a table");
  }
  if (!v.is_object()) in.fail(field, "expected \"indicator(R)\" or a table");
  static const std::set<std::string> keys{"support", "samples", "window_center", "window_width", "kappa"};
  for (const auto& [k, x] : v.items())
    if (!keys.count(k)) in.fail(field + "." + k, "unknown key");
  for (const char* k : {"support", "samples", "window_width", "kappa"})
    if (!v.contains(k)) in.fail(field, std::string("missing key '") + k + "'");
  const auto support = in.numbers(field + ".support", v["support"]);
  if (support.size() != 2) in.fail(field + ".support", "expected [lo, hi]");
  SingleSitePotential u;
  u.support_lo = support[0];
  u.support_hi = support[1];
  u.samples = in.numbers(field + ".samples", v["samples"]);
  u.window_center = v.contains("window_center") ? in.number(field + ".window_center", v["window_center"]) : 0.0;
  u.window_width = in.number(field + ".window_width", v["window_width"]);
  u.lower_bound = in.number(field + ".kappa", v["kappa"]);
  return u;
}

inline CouplingDensity read_density(const Reader& in, const json& v) {
  const std::string field = "model.density";
  if (v.is_string()) {
    const auto call = parse_call(v.get<std::string>());
    if (call && call->first == "uniform" && call->second.size() == 2)
      return CouplingDensity::uniform(call->second[0], call->second[1]);
    if (call && call->first == "off" && call->second.empty()) return CouplingDensity::fixed(0.0);
    if (call && call->first == "fixed" && call->second.size() == 1)
      return CouplingDensity::fixed(call->second[0]);
    in.fail(field, "expected \"uniform(a, b)\", \"fixed(v)\", \"off\" or a table");
  }
  if (!v.is_object()) in.fail(field, "expected \"uniform(a, b)\", \"fixed(v)\", \"off\" or a table");
  static const std::set<std::string> keys{"kind", "support", "values"};
  for (const auto& [k, x] : v.items())
    if (!keys.count(k)) in.fail(field + "." + k, "unknown key");
  const std::string kind = v.contains("kind") && v["kind"].is_string() ? v["kind"].get<std::string>() : "table";
  if (!v.contains("support")) in.fail(field, "missing key 'support'");
  const auto support = in.numbers(field + ".support", v["support"]);
  if (support.size() != 2) in.fail(field + ".support", "expected [a, b]");
  if (kind == "uniform") return CouplingDensity::uniform(support[0], support[1]);
  if (kind == "fixed") return CouplingDensity::fixed(support[0]);
  if (kind != "table") in.fail(field + ".kind", "expected \"uniform\", \"table\" or \"fixed\"");
  if (!v.contains("values")) in.fail(field, "missing key 'values'");
  return CouplingDensity::table(support[0], support[1], in.numbers(field + ".values", v["values"]));
}

inline Boundary read_boundary(const Reader& in, const json& v, const std::string& field) {
  if (v.is_string()) {
    if (v == "dirichlet") return Boundary::dirichlet;
    if (v == "neumann") return Boundary::neumann;
  }
  in.fail(field, "expected \"dirichlet\" or \"neumann\"");
}

/// Line of every object key in a JSON text, keyed by dotted path (array
/// elements holding tables appear as path[i]).
inline LineMap json_lines(const std::string& text) {
  struct Frame {
    bool array;
    std::string path;
    std::size_t index = 0;
  };
  LineMap lines;
  std::vector<Frame> stack;
  std::string key;
  int line = 1;
  auto here = [&] {
    const auto& f = stack.back();
    if (f.array) return f.path + "[" + std::to_string(f.index) + "]";
    return f.path.empty() ? key : f.path + "." + key;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
    } else if (c == '"') {
      std::string s;
      std::size_t j = i + 1;
      for (; j < text.size() && text[j] != '"'; ++j) {
        if (text[j] == '\\') ++j;
        if (j < text.size()) s += text[j];
      }
      std::size_t k = j + 1;
      while (k < text.size() && std::isspace(static_cast<unsigned char>(text[k]))) ++k;
      if (k < text.size() && text[k] == ':' && !stack.empty() && !stack.back().array) {
        key = s;
        lines.emplace(here(), line);
      }
      i = j;
    } else if (c == '{' || c == '[') {
      std::string path = stack.empty() ? "" : here();
      if (!stack.empty()) lines.emplace(path, line);
      stack.push_back({c == '[', std::move(path)});
    } else if (c == '}' || c == ']') {
      if (!stack.empty()) stack.pop_back();
    } else if (c == ',' && !stack.empty() && stack.back().array) {
      ++stack.back().index;
    }
  }
  return lines;
}

inline std::pair<json, LineMap> load_tree(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw ConfigFileError({path.string(), 0, "", "cannot read file"});
  std::stringstream buffer;
  buffer << file.rdbuf();
  const std::string text = buffer.str();
  LineMap lines;
  if (path.extension() == ".json") {
    try {
      return {json::parse(text), json_lines(text)};
    } catch (const json::parse_error& e) {
      const auto upto = text.substr(0, std::min<std::size_t>(e.byte, text.size()));
      const int line = 1 + static_cast<int>(std::count(upto.begin(), upto.end(), '\n'));
      throw ConfigFileError({path.string(), line, "", "JSON syntax error"});
    }
  }
  try {
    const auto table = toml::parse(text, path.string());
    return {toml_to_json(table, "", lines), lines};
  } catch (const toml::parse_error& e) {
    throw ConfigFileError({path.string(), static_cast<int>(e.source().begin.line), "",
                           std::string(e.description())});
  }
}

}  // namespace detail

/// Read a configuration tree (already parsed) into a RunConfig.
inline RunConfig read_config(const json& root, const LineMap& lines, const std::string& file) {
  const detail::Reader in(root, lines, file);
  in.allow_sections({"command", "fault", "run", "model", "grid", "ids", "wegner", "verify", "localize"});
  in.allow("run", {"seed", "realizations", "workers"});
  in.allow("model", {"periodic", "site", "density"});
  in.allow("grid", {"l", "m", "bc"});
  in.allow("ids", {"energy_min", "energy_max", "points"});
  in.allow("wegner", {"energy", "eps", "l"});
  in.allow("verify", {"l", "hf_cases", "hf_length", "hf_delta", "hf_tolerance", "eder_realizations",
                      "window", "c_floor", "stability_factor", "bracketing_realizations",
                      "bracketing_energies", "bracketing_length", "bracketing_window"});
  in.allow("localize", {"energy_min", "energy_max", "points", "chain_cells", "box_length", "states"});

  RunConfig c;
  if (const auto it = root.find("command"); it != root.end()) {
    if (!it->is_string()) in.fail("command", "expected a string");
    c.command = it->get<std::string>();
  }
  if (const auto it = root.find("fault"); it != root.end()) {
    if (*it == "neumann-sign")
      c.fault = Fault::neumann_sign;
    else if (*it != "none")
      in.fail("fault", "expected \"none\" or \"neumann-sign\"");
  }
  if (const auto* v = in.find("run", "seed")) {
    if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<std::int64_t>() >= 0))
      in.fail("run.seed", "expected a nonnegative integer");
    c.seed = v->get<std::uint64_t>();
  }
  in.set("run", "realizations", c.realizations, 1);
  if (const auto* v = in.find("run", "workers")) {
    const auto w = in.integer("run.workers", *v);
    if (w < 0 || w > 4096) in.fail("run.workers", "out of range");
    c.workers = static_cast<unsigned>(w);
  }

  c.raw.site = SingleSitePotential::indicator(0.15);
  c.raw.coupling = CouplingDensity::uniform(0.0, 1.0);
  if (const auto* v = in.find("model", "periodic")) c.raw.periodic = detail::read_periodic(in, *v);
  if (const auto* v = in.find("model", "site")) c.raw.site = detail::read_site(in, *v);
  if (const auto* v = in.find("model", "density")) c.raw.coupling = detail::read_density(in, *v);
  try {
    c.model = canonicalize(c.raw);
  } catch (const ConfigError& e) {
    in.fail(e.field(), e.what());
  }

  if (const auto* v = in.find("grid", "l")) c.lengths = in.lengths("grid.l", *v);
  in.set("grid", "m", c.grid.points_per_cell, 1);
  if (const auto* v = in.find("grid", "bc")) c.grid.bc = detail::read_boundary(in, *v, "grid.bc");
  c.grid.box_length = c.lengths.front();

  in.set("ids", "energy_min", c.ids.energy_min);
  in.set("ids", "energy_max", c.ids.energy_max);
  in.set("ids", "points", c.ids.points, 2);
  if (!(c.ids.energy_max > c.ids.energy_min)) in.fail("ids.energy_max", "must exceed energy_min");

  in.set("wegner", "energy", c.wegner.energy);
  if (const auto* v = in.find("wegner", "eps")) {
    c.wegner.widths = in.numbers("wegner.eps", *v);
    if (c.wegner.widths.empty()) in.fail("wegner.eps", "needs at least one width");
    for (double e : c.wegner.widths)
      if (!(e >= 0.0)) in.fail("wegner.eps", "widths must be nonnegative");
  }
  if (const auto* v = in.find("wegner", "l")) c.wegner.lengths = in.lengths("wegner.l", *v);

  auto& vs = c.verify;
  if (const auto* v = in.find("verify", "l")) vs.lengths = in.lengths("verify.l", *v);
  in.set("verify", "hf_cases", vs.hf_cases);
  in.set("verify", "hf_length", vs.hf_length, 2);
  in.set("verify", "hf_delta", vs.hf_delta);
  in.set("verify", "hf_tolerance", vs.hf_tolerance);
  in.set("verify", "eder_realizations", vs.eder_realizations, 1);
  if (const auto* v = in.find("verify", "window")) {
    const auto w = in.numbers("verify.window", *v);
    if (w.size() != 2 || !(w[0] < w[1])) in.fail("verify.window", "expected [lo, hi] with lo < hi");
    vs.window_lo = w[0];
    vs.window_hi = w[1];
  }
  in.set("verify", "c_floor", vs.c_floor);
  in.set("verify", "stability_factor", vs.stability_factor);
  in.set("verify", "bracketing_realizations", vs.bracketing_realizations);
  in.set("verify", "bracketing_energies", vs.bracketing_energies, 1);
  in.set("verify", "bracketing_length", vs.bracketing_length, 2);
  if (const auto* v = in.find("verify", "bracketing_window")) {
    const auto w = in.numbers("verify.bracketing_window", *v);
    if (w.size() != 2 || !(w[0] < w[1])) in.fail("verify.bracketing_window", "expected [lo, hi] with lo < hi");
    vs.bracketing_energy_lo = w[0];
    vs.bracketing_energy_hi = w[1];
  }
  if (!(vs.hf_delta > 0.0)) in.fail("verify.hf_delta", "must be positive");

  auto& ls = c.localize;
  in.set("localize", "energy_min", ls.energy_min);
  in.set("localize", "energy_max", ls.energy_max);
  in.set("localize", "points", ls.points, 1);
  in.set("localize", "chain_cells", ls.chain_cells, 10000);
  in.set("localize", "box_length", ls.box_length, 2);
  in.set("localize", "states", ls.states, 0);
  if (ls.points > 1 && !(ls.energy_max > ls.energy_min))
    in.fail("localize.energy_max", "must exceed energy_min");

  try {
    c.grid.validate();
  } catch (const ConfigError& e) {
    in.fail(e.field(), e.what());
  }
  return c;
}

/// Load and validate a configuration file (.toml, or .json by extension).
inline RunConfig load_config(const std::filesystem::path& path) {
  const auto [tree, lines] = detail::load_tree(path);
  return read_config(tree, lines, path.string());
}

/// Default configuration (no file).
inline RunConfig default_config() {
  const json empty = json::object();
  const LineMap none;
  return read_config(empty, none, "<defaults>");
}

/// Canonical serialization of everything that determines the results.
/// Worker count and output directory are excluded; re-reading this object
/// yields the same configuration.
inline json effective_config(const RunConfig& c) {
  json site = {{"support", {c.raw.site.support_lo, c.raw.site.support_hi}},
               {"samples", c.raw.site.samples},
               {"window_center", c.raw.site.window_center},
               {"window_width", c.raw.site.window_width},
               {"kappa", c.raw.site.lower_bound}};
  json density;
  switch (c.raw.coupling.kind) {
    case CouplingDensity::Kind::uniform:
      density = {{"kind", "uniform"}, {"support", {c.raw.coupling.lo, c.raw.coupling.hi}}};
      break;
    case CouplingDensity::Kind::fixed:
      density = {{"kind", "fixed"}, {"support", {c.raw.coupling.lo, c.raw.coupling.hi}}};
      break;
    case CouplingDensity::Kind::table:
      density = {{"kind", "table"},
                 {"support", {c.raw.coupling.lo, c.raw.coupling.hi}},
                 {"values", c.raw.coupling.values}};
      break;
  }
  const auto& vs = c.verify;
  const auto& ls = c.localize;
  return {
      {"command", c.command},
      {"fault", c.fault == Fault::none ? "none" : "neumann-sign"},
      {"run", {{"seed", c.seed}, {"realizations", c.realizations}}},
      {"model", {{"periodic", {{"values", c.raw.periodic.values}}}, {"site", site}, {"density", density}}},
      {"grid", {{"l", c.lengths}, {"m", c.grid.points_per_cell}, {"bc", to_string(c.grid.bc)}}},
      {"ids", {{"energy_min", c.ids.energy_min}, {"energy_max", c.ids.energy_max}, {"points", c.ids.points}}},
      {"wegner", {{"energy", c.wegner.energy}, {"eps", c.wegner.widths}, {"l", c.wegner.lengths}}},
      {"verify",
       {{"l", vs.lengths},
        {"hf_cases", vs.hf_cases},
        {"hf_length", vs.hf_length},
        {"hf_delta", vs.hf_delta},
        {"hf_tolerance", vs.hf_tolerance},
        {"eder_realizations", vs.eder_realizations},
        {"window", {vs.window_lo, vs.window_hi}},
        {"c_floor", vs.c_floor},
        {"stability_factor", vs.stability_factor},
        {"bracketing_realizations", vs.bracketing_realizations},
        {"bracketing_energies", vs.bracketing_energies},
        {"bracketing_length", vs.bracketing_length},
        {"bracketing_window", {vs.bracketing_energy_lo, vs.bracketing_energy_hi}}}},
      {"localize",
       {{"energy_min", ls.energy_min},
        {"energy_max", ls.energy_max},
        {"points", ls.points},
        {"chain_cells", ls.chain_cells},
        {"box_length", ls.box_length},
        {"states", ls.states}}},
  };
}

}  // namespace wegnerlab::io
