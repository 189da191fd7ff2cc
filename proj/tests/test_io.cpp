#include <gtest/gtest.h>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

#include "wegnerlab/io/commands.hpp"

using namespace wegnerlab;
using namespace wegnerlab::io;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("wegnerlab-io-" + std::to_string(::getpid()) + "-" +
                                                 std::to_string(counter_++))) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }

  fs::path write(const std::string& name, const std::string& text) const {
    const auto p = path_ / name;
    std::ofstream(p) << text;
    return p;
  }
  const fs::path& path() const { return path_; }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Diagnostic diagnose(const fs::path& p) {
  try {
    load_config(p);
  } catch (const ConfigFileError& e) {
    return e.diagnostic();
  }
  ADD_FAILURE() << "expected a configuration error for " << p;
  return {};
}

}  // namespace

TEST(Sha256, KnownVectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Csv, NumbersRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, -2.5, 1e-300, 6.02214076e23, 32.0, 0.0}) {
    const auto s = format_number(v);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    EXPECT_EQ(back, v) << s;
  }
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(32.0), "32");
  EXPECT_EQ(format_number(std::nan("")), "nan");
  EXPECT_EQ(format_number(-std::numeric_limits<double>::infinity()), "-inf");
}

TEST(Csv, QuotesOnlyWhenNeeded) {
  EXPECT_EQ(format_cell(std::string("plain")), "plain");
  EXPECT_EQ(format_cell(std::string("a,b")), "\"a,b\"");
  EXPECT_EQ(format_cell(std::string("say \"x\"")), "\"say \"\"x\"\"\"");
  EXPECT_EQ(format_cell(std::int64_t{-7}), "-7");
}

TEST(Csv, ManifestCommentThenHeader) {
  Table t{"t", {"l", "E", "tag"}, {}};
  t.add({std::int64_t{16}, 0.25, std::string("x")});
  std::ostringstream out;
  write_csv(out, t, "abc123");
  EXPECT_EQ(out.str(), "# manifest: abc123\nl,E,tag\n16,0.25,x\n");
}

TEST(Config, DefaultFileMatchesBuiltInDefaults) {
  const auto file = load_config(WEGNERLAB_CONFIGS "/default.toml");
  EXPECT_EQ(effective_config(file), effective_config(default_config()));
}

TEST(Config, JsonExample) {
  const auto c = load_config(WEGNERLAB_CONFIGS "/harmonic.json");
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.realizations, 200u);
  EXPECT_EQ(c.lengths, (std::vector<int>{32, 64}));
  EXPECT_EQ(c.grid.box_length, 32);
  EXPECT_DOUBLE_EQ(c.wegner.energy, 1.0);
  EXPECT_EQ(c.raw.coupling.kind, CouplingDensity::Kind::table);
}

TEST(Config, FreeExampleHasNoDisorder) {
  const auto c = load_config(WEGNERLAB_CONFIGS "/free.toml");
  EXPECT_EQ(c.raw.coupling.kind, CouplingDensity::Kind::fixed);
  EXPECT_EQ(c.model.omega_plus(), 0.0);
}

TEST(Config, EffectiveConfigRoundTrips) {
  TempDir dir;
  for (const char* name : {"default.toml", "free.toml", "harmonic.json"}) {
    const auto c = load_config(fs::path(WEGNERLAB_CONFIGS) / name);
    const auto j = effective_config(c);
    const auto again = load_config(dir.write(std::string("effective-") + name + ".json", j.dump(2)));
    EXPECT_EQ(config_digest(effective_config(again)), config_digest(j)) << name;
  }
}

TEST(Config, DigestSeesSeedButNotWorkers) {
  auto a = default_config();
  auto b = a;
  b.workers = 8;
  b.out = "elsewhere";
  EXPECT_EQ(config_digest(effective_config(a)), config_digest(effective_config(b)));
  b.seed = 2;
  EXPECT_NE(config_digest(effective_config(a)), config_digest(effective_config(b)));
}

TEST(Config, UnknownKeyReportsLine) {
  TempDir dir;
  const auto d = diagnose(dir.write("bad.toml", "[run]\nseed = 3\nsede = 4\n"));
  EXPECT_EQ(d.line, 3);
  EXPECT_EQ(d.field, "run.sede");
  EXPECT_NE(d.str().find("bad.toml:3"), std::string::npos) << d.str();
}

TEST(Config, UnknownSectionRejected) {
  TempDir dir;
  const auto d = diagnose(dir.write("bad.toml", "[run]\nseed = 3\n\n[wegnr]\nenergy = 1.0\n"));
  EXPECT_EQ(d.field, "wegnr");
  EXPECT_EQ(d.line, 4);
}

TEST(Config, BadValueReportsField) {
  TempDir dir;
  const auto d = diagnose(dir.write("bad.toml", "[run]\nrealizations = 0\n"));
  EXPECT_EQ(d.field, "run.realizations");
  EXPECT_EQ(d.line, 2);
  const auto e = diagnose(dir.write("bad2.toml", "[model]\ndensity = \"uniform(1, 0)\"\n"));
  EXPECT_EQ(e.line, 2);
  const auto f = diagnose(dir.write("bad3.toml", "[grid]\nl = [16, -4]\n"));
  EXPECT_EQ(f.field, "grid.l[1]");
  EXPECT_EQ(f.line, 2);
}

TEST(Config, SyntaxErrorReportsLine) {
  TempDir dir;
  EXPECT_EQ(diagnose(dir.write("bad.toml", "[run]\nseed = 1\nrealizations = = 3\n")).line, 3);
  EXPECT_EQ(diagnose(dir.write("bad.json", "{\n  \"run\": {\n    \"seed\": ,\n  }\n}\n")).line, 3);
}

TEST(Config, JsonUnknownKeyReportsLine) {
  TempDir dir;
  const auto d = diagnose(dir.write("bad.json", "{\n  \"run\": {\"seed\": 1},\n  \"grid\": {\"q\": 2}\n}\n"));
  EXPECT_EQ(d.field, "grid.q");
  EXPECT_EQ(d.line, 3);
}

TEST(Config, JsonNestedFieldReportsLine) {
  TempDir dir;
  const auto d = diagnose(dir.write("bad.json", "{\"run\": {\"seed\": 1},\n \"verify\": {\n  \"l\": [16],\n  \"window\": [5.0, 1.0]\n}}\n"));
  EXPECT_EQ(d.field, "verify.window");
  EXPECT_EQ(d.line, 4) << d.str();
}

TEST(Config, MissingFileIsConfigError) {
  EXPECT_THROW(load_config("/nonexistent/config.toml"), ConfigError);
}

TEST(Manifest, StablePartOmitsTimestamp) {
  RunManifest m;
  m.config_digest = "d";
  m.master_seed = 5;
  m.timestamp = utc_timestamp();
  m.command_line = "wegnerlab ids";
  EXPECT_FALSE(m.stable_json().contains("timestamp"));
  EXPECT_FALSE(m.stable_json().contains("command_line"));
  EXPECT_EQ(m.to_json()["timestamp"], m.timestamp);
  EXPECT_EQ(m.timestamp.size(), 20u);
  EXPECT_EQ(m.timestamp.back(), 'Z');
}

TEST(Svg, WellFormedAndEscaped) {
  Plot p{"a < b & c", "x", "y", true, false, {}};
  p.series.push_back({"one", {0.01, 0.1, 1.0}, {1.0, 2.0, 3.0}, {0.1, 0.1, 0.1}, true});
  p.series.push_back({"two", {0.0, 0.1, 1.0}, {std::nan(""), 1.0, 2.0}, {}, false});
  const auto svg = render_svg(p);
  EXPECT_EQ(svg.rfind("<svg ", 0), 0u);
  EXPECT_EQ(svg.substr(svg.size() - 7), "</svg>\n");
  EXPECT_NE(svg.find("a &lt; b &amp; c"), std::string::npos);
  EXPECT_EQ(svg.find("nan"), std::string::npos);
  std::size_t lines = 0;
  for (auto pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1)) ++lines;
  EXPECT_EQ(lines, 2u);
  EXPECT_NE(svg.find("<polygon"), std::string::npos);
  EXPECT_NE(svg.find("<circle"), std::string::npos);
}

TEST(Bundle, WritesEveryArtifact) {
  TempDir dir;
  auto c = load_config(WEGNERLAB_CONFIGS "/free.toml");
  c.lengths = {16};
  c.grid.box_length = 16;
  c.workers = 1;
  const auto b = cmd_ids(c, "wegnerlab ids");
  write_bundle(b, dir.path() / "ids");
  for (const char* f : {"ids.csv", "ids.json", "ids.svg", "ids.txt", "manifest.json"})
    EXPECT_TRUE(fs::exists(dir.path() / "ids" / f)) << f;
  const auto csv = slurp(dir.path() / "ids" / "ids.csv");
  EXPECT_EQ(csv.rfind("# manifest: " + b.manifest.config_digest + "\nl,E,N,stderr\n", 0), 0u);
  const auto j = nlohmann::json::parse(slurp(dir.path() / "ids" / "ids.json"));
  EXPECT_EQ(j["manifest"]["config_digest"], b.manifest.config_digest);
  EXPECT_FALSE(j["manifest"].contains("timestamp"));
  const auto m = nlohmann::json::parse(slurp(dir.path() / "ids" / "manifest.json"));
  EXPECT_EQ(m["command_line"], "wegnerlab ids");
  EXPECT_EQ(m["config"], j["config"]);
}
