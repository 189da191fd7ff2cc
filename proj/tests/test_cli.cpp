#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int status = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class Sandbox : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    root_ = fs::temp_directory_path() /
            ("wegnerlab-cli-" + std::to_string(::getpid()) + "-" + info->name());
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  Outcome run(const std::string& args) const {
    const auto out = root_ / "stdout.txt", err = root_ / "stderr.txt";
    const std::string line = std::string("\"") + WEGNERLAB_CLI + "\" " + args + " > \"" + out.string() +
                             "\" 2> \"" + err.string() + "\"";
    const int raw = std::system(line.c_str());
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(out), slurp(err)};
  }

  static std::string config(const std::string& name) {
    return std::string("--config \"") + WEGNERLAB_CONFIGS + "/" + name + "\"";
  }

  std::string dir(const std::string& name) const { return "--out \"" + (root_ / name).string() + "\""; }

  fs::path root_;
};

// Rows of a bundle CSV after the manifest comment and header.
std::vector<std::vector<std::string>> rows(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::vector<std::vector<std::string>> out;
  std::getline(in, line);
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream s(line);
    std::string cell;
    while (std::getline(s, cell, ',')) cells.push_back(cell);
    out.push_back(cells);
  }
  return out;
}

}  // namespace

TEST_F(Sandbox, FreeIdsApproachesClosedForm) {
  const auto r = run("ids " + config("free.toml") + " " + dir("ids"));
  ASSERT_EQ(r.status, 0) << r.err;
  const auto table = rows(root_ / "ids" / "ids.csv");
  ASSERT_EQ(table.size(), 201u);
  double previous = -1.0;
  for (const auto& row : table) {
    const double e = std::stod(row[1]), n = std::stod(row[2]);
    EXPECT_GE(n, previous);
    EXPECT_LE(std::abs(n - std::sqrt(e) / std::numbers::pi), 0.02) << "E = " << e;
    previous = n;
  }
  for (const char* f : {"ids.json", "ids.svg", "ids.txt", "manifest.json"})
    EXPECT_TRUE(fs::exists(root_ / "ids" / f)) << f;
}

TEST_F(Sandbox, RepeatedLengthFlagGivesOneCurvePerLength) {
  const auto r = run("ids " + config("free.toml") + " --l 128 --l 256 " + dir("ids"));
  ASSERT_EQ(r.status, 0) << r.err;
  std::set<std::string> lengths;
  for (const auto& row : rows(root_ / "ids" / "ids.csv")) lengths.insert(row[0]);
  EXPECT_EQ(lengths, (std::set<std::string>{"128", "256"}));
  const auto svg = slurp(root_ / "ids" / "ids.svg");
  EXPECT_NE(svg.find("l = 128"), std::string::npos);
  EXPECT_NE(svg.find("l = 256"), std::string::npos);
}

TEST_F(Sandbox, OutputIndependentOfWorkerCountAndRerun) {
  const std::string base = "wegner " + config("default.toml") + " --realizations 200 ";
  ASSERT_EQ(run(base + "--workers 1 " + dir("w1")).status, 0);
  ASSERT_EQ(run(base + "--workers 3 " + dir("w3")).status, 0);
  ASSERT_EQ(run(base + "--workers 1 " + dir("again")).status, 0);
  for (const char* f : {"wegner.csv", "wegner.json", "wegner.svg", "wegner.txt"}) {
    const auto reference = slurp(root_ / "w1" / f);
    EXPECT_FALSE(reference.empty()) << f;
    EXPECT_EQ(slurp(root_ / "w3" / f), reference) << f;
    EXPECT_EQ(slurp(root_ / "again" / f), reference) << f;
  }
}

TEST_F(Sandbox, SeedChangesResultsAndDigest) {
  const std::string base = "wegner " + config("default.toml") + " --realizations 100 ";
  ASSERT_EQ(run(base + "--seed 1 " + dir("a")).status, 0);
  ASSERT_EQ(run(base + "--seed 2 " + dir("b")).status, 0);
  const auto a = slurp(root_ / "a" / "wegner.csv"), b = slurp(root_ / "b" / "wegner.csv");
  EXPECT_NE(a.substr(0, a.find('\n')), b.substr(0, b.find('\n')));
  EXPECT_NE(a, b);
}

TEST_F(Sandbox, JsonConfigRuns) {
  const auto r = run("wegner " + config("harmonic.json") + " --realizations 50 " + dir("h"));
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(fs::exists(root_ / "h" / "wegner.csv"));
}

TEST_F(Sandbox, VerifyPassesAndInjectedFaultFails) {
  const auto good = run("verify " + config("default.toml") + " " + dir("ok"));
  EXPECT_EQ(good.status, 0) << good.out;
  EXPECT_EQ(good.out.find("FAIL"), std::string::npos) << good.out;
  const auto bad = run("verify " + config("default.toml") + " --inject-fault neumann-sign " + dir("bad"));
  EXPECT_EQ(bad.status, 1);
  EXPECT_NE(bad.out.find("FAIL bracketing"), std::string::npos) << bad.out;
  EXPECT_EQ(bad.out.find("FAIL hellmann_feynman"), std::string::npos);
}

TEST_F(Sandbox, LocalizeWritesBothTables) {
  const auto r = run("localize " + config("default.toml") + " " + dir("loc"));
  ASSERT_EQ(r.status, 0) << r.err;
  const auto gamma = rows(root_ / "loc" / "gamma.csv");
  EXPECT_EQ(gamma.size(), 41u);
  const auto decay = rows(root_ / "loc" / "decay.csv");
  ASSERT_EQ(decay.size(), 5u);
  EXPECT_LT(std::stod(decay[0][2]), 0.0);
}

TEST_F(Sandbox, ConfigErrorsExitWithTwoAndLocation) {
  const auto path = root_ / "bad.toml";
  std::ofstream(path) << "[run]\nseed = 1\n\n[grid]\nm = 32\nbogus = 3\n";
  const auto r = run("ids --config \"" + path.string() + "\" " + dir("x"));
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("bad.toml:6"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("grid.bogus"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(root_ / "x"));
}

TEST_F(Sandbox, UsageErrorsExitWithTwo) {
  EXPECT_EQ(run("").status, 2);
  EXPECT_EQ(run("ids --no-such-flag").status, 2);
  EXPECT_EQ(run("ids --workers 0").status, 2);
  EXPECT_EQ(run("verify --inject-fault other").status, 2);
  EXPECT_EQ(run("ids --config /nonexistent.toml").status, 2);
  EXPECT_EQ(run("--help").status, 0);
}
