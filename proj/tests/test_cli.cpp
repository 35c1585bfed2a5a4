#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "grk/cli.hpp"
#include "grk/report.hpp"

using namespace grk;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "grk_cli_tests";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> keys_of(const nlohmann::ordered_json& j) {
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  return keys;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("grk-params") {
  const Outcome o = run({"grk-params", "--k", "4"});
  REQUIRE(o.code == kExitOk);
  const auto j = nlohmann::ordered_json::parse(o.out);
  CHECK(j["alpha"].get<double>() == doctest::Approx(0.61548).epsilon(1e-5));
  CHECK(j["eta"].get<double>() == doctest::Approx(0.95532).epsilon(1e-5));
  CHECK(keys_of(j) ==
        std::vector<std::string>{"K", "alpha", "eta", "k1", "k2", "predicted_queries"});

  const Outcome g = run({"grk-params", "--n", "16", "--m", "8"});
  REQUIRE(g.code == kExitOk);
  const auto jg = nlohmann::ordered_json::parse(g.out);
  CHECK(std::abs(jg["k1"].get<int>() - 187) <= 2);
  CHECK(std::abs(jg["k2"].get<int>() - 8) <= 2);
}

TEST_CASE("brute smoke run") {
  const Outcome o = run({"brute", "--n", "4", "--m", "2", "--max-len", "6", "--epsilon", "0.05"});
  REQUIRE(o.code == kExitOk);
  const auto j = nlohmann::ordered_json::parse(o.out);
  CHECK(j.contains("best_word"));
  CHECK(j.contains("words_examined"));
}

TEST_CASE("budget refusal") {
  const Outcome o = run({"brute", "--n", "30", "--m", "15", "--max-len", "60"});
  CHECK(o.code == kExitBudget);
  CHECK(o.out.empty());
  const auto j = nlohmann::ordered_json::parse(o.err);
  CHECK(j["required_words"].get<std::uint64_t>() == (std::uint64_t{1} << 61) - 1);
}

TEST_CASE("usage errors") {
  CHECK(run({"brute", "--bogus"}).code == kExitUsage);
  CHECK(run({"no-such-command"}).code == kExitUsage);
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"grk-params", "--n", "4", "--m", "4"}).code == kExitUsage);
  CHECK(run({"extremal-opt", "--k", "16", "--max-switches", "7"}).code == kExitUsage);
  const Outcome o = run({"glg-scan", "--n", "8"});
  CHECK(o.code == kExitUsage);
  CHECK(o.err.find("Usage") != std::string::npos);
}

TEST_CASE("unwritable path leaves nothing behind") {
  const Outcome o = run({"grk-params", "--k", "4", "--output", "/nonexistent-dir/out.json"});
  CHECK(o.code == kExitUnwritable);
  CHECK_FALSE(fs::exists("/nonexistent-dir"));

  const fs::path dir = scratch_dir() / "readonly";
  fs::create_directories(dir);
  fs::permissions(dir, fs::perms::owner_read | fs::perms::owner_exec);
  const fs::path target = dir / "traj.csv";
  const Outcome c = run({"extremal", "--k", "16", "--csv", target.string()});
  fs::permissions(dir, fs::perms::owner_all);
  // Root ignores directory permissions, so only check the failure case when it applies.
  if (c.code == kExitUnwritable) {
    CHECK(fs::is_empty(dir));
  } else {
    CHECK(c.code == kExitOk);
  }
  fs::remove_all(dir);
}

TEST_CASE("trajectory CSV") {
  const fs::path path = scratch_dir() / "traj.csv";
  fs::remove(path);
  const Outcome o = run({"extremal", "--k", "16", "--csv", path.string()});
  REQUIRE(o.code == kExitOk);
  const std::string text = slurp(path);
  CHECK(text.substr(0, text.find('\n')) == kTrajectoryCsvHeader);
  std::istringstream lines(text);
  std::string line;
  std::getline(lines, line);
  int rows = 0;
  while (std::getline(lines, line)) {
    CHECK(std::count(line.begin(), line.end(), ',') == 11);
    ++rows;
  }
  CHECK(rows > 10);
  const auto j = nlohmann::ordered_json::parse(o.out);
  CHECK(j["trajectory"].contains("switching_times"));
  fs::remove(path);
}

TEST_CASE("landscape CSV") {
  const fs::path path = scratch_dir() / "land.csv";
  const Outcome o = run({"glg-scan", "--n", "6", "--m", "3", "--k1-max", "3", "--k2-max", "2",
                         "--csv", path.string()});
  REQUIRE(o.code == kExitOk);
  const std::string text = slurp(path);
  CHECK(text.substr(0, text.find('\n')) == kLandscapeCsvHeader);
  CHECK(std::count(text.begin(), text.end(), '\n') == 13);
  fs::remove(path);
}

TEST_CASE("identical invocations give identical bytes") {
  for (const std::vector<std::string>& args :
       {std::vector<std::string>{"extremal-opt", "--k", "16", "--max-switches", "3"},
        std::vector<std::string>{"brute", "--n", "6", "--m", "3"},
        std::vector<std::string>{"control-verify", "--k", "64"},
        std::vector<std::string>{"oracle-compare", "--n", "5", "--m", "2", "--word", "GGLG"}}) {
    const Outcome a = run(args);
    const Outcome b = run(args);
    CHECK(a.code == kExitOk);
    CHECK(a.out == b.out);
    CHECK(nlohmann::ordered_json::accept(a.out));
  }
}

TEST_CASE("output file matches stdout") {
  const fs::path path = scratch_dir() / "params.json";
  const Outcome a = run({"grk-run", "--n", "10", "--m", "5"});
  const Outcome b = run({"grk-run", "--n", "10", "--m", "5", "--output", path.string()});
  CHECK(b.code == kExitOk);
  CHECK(b.out.empty());
  CHECK(slurp(path) == a.out);
  fs::remove(path);
}

TEST_CASE("thread count does not change reports") {
  const Outcome a = run({"brute", "--n", "8", "--m", "3", "--threads", "1"});
  const Outcome b = run({"brute", "--n", "8", "--m", "3", "--threads", "4"});
  CHECK(a.out == b.out);
  ::setenv("GRKBENCH_THREADS", "3", 1);
  const Outcome c = run({"brute", "--n", "8", "--m", "3"});
  ::unsetenv("GRKBENCH_THREADS");
  CHECK(a.out == c.out);
}

TEST_CASE("doubles round-trip at 17 significant digits") {
  for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 0.61547970867038737}) {
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  }
  nlohmann::ordered_json j;
  j["x"] = std::numeric_limits<double>::quiet_NaN();
  j["y"] = 0.1;
  CHECK(dump_json(j) == "{\"x\":null,\"y\":0.10000000000000001}");
}

}  // TEST_SUITE
