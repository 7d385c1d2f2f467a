#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using skewlab::cli::run;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("skewlab-cli-test-" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

json summary(const fs::path& dir) { return json::parse(slurp(dir / "summary.json")); }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("simulate writes manifest, summary and orbit") {
  const auto dir = scratch_dir("simulate");
  CHECK(run({"simulate", "--steps", "500", "--out", dir.string()}) == 0);
  CHECK(fs::exists(dir / "manifest.json"));
  CHECK(fs::exists(dir / "orbit.csv"));
  const json s = summary(dir);
  CHECK(s["status"] == "pass");
  CHECK(s["assertions"].size() == 2);
  const json m = json::parse(slurp(dir / "manifest.json"));
  CHECK(m["config"]["simulate"]["steps"] == 500);
}

TEST_CASE("configuration errors exit with 2") {
  const auto dir = scratch_dir("errors");
  CHECK(run({"xn", "--alpha-min", "0.6", "--epsilon", "0.2", "--out", dir.string()}) == 2);
  CHECK(run({"limit", "--regime", "BOGUS", "--out", dir.string()}) == 2);
  CHECK(run({"stable", "eval", "--grid", "1:0:0.1", "--out", dir.string()}) == 2);
  CHECK(run({"nonsense"}) == 2);
  CHECK(run({"simulate", "--out", "/proc/skewlab-not-writable"}) == 2);
}

TEST_CASE("blocking overrides change the exit status") {
  const auto dir = scratch_dir("blocking");
  const std::vector<std::string> base{"xn", "--alpha-min", "0.6", "--n", "1000",
                                      "--samples", "20", "--out", dir.string()};
  CHECK(run(base) == 0);
  auto strict = base;
  strict.insert(strict.end(), {"--blocking", "c2_within_15pct"});
  CHECK(run(strict) == 1);
  CHECK(summary(dir)["status"] == "fail");
}

TEST_CASE("config file values are overridden by flags") {
  const auto dir = scratch_dir("config");
  fs::create_directories(dir);
  {
    std::ofstream os(dir / "run.toml");
    os << "alpha-min = 0.6\nseed = 5\n[xn]\nn = 1000\nsamples = 30\n";
  }
  CHECK(run({"--config", (dir / "run.toml").string(), "xn", "--samples", "12", "--out",
             (dir / "out").string()}) == 0);
  const json s = summary(dir / "out");
  CHECK(s["common"]["alpha_min"] == 0.6);
  CHECK(s["common"]["seed"] == 5);
  CHECK(s["parameters"]["n"] == 1000);
  CHECK(s["parameters"]["samples"] == 12);
}

TEST_CASE("stable eval emits a monotone CDF table") {
  const auto dir = scratch_dir("stable");
  CHECK(run({"stable", "eval", "--p", "1.6", "--scale", "1", "--beta", "1", "--grid",
             "-5:5:0.1", "--out", dir.string()}) == 0);
  std::ifstream is(dir / "cdf.csv");
  std::string line;
  std::getline(is, line);
  CHECK(line == "x,cdf,cf_re,cf_im");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 101);
}

TEST_CASE("limit auto picks the small-alpha CLT regime") {
  const auto dir = scratch_dir("limit");
  CHECK(run({"limit", "--alpha-min", "0.4", "--epsilon", "0.05", "--n", "200,400",
             "--samples", "200", "--center-orbits", "4", "--center-steps", "20000",
             "--burn-in", "500", "--out", dir.string()}) == 0);
  const json s = summary(dir);
  CHECK(s["results"]["regime"] == "CLT_SMALL_ALPHA");
  CHECK(s["results"]["per_n"].size() == 2);
}

TEST_CASE("summary is identical across worker counts") {
  const auto a = scratch_dir("workers-a"), b = scratch_dir("workers-b");
  const std::vector<std::string> args{"limit", "--alpha-min", "0.6", "--epsilon", "0.1",
                                      "--observable", "x2", "--profile", "x", "--n",
                                      "100,300", "--samples", "150", "--center-orbits", "6",
                                      "--center-steps", "20000", "--burn-in", "500"};
  auto one = args, four = args;
  one.insert(one.end(), {"--workers", "1", "--out", a.string()});
  four.insert(four.end(), {"--workers", "4", "--out", b.string()});
  CHECK(run(one) == 0);
  CHECK(run(four) == 0);
  CHECK(slurp(a / "summary.json") == slurp(b / "summary.json"));
  CHECK(slurp(a / "sums_n300.csv") == slurp(b / "sums_n300.csv"));
}

}
