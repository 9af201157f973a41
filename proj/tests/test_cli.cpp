#include "helpers.hpp"

#include <algorithm>
#include <cstdlib>

#include "eiv/io.hpp"

using namespace eiv;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("eiv_cli_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

/// Runs the CLI with stdout and stderr captured to files in `dir`; returns the exit status.
int run(const fs::path& dir, const std::string& args) {
  const std::string cmd = std::string("\"") + EIV_GIBBS_EXE + "\" " + args + " > \"" + (dir / "stdout").string() +
                          "\" 2> \"" + (dir / "stderr").string() + "\"";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_CASE("simulate then run twice gives byte-identical chains") {
  TempDir dir("run");
  REQUIRE(run(dir.path, "simulate scaling:1,1 --seed 4 --T 300 --burn-in 30 --out " + q(dir.path / "sim")) == 0);
  for (const char* f : {"data.csv", "truth.json", "config.json"}) CHECK(fs::exists(dir.path / "sim" / f));

  const auto config = dir.path / "sim" / "config.json";
  REQUIRE(run(dir.path, "run " + q(config) + " --out " + q(dir.path / "a")) == 0);
  REQUIRE(run(dir.path, "run " + q(config) + " --out " + q(dir.path / "b")) == 0);
  const auto a = read_text(dir.path / "a" / "chain_r0.csv");
  CHECK(a == read_text(dir.path / "b" / "chain_r0.csv"));
  const auto chain = read_chain(dir.path / "a" / "chain_r0.csv");
  CHECK(chain.chain.draws.rows() == 270);

  const auto report = read_json(dir.path / "a" / "report.json");
  CHECK(report.at("replicates").size() == 1);
  CHECK(report.at("replicates")[0].at("diagnostics").at("mess").get<double>() > 0.0);

  REQUIRE(run(dir.path, "run " + q(config) + " --seed 5 --out " + q(dir.path / "c")) == 0);
  CHECK(a != read_text(dir.path / "c" / "chain_r0.csv"));
}

TEST_CASE("diagnose of an iid chain reports mESS close to T") {
  TempDir dir("diagnose");
  RngStream rng(1);
  ChainOutput chain;
  chain.draws = test::gaussian(20000, 2, rng);
  chain.labels = {"gamma.beta.1.1", "gamma.beta.2.1"};
  write_chain(dir.path / "iid.csv", chain, nullptr);
  REQUIRE(run(dir.path, "diagnose " + q(dir.path / "iid.csv") + " --out " + q(dir.path / "r.json")) == 0);
  const auto r = read_json(dir.path / "r.json");
  const double ratio = r.at("mess").get<double>() / 20000.0;
  CHECK(ratio > 0.9);
  CHECK(ratio < 1.1);
  CHECK(r.at("acf").size() == 2);

  REQUIRE(run(dir.path, "diagnose " + q(dir.path / "iid.csv") + " --max-lag 3") == 0);
  const auto printed = json::parse(read_text(dir.path / "stdout"));
  CHECK(printed.at("max_lag") == 3);
}

TEST_CASE("errors are reported as JSON on stderr with exit status 2") {
  TempDir dir("errors");
  write_text_atomic(dir.path / "bad.json", R"({"model": {"variant": "berkson-x"}, "run": {"T": 10, "seed": 1}})");
  CHECK(run(dir.path, "run " + q(dir.path / "bad.json")) == 2);
  const auto err = json::parse(read_text(dir.path / "stderr"));
  CHECK(err.at("error").at("kind") == "config");
  CHECK(err.at("error").at("message").get<std::string>().find("model") != std::string::npos);

  CHECK(run(dir.path, "run " + q(dir.path / "missing.json")) == 2);
  CHECK(json::parse(read_text(dir.path / "stderr")).at("error").at("kind") == "io");
  CHECK(run(dir.path, "experiment fig9") == 2);
}

TEST_CASE("fig1 writes one row per scenario and replicate") {
  TempDir dir("fig1");
  REQUIRE(run(dir.path, "experiment fig1 --T 1000 --replicates 5 --seed 7 --out " + q(dir.path)) == 0);
  const auto text = read_text(dir.path / "fig1_replicates.csv");
  CHECK(std::count(text.begin(), text.end(), '\n') == 16);
  CHECK(text.find("\"scaling:3,7\"") != std::string::npos);
}

TEST_CASE("validate passes on a small model and writes its report") {
  TempDir dir("validate");
  write_text_atomic(dir.path / "c.json", R"({
    "model": {
      "variant": "berkson-x",
      "inline": {"Y": [[1.0], [2.0], [0.5]], "X": [[0.1], [0.4], [-0.3]], "Z": [[1], [1], [1]], "V": 0.5},
      "prior": {"a0": 3.0, "B0": 2.0, "J0": 1.0}
    },
    "run": {"T": 50, "seed": 3},
    "output": {"dir": "."}
  })");
  CHECK(run(dir.path, "validate " + q(dir.path / "c.json") + " --T 3000 --identity-instances 10 --moment-draws 2000") == 0);
  const auto r = read_json(dir.path / "validate.json");
  CHECK(r.at("geweke_passed") == true);
}

TEST_CASE("schema prints the config schema") {
  TempDir dir("schema");
  REQUIRE(run(dir.path, "schema") == 0);
  CHECK(json::parse(read_text(dir.path / "stdout")).at("type") == "object");
}
