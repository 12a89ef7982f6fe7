#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "robinpq/config.hpp"
#include "robinpq/errors.hpp"

using namespace robinpq;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json minimal_config() {
  return json::parse(R"({
    "problem": {
      "domain": {"kind": "interval", "a": 0.0, "b": 1.0, "n": 50},
      "p": 2.0, "q": 2.0, "alpha": 1.0,
      "source": {"kind": "constant", "value": 1.0}
    },
    "task": {"kind": "solve", "setting": "robin"}
  })");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::path("cli_test_tmp") / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("minimal config parses with defaults") {
  RunConfig cfg = parse_config_json(minimal_config());
  CHECK(cfg.p == 2.0);
  CHECK(cfg.task.kind == TaskConfig::Kind::Solve);
  CHECK(cfg.solver.gradient_tol == 1e-10);
  CHECK(cfg.output.directory == "out");
  ProblemSpec spec = cfg.build_problem();
  CHECK(spec.mesh->num_cells() == 50);
  ProblemSpec spec2 = cfg.build_problem(80);
  CHECK(spec2.mesh->num_cells() == 80);
}

TEST_CASE("q = 1 is rejected with the admissible range") {
  json j = minimal_config();
  j["problem"]["q"] = 1.0;
  CHECK_THROWS_WITH_AS(parse_config_json(j), doctest::Contains("q must exceed 1"),
                       ConfigError);
}

TEST_CASE("negative alpha is rejected as degenerate") {
  json j = minimal_config();
  j["problem"]["alpha"] = -2.0;
  CHECK_THROWS_WITH_AS(parse_config_json(j), doctest::Contains("unbounded below"),
                       ConfigError);
}

TEST_CASE("unknown keys are rejected with their path") {
  json j = minimal_config();
  j["problem"]["sourc"] = 1;
  CHECK_THROWS_WITH_AS(parse_config_json(j), doctest::Contains("problem.sourc"),
                       ConfigError);
  json j2 = minimal_config();
  j2["task"]["regime"] = "dirichlet";  // not a solve-task key
  CHECK_THROWS_AS(parse_config_json(j2), ConfigError);
}

TEST_CASE("solve task writes the field and manifest") {
  TempDir dir("solve");
  RunConfig cfg = parse_config_json(minimal_config());
  RunOptions opts;
  opts.out_override = (dir.path / "run").string();
  CHECK(run(cfg, opts) == 0);
  CHECK(fs::exists(dir.path / "run" / "solution.field"));
  CHECK(fs::exists(dir.path / "run" / "manifest.json"));
  const std::string field = slurp(dir.path / "run" / "solution.field");
  CHECK(field.rfind("dim 1", 0) == 0);
  CHECK(field.find("values 51") != std::string::npos);
}

TEST_CASE("incompatible source surfaces as an error from the neumann task") {
  json j = minimal_config();
  j["task"]["setting"] = "neumann";
  RunConfig cfg = parse_config_json(j);
  TempDir dir("neumann_fail");
  RunOptions opts;
  opts.out_override = (dir.path / "run").string();
  CHECK_THROWS_AS(run(cfg, opts), IncompatibleSourceError);
}

TEST_CASE("sweep task: determinism and manifest round trip") {
  json j = minimal_config();
  j["task"] = {{"kind", "sweep"}, {"alphas", {0.5, 1.0, 2.0, 4.0}}};
  RunConfig cfg = parse_config_json(j);

  TempDir dir("sweep");
  RunOptions a, b;
  a.out_override = (dir.path / "a").string();
  b.out_override = (dir.path / "b").string();
  CHECK(run(cfg, a) == 0);
  CHECK(run(cfg, b) == 0);
  CHECK(slurp(dir.path / "a" / "sweep.csv") == slurp(dir.path / "b" / "sweep.csv"));

  // re-running from the manifest reproduces the table byte for byte
  RunConfig from_manifest = parse_config((dir.path / "a" / "manifest.json").string());
  RunOptions c;
  c.out_override = (dir.path / "c").string();
  CHECK(run(from_manifest, c) == 0);
  CHECK(slurp(dir.path / "c" / "sweep.csv") == slurp(dir.path / "a" / "sweep.csv"));
}

TEST_CASE("verify task: pass gives exit 0, failed tolerance gives exit 2") {
  json j = minimal_config();
  j["problem"]["domain"]["n"] = 400;
  j["task"] = {{"kind", "verify"},
               {"regime", "dirichlet"},
               {"alpha_grid", {{"min", 10.0}, {"max", 1000.0}, {"ratio", 3.1622776601683795}}}};
  RunConfig cfg = parse_config_json(j);
  TempDir dir("verify");
  RunOptions opts;
  opts.out_override = (dir.path / "pass").string();
  CHECK(run(cfg, opts) == 0);
  json report = json::parse(slurp(dir.path / "pass" / "report.json"));
  CHECK(report["pass"] == true);
  CHECK(report["predicted_constant"].get<double>() == doctest::Approx(0.25).epsilon(1e-3));

  j["task"]["exponent_tol"] = 1e-16;  // unreachable
  RunConfig strict = parse_config_json(j);
  RunOptions opts2;
  opts2.out_override = (dir.path / "fail").string();
  CHECK(run(strict, opts2) == 2);
  json report2 = json::parse(slurp(dir.path / "fail" / "report.json"));
  CHECK(report2["pass"] == false);
}

TEST_CASE("oracle task emits energies") {
  json j = minimal_config();
  j["task"] = {{"kind", "oracle"}};
  RunConfig cfg = parse_config_json(j);
  TempDir dir("oracle");
  RunOptions opts;
  opts.out_override = (dir.path / "run").string();
  CHECK(run(cfg, opts) == 0);
  json report = json::parse(slurp(dir.path / "run" / "report.json"));
  CHECK(report["method"] == "closed_form");
  CHECK(report["energy_alpha"].get<double>() ==
        doctest::Approx(-1.0 / 24.0 - 0.25).epsilon(1e-12));
}

TEST_CASE("config file errors carry position context") {
  CHECK_THROWS_AS(parse_config("does_not_exist.json"), ConfigError);
  TempDir dir("badjson");
  const fs::path bad = dir.path / "bad.json";
  std::ofstream(bad) << "{ not json";
  CHECK_THROWS_AS(parse_config(bad.string()), ConfigError);
}
