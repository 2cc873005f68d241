#include <doctest.h>

#include <algorithm>

#include "mcc/config.hpp"
#include "mcc/experiment.hpp"

using namespace mcc;

namespace {

const std::filesystem::path kConfigs = std::filesystem::path(MCC_SOURCE_DIR) / "configs";

std::vector<std::string> errors_of(const std::string& text) {
  try {
    parse_config(text, kConfigs / "inline.json");
  } catch (const ConfigError& e) {
    return e.errors();
  }
  return {};
}

bool any_contains(const std::vector<std::string>& v, const std::string& needle) {
  return std::any_of(v.begin(), v.end(), [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

const char* kDerivative = R"({
  "experiment": "derivative-check",
  "target": {"family": "normal", "mean": 0, "sd": 1},
  "perturbation": {"family": "normal", "mean": 0.5, "sd": 1.2},
  "start": {"point": [0.0]}
})";

}  // namespace

TEST_CASE("every shipped config parses") {
  for (const auto& e : std::filesystem::directory_iterator(kConfigs)) {
    if (e.path().extension() != ".json") continue;
    CAPTURE(e.path().string());
    CHECK_NOTHROW(load_config(e.path()));
  }
}

TEST_CASE("defaults are filled in") {
  const auto c = parse_config(kDerivative, kConfigs / "inline.json");
  CHECK(c.kind == ExperimentKind::derivative_check);
  CHECK(c.grid.first.n_points == 401);
  CHECK(c.family.kind == "hastings");
  CHECK(c.family.balancing == "barker");
  CHECK(c.test_function == "tanh");
  CHECK(c.t_nodes == 33);
  CHECK(c.tol.oracle_relative == 1e-3);
  CHECK(c.tol.warm_start_ceiling == 1e6);
  CHECK(c.sampler.alpha == 0.25);
  CHECK(c.sampler.batch_count == 50);
}

TEST_CASE("alpha outside (0, 1/2) is rejected with a clear message") {
  const auto errs = errors_of(R"({
    "experiment": "imcmc-run",
    "model": {"observations": "../data/ssm_observations.csv"},
    "sampler": {"alpha": 0.7}
  })");
  CHECK(any_contains(errs, "α must lie in (0,1/2)"));
}

TEST_CASE("unknown keys and several errors are reported together") {
  const auto errs = errors_of(R"({
    "experiment": "derivative-check",
    "target": {"family": "normal", "mean": 0, "sd": -1},
    "start": {"point": [0.0, 1.0]},
    "colour": "blue"
  })");
  CHECK(errs.size() >= 3);
  CHECK(any_contains(errs, "colour"));
  CHECK(any_contains(errs, "perturbation"));
}

TEST_CASE("missing files and bad JSON are reported") {
  CHECK_THROWS_AS(load_config(kConfigs / "does_not_exist.json"), InvalidInput);
  CHECK_THROWS_AS(parse_config("{ not json", "x.json"), InvalidInput);
  const auto errs = errors_of(R"({
    "experiment": "smcmc-run",
    "model": {"observations": "missing.csv"}
  })");
  CHECK(any_contains(errs, "missing.csv"));
}

TEST_CASE("unknown experiment kind") {
  CHECK(any_contains(errors_of(R"({"experiment": "nope"})"), "nope"));
}

TEST_CASE("overrides replace seed and replications") {
  auto c = parse_config(kDerivative, kConfigs / "inline.json");
  RunOverrides o;
  o.seed = 99;
  o.replications = 10;
  apply_overrides(c, o);
  CHECK(c.seed == 99);
  CHECK(c.sampler.replications == 10);
  o.replications = 2;
  CHECK_THROWS_AS(apply_overrides(c, o), ConfigError);
}
