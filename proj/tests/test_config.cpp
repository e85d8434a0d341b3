#include "rough/config.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "doctest.h"

using namespace rough;

TEST_CASE("defaults validate cleanly") {
  ExperimentConfig cfg;
  CHECK(cfg.validate().empty());
}

TEST_CASE("validate reports every violation at once") {
  ExperimentConfig cfg;
  cfg.alpha = 2.5;
  cfg.solve_n = 17;
  cfg.solve_dt = -1.0;
  cfg.moments_method = "tea-leaves";
  const auto errors = cfg.validate();
  CHECK(errors.size() >= 4);
}

TEST_CASE("sigma strings are vetted through the solver parser") {
  ExperimentConfig cfg;
  cfg.solve_sigma = "banana";
  const auto errors = cfg.validate();
  REQUIRE(errors.size() == 1);
  CHECK(errors[0].find("solve.sigma") != std::string::npos);
  for (const char* good : {"id", "tanh:2", "clip:1.5", "const:0"}) {
    cfg.solve_sigma = good;
    CHECK(cfg.validate().empty());
  }
}

TEST_CASE("sectioned text parses into the right fields") {
  const std::string text =
      "alpha = 1.3   # global\n"
      "seed = 42\n"
      "workers = 2\n"
      "\n"
      "[field]\n"
      "t = 0.5\n"
      "ns = 8, 16, 32\n"
      "replicas = 77\n"
      "\n"
      "[solve]\n"
      "n = 32\n"
      "dt = 5e-4\n"
      "t = 0.25\n"
      "sigma = clip:2\n"
      "coupled = true\n"
      "snapshots = 0.1, 0.2\n"
      "\n"
      "[moments]\n"
      "k = 3\n"
      "t_grid = 0.04, 0.08\n"
      "method = solver\n"
      "\n"
      "[oscillation]\n"
      "deltas = 0.25, 0.0625\n"
      "budget = 64\n"
      "\n"
      "[verify]\n"
      "replica_scale = 0.5\n";
  ParseOutcome out = parse_config_text(text);
  REQUIRE(out.ok());
  const ExperimentConfig& c = out.config;
  CHECK(c.alpha == 1.3);
  CHECK(c.seed == 42);
  CHECK(c.workers == 2);
  CHECK(c.field_t == 0.5);
  CHECK(c.field_ns == std::vector<int>{8, 16, 32});
  CHECK(c.field_replicas == 77);
  CHECK(c.solve_n == 32);
  CHECK(c.solve_dt == 5e-4);
  CHECK(c.solve_t_end == 0.25);
  CHECK(c.solve_sigma == "clip:2");
  CHECK(c.solve_coupled);
  CHECK(c.solve_snapshots == std::vector<double>{0.1, 0.2});
  CHECK(c.moments_k == 3);
  CHECK(c.moments_t_grid == std::vector<double>{0.04, 0.08});
  CHECK(c.moments_method == "solver");
  CHECK(c.osc_deltas == std::vector<double>{0.25, 0.0625});
  CHECK(c.osc_budget == 64);
  CHECK(c.verify_replica_scale == 0.5);
}

TEST_CASE("alpha may be set from section scope too") {
  ParseOutcome out = parse_config_text("[kernel]\nalpha = 1.7\n");
  REQUIRE(out.ok());
  CHECK(out.config.alpha == 1.7);
}

TEST_CASE("unknown keys and sections carry line numbers") {
  ParseOutcome out = parse_config_text(
      "[field]\n"
      "bogus = 1\n"
      "[nope]\n"
      "alpha = 1.5\n");
  REQUIRE(!out.ok());
  bool saw_key = false, saw_section = false;
  for (const auto& e : out.errors) {
    if (e.find("line 2") != std::string::npos &&
        e.find("field.bogus") != std::string::npos)
      saw_key = true;
    if (e.find("line 3") != std::string::npos &&
        e.find("[nope]") != std::string::npos)
      saw_section = true;
  }
  CHECK(saw_key);
  CHECK(saw_section);
}

TEST_CASE("malformed lines are reported, not fatal") {
  ParseOutcome out = parse_config_text(
      "just words\n"
      "[solve\n"
      "dt = fast\n");
  REQUIRE(out.errors.size() >= 3);
  CHECK(out.errors[0].find("line 1") != std::string::npos);
  CHECK(out.errors[1].find("line 2") != std::string::npos);
  CHECK(out.errors[2].find("line 3") != std::string::npos);
}

TEST_CASE("parse errors still flow into validation") {
  ParseOutcome out = parse_config_text("alpha = 3.0\n");
  REQUIRE(!out.ok());
  CHECK(out.errors[0].find("alpha must lie in (1, 2)") != std::string::npos);
}

TEST_CASE("config file round-trip and missing file") {
  const std::string path = "test_config_tmp.cfg";
  std::ofstream(path) << "[solve]\nn = 16\n";
  ParseOutcome out = parse_config_file(path);
  REQUIRE(out.ok());
  CHECK(out.config.solve_n == 16);
  std::remove(path.c_str());
  ParseOutcome missing = parse_config_file("definitely_not_here.cfg");
  REQUIRE(!missing.ok());
  CHECK(missing.errors[0].find("cannot open") != std::string::npos);
}

TEST_CASE("list parsing helpers") {
  CHECK(parse_double_list(" 1, 2.5 ,3e-2 ") ==
        std::vector<double>{1.0, 2.5, 3e-2});
  CHECK(parse_int_list("8,16") == std::vector<int>{8, 16});
  CHECK(parse_double_list("").empty());
  CHECK_THROWS_AS(parse_double_list("1,dog"), std::invalid_argument);
  CHECK_THROWS_AS(parse_int_list("2.5"), std::invalid_argument);
}

TEST_CASE("echo lists every tunable once") {
  ExperimentConfig cfg;
  cfg.seed = 9;
  const std::string echo = cfg.echo();
  for (const char* token :
       {"alpha=", "seed=9", "field.ns=", "solve.sigma=", "moments.k=",
        "oscillation.budget="}) {
    CHECK(echo.find(token) != std::string::npos);
  }
}
