#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"

using namespace qref;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("csv quoting") {
  CHECK(csv_quote("plain") == "plain");
  CHECK(csv_quote("") == "");
  CHECK(csv_quote("a,b") == "\"a,b\"");
  CHECK(csv_quote("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_quote("line\nbreak") == "\"line\nbreak\"");
}

TEST_CASE("csv doubles round-trip") {
  for (double v : {1.0 / 3.0, -2.1225396786788141e-4, 1e-300, 0.0, 17833.49279033813})
    CHECK(std::stod(csv_double(v)) == v);
}

TEST_CASE("csv writer emits the exact bytes") {
  const std::string path =
      (std::filesystem::temp_directory_path() / "qref_csv_test.csv").string();
  {
    CsvWriter w(path, {"a", "b"});
    w.row({"1", "x,y"});
    w.row({"2", "plain"});
  }
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "a,b\n1,\"x,y\"\n2,plain\n");
  std::filesystem::remove(path);
}

TEST_CASE("config defaults and round trip") {
  SECTION("empty object yields the defaults") {
    const ExperimentConfig c = config_from_json(json::object());
    CHECK(c.schema_version == 1);
    CHECK(c.model.E0 == 0.7);
    CHECK(c.model.g == 1e-3);
    CHECK(c.seed == 12345);
    CHECK(c.threads == 0);
    CHECK(c.family == UnitaryFamily::global);
    CHECK(c.epsilon == 1e-5);
    CHECK(c.grid_points == 400);
    CHECK(c.optimizer.starts == 32);
    CHECK_FALSE(c.axis1.has_value());
    CHECK(c.output_dir.empty());
  }

  SECTION("serialize-parse-serialize is the identity") {
    const json full = json::parse(R"({
      "schema_version": 1,
      "model": {"E0": 0.6, "E1": 1.1, "g": 0.01, "Tc": 0.9, "Th": 2.5, "Tw": 1.2,
                "kappa_c": 2e-4, "kappa_h": 3e-4, "kappa_w": 4e-4, "cutoff": 500.0},
      "seed": 42,
      "threads": 2,
      "family": "local-both",
      "epsilon": 1e-6,
      "time_grid": {"points": 200, "lo": 0.05, "hi": 30.0},
      "optimizer": {"starts": 8, "evals_per_stage": 500, "penalty_stages": 6,
                    "penalty_weight0": 50.0, "penalty_growth": 8.0,
                    "simplex_step": 0.2, "step_shrink": 0.8, "init_scale": 0.5,
                    "residual_bound": 1e-9},
      "sweep": {"axis1": {"param": "kappa_c", "min": 1e-5, "max": 1e-3,
                          "points": 6, "scale": "log"},
                "axis2": {"param": "g", "min": 0.001, "max": 0.2, "points": 3}},
      "output_dir": "out"
    })");
    const ExperimentConfig c = config_from_json(full);
    CHECK(c.model.E1 == 1.1);
    CHECK(c.family == UnitaryFamily::local_both);
    CHECK(c.optimizer.penalty_growth == 8.0);
    REQUIRE(c.axis1.has_value());
    CHECK(c.axis1->log);
    REQUIRE(c.axis2.has_value());
    CHECK_FALSE(c.axis2->log);

    const json once = config_to_json(c);
    const json twice = config_to_json(config_from_json(once));
    CHECK(once.dump() == twice.dump());
  }

  SECTION("defaults also serialize canonically") {
    const json a = config_to_json(ExperimentConfig{});
    const json b = config_to_json(config_from_json(a));
    CHECK(a.dump() == b.dump());
    CHECK_FALSE(a.contains("sweep"));  // no axes configured
  }
}

TEST_CASE("config rejects malformed input") {
  auto parse = [](const char* text) { return config_from_json(json::parse(text)); };

  CHECK_THROWS_MATCHES(parse(R"({"schema_version": 2})"), ConfigError,
                       Catch::Matchers::MessageMatches(ContainsSubstring("schema_version")));
  CHECK_THROWS_MATCHES(parse(R"({"unknown_key": 1})"), ConfigError,
                       Catch::Matchers::MessageMatches(ContainsSubstring("unknown_key")));
  CHECK_THROWS_MATCHES(parse(R"({"model": {"mass": 1.0}})"), ConfigError,
                       Catch::Matchers::MessageMatches(ContainsSubstring("mass")));
  CHECK_THROWS_MATCHES(parse(R"({"model": {"E0": "heavy"}})"), ConfigError,
                       Catch::Matchers::MessageMatches(ContainsSubstring("E0")));
  CHECK_THROWS_AS(parse(R"({"family": "nonlocal"})"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"epsilon": 0.0})"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"time_grid": {"points": 1}})"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"time_grid": {"lo": 5.0, "hi": 2.0}})"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"optimizer": {"starts": 0}})"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"optimizer": {"penalty_growth": 1.0}})"), ConfigError);
  CHECK_THROWS_AS(parse(R"("just a string")"), ConfigError);

  // sweep axis validation
  CHECK_THROWS_AS(parse(R"({"sweep": {"axis1": {"param": "mass"}}})"), ConfigError);
  CHECK_THROWS_AS(
      parse(R"({"sweep": {"axis1": {"param": "g", "min": 2.0, "max": 1.0}}})"),
      ConfigError);
  CHECK_THROWS_AS(
      parse(
          R"({"sweep": {"axis1": {"param": "g", "min": 0.0, "max": 1.0, "scale": "log"}}})"),
      ConfigError);
  CHECK_THROWS_AS(
      parse(R"({"sweep": {"axis1": {"param": "g", "points": 0, "max": 1.0}}})"),
      ConfigError);
  CHECK_THROWS_AS(
      parse(R"({"sweep": {"axis2": {"param": "g", "min": 0.1, "max": 1.0}}})"),
      ConfigError);
  CHECK_THROWS_AS(
      parse(R"({"sweep": {"axis1": {"param": "g", "max": 0.1, "scale": "cubic"}}})"),
      ConfigError);

  // model bounds are enforced on load
  CHECK_THROWS_AS(parse(R"({"model": {"g": 0.9}})"), ParameterError);
}

TEST_CASE("axis values") {
  AxisSpec lin{"g", 0.0, 1.0, 5, false};
  const std::vector<double> lv = axis_values(lin);
  REQUIRE(lv.size() == 5);
  CHECK(lv.front() == 0.0);
  CHECK(lv[2] == Approx(0.5));
  CHECK(lv.back() == 1.0);

  AxisSpec lg{"kappa_c", 1e-4, 1e-2, 3, true};
  const std::vector<double> gv = axis_values(lg);
  REQUIRE(gv.size() == 3);
  CHECK(gv[0] == Approx(1e-4).epsilon(1e-12));
  CHECK(gv[1] == Approx(1e-3).epsilon(1e-12));
  CHECK(gv[2] == Approx(1e-2).epsilon(1e-12));

  AxisSpec single{"g", 0.25, 0.9, 1, false};
  CHECK(axis_values(single) == std::vector<double>{0.25});
}

TEST_CASE("axis application") {
  RefrigeratorParams p;
  apply_axis(p, "g", 0.2);
  CHECK(p.g == 0.2);
  apply_axis(p, "kappa_c", 5e-4);
  CHECK(p.kappa_c == 5e-4);
  apply_axis(p, "kappa_hw", 7e-4);
  CHECK(p.kappa_h == 7e-4);
  CHECK(p.kappa_w == 7e-4);
  CHECK(p.kappa_c == 5e-4);
  apply_axis(p, "kappa_all", 9e-4);
  CHECK(p.kappa_c == 9e-4);
  CHECK(p.kappa_h == 9e-4);
  CHECK(p.kappa_w == 9e-4);
  CHECK_THROWS_AS(apply_axis(p, "mass", 1.0), ConfigError);
}

TEST_CASE("output directory resolution order") {
  CHECK(resolve_output_dir(std::nullopt, "", nullptr) == ".");
  CHECK(resolve_output_dir(std::nullopt, "", "") == ".");
  CHECK(resolve_output_dir(std::nullopt, "", "envdir") == "envdir");
  CHECK(resolve_output_dir(std::nullopt, "cfgdir", "envdir") == "cfgdir");
  CHECK(resolve_output_dir(std::optional<std::string>("flagdir"), "cfgdir", "envdir") ==
        "flagdir");
  CHECK(resolve_output_dir(std::optional<std::string>(""), "cfgdir", "envdir") == "cfgdir");
}
