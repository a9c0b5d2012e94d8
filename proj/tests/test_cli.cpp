#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "equiheat/errors.hpp"
#include "equiheat/experiments.hpp"

using namespace equiheat;

TEST_CASE("config parsing: comments, whitespace, typed getters") {
  auto cfg = ExperimentConfig::parse_string(
      "# heat trace run\n"
      "kind = trace\n"
      "space = s2   # two-sphere\n"
      "sigma = 1\n"
      "t0 = 0.1\n"
      "kmax = 12\n"
      "seed = 42\n");
  CHECK(cfg.get("kind") == "trace");
  CHECK(cfg.get("space") == "s2");
  CHECK(cfg.get_double("t0") == doctest::Approx(0.1));
  CHECK(cfg.get_int("kmax") == 12);
  CHECK(cfg.get_seed() == 42);
  CHECK(cfg.get("missing", "fallback") == "fallback");
}

TEST_CASE("config validation names the offending key") {
  auto cfg = ExperimentConfig::parse_string("kind = trace\nt0 = abc\n");
  try {
    cfg.get_double("t0");
    CHECK(false);
  } catch (const ValidationError& e) {
    CHECK(e.key == "t0");
  }
  CHECK_THROWS_AS(ExperimentConfig::parse_string("novalue\n"), ValidationError);
  CHECK_THROWS_AS(cfg.get("absent"), ValidationError);
  auto empty_list = ExperimentConfig::parse_string("sigma = \n");
  CHECK_THROWS_AS(empty_list.get_int_list("sigma"), ValidationError);
}

TEST_CASE("run_experiment validates the grid and kind") {
  auto bad_kind = ExperimentConfig::parse_string("kind = nonsense\n");
  CHECK_THROWS_AS(run_experiment(bad_kind), ValidationError);
  auto bad_grid = ExperimentConfig::parse_string("kind = trace\nspace = s2\nkmax = 2\n");
  CHECK_THROWS_AS(run_experiment(bad_grid), ValidationError);
  auto bad_mu = ExperimentConfig::parse_string("kind = oscillatory\nmu_min = -1\n");
  CHECK_THROWS_AS(run_experiment(bad_mu), ValidationError);
}

TEST_CASE("selberg experiment passes its declared tolerance") {
  auto cfg = ExperimentConfig::parse_string("kind = selberg\nlattice = z2\nt = 0.5\n");
  ExperimentReport rep = run_experiment(cfg);
  CHECK(rep.pass);
  CHECK(rep.outputs.at("residual").value < 1e-8);
  CHECK(rep.outputs.at("spectral").value == doctest::Approx(5.680765073188618).epsilon(1e-9));
}

TEST_CASE("trace experiment on s2 recovers the exponent half") {
  auto cfg = ExperimentConfig::parse_string(
      "kind = trace\nspace = s2\nsigma = 0\nt0 = 0.1\nkmax = 12\nbudget = 2048\nseed = 7\n");
  ExperimentReport rep = run_experiment(cfg);
  CHECK(rep.outputs.at("alpha").value == doctest::Approx(0.5).epsilon(0.04));
  CHECK(rep.outputs.at("predicted_exponent").value == doctest::Approx(0.5));
  CHECK(rep.outputs.at("kappa").value == 1);
  REQUIRE(rep.tables.count("trace_curve") == 1);
  CHECK(rep.tables.at("trace_curve").columns ==
        std::vector<std::string>{"t", "value", "bound"});
}

TEST_CASE("report emission: csv headers, json round trip, reproducibility") {
  auto cfg = ExperimentConfig::parse_string("kind = selberg\nlattice = z3\nt = 0.4\nseed = 5\n");
  ExperimentReport rep = run_experiment(cfg);
  std::string json1 = report_to_json(rep, false);
  ExperimentReport rep2 = run_experiment(cfg);
  std::string json2 = report_to_json(rep2, false);
  CHECK(json1 == json2);  // byte-identical modulo the timestamp field

  ReportTable t;
  t.columns = {"mu", "re", "im", "ratio", "err"};
  t.rows = {{1e-3, 0.25, 0.0, 1.0001, 1e-9}};
  std::string csv = table_to_csv(t);
  CHECK(csv.substr(0, csv.find('\n')) == "mu,re,im,ratio,err");

  std::filesystem::path dir = std::filesystem::temp_directory_path() / "equiheat_test_out";
  std::filesystem::remove_all(dir);
  rep.tables["probe"] = t;
  std::string path = emit_report(rep, dir.string());
  CHECK(std::filesystem::exists(path));
  CHECK(std::filesystem::exists(dir / "probe.csv"));
  std::ifstream in(path);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(content.find("\"pass\"") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("probes experiment bundles the heat-kernel checks") {
  auto cfg = ExperimentConfig::parse_string("kind = probes\nmodel = u1\n");
  ExperimentReport rep = run_experiment(cfg);
  CHECK(rep.pass);
  CHECK(rep.outputs.at("semigroup_residual").value < 1e-8);
  CHECK(rep.outputs.at("gaussian_bound_b").value >= 0.2);
  REQUIRE(rep.tables.count("kernel") == 1);
  CHECK(rep.tables.at("kernel").columns ==
        std::vector<std::string>{"t", "|g|", "value", "tail_bound"});
}
