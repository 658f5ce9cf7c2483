#include <doctest.h>

#include "ucb/config.hpp"
#include "ucb/experiments.hpp"
#include "ucb/report.hpp"

using namespace ucb;

TEST_CASE("cli_config: parsing and schema") {
  SUBCASE("defaults with an empty config") {
    const ExperimentConfig cfg = parse_config_text("", ExperimentKind::CarlemanSweep);
    CHECK(cfg.Nr == 65);
    CHECK(cfg.Ntheta == 128);
    CHECK(cfg.seed == 42);
    CHECK(cfg.weight == "quadratic");
  }

  SUBCASE("interp-norms defaults to the smaller grid") {
    const ExperimentConfig cfg = parse_config_text("", ExperimentKind::InterpNorms);
    CHECK(cfg.Nr == 33);
    CHECK(cfg.Ntheta == 64);
  }

  SUBCASE("values, lists, comments") {
    const std::string text =
        "# comment\n"
        "grid.nr = 33\n"
        "grid.ntheta = 64   # trailing comment\n"
        "gamma_list = 1, 2, 4\n"
        "s_list = 8,16\n"
        "seed = 7\n";
    const ExperimentConfig cfg = parse_config_text(text, ExperimentKind::CarlemanSweep);
    CHECK(cfg.Nr == 33);
    CHECK(cfg.gamma_list == std::vector<Real>{1, 2, 4});
    CHECK(cfg.s_list == std::vector<Real>{8, 16});
    CHECK(cfg.seed == 7);
  }

  SUBCASE("unknown keys rejected with line context") {
    try {
      parse_config_text("grid.nr = 33\nbogus_key = 1\n", ExperimentKind::CarlemanSweep);
      FAIL("expected InvalidConfig");
    } catch (const InvalidConfig& e) {
      const std::string msg = e.what();
      CHECK(msg.find("line 2") != std::string::npos);
      CHECK(msg.find("bogus_key") != std::string::npos);
    }
  }

  SUBCASE("keys from another experiment are unknown here") {
    CHECK_THROWS_AS(parse_config_text("delta_list = 1e-2", ExperimentKind::CarlemanSweep),
                    InvalidConfig);
  }

  SUBCASE("eta outside [0, 2) is a config error citing the contract") {
    try {
      parse_config_text("eta = 2.5", ExperimentKind::StabilityRun);
      FAIL("expected InvalidConfig");
    } catch (const InvalidConfig& e) {
      CHECK(std::string(e.what()).find("0 <= eta < 2") != std::string::npos);
    }
  }

  SUBCASE("duplicate and malformed keys") {
    CHECK_THROWS_AS(parse_config_text("seed = 1\nseed = 2\n", ExperimentKind::ValidateWeight),
                    InvalidConfig);
    CHECK_THROWS_AS(parse_config_text("just a line\n", ExperimentKind::ValidateWeight),
                    InvalidConfig);
    CHECK_THROWS_AS(parse_config_text("grid.nr = abc\n", ExperimentKind::ValidateWeight),
                    InvalidConfig);
  }

  SUBCASE("experiment key must match the requested kind") {
    CHECK_THROWS_AS(
        parse_config_text("experiment = stability-run", ExperimentKind::CarlemanSweep),
        InvalidConfig);
    CHECK_NOTHROW(
        parse_config_text("experiment = carleman-sweep", ExperimentKind::CarlemanSweep));
  }
}

TEST_CASE("cli_config: report serialization round-trips") {
  ExperimentReport rep;
  rep.kind = "validate-weight";
  rep.config_echo = {{"grid.nr", "33"}, {"weight", "quadratic"}};
  ReportTable t;
  t.name = "weight_validation";
  t.columns = {"quantity", "value"};
  t.rows = {{"min_psi_interior", fmt_real(0.0937)}, {"delta", fmt_real(2.0)}};
  rep.tables.push_back(t);
  rep.add_summary("ok", "pass");
  rep.pass = true;
  rep.wall_seconds = 0.25;

  const std::string json = report_to_json(rep);
  const ExperimentReport back = report_from_json(json);
  CHECK(back == rep);

  // and on a report produced by an actual run
  const ExperimentConfig cfg =
      parse_config_text("grid.nr = 9\ngrid.ntheta = 8\n", ExperimentKind::ValidateWeight);
  const ExperimentReport real = run_experiment(cfg);
  CHECK(report_from_json(report_to_json(real)) == real);
}

TEST_CASE("cli_config: csv formatting is stable") {
  ReportTable t;
  t.name = "sweep";
  t.columns = {"gamma", "s", "c_emp"};
  t.rows = {{fmt_real(2.0), fmt_real(8.0), fmt_real(0.12345678901234567)}};
  const std::string a = table_to_csv(t);
  const std::string b = table_to_csv(t);
  CHECK(a == b);
  CHECK(a.substr(0, a.find('\n')) == "gamma,s,c_emp");
}

TEST_CASE("cli_config: validate-weight experiment end to end") {
  const ExperimentConfig cfg =
      parse_config_text("grid.nr = 9\ngrid.ntheta = 8\nweight = quadratic\n",
                        ExperimentKind::ValidateWeight);
  const ExperimentReport rep = run_experiment(cfg);
  CHECK(rep.pass);
  bool saw_delta = false;
  for (const auto& [k, v] : rep.summary)
    if (k == "delta") {
      saw_delta = true;
      CHECK(std::stod(v) == doctest::Approx(2.0).epsilon(1e-9));
    }
  CHECK(saw_delta);

  ExperimentConfig bad = cfg;
  bad.weight = "invalid-sin";
  CHECK_FALSE(run_experiment(bad).pass);
}

TEST_CASE("cli_config: sweep experiment determinism") {
  const std::string text =
      "grid.nr = 9\ngrid.ntheta = 8\n"
      "gamma_list = 2\ns_list = 2,4\n"
      "family.count = 3\nfamily.adversaries = false\n";
  const ExperimentConfig cfg = parse_config_text(text, ExperimentKind::CarlemanSweep);
  const ExperimentReport a = run_experiment(cfg);
  const ExperimentReport b = run_experiment(cfg);
  REQUIRE(a.tables.size() == 1);
  CHECK(table_to_csv(a.tables[0]) == table_to_csv(b.tables[0]));
}
