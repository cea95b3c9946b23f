#include <cstdlib>
#include <cstring>

#include "doctest.h"
#include "shiftdyn/config.hpp"
#include "shiftdyn/report.hpp"
#include "shiftdyn/run.hpp"

using namespace shiftdyn;

TEST_CASE("config parsing applies defaults and strict keys") {
  const RunConfig cfg = parse_config(R"({"family": {"name": "example_3_11", "alpha": 3.0}})");
  CHECK(cfg.families.size() == 1);
  CHECK(cfg.families[0].alpha == doctest::Approx(3.0));
  CHECK(cfg.J == 1);
  CHECK(cfg.L_max == 500);

  CHECK_THROWS_AS(parse_config(R"({"familly": {}})"), ConfigInvalid);
  CHECK_THROWS_AS(parse_config(R"({"family": {"name": "example_3_2", "alfa": 2}})"),
                  ConfigInvalid);
  CHECK_THROWS_AS(parse_config(R"({"window": {"J": 1, "m": 1, "extra": 2}})"), ConfigInvalid);
  CHECK_THROWS_AS(parse_config("not json"), ConfigInvalid);
  CHECK_THROWS_AS(parse_config(R"({"family": {"name": "unknown_family"}})"), ConfigInvalid);
  CHECK_THROWS_AS(parse_config(R"({"family": {"name": "example_3_2", "unitary": "rotation"}})"),
                  ConfigInvalid);
  CHECK_THROWS_AS(
      parse_config(R"({"family": {"name": "example_3_2"}, "families": [{"name": "custom"}]})"),
      ConfigInvalid);
  CHECK_THROWS_AS(parse_config(R"({"window": {"J": 0}})"), ConfigInvalid);
  CHECK_THROWS_AS(parse_config(R"({"tolerances": {"eps": -1.0}})"), ConfigInvalid);
  CHECK_THROWS_AS(parse_config(R"({"sequence": {"start": 1, "list": [1, 2]}})"), ConfigInvalid);
  CHECK_THROWS_AS(parse_config(R"({"output": {"format": "xml"}})"), ConfigInvalid);
  CHECK_THROWS_AS(
      parse_config(R"({"family": {"name": "custom", "table": {"x": 1.0}}})"), ConfigInvalid);
}

TEST_CASE("family expansion and custom weights") {
  const RunConfig pair_cfg = parse_config(R"({"family": {"name": "example_3_6"}})");
  CHECK(build_shifts(pair_cfg).size() == 2);

  const RunConfig custom_cfg = parse_config(
      R"({"family": {"name": "custom", "offset": 2, "left": 9.0, "right": 0.1111111111111111,
          "table": {"-1": 1.0}, "unitary": "bilateral"}})");
  const auto shifts = build_shifts(custom_cfg);
  REQUIRE(shifts.size() == 1);
  CHECK(shifts[0].W->weight(0).at(-3) == doctest::Approx(9.0));
  CHECK(shifts[0].W->weight(0).at(-1) == doctest::Approx(1.0));
}

TEST_CASE("environment overrides touch horizons only") {
  RunConfig cfg = parse_config(R"({"tolerances": {"eps": 0.25}})");
  setenv("SHIFTDYN_L_MAX", "64", 1);
  setenv("SHIFTDYN_N", "99", 1);
  setenv("SHIFTDYN_K_COUNT", "4", 1);
  apply_env_overrides(cfg);
  unsetenv("SHIFTDYN_L_MAX");
  unsetenv("SHIFTDYN_N");
  unsetenv("SHIFTDYN_K_COUNT");
  CHECK(cfg.L_max == 64);
  CHECK(cfg.N == 99);
  CHECK(cfg.k_count == 4);
  CHECK(cfg.eps == doctest::Approx(0.25));
}

TEST_CASE("report documents round-trip exactly") {
  RunReport r;
  r.put("verdict.holds", "Yes");
  r.put("value.pi_ish", 0.1 + 0.2);
  r.put("value.tiny", 5.0083185390915834e-57);
  r.put("count", static_cast<index_t>(42));
  ReportTable t{"ftrans", {"n", "dD", "dG", "fwd", "bwd", "hit"}, {}};
  t.rows.push_back({"0", "0", "0", format_double(1.0 / 3.0), format_double(2.0 / 3.0), "1"});
  r.add_table(t);

  const std::string kv = r.to_kv();
  const std::string csv = r.to_csv();
  const RunReport from_kv = RunReport::parse(kv);
  const RunReport from_csv = RunReport::parse(csv);
  CHECK(from_kv.entries() == r.entries());
  CHECK(from_csv.tables() == r.tables());
  CHECK(from_kv.to_kv() == kv);
  CHECK(from_csv.to_csv() == csv);
}

TEST_CASE("seventeen digit floats reparse to the same bits") {
  for (double v : {0.1, 1.0 / 3.0, 2.2250738585072014e-308, 9.15527e-05, 1e306,
                   0.93069306930693074}) {
    const std::string s = format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
}

TEST_CASE("identical configs render byte-identical reports") {
  const RunConfig cfg = parse_config(R"({
    "family": {"name": "example_3_11", "alpha": 2.0},
    "window": {"J": 1, "m": 1},
    "horizons": {"N": 60},
    "tolerances": {"eps": 0.1}
  })");
  const RunReport a = run_subcommand("scan", cfg);
  const RunReport b = run_subcommand("scan", cfg);
  CHECK(a.to_kv() == b.to_kv());
  CHECK(a.to_csv() == b.to_csv());
  CHECK(a == b);
}

TEST_CASE("scan reports carry the certification summary") {
  const RunConfig cfg = parse_config(R"({
    "family": {"name": "example_3_11", "alpha": 2.0},
    "horizons": {"N": 120},
    "tolerances": {"eps": 0.1}
  })");
  const RunReport r = run_subcommand("scan", cfg);
  bool has_density = false;
  bool has_label = false;
  for (const auto& [k, v] : r.entries()) {
    if (k == "scan.lower_density") has_density = true;
    if (k == "scan.label") has_label = true;
  }
  CHECK(has_density);
  CHECK(has_label);
  REQUIRE(r.tables().size() == 1);
  CHECK(r.tables()[0].columns == std::vector<std::string>{"n", "certified"});
  CHECK(r.tables()[0].rows.size() == 121);
}

TEST_CASE("ftrans evidence table uses the pinned schema") {
  const RunConfig cfg = parse_config(R"({
    "family": {"name": "example_3_11", "alpha": 2.0},
    "sequence": {"start": 0, "step": 1},
    "horizons": {"N": 40},
    "tolerances": {"eps": 0.1},
    "furstenberg": {"variant": "inf"}
  })");
  const RunReport r = run_subcommand("ftrans", cfg);
  REQUIRE(r.tables().size() == 1);
  CHECK(r.tables()[0].name == "ftrans");
  CHECK(r.tables()[0].columns ==
        std::vector<std::string>{"n", "dD", "dG", "fwd", "bwd", "hit"});
}

TEST_CASE("series evidence tables use the pinned schema") {
  const RunConfig cfg = parse_config(R"({
    "family": {"name": "example_3_11", "alpha": 2.0},
    "sequence": {"start": 3, "step": 1},
    "horizons": {"L_max": 40, "k_count": 2}
  })");
  const RunReport r = run_subcommand("fhc", cfg);
  REQUIRE(r.tables().size() == 3);
  for (const auto& t : r.tables()) {
    CHECK(t.columns == std::vector<std::string>{"j", "k", "l", "term", "partial_sum"});
    CHECK(t.rows.size() == 3 * 2 * 40);  // (2J+1) * k_count * L_max
  }
}

TEST_CASE("witness subcommand emits one output column per shift") {
  const RunConfig cfg = parse_config(R"({
    "family": {"name": "example_3_6"},
    "sequence": {"list": [20, 40]},
    "horizons": {"k_count": 2}
  })");
  const RunReport r = run_subcommand("witness", cfg);
  REQUIRE(r.tables().size() == 1);
  CHECK(r.tables()[0].columns ==
        std::vector<std::string>{"n_k", "input_err", "output_err_1", "output_err_2"});
  CHECK(r.tables()[0].rows.size() == 2);
}

TEST_CASE("norms table agrees with the closed form") {
  const RunConfig cfg = parse_config(R"({
    "family": {"name": "example_3_2"},
    "window": {"J": 1, "m": 1},
    "norms": {"i_min": 0, "i_max": 3, "l_min": 2, "l_max": 10}
  })");
  const RunReport r = run_subcommand("norms", cfg);
  bool found = false;
  for (const auto& [k, v] : r.entries()) {
    if (k == "norms.max_closed_form_gap") {
      found = true;
      CHECK(std::strtod(v.c_str(), nullptr) < 1e-10);
    }
  }
  CHECK(found);
  REQUIRE(r.tables().size() == 1);
  CHECK(r.tables()[0].columns ==
        std::vector<std::string>{"i", "m", "l", "numeric", "closed_form"});
}

TEST_CASE("single-family subcommands reject tuples") {
  const RunConfig cfg = parse_config(R"({"family": {"name": "example_3_6"}})");
  CHECK_THROWS_AS(run_subcommand("fhc", cfg), ConfigInvalid);
  CHECK_THROWS_AS(run_subcommand("unknown", cfg), ConfigInvalid);
}
