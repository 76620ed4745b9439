#include <doctest.h>

#include <json.hpp>
#include <vhj/scenario.hpp>

using namespace vhj;

namespace {

const char* kSmallConfig = R"(
q = 1.8
dimension = 1
horizon = 10

[datum]
family = gaussian
amplitude = 1.0
width = 1.0
sign = nonnegative

[grid]
node_count = 200
spacing = 0.1

[output]
t0 = 0.1

[scheme]
integrator = imex
)";

}  // namespace

TEST_CASE("config parsing") {
  const ScenarioConfig cfg = parse_scenario(kSmallConfig);
  CHECK(cfg.q == doctest::Approx(1.8));
  CHECK(cfg.dimension == 1);
  CHECK(cfg.node_count == 200);
  CHECK(cfg.datum.sign == SignClass::nonnegative);
  CHECK(cfg.scheme.integrator == TimeIntegrator::imex);

  CHECK_THROWS_WITH_AS(parse_scenario("horizon = 1\n"),
                       doctest::Contains("missing required key 'q'"),
                       ConfigError);
  CHECK_THROWS_AS(parse_scenario("q = nope\nhorizon = 1\n"), ConfigError);
  CHECK_THROWS_AS(
      parse_scenario("q = 1.5\nhorizon = 1\n[datum]\nfamily = wavelet\n"),
      ConfigError);

  // vss comparison requires a subcritical nonnegative setup
  std::string bad = kSmallConfig;
  bad += "\n[diagnostics]\nvss_error = on\n";
  CHECK_THROWS_AS(parse_scenario(bad), ConfigError);  // q = 1.8 >= q_c
}

TEST_CASE("scenario run: determinism and artifacts") {
  const ScenarioConfig cfg = parse_scenario(kSmallConfig);
  const RunArtifacts a = run_scenario(cfg);
  const RunArtifacts b = run_scenario(cfg);
  CHECK(a.exit_code == 0);
  CHECK(a.csv == b.csv);  // bit-identical CSV for identical config
  CHECK(a.csv.substr(0, 2) == "t,");
  CHECK(a.csv.find("dissipation") != std::string::npos);

  const nlohmann::json j = nlohmann::json::parse(a.report_json);
  CHECK(j.contains("verdict"));
  CHECK(j.contains("i_infty"));
  CHECK(j["validity"]["horizon"].get<double>() == doctest::Approx(10.0));
}

TEST_CASE("scenario run: boundary violation exits 2") {
  std::string text = R"(
q = 1.5
dimension = 1
horizon = 80

[datum]
family = smooth_bump
amplitude = -6.0
support_radius = 1.0
sign = nonpositive

[grid]
node_count = 100
spacing = 0.1

[scheme]
integrator = imex

[diagnostics]
monitors = off
)";
  const ScenarioConfig cfg = parse_scenario(text);
  const RunArtifacts art = run_scenario(cfg);
  CHECK(art.exit_code == 2);
  CHECK(art.report.boundary_violated);
  CHECK(art.report.valid_until < 80.0);
}
