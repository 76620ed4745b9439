#pragma once

#include <iosfwd>
#include <string>

#include <vhj/diagnostics.hpp>

namespace vhj {

/// One config file = one run. Parsed from a key-value text format with
/// [section] headers; see the README for the schema.
struct ScenarioConfig {
  Real q = 0.0;
  int dimension = 1;
  Real horizon = 0.0;
  InitialDatum datum;
  Index node_count = 0;
  Real spacing = 0.0;
  Real t0 = 0.1;
  Real ratio = 1.3335214321633240431;  // 10^(1/8), 8 snapshots per decade
  std::string out_dir = "out";
  SchemeConfig scheme;
  bool want_heat_error = true;
  bool want_vss_error = false;  // requires q < q_c and nonnegative data
  bool want_z_error = false;    // requires nonpositive data, q < 2
  bool want_monitors = true;
  Real trend_gate = 0.7;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ScenarioConfig parse_scenario(const std::string& text);
ScenarioConfig load_scenario(const std::string& path);

/// Outcome of a scenario run. Exit codes: 0 completed, 1 input error,
/// 2 validity-window violation (boundary contamination), 3 non-finite
/// output.
struct RunArtifacts {
  int exit_code = 0;
  std::string csv;
  std::string report_json;
  RegimeReport report;
};

/// Run and render artifacts in memory (deterministic: identical config
/// gives bit-identical CSV).
RunArtifacts run_scenario(const ScenarioConfig& cfg);

/// Run and also write <out>/series.csv and <out>/report.json.
RunArtifacts run_scenario_to(const ScenarioConfig& cfg,
                             const std::string& out_dir);

std::string render_report_json(const RegimeReport& rep,
                               const ScenarioConfig& cfg);

}  // namespace vhj
