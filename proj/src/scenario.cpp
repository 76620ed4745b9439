#include <vhj/scenario.hpp>

#include <json.hpp>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace vhj {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

using KeyMap = std::map<std::string, std::string>;

KeyMap parse_keys(const std::string& text) {
  KeyMap keys;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    if (!section.empty()) key = section + "." + key;
    keys[key] = trim(line.substr(eq + 1));
  }
  return keys;
}

Real get_real(const KeyMap& k, const std::string& key) {
  auto it = k.find(key);
  if (it == k.end()) throw ConfigError("config: missing required key '" + key + "'");
  try {
    size_t pos = 0;
    const Real v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' is not a number: " + it->second);
  }
}

Real get_real_or(const KeyMap& k, const std::string& key, Real fallback) {
  return k.count(key) ? get_real(k, key) : fallback;
}

std::string get_str_or(const KeyMap& k, const std::string& key,
                       const std::string& fallback) {
  auto it = k.find(key);
  return it == k.end() ? fallback : it->second;
}

bool get_bool_or(const KeyMap& k, const std::string& key, bool fallback) {
  auto it = k.find(key);
  if (it == k.end()) return fallback;
  if (it->second == "on" || it->second == "true" || it->second == "1") return true;
  if (it->second == "off" || it->second == "false" || it->second == "0") return false;
  throw ConfigError("config: key '" + key + "' must be on/off");
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& text) {
  const KeyMap k = parse_keys(text);
  ScenarioConfig cfg;
  cfg.q = get_real(k, "q");
  cfg.dimension = static_cast<int>(
      get_real_or(k, "dimension", get_real_or(k, "N", 1.0)));
  cfg.horizon = get_real(k, "horizon");

  const std::string family = get_str_or(k, "datum.family", "");
  if (family.empty()) throw ConfigError("config: missing required key 'datum.family'");
  const std::string sign_s = get_str_or(k, "datum.sign", "general");
  SignClass sign = SignClass::general;
  if (sign_s == "nonnegative") sign = SignClass::nonnegative;
  else if (sign_s == "nonpositive") sign = SignClass::nonpositive;
  else if (sign_s != "general")
    throw ConfigError("config: datum.sign must be nonnegative/nonpositive/general");

  if (family == "gaussian") {
    cfg.datum = gaussian_datum(get_real(k, "datum.amplitude"),
                               get_real(k, "datum.width"), sign);
  } else if (family == "smooth_bump") {
    cfg.datum = bump_datum(get_real(k, "datum.amplitude"),
                           get_real(k, "datum.support_radius"), sign);
  } else {
    throw ConfigError("config: unknown datum.family '" + family + "'");
  }

  cfg.node_count = static_cast<Index>(get_real(k, "grid.node_count"));
  cfg.spacing = get_real(k, "grid.spacing");

  cfg.t0 = get_real_or(k, "output.t0", cfg.t0);
  cfg.ratio = get_real_or(k, "output.ratio", cfg.ratio);
  cfg.out_dir = get_str_or(k, "output.directory", cfg.out_dir);

  const std::string integ = get_str_or(k, "scheme.integrator", "imex");
  if (integ == "imex") cfg.scheme.integrator = TimeIntegrator::imex;
  else if (integ == "explicit_euler")
    cfg.scheme.integrator = TimeIntegrator::explicit_euler;
  else throw ConfigError("config: scheme.integrator must be imex/explicit_euler");
  cfg.scheme.cfl_safety = get_real_or(k, "scheme.cfl_safety", cfg.scheme.cfl_safety);
  cfg.scheme.hamiltonian_floor =
      get_real_or(k, "scheme.hamiltonian_floor", cfg.scheme.hamiltonian_floor);
  cfg.scheme.dt_time_fraction =
      get_real_or(k, "scheme.dt_time_fraction", cfg.scheme.dt_time_fraction);
  cfg.scheme.fixed_dt = get_real_or(k, "scheme.fixed_dt", cfg.scheme.fixed_dt);
  cfg.scheme.tail_warn_tol =
      get_real_or(k, "scheme.tail_warn_tol", cfg.scheme.tail_warn_tol);
  cfg.scheme.tail_violation_tol = get_real_or(k, "scheme.tail_violation_tol",
                                              cfg.scheme.tail_violation_tol);

  cfg.want_heat_error = get_bool_or(k, "diagnostics.heat_error", true);
  cfg.want_vss_error = get_bool_or(k, "diagnostics.vss_error", false);
  cfg.want_z_error = get_bool_or(k, "diagnostics.z_error", false);
  cfg.want_monitors = get_bool_or(k, "diagnostics.monitors", true);
  cfg.trend_gate = get_real_or(k, "diagnostics.trend_gate", cfg.trend_gate);

  // semantic validation
  if (!(cfg.q > 1.0)) throw ConfigError("config: q must exceed 1");
  if (cfg.dimension < 1 || cfg.dimension > 3)
    throw ConfigError("config: dimension must be 1, 2 or 3");
  if (!(cfg.horizon > 0.0)) throw ConfigError("config: horizon must be positive");
  if (cfg.node_count < 16) throw ConfigError("config: grid.node_count must be >= 16");
  if (!(cfg.spacing > 0.0)) throw ConfigError("config: grid.spacing must be positive");
  if (cfg.want_vss_error) {
    if (!(cfg.q < critical_exponent(cfg.dimension)))
      throw ConfigError("config: vss_error requires q < q_c");
    if (cfg.datum.sign != SignClass::nonnegative)
      throw ConfigError("config: vss_error requires a nonnegative datum");
  }
  if (cfg.want_z_error) {
    if (cfg.datum.sign != SignClass::nonpositive)
      throw ConfigError("config: z_error requires a nonpositive datum");
    if (!(cfg.q < 2.0)) throw ConfigError("config: z_error requires q < 2");
  }
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

namespace {

std::string fmt(Real v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json trend_json(const DecadeTrend& t) {
  return {{"valid", t.valid}, {"ratio", t.ratio}, {"max_uptick", t.max_uptick}};
}

nlohmann::json estimate_json(const LimitEstimate& e) {
  return {{"value", e.value},
          {"residual", e.residual},
          {"converged", e.converged},
          {"last_decade_change", e.last_decade_change}};
}

nlohmann::json fit_json(const PowerFit& f) {
  return {{"slope", f.slope}, {"halfwidth", f.halfwidth}, {"points", f.points}};
}

}  // namespace

std::string render_report_json(const RegimeReport& rep,
                               const ScenarioConfig& cfg) {
  nlohmann::json j;
  j["verdict"] = to_string(rep.verdict);
  j["evidence"] = rep.evidence;
  j["i_infty"] = estimate_json(rep.i_infty);
  j["m_infty"] = estimate_json(rep.m_infty);
  j["trends"] = {{"heat", trend_json(rep.heat_trend)},
                 {"heat_gradient", trend_json(rep.heat_grad_trend)},
                 {"vss", trend_json(rep.vss_trend)},
                 {"z", trend_json(rep.z_trend)}};
  j["fits"] = {{"linf", fit_json(rep.linf_fit)}, {"l1", fit_json(rep.l1_fit)}};
  j["functionals"] = {{"smallness", rep.smallness},
                      {"largeness", rep.largeness},
                      {"largeness_degenerate", rep.largeness_degenerate}};
  nlohmann::json checks = nlohmann::json::array();
  for (const MonitorResult& m : rep.monitors.checks) {
    checks.push_back({{"name", m.name},
                      {"c_hat", m.c_hat},
                      {"decade_ratio", m.decade_ratio},
                      {"pass", m.pass},
                      {"detail", m.detail}});
  }
  j["monitors"] = {{"all_pass", rep.monitors.all_pass}, {"checks", checks}};
  j["validity"] = {{"boundary_warned", rep.boundary_warned},
                   {"boundary_violated", rep.boundary_violated},
                   {"valid_until", rep.valid_until},
                   {"horizon", cfg.horizon}};
  j["config"] = {{"q", cfg.q},
                 {"dimension", cfg.dimension},
                 {"node_count", cfg.node_count},
                 {"spacing", cfg.spacing},
                 {"t0", cfg.t0},
                 {"ratio", cfg.ratio}};
  return j.dump(2);
}

RunArtifacts run_scenario(const ScenarioConfig& cfg) {
  RunArtifacts art;
  ProblemSpec spec;
  spec.q = cfg.q;
  spec.dimension = cfg.dimension;
  spec.datum = cfg.datum;
  spec.horizon = cfg.horizon;
  spec.grid = RadialGrid(cfg.dimension, cfg.node_count, cfg.spacing);

  // Front-of-support audit for nonpositive data: the inviscid support grows
  // like the Sigma front of the initial depth; an undersized grid is flagged
  // up front and confirmed by the runtime tail check.
  std::string front_note;
  if (cfg.datum.sign == SignClass::nonpositive && cfg.q < 2.0) {
    const Field u0 = sample_datum(cfg.datum, spec.grid);
    const Real front =
        sigma_front(cfg.horizon, lp_norm(u0, std::numeric_limits<Real>::infinity()),
                    cfg.q);
    if (front > spec.grid.radius()) {
      std::ostringstream os;
      os << "front estimate " << front << " exceeds grid radius "
         << spec.grid.radius();
      front_note = os.str();
    }
  }

  Trajectory traj;
  try {
    traj = solve(spec, cfg.scheme,
                 geometric_times(cfg.t0, cfg.ratio, cfg.horizon));
  } catch (const std::runtime_error& e) {
    if (std::string(e.what()).find("non-finite") != std::string::npos) {
      art.exit_code = 3;
      art.report_json = std::string("{\"error\": \"") + e.what() + "\"}";
      return art;
    }
    throw;
  }

  ClassifyOptions opt;
  opt.trend_gate = cfg.trend_gate;
  opt.run_monitors = cfg.want_monitors;
  art.report = regime_classify(spec, traj, opt);
  if (!front_note.empty())
    art.report.evidence += "; " + front_note;

  const NormSeries s = build_norm_series(traj);
  const Real inf = std::numeric_limits<Real>::infinity();
  ErrorSeries heat, vss_err, zerr, zgrad;
  const bool do_vss = cfg.want_vss_error;
  const bool do_z = cfg.want_z_error && art.report.m_infty.value > 0.0;
  if (cfg.want_heat_error)
    heat = rescaled_heat_error(traj, inf, art.report.i_infty.value);
  ProfileTable profile;
  if (do_vss) {
    profile = find_vss(cfg.q, cfg.dimension);
    vss_err = rescaled_vss_error(traj, 1.0, profile);
  }
  if (do_z) {
    zerr = z_error(traj, art.report.m_infty.value, cfg.q);
    zgrad = gradient_z_error(traj, art.report.m_infty.value, 1.0, cfg.q);
  }

  std::ostringstream csv;
  csv << "t,l1,l2,linf,grad_l1,grad_linf,mass,sup_lap,max_hess_eig,dissipation";
  if (cfg.want_heat_error) csv << ",heat_err_linf,heat_grad_err_linf";
  if (do_vss) csv << ",vss_err_l1,vss_grad_err_l1";
  if (do_z) csv << ",z_err,z_grad_err_l1";
  csv << "\n";

  bool nan_seen = false;
  auto put = [&csv, &nan_seen](Real v) {
    if (!std::isfinite(v)) nan_seen = true;
    csv << "," << fmt(v);
  };
  // error series skip t == 0; their index is offset by the t = 0 row
  const size_t skip = s.t.empty() || s.t.front() > 0.0 ? 0 : 1;
  for (Index i = 0; i < s.rows(); ++i) {
    csv << fmt(s.t[i]);
    put(s.l1[i]);
    put(s.l2[i]);
    put(s.linf[i]);
    put(s.grad_l1[i]);
    put(s.grad_linf[i]);
    put(s.mass[i]);
    put(s.sup_lap[i]);
    put(s.max_hess[i]);
    put(s.dissipation[i]);
    const size_t e = static_cast<size_t>(i);
    if (cfg.want_heat_error) {
      if (e < skip) { put(0.0); put(0.0); }
      else { put(heat.value[e - skip]); put(heat.gradient[e - skip]); }
    }
    if (do_vss) {
      if (e < skip) { put(0.0); put(0.0); }
      else { put(vss_err.value[e - skip]); put(vss_err.gradient[e - skip]); }
    }
    if (do_z) {
      if (e < skip) { put(0.0); put(0.0); }
      else { put(zerr.value[e - skip]); put(zgrad.gradient[e - skip]); }
    }
    csv << "\n";
  }

  art.csv = csv.str();
  art.report_json = render_report_json(art.report, cfg);
  if (nan_seen)
    art.exit_code = 3;
  else if (traj.boundary_violated)
    art.exit_code = 2;
  return art;
}

RunArtifacts run_scenario_to(const ScenarioConfig& cfg,
                             const std::string& out_dir) {
  RunArtifacts art = run_scenario(cfg);
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream f(out_dir + "/series.csv");
    f << art.csv;
  }
  {
    std::ofstream f(out_dir + "/report.json");
    f << art.report_json << "\n";
  }
  return art;
}

}  // namespace vhj
