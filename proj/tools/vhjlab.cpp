// Command-line front end: simulate / vss-profile / eval / classify / verify.
#include <CLI11.hpp>
#include <json.hpp>

#include <vhj/acceptance.hpp>
#include <vhj/scenario.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

using vhj::Real;

std::string format_number(Real v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10f", v);
  std::string s(buf);
  const size_t dot = s.find('.');
  if (dot != std::string::npos) {
    size_t last = s.find_last_not_of('0');
    if (last == dot) last = dot - 1;
    s.erase(last + 1);
  }
  return s;
}

int run_simulate(const std::string& config_path, const std::string& out_dir,
                 bool print_report) {
  vhj::ScenarioConfig cfg = vhj::load_scenario(config_path);
  const std::string dir = out_dir.empty() ? cfg.out_dir : out_dir;
  const vhj::RunArtifacts art = vhj::run_scenario_to(cfg, dir);
  if (print_report) std::cout << art.report_json << "\n";
  if (art.exit_code == 2)
    std::cerr << "warning: boundary contamination; claims valid until t="
              << art.report.valid_until << "\n";
  if (art.exit_code == 3) std::cerr << "error: non-finite output\n";
  return art.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"radial viscous Hamilton-Jacobi laboratory"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  auto* sim = app.add_subcommand("simulate", "run one scenario config");
  sim->add_option("--config", config_path, "scenario config file")->required();
  sim->add_option("--out", out_dir, "output directory (overrides config)");

  auto* cls = app.add_subcommand("classify", "run a scenario and print the regime report");
  cls->add_option("--config", config_path, "scenario config file")->required();
  cls->add_option("--out", out_dir, "output directory (overrides config)");

  double vq = 1.3, vtol = 1e-11, veta = 40.0;
  int vn = 1;
  std::string vout;
  auto* vss = app.add_subcommand("vss-profile", "compute the very singular profile");
  vss->add_option("--q", vq, "exponent q in (1, q_c)")->required();
  vss->add_option("--N", vn, "dimension");
  vss->add_option("--tol", vtol, "bisection tolerance");
  vss->add_option("--eta-max", veta, "profile range");
  vss->add_option("--out", vout, "output directory for profile.csv");

  std::string formula;
  double a_q = 1.5, a_r = 1.0, a_t = 1.0, a_m = 1.0, a_y = 0.0;
  int a_n = 1;
  auto* ev = app.add_subcommand("eval", "evaluate a closed form");
  ev->add_option("formula", formula,
                 "one of: qc a gammaq heat heatgrad z zgrad zedge sigma "
                 "sigmafront barrier")
      ->required();
  ev->add_option("--q", a_q, "exponent q");
  ev->add_option("--N", a_n, "dimension");
  ev->add_option("--r", a_r, "radius");
  ev->add_option("--t", a_t, "time");
  ev->add_option("--M", a_m, "mass/depth parameter");
  ev->add_option("--y", a_y, "1d coordinate");

  std::string suite;
  int threads = 2;
  auto* ver = app.add_subcommand("verify", "run a named acceptance suite");
  ver->add_option("suite", suite, "a1..a8, aliases, or 'all'")->required();
  ver->add_option("--threads", threads, "scenario parallelism");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return run_simulate(config_path, out_dir, false);
    if (cls->parsed()) return run_simulate(config_path, out_dir, true);

    if (vss->parsed()) {
      const vhj::ProfileTable p = vhj::find_vss(vq, vn, vtol, veta);
      nlohmann::json j;
      j["alpha_star"] = p.alpha_star;
      j["q"] = p.q;
      j["dimension"] = p.dimension;
      j["decay_a"] = p.decay_a;
      j["decay_class"] = p.decay_class == vhj::DecayClass::fast ? "fast"
                         : p.decay_class == vhj::DecayClass::slow
                             ? "slow"
                             : p.decay_class == vhj::DecayClass::sign_change
                                   ? "sign_change"
                                   : "indeterminate";
      const vhj::VecX g =
          p.eta.head(p.valid_nodes).pow(p.decay_a) * p.f.head(p.valid_nodes);
      j["tail_gate"] = {{"g_at_eta_max", g[p.valid_nodes - 1]},
                        {"g_sup", g.maxCoeff()}};
      j["norms_at_unit_time"] = {{"l1", p.l1_at_unit_time},
                                 {"l2", p.l2_at_unit_time},
                                 {"linf", p.alpha_star}};
      std::cout << j.dump(2) << "\n";
      if (!vout.empty()) {
        std::filesystem::create_directories(vout);
        std::ofstream csv(vout + "/profile.csv");
        csv << "eta,f,f_prime\n";
        char buf[96];
        for (vhj::Index i = 0; i < p.valid_nodes; ++i) {
          std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", p.eta[i],
                        p.f[i], p.f_prime[i]);
          csv << buf;
        }
        std::ofstream js(vout + "/profile.json");
        js << j.dump(2) << "\n";
      }
      return 0;
    }

    if (ev->parsed()) {
      Real value = 0.0;
      if (formula == "qc") value = vhj::critical_exponent(a_n);
      else if (formula == "a") value = vhj::decay_exponent_a(a_q);
      else if (formula == "gammaq") value = vhj::gamma_q(a_q);
      else if (formula == "heat") value = vhj::heat_kernel(a_r, a_t, a_n);
      else if (formula == "heatgrad")
        value = vhj::heat_kernel_gradient_mag(a_r, a_t, a_n);
      else if (formula == "z") value = vhj::z_profile(a_r, a_t, a_m, a_q);
      else if (formula == "zgrad")
        value = vhj::z_profile_gradient_mag(a_r, a_t, a_m, a_q);
      else if (formula == "zedge") value = vhj::z_support_radius(a_t, a_m, a_q);
      else if (formula == "sigma") value = vhj::sigma_source(a_y, a_t, a_m, a_q);
      else if (formula == "sigmafront") value = vhj::sigma_front(a_t, a_m, a_q);
      else if (formula == "barrier") value = vhj::gamma_barrier(a_r, a_q);
      else {
        std::cerr << "unknown formula: " << formula << "\n";
        return 1;
      }
      std::cout << format_number(value) << "\n";
      return 0;
    }

    if (ver->parsed()) {
      std::string id;
      if (!vhj::acceptance::resolve_suite(suite, id)) {
        std::cerr << "unknown suite: " << suite << "\n";
        return 1;
      }
      vhj::acceptance::Options opt;
      opt.threads = threads;
      opt.log = &std::cout;
      const std::vector<std::string> ids =
          id == "all" ? vhj::acceptance::suite_ids()
                      : std::vector<std::string>{id};
      const auto results = vhj::acceptance::run_suites(ids, opt);
      for (const auto& r : results)
        if (!r.pass) return 1;
      return 0;
    }
  } catch (const vhj::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
