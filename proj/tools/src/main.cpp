#include "CLI11.hpp"

#include "commands.hpp"
#include "config.hpp"
#include "scenario.hpp"

#include <iostream>
#include <string>

namespace {

using namespace orbistab;
using namespace orbistab::cli;

Method method_from_name(const std::string& name) {
  if (name == "rk45") return Method::RK45Adaptive;
  if (name == "rk4") return Method::RK4Fixed;
  throw ConfigError("unknown integrator method '" + name +
                    "' (expected rk45 or rk4)");
}

Scenario load_base(const std::string& config_path) {
  if (config_path.empty()) return demo_scenario("furuta");
  return scenario_from_config(parse_config_file(config_path));
}

/// Flags shared by simulate/sweep/verify/demo; only flags the user actually
/// passed are applied on top of the scenario.
struct Overrides {
  double gamma1 = 0.0, gamma2 = 0.0, k1 = 0.0, k2 = 0.0, t_end = 0.0;
  std::string x0_text, method, representation;
  CLI::Option* o_gamma1 = nullptr;
  CLI::Option* o_gamma2 = nullptr;
  CLI::Option* o_k1 = nullptr;
  CLI::Option* o_k2 = nullptr;
  CLI::Option* o_t_end = nullptr;
  CLI::Option* o_x0 = nullptr;
  CLI::Option* o_method = nullptr;
  CLI::Option* o_rep = nullptr;

  void attach(CLI::App* sub) {
    o_gamma1 = sub->add_option("--gamma1", gamma1,
                               "position-error gain on the off-manifold "
                               "deviation (> 0)");
    o_gamma2 = sub->add_option("--gamma2", gamma2,
                               "velocity-error gain on the off-manifold "
                               "deviation (> 0)");
    o_k1 = sub->add_option("--k1", k1, "rotary-arm generator parameter");
    o_k2 = sub->add_option("--k2", k2, "two-link generator parameter");
    o_x0 = sub->add_option(
        "--x0", x0_text, "initial state: four numbers, comma or space separated");
    o_t_end = sub->add_option("--t-end", t_end, "integration horizon (s)");
    o_method = sub->add_option("--method", method, "integrator: rk45 or rk4");
    o_rep = sub->add_option("--representation", representation,
                            "closed-loop form: spong, euler-lagrange or "
                            "off-manifold");
  }

  void apply(Scenario& sc) const {
    if (o_gamma1->count() > 0) sc.gamma1 = gamma1;
    if (o_gamma2->count() > 0) sc.gamma2 = gamma2;
    if (o_k1->count() > 0) {
      if (sc.generator != "furuta-k1")
        throw ConfigError("--k1 applies to the furuta-k1 generator, scenario "
                          "uses '" + sc.generator + "'");
      sc.k1 = k1;
    }
    if (o_k2->count() > 0) {
      if (sc.generator != "pendubot-k2")
        throw ConfigError("--k2 applies to the pendubot-k2 generator, "
                          "scenario uses '" + sc.generator + "'");
      sc.k2 = k2;
    }
    if (o_x0->count() > 0) {
      const std::vector<double> v = parse_doubles(x0_text, "--x0");
      if (v.size() != 4)
        throw ConfigError("--x0 needs exactly 4 numbers, got " +
                          std::to_string(v.size()));
      sc.x0 = State4{v[0], v[1], v[2], v[3]};
    }
    if (o_t_end->count() > 0) {
      if (!(t_end > 0.0)) throw ConfigError("--t-end must be positive");
      sc.integ.t_end = t_end;
    }
    if (o_method->count() > 0) sc.integ.method = method_from_name(method);
    if (o_rep->count() > 0)
      sc.representation = representation_from_name(representation);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "orbistab: synthesize, simulate and certify orbital stabilizers for "
      "2-DOF underactuated systems"};
  app.require_subcommand(1);

  int rc = 0;

  // simulate
  auto* sim = app.add_subcommand(
      "simulate", "run one closed-loop scenario and write trajectory + summary");
  std::string sim_config, sim_out;
  sim->add_option("--config", sim_config, "scenario config file");
  sim->add_option("--out", sim_out, "trajectory CSV path");
  Overrides sim_ov;
  sim_ov.attach(sim);
  sim->callback([&]() {
    Scenario sc = load_base(sim_config);
    sim_ov.apply(sc);
    if (!sim_out.empty()) sc.csv_path = sim_out;
    rc = cmd_simulate(sc, std::cout);
  });

  // sweep
  auto* swp = app.add_subcommand(
      "sweep", "run a family of scenarios varying one axis, in parallel");
  std::string swp_config, swp_out, swp_axis, swp_values;
  swp->add_option("--config", swp_config, "base scenario config file");
  swp->add_option("--axis", swp_axis, "what to vary: gamma, k or x0")
      ->required();
  swp->add_option("--values", swp_values,
                  "gamma: 'g1:g2,g1:g2,...'; k: 'k,k,...'; x0: 'a b c d; ...'")
      ->required();
  swp->add_option("--out", swp_out, "result table CSV (default: stdout)");
  Overrides swp_ov;
  swp_ov.attach(swp);
  swp->callback([&]() {
    Scenario sc = load_base(swp_config);
    swp_ov.apply(sc);
    sc.csv_path.clear();  // per-run trajectories are not kept in a sweep
    sc.summary_path.clear();
    rc = cmd_sweep(sc, swp_axis, swp_values, swp_out, std::cout);
  });

  // verify
  auto* ver = app.add_subcommand(
      "verify", "run a scenario and certify every closed-loop condition");
  std::string ver_config, ver_out;
  bool ver_cex = false;
  ver->add_option("--config", ver_config, "scenario config file");
  ver->add_option("--out", ver_out, "write the text report here too");
  ver->add_flag("--counterexample", ver_cex,
                "also run the conservative-comparison counterexample");
  Overrides ver_ov;
  ver_ov.attach(ver);
  ver->callback([&]() {
    Scenario sc = load_base(ver_config);
    ver_ov.apply(sc);
    if (!ver_out.empty()) sc.report_path = ver_out;
    if (ver_cex) sc.verify.run_counterexample = true;
    rc = cmd_verify(sc, std::cout);
  });

  // plotdata
  auto* plt = app.add_subcommand(
      "plotdata", "decimate a trajectory CSV into plot-ready series");
  std::string plt_in, plt_kind = "timeseries", plt_out;
  plt->add_option("--in", plt_in, "trajectory CSV produced by simulate/demo")
      ->required();
  plt->add_option("--kind", plt_kind, "timeseries (default) or phase");
  plt->add_option("--out", plt_out,
                  "output prefix (default: input path without extension)");
  plt->callback([&]() {
    std::string prefix = plt_out;
    if (prefix.empty()) {
      prefix = plt_in;
      const std::size_t slash = prefix.find_last_of("/\\");
      const std::size_t dot = prefix.find_last_of('.');
      if (dot != std::string::npos &&
          (slash == std::string::npos || dot > slash))
        prefix = prefix.substr(0, dot);
    }
    rc = cmd_plotdata(plt_in, plt_kind, prefix, std::cout);
  });

  // demo
  auto* dem = app.add_subcommand(
      "demo", "run a built-in scenario (furuta or pendubot) end to end");
  std::string dem_which, dem_out;
  dem->add_option("which", dem_which, "furuta or pendubot")->required();
  dem->add_option("--out", dem_out, "trajectory CSV path");
  Overrides dem_ov;
  dem_ov.attach(dem);
  dem->callback([&]() {
    Scenario sc = demo_scenario(dem_which);
    dem_ov.apply(sc);
    sc.csv_path = dem_out.empty() ? dem_which + "_demo.csv" : dem_out;
    rc = cmd_simulate(sc, std::cout);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  } catch (const orbistab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const orbistab::SingularityError& e) {
    std::cerr << "singularity: " << e.what() << "\n";
    return 2;
  } catch (const orbistab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
