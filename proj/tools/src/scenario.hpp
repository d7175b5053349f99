#pragma once

#include "config.hpp"

#include <orbistab/certify.hpp>
#include <orbistab/closed_loop.hpp>
#include <orbistab/synthesis.hpp>

#include <map>
#include <string>

namespace orbistab::cli {

/// Everything a run needs, in plain data form. Produced from a config file
/// or one of the built-in demos, optionally adjusted by command-line
/// overrides, then compiled into a system + profile by build_scenario().
struct Scenario {
  std::string name = "scenario";

  // [system]
  std::string system_kind = "furuta";  // furuta | pendubot | custom
  std::map<std::string, double> overrides;  // numeric parameter overrides
  // custom systems: expression strings per model field (see scenario.cpp
  // for the required set); numeric keys double as named constants
  std::map<std::string, std::string> custom_fields;

  // [synthesis]
  std::string generator = "furuta-k1";  // furuta-k1 | pendubot-k2 | from-s | explicit
  double k1 = 5.0;
  double k2 = -1.0;
  std::string s_expr, ds_expr;             // from-s
  std::string K_expr, dK_expr, d2K_expr;   // explicit
  double gamma1 = 5.0;
  double gamma2 = 5.0;
  Interval operating{-1.4, 1.4};
  int table_nodes = 4096;

  // [initial]
  State4 x0{};

  // [integrator]
  IntegratorConfig integ;
  Representation representation = Representation::Spong;

  // [output]
  std::string csv_path;
  std::string summary_path;

  // [verify]
  VerifyOptions verify;
  std::string report_path;
  std::string report_csv_path;
};

/// Built-in scenarios: "furuta" (k1 = 5, gains 5/5, start near upright) and
/// "pendubot" (k2 = -1, gains 5/10, start in the lower well; the run climbs
/// into the upper-plane well at pi and oscillates there).
Scenario demo_scenario(const std::string& which);

Scenario scenario_from_config(const Config& cfg);
Config scenario_to_config(const Scenario& sc);

struct BuiltScenario {
  MechanicalSystem system;
  SynthesisProfile profile;
};

/// Compiles the scenario. Throws ConfigError for malformed fields and
/// SynthesisError when the synthesis preconditions reject the data.
BuiltScenario build_scenario(const Scenario& sc);

std::string representation_name(Representation rep);
Representation representation_from_name(const std::string& name);

}  // namespace orbistab::cli
