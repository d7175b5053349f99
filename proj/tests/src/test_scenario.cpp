#include "doctest.h"

#include "scenario.hpp"

#include <cmath>

using namespace orbistab;
using namespace orbistab::cli;

namespace {

// states spread over the rotary pendulum's operating range
const State4 kProbes[] = {
    {0.1, 0.4, 0.3, -0.2}, {-0.9, 1.2, -1.1, 0.7},  {0.7, -0.8, 0.0, 1.4},
    {1.2, 0.0, 2.0, -1.0}, {-1.3, -1.5, 0.4, 0.25}, {0.0, 0.6, -0.6, 0.0},
};

}  // namespace

TEST_CASE("built-in demos carry the documented data") {
  const Scenario f = demo_scenario("furuta");
  CHECK(f.system_kind == "furuta");
  CHECK(f.generator == "furuta-k1");
  CHECK(f.k1 == 5.0);
  CHECK(f.gamma1 == 5.0);
  CHECK(f.gamma2 == 5.0);
  CHECK(f.operating.lo == -1.4);
  CHECK(f.operating.hi == 1.4);
  CHECK(f.x0.x1 == doctest::Approx(M_PI / 9.0));
  CHECK(f.x0.x2 == 0.6);
  CHECK(f.x0.x3 == 0.0);
  CHECK(f.integ.t_end == 30.0);

  const Scenario p = demo_scenario("pendubot");
  CHECK(p.system_kind == "pendubot");
  CHECK(p.generator == "pendubot-k2");
  CHECK(p.k2 == -1.0);
  CHECK(p.gamma1 == 5.0);
  CHECK(p.gamma2 == 10.0);
  CHECK(p.operating.lo == doctest::Approx(-M_PI));
  CHECK(p.operating.hi == doctest::Approx(3.0 * M_PI));
  CHECK(p.x0.x1 == doctest::Approx(M_PI / 3.0));
  CHECK(p.x0.x2 == doctest::Approx(2.0 * M_PI / 3.0));

  CHECK_THROWS_AS(demo_scenario("acrobot"), ConfigError);
}

TEST_CASE("scenario survives the trip through config text") {
  Scenario sc = demo_scenario("pendubot");
  sc.name = "trip";
  sc.integ.method = Method::RK4Fixed;
  sc.integ.h = 2e-3;
  sc.integ.stride = 4;
  sc.integ.t_end = 12.5;
  sc.representation = Representation::OffManifold;
  sc.csv_path = "out.csv";
  sc.verify.immersion_dk_scale = 1.01;
  sc.verify.xi2_max = 2.5;
  sc.verify.run_counterexample = true;
  sc.report_path = "report.txt";

  const Config cfg = scenario_to_config(sc);
  const Scenario back = scenario_from_config(cfg);

  CHECK(back.name == "trip");
  CHECK(back.system_kind == "pendubot");
  CHECK(back.generator == "pendubot-k2");
  CHECK(back.k2 == sc.k2);
  CHECK(back.gamma1 == sc.gamma1);
  CHECK(back.gamma2 == sc.gamma2);
  CHECK(back.operating.lo == sc.operating.lo);
  CHECK(back.operating.hi == sc.operating.hi);
  CHECK(back.x0.x1 == sc.x0.x1);
  CHECK(back.x0.x2 == sc.x0.x2);
  CHECK(back.integ.method == Method::RK4Fixed);
  CHECK(back.integ.h == 2e-3);
  CHECK(back.integ.stride == 4);
  CHECK(back.integ.t_end == 12.5);
  CHECK(back.representation == Representation::OffManifold);
  CHECK(back.csv_path == "out.csv");
  CHECK(back.verify.immersion_dk_scale == 1.01);
  CHECK(back.verify.xi2_max == 2.5);
  CHECK(back.verify.run_counterexample);
  CHECK(back.report_path == "report.txt");
  // grid edges default to NaN ("use the operating interval") and must stay so
  CHECK(std::isnan(back.verify.xi1_lo));
  CHECK(std::isnan(back.verify.xi1_hi));

  // and the text form itself is stable under a second trip
  CHECK(serialize_config(scenario_to_config(back)) == serialize_config(cfg));
}

TEST_CASE("build_scenario compiles the same controller as direct assembly") {
  const BuiltScenario built = build_scenario(demo_scenario("furuta"));

  const MechanicalSystem sys =
      furuta_system(0.0679, 0.14, 0.235, 0.0012, 0.0024);
  const SynthesisProfile direct = make_profile(
      sys, furuta_generator(sys.params.at("a1"), 5.0), furuta_s(0.0012, 5.0),
      5.0, 5.0, {-1.4, 1.4});

  for (const State4& x : kProbes) {
    CHECK(control_u(built.profile, x) ==
          doctest::Approx(control_u(direct, x)).epsilon(1e-12));
  }
  CHECK(built.profile.mass(1.0) == doctest::Approx(direct.mass(1.0)).epsilon(1e-12));
  CHECK(built.profile.potential(-1.2) ==
        doctest::Approx(direct.potential(-1.2)).epsilon(1e-12));
}

TEST_CASE("an expression-defined system reproduces the built-in model") {
  const MechanicalSystem ref =
      furuta_system(0.0679, 0.14, 0.235, 0.0012, 0.0024);

  Scenario sc = demo_scenario("furuta");
  sc.system_kind = "custom";
  sc.overrides = {{"J", ref.params.at("J")},
                  {"a1", ref.params.at("a1")},
                  {"a2", ref.params.at("a2")},
                  {"a3", ref.params.at("a3")}};
  sc.custom_fields = {
      {"m_uu", "J"},
      {"m_au", "J*a1*cos(x1)"},
      {"m_aa", "J*(a2 + sin(x1)*sin(x1))"},
      {"dm_uu", "0"},
      {"dm_au", "-J*a1*sin(x1)"},
      {"dm_aa", "J*sin(2*x1)"},
      {"c_a", "0"},
      {"c_u_bar", "-J*sin(x1)*cos(x1)"},
      {"c_q", "-J*a1*sin(x1)"},
      {"c_p", "J*sin(2*x1)"},
      {"c_s", "0"},
      {"V", "a3*cos(x1)"},
      {"dV_du", "-a3*sin(x1)"},
      {"dV_da", "0"},
      {"d2V_duda", "0"},
  };

  const BuiltScenario custom = build_scenario(sc);
  const BuiltScenario builtin = build_scenario(demo_scenario("furuta"));

  for (const State4& x : kProbes) {
    const double uc = control_u(custom.profile, x);
    const double ub = control_u(builtin.profile, x);
    CHECK(uc == doctest::Approx(ub).epsilon(1e-9));
  }
  for (double x1 : {-1.2, -0.5, 0.3, 0.9, 1.35}) {
    CHECK(custom.profile.mass(x1) ==
          doctest::Approx(builtin.profile.mass(x1)).epsilon(1e-9));
    CHECK(custom.profile.potential(x1) ==
          doctest::Approx(builtin.profile.potential(x1)).epsilon(1e-9));
  }

  SUBCASE("a missing field is named in the rejection") {
    sc.custom_fields.erase("c_p");
    CHECK_THROWS_WITH_AS(build_scenario(sc),
                         doctest::Contains("missing expression for c_p"),
                         ConfigError);
  }
}

TEST_CASE("custom fields route through config parsing") {
  const Config cfg = parse_config_text(
      "[system]\n"
      "kind = custom\n"
      "J = 0.0012\n"
      "m_uu = J\n"
      "[synthesis]\n"
      "generator = from-s\n"
      "s = -0.006\n"
      "interval = -1.4 1.4\n");
  const Scenario sc = scenario_from_config(cfg);
  CHECK(sc.system_kind == "custom");
  REQUIRE(sc.overrides.count("J") == 1);
  CHECK(sc.overrides.at("J") == 0.0012);
  REQUIRE(sc.custom_fields.count("m_uu") == 1);
  CHECK(sc.custom_fields.at("m_uu") == "J");
  CHECK(sc.generator == "from-s");
  CHECK(sc.s_expr == "-0.006");
}

TEST_CASE("a constant-mapping synthesis matches the closed-form generator") {
  // on the rotary pendulum, s = -J*k1 is constant; deriving the generator
  // from that mapping must land on the same controller as the closed form
  Scenario sc = demo_scenario("furuta");
  sc.generator = "from-s";
  sc.s_expr = "-0.006";
  const BuiltScenario from_s = build_scenario(sc);
  const BuiltScenario closed = build_scenario(demo_scenario("furuta"));

  for (const State4& x : kProbes) {
    CHECK(control_u(from_s.profile, x) ==
          doctest::Approx(control_u(closed.profile, x)).epsilon(1e-7));
  }
}

TEST_CASE("an explicit generator triple matches the built-in pendubot one") {
  Scenario sc = demo_scenario("pendubot");
  sc.generator = "explicit";
  sc.K_expr = "x1";
  sc.dK_expr = "1";
  sc.d2K_expr = "0";
  const BuiltScenario expl = build_scenario(sc);
  const BuiltScenario builtin = build_scenario(demo_scenario("pendubot"));

  const State4 probes[] = {
      {0.4, 0.4, 0.3, -0.2}, {2.0, 1.2, -1.1, 0.7}, {5.5, -0.8, 0.0, 1.4}};
  for (const State4& x : probes) {
    CHECK(control_u(expl.profile, x) ==
          doctest::Approx(control_u(builtin.profile, x)).epsilon(1e-9));
  }

  SUBCASE("the triple must be complete") {
    sc.d2K_expr = "";
    CHECK_THROWS_AS(build_scenario(sc), ConfigError);
  }
}

TEST_CASE("malformed scenario data is rejected as configuration error") {
  SUBCASE("unknown system kind") {
    CHECK_THROWS_AS(scenario_from_config(
                        parse_config_text("[system]\nkind = acrobot\n")),
                    ConfigError);
  }
  SUBCASE("unknown generator") {
    Scenario sc = demo_scenario("furuta");
    sc.generator = "mystery";
    CHECK_THROWS_AS(build_scenario(sc), ConfigError);
  }
  SUBCASE("from-s without an expression") {
    Scenario sc = demo_scenario("furuta");
    sc.generator = "from-s";
    CHECK_THROWS_AS(build_scenario(sc), ConfigError);
  }
  SUBCASE("interval must be ordered") {
    CHECK_THROWS_AS(
        scenario_from_config(parse_config_text(
            "[system]\nkind = furuta\n[synthesis]\ninterval = 1 -1\n")),
        ConfigError);
  }
  SUBCASE("x0 needs exactly four numbers") {
    CHECK_THROWS_AS(scenario_from_config(parse_config_text(
                        "[system]\nkind = furuta\n[initial]\nx0 = 1 2 3\n")),
                    ConfigError);
  }
  SUBCASE("unknown integrator method") {
    CHECK_THROWS_AS(scenario_from_config(parse_config_text(
                        "[integrator]\nmethod = euler\n")),
                    ConfigError);
  }
  SUBCASE("non-positive gains are a synthesis rejection, not a config one") {
    Scenario sc = demo_scenario("furuta");
    sc.gamma1 = 0.0;
    CHECK_THROWS_AS(build_scenario(sc), SynthesisError);
  }
}

TEST_CASE("representation names round-trip") {
  for (Representation rep : {Representation::Spong,
                             Representation::EulerLagrange,
                             Representation::OffManifold}) {
    CHECK(representation_from_name(representation_name(rep)) == rep);
  }
  CHECK_THROWS_AS(representation_from_name("implicit"), ConfigError);
}
