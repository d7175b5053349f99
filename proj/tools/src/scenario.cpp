#include "scenario.hpp"

#include <orbistab/expr.hpp>

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace orbistab::cli {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double ovr(const std::map<std::string, double>& m, const std::string& key,
           double fallback) {
  auto it = m.find(key);
  return it == m.end() ? fallback : it->second;
}

const std::set<std::string> kCustomFields = {
    "m_uu", "m_au", "m_aa", "dm_uu", "dm_au", "dm_aa",
    "c_a",  "c_u_bar", "c_q", "c_p", "c_s",
    "V",    "dV_du", "dV_da", "d2V_duda"};

MechanicalSystem build_custom(const Scenario& sc) {
  for (const auto& f : kCustomFields)
    if (!sc.custom_fields.count(f))
      throw ConfigError("custom system: missing expression for " + f);

  MechanicalSystem sys;
  sys.name = "custom";
  sys.params = sc.overrides;
  const auto& con = sc.overrides;
  const auto prof = [&](const char* f) {
    return compile_profile(sc.custom_fields.at(f), con);
  };
  const auto field = [&](const char* f) {
    return compile_expression(sc.custom_fields.at(f), con);
  };
  sys.m_uu = prof("m_uu");
  sys.m_au = prof("m_au");
  sys.m_aa = prof("m_aa");
  sys.dm_uu = prof("dm_uu");
  sys.dm_au = prof("dm_au");
  sys.dm_aa = prof("dm_aa");
  sys.c_a = prof("c_a");
  sys.c_u_bar = prof("c_u_bar");
  sys.c_q = prof("c_q");
  sys.c_p = prof("c_p");
  sys.c_s = prof("c_s");
  sys.V = field("V");
  sys.dV_du = field("dV_du");
  sys.dV_da = field("dV_da");
  sys.d2V_duda = field("d2V_duda");
  return sys;
}

}  // namespace

std::string representation_name(Representation rep) {
  switch (rep) {
    case Representation::EulerLagrange: return "euler-lagrange";
    case Representation::OffManifold: return "off-manifold";
    default: return "spong";
  }
}

Representation representation_from_name(const std::string& name) {
  if (name == "spong") return Representation::Spong;
  if (name == "euler-lagrange") return Representation::EulerLagrange;
  if (name == "off-manifold") return Representation::OffManifold;
  throw ConfigError("unknown representation \"" + name +
                    "\" (spong, euler-lagrange, off-manifold)");
}

Scenario demo_scenario(const std::string& which) {
  Scenario sc;
  if (which == "furuta") {
    sc.name = "furuta";
    sc.system_kind = "furuta";
    sc.generator = "furuta-k1";
    sc.k1 = 5.0;
    sc.gamma1 = 5.0;
    sc.gamma2 = 5.0;
    sc.operating = {-1.4, 1.4};
    sc.x0 = {kPi / 9.0, 0.6, 0.0, 0.0};
  } else if (which == "pendubot") {
    sc.name = "pendubot";
    sc.system_kind = "pendubot";
    sc.generator = "pendubot-k2";
    sc.k2 = -1.0;
    // gain pair {5, 10}: the softer position gain and stronger velocity
    // gain keep the transient energy injection below the barrier between
    // the two potential wells, so the run settles into oscillation about
    // pi instead of tipping into full rotation
    sc.gamma1 = 5.0;
    sc.gamma2 = 10.0;
    sc.operating = {-kPi, 3.0 * kPi};
    sc.x0 = {kPi / 3.0, kPi / 1.5, 0.0, 0.0};
  } else {
    throw ConfigError("unknown demo \"" + which + "\" (furuta, pendubot)");
  }
  sc.integ.t_end = 30.0;
  return sc;
}

Scenario scenario_from_config(const Config& cfg) {
  Scenario sc;
  sc.name = get_string(cfg, "system", "name", "scenario");
  sc.system_kind = get_string(cfg, "system", "kind", "furuta");
  if (sc.system_kind != "furuta" && sc.system_kind != "pendubot" &&
      sc.system_kind != "custom")
    throw ConfigError("unknown system kind \"" + sc.system_kind +
                      "\" (furuta, pendubot, custom)");

  for (const auto& section : cfg.sections) {
    if (section.name != "system") continue;
    for (const auto& e : section.entries) {
      if (e.key == "kind" || e.key == "name") continue;
      if (sc.system_kind == "custom" && kCustomFields.count(e.key)) {
        sc.custom_fields[e.key] = e.value;
      } else {
        sc.overrides[e.key] = parse_double(e.value, "[system] " + e.key);
      }
    }
  }

  sc.generator = get_string(cfg, "synthesis", "generator",
                            sc.system_kind == "pendubot" ? "pendubot-k2"
                                                         : "furuta-k1");
  sc.k1 = get_double(cfg, "synthesis", "k1", 5.0);
  sc.k2 = get_double(cfg, "synthesis", "k2", -1.0);
  sc.s_expr = get_string(cfg, "synthesis", "s", "");
  sc.ds_expr = get_string(cfg, "synthesis", "ds", "");
  sc.K_expr = get_string(cfg, "synthesis", "K", "");
  sc.dK_expr = get_string(cfg, "synthesis", "dK", "");
  sc.d2K_expr = get_string(cfg, "synthesis", "d2K", "");
  sc.gamma1 = get_double(cfg, "synthesis", "gamma1", 5.0);
  sc.gamma2 = get_double(cfg, "synthesis", "gamma2", 5.0);
  if (cfg.has("synthesis", "interval")) {
    const auto iv = get_doubles(cfg, "synthesis", "interval");
    if (iv.size() != 2 || !(iv[0] < iv[1]))
      throw ConfigError("[synthesis] interval: expected \"lo hi\" with lo < hi");
    sc.operating = {iv[0], iv[1]};
  } else if (sc.system_kind == "pendubot") {
    sc.operating = {-kPi, 3.0 * kPi};
  }
  sc.table_nodes = get_int(cfg, "synthesis", "table_nodes", 4096);

  if (cfg.has("initial", "x0")) {
    const auto v = get_doubles(cfg, "initial", "x0");
    if (v.size() != 4)
      throw ConfigError("[initial] x0: expected 4 numbers, got " +
                        std::to_string(v.size()));
    sc.x0 = {v[0], v[1], v[2], v[3]};
  }

  const std::string method = get_string(cfg, "integrator", "method", "rk45");
  if (method == "rk45") {
    sc.integ.method = Method::RK45Adaptive;
  } else if (method == "rk4") {
    sc.integ.method = Method::RK4Fixed;
  } else {
    throw ConfigError("unknown integrator method \"" + method +
                      "\" (rk45, rk4)");
  }
  sc.integ.t_end = get_double(cfg, "integrator", "t_end", 30.0);
  sc.integ.h = get_double(cfg, "integrator", "h", sc.integ.h);
  sc.integ.rel_tol = get_double(cfg, "integrator", "rel_tol", sc.integ.rel_tol);
  sc.integ.abs_tol = get_double(cfg, "integrator", "abs_tol", sc.integ.abs_tol);
  sc.integ.h_init = get_double(cfg, "integrator", "h_init", sc.integ.h_init);
  sc.integ.h_max = get_double(cfg, "integrator", "h_max", sc.integ.h_max);
  sc.integ.stride = get_int(cfg, "integrator", "stride", sc.integ.stride);
  sc.representation = representation_from_name(
      get_string(cfg, "integrator", "representation", "spong"));

  sc.csv_path = get_string(cfg, "output", "csv", "");
  sc.summary_path = get_string(cfg, "output", "summary", "");

  sc.verify.xi1_lo = get_double(cfg, "verify", "xi1_lo", sc.verify.xi1_lo);
  sc.verify.xi1_hi = get_double(cfg, "verify", "xi1_hi", sc.verify.xi1_hi);
  sc.verify.xi2_max = get_double(cfg, "verify", "xi2_max", sc.verify.xi2_max);
  sc.verify.grid_n1 = get_int(cfg, "verify", "grid_n1", sc.verify.grid_n1);
  sc.verify.grid_n2 = get_int(cfg, "verify", "grid_n2", sc.verify.grid_n2);
  sc.verify.tail_fraction =
      get_double(cfg, "verify", "tail_fraction", sc.verify.tail_fraction);
  sc.verify.run_counterexample =
      get_bool(cfg, "verify", "counterexample", false);
  sc.verify.counterexample_t_end = get_double(
      cfg, "verify", "counterexample_t_end", sc.verify.counterexample_t_end);
  sc.verify.immersion_dk_scale =
      get_double(cfg, "verify", "dk_scale", sc.verify.immersion_dk_scale);
  sc.report_path = get_string(cfg, "verify", "report", "");
  sc.report_csv_path = get_string(cfg, "verify", "report_csv", "");
  return sc;
}

Config scenario_to_config(const Scenario& sc) {
  Config cfg;
  cfg.set("system", "name", sc.name);
  cfg.set("system", "kind", sc.system_kind);
  for (const auto& [k, v] : sc.overrides) cfg.set("system", k, num(v));
  for (const auto& [k, v] : sc.custom_fields) cfg.set("system", k, v);

  cfg.set("synthesis", "generator", sc.generator);
  if (sc.generator == "furuta-k1") cfg.set("synthesis", "k1", num(sc.k1));
  if (sc.generator == "pendubot-k2") cfg.set("synthesis", "k2", num(sc.k2));
  if (!sc.s_expr.empty()) cfg.set("synthesis", "s", sc.s_expr);
  if (!sc.ds_expr.empty()) cfg.set("synthesis", "ds", sc.ds_expr);
  if (!sc.K_expr.empty()) cfg.set("synthesis", "K", sc.K_expr);
  if (!sc.dK_expr.empty()) cfg.set("synthesis", "dK", sc.dK_expr);
  if (!sc.d2K_expr.empty()) cfg.set("synthesis", "d2K", sc.d2K_expr);
  cfg.set("synthesis", "gamma1", num(sc.gamma1));
  cfg.set("synthesis", "gamma2", num(sc.gamma2));
  cfg.set("synthesis", "interval",
          num(sc.operating.lo) + " " + num(sc.operating.hi));
  cfg.set("synthesis", "table_nodes", std::to_string(sc.table_nodes));

  cfg.set("initial", "x0",
          num(sc.x0.x1) + " " + num(sc.x0.x2) + " " + num(sc.x0.x3) + " " +
              num(sc.x0.x4));

  cfg.set("integrator", "method",
          sc.integ.method == Method::RK4Fixed ? "rk4" : "rk45");
  cfg.set("integrator", "t_end", num(sc.integ.t_end));
  cfg.set("integrator", "h", num(sc.integ.h));
  cfg.set("integrator", "rel_tol", num(sc.integ.rel_tol));
  cfg.set("integrator", "abs_tol", num(sc.integ.abs_tol));
  cfg.set("integrator", "h_init", num(sc.integ.h_init));
  cfg.set("integrator", "h_max", num(sc.integ.h_max));
  cfg.set("integrator", "stride", std::to_string(sc.integ.stride));
  cfg.set("integrator", "representation",
          representation_name(sc.representation));

  if (!sc.csv_path.empty()) cfg.set("output", "csv", sc.csv_path);
  if (!sc.summary_path.empty()) cfg.set("output", "summary", sc.summary_path);

  if (std::isfinite(sc.verify.xi1_lo))
    cfg.set("verify", "xi1_lo", num(sc.verify.xi1_lo));
  if (std::isfinite(sc.verify.xi1_hi))
    cfg.set("verify", "xi1_hi", num(sc.verify.xi1_hi));
  cfg.set("verify", "xi2_max", num(sc.verify.xi2_max));
  cfg.set("verify", "grid_n1", std::to_string(sc.verify.grid_n1));
  cfg.set("verify", "grid_n2", std::to_string(sc.verify.grid_n2));
  cfg.set("verify", "tail_fraction", num(sc.verify.tail_fraction));
  cfg.set("verify", "counterexample",
          sc.verify.run_counterexample ? "true" : "false");
  cfg.set("verify", "counterexample_t_end",
          num(sc.verify.counterexample_t_end));
  if (sc.verify.immersion_dk_scale != 1.0)
    cfg.set("verify", "dk_scale", num(sc.verify.immersion_dk_scale));
  if (!sc.report_path.empty()) cfg.set("verify", "report", sc.report_path);
  if (!sc.report_csv_path.empty())
    cfg.set("verify", "report_csv", sc.report_csv_path);
  return cfg;
}

BuiltScenario build_scenario(const Scenario& sc) {
  MechanicalSystem sys;
  if (sc.system_kind == "furuta") {
    const auto& o = sc.overrides;
    sys = furuta_system(ovr(o, "m", 0.0679), ovr(o, "l", 0.14),
                        ovr(o, "r", 0.235), ovr(o, "J", 0.0012),
                        ovr(o, "J_a", 0.0024), ovr(o, "gravity", 9.81));
  } else if (sc.system_kind == "pendubot") {
    const auto& o = sc.overrides;
    sys = pendubot_system(ovr(o, "m1", 0.2), ovr(o, "m2", 0.052),
                          ovr(o, "l1", 0.2), ovr(o, "l2", 0.28),
                          ovr(o, "lc1", 0.13), ovr(o, "lc2", 0.15),
                          ovr(o, "I1", 3.38e-1), ovr(o, "I2", 1.17e-3),
                          ovr(o, "gravity", 9.81));
  } else {
    sys = build_custom(sc);
  }

  Generator gen;
  Profile s;
  if (sc.generator == "furuta-k1") {
    if (!sys.params.count("a1") || !sys.params.count("J"))
      throw ConfigError("generator furuta-k1 needs system parameters a1 and J");
    gen = furuta_generator(sys.params.at("a1"), sc.k1);
    s = furuta_s(sys.params.at("J"), sc.k1);
  } else if (sc.generator == "pendubot-k2") {
    if (!sys.params.count("c2") || !sys.params.count("c3"))
      throw ConfigError(
          "generator pendubot-k2 needs system parameters c2 and c3");
    gen = pendubot_generator(sc.k2);
    s = pendubot_s(sys.params.at("c2"), sys.params.at("c3"), sc.k2);
  } else if (sc.generator == "from-s") {
    if (sc.s_expr.empty())
      throw ConfigError("generator from-s needs [synthesis] s = <expression>");
    s = compile_profile(sc.s_expr, sc.overrides);
    Profile ds;
    if (!sc.ds_expr.empty()) ds = compile_profile(sc.ds_expr, sc.overrides);
    gen = generator_from_s(sys, s, ds, sc.operating);
  } else if (sc.generator == "explicit") {
    if (sc.K_expr.empty() || sc.dK_expr.empty() || sc.d2K_expr.empty())
      throw ConfigError(
          "generator explicit needs [synthesis] K, dK and d2K expressions");
    gen.K = compile_profile(sc.K_expr, sc.overrides);
    gen.dK = compile_profile(sc.dK_expr, sc.overrides);
    gen.d2K = compile_profile(sc.d2K_expr, sc.overrides);
    gen.name = "explicit";
    const Profile dK = gen.dK;
    const Profile muu = sys.m_uu, mau = sys.m_au;
    s = [muu, mau, dK](double x1) { return muu(x1) + mau(x1) * dK(x1); };
  } else {
    throw ConfigError("unknown generator \"" + sc.generator +
                      "\" (furuta-k1, pendubot-k2, from-s, explicit)");
  }

  SynthesisProfile profile =
      make_profile(sys, std::move(gen), std::move(s), sc.gamma1, sc.gamma2,
                   sc.operating, (std::size_t)sc.table_nodes);
  return BuiltScenario{std::move(sys), std::move(profile)};
}

}  // namespace orbistab::cli
