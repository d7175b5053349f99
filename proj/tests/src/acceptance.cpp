// Acceptance gate: ten numbered criteria, one [PASS]/[FAIL] line each.
// Exit status is the number of failed criteria. Tolerances are pinned here
// as constants; loosening one is a deliberate code change, not a knob.

#include <orbistab/certify.hpp>
#include <orbistab/closed_loop.hpp>
#include <orbistab/target.hpp>

#include "config.hpp"
#include "scenario.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

using namespace orbistab;
using namespace orbistab::cli;

namespace {

constexpr double kInvarianceTol = 1e-8;   // scaled residual, clean immersion
constexpr double kFaultFloor = 1e-3;      // same residual with a 1% slope fault
constexpr double kScanBudget = 5.0;       // seconds per invariance scan
constexpr double kEnergyDriftTol = 1e-6;  // target flow over ten periods
constexpr double kEquivalenceTol = 1e-6;  // between representations, 10 s
constexpr double kRateRelTol = 0.10;      // fitted vs predicted decay rate
constexpr double kZLeakTol = 1e-8;        // |z| on a run started on-manifold
constexpr double kTailVarTol = 0.01;      // relative Hx spread over the tail
constexpr double kSpreadTol = 1e-3;       // seconds, crossing-interval spread
constexpr double kMeanTol = 0.05;         // pendubot tail mean x1 vs pi
constexpr double kSelftestTol = 1e-6;     // comparison machinery deviation
constexpr double kDoublingRef = 1.784854; // counterexample doubling time
constexpr double kDoublingTol = 1e-3;
constexpr double kWallBudget = 300.0;     // seconds for this whole binary

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

Trajectory run_demo(const std::string& which, double t_end,
                    Representation rep = Representation::Spong,
                    double rel_tol = 1e-9) {
  Scenario sc = demo_scenario(which);
  sc.integ.t_end = t_end;
  sc.integ.rel_tol = rel_tol;
  sc.integ.abs_tol = rel_tol * 1e-2;
  const BuiltScenario built = build_scenario(sc);
  return simulate_closed_loop(built.profile, sc.x0, sc.integ, rep);
}

// ten-period energy drift of the reduced target flow under fixed-step RK4
double target_drift(const SynthesisProfile& p, const Eigen::Vector2d& xi0,
                    Interval scan) {
  const OrbitLevel lev = orbit_from_ic(p, xi0, scan);
  if (!lev.warning.empty() || !(lev.period > 0.0))
    throw AnalysisError("no closed orbit: " + lev.warning);
  const auto field = [&p](double, const Vec<2>& v) {
    return Vec<2>(target_field(p, v));
  };
  IntegratorConfig cfg;
  cfg.method = Method::RK4Fixed;
  cfg.h = 1e-3;
  cfg.t_end = 10.0 * lev.period;
  const auto traj = integrate<2>(field, Vec<2>(xi0), cfg);
  if (!traj.complete) throw AnalysisError("target flow truncated");
  const double h0 = hamiltonian(p, xi0);
  double worst = 0.0;
  for (const auto& v : traj.x)
    worst = std::max(worst, std::abs(hamiltonian(p, Eigen::Vector2d(v)) - h0));
  return worst / std::max(1.0, std::abs(h0));
}

int run_cli_verify(const std::string& cfg_path) {
  const std::string cmd = std::string(ORBISTAB_CLI_PATH) + " verify --config " +
                          cfg_path + " > /dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  if (raw == -1) return -1;
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

}  // namespace

int main() {
  const auto wall0 = std::chrono::steady_clock::now();
  int failures = 0;
  const auto criterion = [&failures](int num, bool pass,
                                     const std::string& detail) {
    std::printf("[%s] criterion %2d: %s\n", pass ? "PASS" : "FAIL", num,
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
  };
  const auto guarded = [&criterion](int num,
                                    const std::function<std::pair<bool, std::string>()>& body) {
    try {
      const auto [pass, detail] = body();
      criterion(num, pass, detail);
    } catch (const std::exception& e) {
      criterion(num, false, std::string("exception: ") + e.what());
    }
  };

  const BuiltScenario furuta = build_scenario(demo_scenario("furuta"));
  const BuiltScenario pendubot = build_scenario(demo_scenario("pendubot"));

  // 1: manifold invariance on a dense grid, both benchmark systems
  guarded(1, [&]() -> std::pair<bool, std::string> {
    const auto t0 = std::chrono::steady_clock::now();
    const InvarianceScan f =
        invariance_residual(furuta.profile, {-1.3, 1.3}, 3.0, 48, 33);
    const double tf = seconds_since(t0);
    const auto t1 = std::chrono::steady_clock::now();
    const InvarianceScan p =
        invariance_residual(pendubot.profile, {0.0, 2.0 * M_PI}, 3.0, 48, 33);
    const double tp = seconds_since(t1);
    const bool pass = f.max_scaled <= kInvarianceTol &&
                      p.max_scaled <= kInvarianceTol && tf < kScanBudget &&
                      tp < kScanBudget;
    return {pass, "invariance residual on a 48x33 grid: " + fmt(f.max_scaled) +
                      " (rotary, " + fmt(tf) + " s), " + fmt(p.max_scaled) +
                      " (two-link, " + fmt(tp) + " s), tol " +
                      fmt(kInvarianceTol)};
  });

  // 2: target oscillator conserves its energy over ten periods
  guarded(2, [&]() -> std::pair<bool, std::string> {
    const double df = target_drift(furuta.profile, {M_PI / 9.0, 0.0},
                                   {-1.4, 1.4});
    const double dp = target_drift(pendubot.profile, {M_PI / 3.0, 0.0},
                                   {0.0, 2.0 * M_PI});
    const bool pass = df <= kEnergyDriftTol && dp <= kEnergyDriftTol;
    return {pass, "ten-period energy drift: " + fmt(df) + " (rotary), " +
                      fmt(dp) + " (two-link), tol " + fmt(kEnergyDriftTol)};
  });

  // 3: the three closed-loop representations integrate to the same flow
  guarded(3, [&]() -> std::pair<bool, std::string> {
    double worst = 0.0;
    for (const char* which : {"furuta", "pendubot"}) {
      const Trajectory a =
          run_demo(which, 10.0, Representation::Spong, 1e-10);
      const Trajectory b =
          run_demo(which, 10.0, Representation::EulerLagrange, 1e-10);
      const Trajectory c =
          run_demo(which, 10.0, Representation::OffManifold, 1e-10);
      if (!a.complete() || !b.complete() || !c.complete())
        throw AnalysisError("a representation run was truncated");
      for (int i = 0; i <= 400; ++i) {
        const double t = 10.0 * i / 400.0;
        const Vec<4> xa = a.path.at(t), xb = b.path.at(t), xc = c.path.at(t);
        worst = std::max(worst, (xa - xb).cwiseAbs().maxCoeff());
        worst = std::max(worst, (xa - xc).cwiseAbs().maxCoeff());
      }
    }
    return {worst <= kEquivalenceTol,
            "max state gap between representations over 10 s: " + fmt(worst) +
                ", tol " + fmt(kEquivalenceTol)};
  });

  const Trajectory furuta_demo = run_demo("furuta", 30.0);

  // 4: off-manifold error decays at the designed rate, and an on-manifold
  // start never develops one
  guarded(4, [&]() -> std::pair<bool, std::string> {
    const ZDecayFit fit = z_decay_fit(furuta_demo, 5.0, 5.0);
    const double predicted = (5.0 - std::sqrt(5.0)) / 2.0;
    const double rel = std::abs(fit.fitted_rate - predicted) / predicted;

    IntegratorConfig cfg;
    cfg.t_end = 10.0;
    const Trajectory pinned = simulate_closed_loop(
        furuta.profile, immersion(furuta.profile, {0.3, 0.2}), cfg);
    double leak = 0.0;
    for (const auto& z : pinned.z) leak = std::max(leak, z.norm());

    const bool pass = !fit.vacuous && rel <= kRateRelTol && leak <= kZLeakTol;
    return {pass, "decay rate fitted " + fmt(fit.fitted_rate) +
                      " vs predicted " + fmt(predicted) + " (rel " + fmt(rel) +
                      ", tol " + fmt(kRateRelTol) +
                      "); on-manifold leak " + fmt(leak) + ", tol " +
                      fmt(kZLeakTol)};
  });

  // 5: the rotary run settles onto a steady oscillation inside the safe range
  guarded(5, [&]() -> std::pair<bool, std::string> {
    double x1_lo = 1e9, x1_hi = -1e9;
    for (const auto& x : furuta_demo.path.x) {
      x1_lo = std::min(x1_lo, x[0]);
      x1_hi = std::max(x1_hi, x[0]);
    }
    const EnergyReport er =
        energy_convergence(furuta_demo, furuta.profile, 0.2);
    const OrbitSummary orb = extract_steady_orbit(furuta_demo, 0.4);
    const bool in_range = x1_lo > -M_PI / 2.0 && x1_hi < M_PI / 2.0;
    const bool pass = in_range && er.tail_rel_variation <= kTailVarTol &&
                      orb.crossing_spread <= kSpreadTol && !orb.degenerate;
    return {pass, "x1 in [" + fmt(x1_lo) + ", " + fmt(x1_hi) +
                      "]; tail energy variation " +
                      fmt(er.tail_rel_variation) + " (tol " +
                      fmt(kTailVarTol) + "); crossing spread " +
                      fmt(orb.crossing_spread) + " s (tol " +
                      fmt(kSpreadTol) + ")"};
  });

  // 6: the two-link run oscillates about the upright elbow configuration,
  // which is a genuine minimum of the shaped potential
  guarded(6, [&]() -> std::pair<bool, std::string> {
    const Trajectory pd = run_demo("pendubot", 30.0);
    const OrbitSummary orb = extract_steady_orbit(pd, 0.4);
    const double mean_gap = std::abs(orb.mean[0] - M_PI);
    const double slope = pendubot.profile.dpotential(M_PI);
    const double h = 1e-4;
    const double curv = (pendubot.profile.dpotential(M_PI + h) -
                         pendubot.profile.dpotential(M_PI - h)) /
                        (2.0 * h);
    const bool pass = mean_gap <= kMeanTol && std::abs(slope) <= 1e-10 &&
                      curv > 0.0 && !orb.degenerate;
    return {pass, "tail mean x1 off pi by " + fmt(mean_gap) + " (tol " +
                      fmt(kMeanTol) + "); U'(pi) = " + fmt(slope) +
                      ", U''(pi) = " + fmt(curv)};
  });

  // 7: the comparison bound machinery is sound and actually dominates the run
  guarded(7, [&]() -> std::pair<bool, std::string> {
    const ComparisonScan scan =
        comparison_selftest(1.0, 0.5, 2.0, 0.3, 1.0, 50.0);
    const EnergyReport er =
        energy_convergence(furuta_demo, furuta.profile, 0.2);
    const double gap_tol = 1e-6 * (1.0 + er.h0_shifted);
    const bool pass =
        scan.max_rel_dev <= kSelftestTol && er.comparison_gap <= gap_tol;
    return {pass, "selftest deviation " + fmt(scan.max_rel_dev) + " (tol " +
                      fmt(kSelftestTol) + "); energy bound gap " +
                      fmt(er.comparison_gap) + " (tol " + fmt(gap_tol) + ")"};
  });

  // 8: the decaying-disturbance counterexample reproduces exactly
  guarded(8, [&]() -> std::pair<bool, std::string> {
    const D4Result quiet = counterexample_run(false, 60.0);
    const D4Result driven = counterexample_run(true, 60.0);
    const double gap = std::abs(driven.t_doubling - kDoublingRef);
    const bool pass = quiet.traj.complete && driven.traj.complete &&
                      quiet.H_drift_rel <= kEnergyDriftTol &&
                      driven.t_doubling > 0.0 && gap <= kDoublingTol &&
                      driven.max_H > 2.0 * driven.H0;
    return {pass, "undisturbed drift " + fmt(quiet.H_drift_rel) +
                      "; energy doubles at t = " + fmt(driven.t_doubling) +
                      " (expected " + fmt(kDoublingRef) + " +- " +
                      fmt(kDoublingTol) + "), peak ratio " +
                      fmt(driven.max_H / driven.H0)};
  });

  // 9: a deliberate 1% immersion fault is caught by the library and by the
  // command line tool end to end
  guarded(9, [&]() -> std::pair<bool, std::string> {
    const InvarianceScan faulty =
        invariance_residual(furuta.profile, {-1.3, 1.3}, 3.0, 48, 33, 1.01);

    Scenario clean = demo_scenario("furuta");
    const std::string clean_path = "/tmp/orbistab_accept_clean.cfg";
    const std::string fault_path = "/tmp/orbistab_accept_fault.cfg";
    write_config_file(scenario_to_config(clean), clean_path);
    Scenario fault = clean;
    fault.verify.immersion_dk_scale = 1.01;
    write_config_file(scenario_to_config(fault), fault_path);

    const int rc_clean = run_cli_verify(clean_path);
    const int rc_fault = run_cli_verify(fault_path);
    const bool pass =
        faulty.max_scaled > kFaultFloor && rc_clean == 0 && rc_fault != 0;
    return {pass, "fault residual " + fmt(faulty.max_scaled) + " (floor " +
                      fmt(kFaultFloor) + "); verify exit codes clean " +
                      std::to_string(rc_clean) + ", faulted " +
                      std::to_string(rc_fault)};
  });

  // 10: the whole gate fits the time budget
  guarded(10, [&]() -> std::pair<bool, std::string> {
    const double elapsed = seconds_since(wall0);
    return {elapsed < kWallBudget, "wall time " + fmt(elapsed) + " s, budget " +
                                       fmt(kWallBudget) + " s"};
  });

  if (failures == 0)
    std::printf("acceptance: all 10 criteria passed\n");
  else
    std::printf("acceptance: %d criteria FAILED\n", failures);
  return failures;
}
