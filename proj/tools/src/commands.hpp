#pragma once

#include "scenario.hpp"

#include <iosfwd>
#include <string>

namespace orbistab::cli {

/// Post-run digest: what the demo narratives are stated in terms of.
/// Orbit fields are meaningful only when orbit_ok; a run that settles to the
/// potential minimum instead of an orbit is flagged degenerate.
struct RunSummary {
  std::string name;
  bool complete = false;
  std::string diagnostic;
  std::size_t samples = 0;
  double t_end = 0.0;

  bool orbit_ok = false;
  bool degenerate = false;
  std::string orbit_note;
  double period = 0.0;
  double amplitude[4] = {0, 0, 0, 0};
  double mean[4] = {0, 0, 0, 0};
  double crossing_spread = 0.0;
  int crossings = 0;

  double x1_min = 0.0, x1_max = 0.0;
  double max_abs_x3 = 0.0, max_abs_x4 = 0.0;
  double hx_end = 0.0;
  double hx_tail_variation = 0.0;

  double z_max = 0.0;
  double z_rate_fitted = 0.0;
  double z_rate_predicted = 0.0;
  bool z_vacuous = false;
};

RunSummary summarize_run(const Scenario& sc, const SynthesisProfile& profile,
                         const Trajectory& traj);
void write_summary(const RunSummary& s, std::ostream& os);

/// Runs the scenario, writes CSV/summary per the scenario's output paths and
/// prints the summary. Exit 0, or 2 when the run was cut short.
int cmd_simulate(const Scenario& sc, std::ostream& out);

/// Batch variation along one axis: "gamma" with values "g1:g2,...", "k" with
/// values "k,...", or "x0" with values "x1 x2 x3 x4; ...". Runs in parallel
/// (ORBISTAB_JOBS caps the workers) and emits one row per run in input
/// order. Exit 0, or 2 when any run was cut short.
int cmd_sweep(const Scenario& base, const std::string& axis,
              const std::string& values, const std::string& out_path,
              std::ostream& out);

/// Runs the scenario and the full certification battery against it; writes
/// the report as text (stdout and optional file) and CSV. Exit 0 when every
/// hard check passes, 1 otherwise, 2 when the run was cut short.
int cmd_verify(const Scenario& sc, std::ostream& out);

/// Decimates a trajectory CSV into plot-ready files next to out_prefix:
/// kind "timeseries" writes one (t, value) file per channel, kind "phase"
/// writes (x1, x3) and (x2, x4) files. At most 5000 rows each.
int cmd_plotdata(const std::string& csv_in, const std::string& kind,
                 const std::string& out_prefix, std::ostream& out);

/// Worker cap: ORBISTAB_JOBS clamped to [1, hardware_concurrency].
unsigned sweep_jobs();

}  // namespace orbistab::cli
