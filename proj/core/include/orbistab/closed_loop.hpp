#pragma once

#include "orbistab/integrate.hpp"
#include "orbistab/prefeedback.hpp"
#include "orbistab/synthesis.hpp"

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace orbistab {

/// Which form of the closed loop is integrated. All three are the same flow
/// in different coordinates; simulating each is how that equivalence gets
/// checked.
enum class Representation {
  EulerLagrange,  // torque through the full Euler-Lagrange dynamics
  Spong,          // partially linearized form, x only
  OffManifold     // (z, x) form with linear z dynamics driving x
};

/// Closed-loop run: the state path plus the controller's view of it
/// (off-manifold coordinates z, applied input u, target energy Hx along the
/// run). Read-back trajectories from CSV carry no derivative channel, so
/// interpolation and crossing detection are only available on simulated ones.
struct Trajectory {
  RawTrajectory<4> path;
  std::vector<Eigen::Vector2d> z;
  std::vector<double> u;
  std::vector<double> Hx;
  Representation representation = Representation::Spong;

  std::size_t size() const { return path.size(); }
  bool complete() const { return path.complete; }
  const std::string& diagnostic() const { return path.diagnostic; }
  State4 state(std::size_t i) const { return State4::from(path.x[i]); }
};

/// Integrate the closed loop from x0. A singularity of the mapping s or step
/// underflow truncates the run (complete() == false) rather than throwing.
Trajectory simulate_closed_loop(const SynthesisProfile& profile,
                                const State4& x0, const IntegratorConfig& cfg,
                                Representation rep = Representation::Spong);

/// Scalar section through the state space, crossed where value(x) = 0.
struct Section {
  std::function<double(const State4&)> value;
  int direction = +1;
};

struct Crossing {
  double t = 0.0;
  State4 state;
  int direction = 0;
};

/// Section crossings localized by bisection on the interpolant.
std::vector<Crossing> poincare_crossings(const Trajectory& traj,
                                         const Section& section,
                                         double t_tol = 1e-9);

/// Steady-state summary from the trailing `tail_fraction` of a run, using
/// ascending crossings of x3 = 0 as the cycle marker. A run that has settled
/// to the equilibrium instead of an orbit is reported with degenerate = true.
/// Throws AnalysisError when the tail holds fewer than 5 crossings (and the
/// run is not degenerate).
struct OrbitSummary {
  double period = 0.0;
  std::array<double, 4> amplitude{};  // half peak-to-peak per coordinate
  std::array<double, 4> mean{};       // time average per coordinate
  double tail_start = 0.0;
  int crossings_used = 0;
  double crossing_spread = 0.0;  // max - min crossing interval
  bool converged = false;        // spread within 1% of the period
  bool degenerate = false;
};

OrbitSummary extract_steady_orbit(const Trajectory& traj,
                                  double tail_fraction = 0.2);

/// CSV columns: t,x1,x2,x3,x4,z1,z2,u,Hx; 17 significant digits, LF line
/// endings. Identical runs serialize to identical bytes.
void write_trajectory_csv(const Trajectory& traj, std::ostream& os);
void write_trajectory_csv(const Trajectory& traj, const std::string& path);
Trajectory read_trajectory_csv(std::istream& is);
Trajectory read_trajectory_csv(const std::string& path);

}  // namespace orbistab
