#pragma once

#include "orbistab/integrate.hpp"
#include "orbistab/synthesis.hpp"

namespace orbistab {

/// Reduced target dynamics xi_dot = (xi2, rho + beta*xi2^2).
Eigen::Vector2d target_field(const SynthesisProfile& p,
                             const Eigen::Vector2d& xi);

/// Conserved energy H = 0.5*m*xi2^2 + U of the target oscillator.
double hamiltonian(const SynthesisProfile& p, const Eigen::Vector2d& xi);

/// Gradient of H, with the xi1 slope taken from the quadrature tables so it
/// is exactly consistent with hamiltonian().
Eigen::Vector2d grad_hamiltonian(const SynthesisProfile& p,
                                 const Eigen::Vector2d& xi);

/// The same dynamics in Hamiltonian form J(xi1)*grad H with
/// J = [[0, 1/m], [-1/m, 0]]. Agrees with target_field up to table
/// interpolation error; the factorization is what the energy argument needs.
Eigen::Vector2d hamiltonian_field(const SynthesisProfile& p,
                                  const Eigen::Vector2d& xi);

/// Auxiliary damped copy eta_dot = (J - r*I)*grad H, which dissipates H at
/// the rate -r*|grad H|^2 and is the standard contrast to the undamped flow.
Eigen::Vector2d damped_aux_field(const SynthesisProfile& p,
                                 const Eigen::Vector2d& eta, double r_damp);

/// A closed orbit of the target system through xi0.
///
/// The orbit is identified by its energy level around the potential minimum
/// nearest to xi0. Throws AnalysisError when the level is degenerate (the
/// point orbit at the minimum). A level set that reaches another critical
/// point or leaves the scanned range is reported through `warning` instead,
/// since the flow is then not provably periodic.
struct OrbitLevel {
  double energy = 0.0;
  double x1_star = 0.0;        // potential minimum organizing the orbit
  double x1_left = 0.0;        // turning points at this energy
  double x1_right = 0.0;
  double period = 0.0;
  Eigen::Vector2d start{0.0, 0.0};
  std::string warning;
};

OrbitLevel orbit_from_ic(const SynthesisProfile& p, const Eigen::Vector2d& xi0,
                         Interval scan_range, double t_max = 1000.0);

/// Period of the closed orbit through xi0 from successive same-direction
/// crossings of the section xi2 = 0 (or xi1 = c if `use_xi1_section`).
double orbit_period(const SynthesisProfile& p, const Eigen::Vector2d& xi0,
                    bool use_xi1_section, double section_value,
                    double t_max = 1000.0);

}  // namespace orbistab
