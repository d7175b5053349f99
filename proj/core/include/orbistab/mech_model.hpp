#pragma once

#include "orbistab/types.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace orbistab {

/// Scalar function of the unactuated angle x1.
using Profile = std::function<double(double)>;
/// Scalar function of the configuration (x1, x2).
using ConfigField = std::function<double(double, double)>;

/// A 2-DOF underactuated Euler-Lagrange system whose inertia matrix depends
/// only on the unactuated coordinate. With q = (q_u, q_a) and torque tau on
/// the actuated joint, the equations of motion are
///
///   m_uu*qdd_u + m_au*qdd_a + c_a*qd_u^2 + c_u_bar*qd_a^2 + dV/dq_u = 0
///   m_au*qdd_u + m_aa*qdd_a + c_q*qd_u^2 + c_p*qd_u*qd_a + c_s*qd_a^2
///                                                        + dV/dq_a = tau
///
/// All inertia and Coriolis profiles are functions of x1 alone; the potential
/// may depend on both configuration variables. Derivative profiles must be
/// exact: they feed the synthesis formulas, not just diagnostics.
struct MechanicalSystem {
  std::string name;

  Profile m_uu, m_au, m_aa;
  Profile dm_uu, dm_au, dm_aa;  // d/dx1

  Profile c_a;      // unactuated row, qd_u^2
  Profile c_u_bar;  // unactuated row, qd_a^2
  Profile c_q;      // actuated row, qd_u^2
  Profile c_p;      // actuated row, qd_u*qd_a
  Profile c_s;      // actuated row, qd_a^2

  ConfigField V;
  ConfigField dV_du;     // dV/dx1
  ConfigField dV_da;     // dV/dx2
  ConfigField d2V_duda;  // d2V/(dx1 dx2)

  std::map<std::string, double> params;

  double det_inertia(double x1) const;
};

/// Accelerations under torque tau: returns (x3, x4, qdd_u, qdd_a).
/// Throws DomainError on non-finite input or a singular inertia matrix.
Eigen::Vector4d eval_el_dynamics(const MechanicalSystem& sys, const State4& x,
                                 double tau);

/// Rotary inverted pendulum: arm angle is actuated, pendulum angle x1 is not.
/// m, l: pendulum mass and distance to its center of mass; r: arm length;
/// J: pendulum inertia about the pivot; J_a: arm inertia contribution such
/// that m_aa = J_a + J*(a2 + sin^2 x1).
MechanicalSystem furuta_system(double m, double l, double r, double J,
                               double J_a, double gravity = 9.81);

/// Two-link planar pendulum driven at the shoulder; the elbow angle is x1.
MechanicalSystem pendubot_system(double m1, double m2, double l1, double l2,
                                 double lc1, double lc2, double I1, double I2,
                                 double gravity = 9.81);

/// Grid scan of the standing assumptions on [range.lo, range.hi].
///
/// m_au must keep one sign and stay away from zero: a sign change or a
/// magnitude below `threshold` is a hard violation. c_u_bar is scanned the
/// same way but isolated zeros are common in practice, so its flag is
/// reported without failing the aggregate verdict. pd_margin is the smallest
/// eigenvalue of the inertia matrix over the grid.
struct AssumptionReport {
  double m_uu_min = 0.0;
  double pd_margin = 0.0;
  double m_au_min_abs = 0.0;
  double c_u_bar_min_abs = 0.0;
  bool m_au_sign_change = false;
  bool c_u_bar_sign_change = false;
  bool m_au_ok = false;
  bool c_u_bar_ok = false;
  bool positive_definite = false;
  double threshold = 0.0;
  int grid_points = 0;

  bool pass() const { return m_au_ok && positive_definite; }
};

AssumptionReport check_assumptions(const MechanicalSystem& sys, Interval range,
                                   int grid_points = 1001,
                                   double threshold = 1e-9);

}  // namespace orbistab
