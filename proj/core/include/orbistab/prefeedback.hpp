#pragma once

#include "orbistab/mech_model.hpp"

namespace orbistab {

/// Control-affine normal form xdot = f(x) + g(x)*u obtained from the
/// collocated partially linearizing feedback, i.e. the input u commands the
/// actuated acceleration directly. Note the feedback is a coordinate-level
/// identity only: the transformed system retains no Lagrangian or passivity
/// structure, so nothing downstream may assume either.
struct SpongForm {
  MechanicalSystem sys;

  Eigen::Vector4d f(const State4& x) const;
  /// g = (0, 0, -m_au/m_uu, 1).
  Eigen::Vector4d g(const State4& x) const;
  Eigen::Vector4d field(const State4& x, double u) const;
};

/// Schur complement R = m_aa - m_au^2/m_uu of the inertia matrix.
double schur_complement(const MechanicalSystem& sys, double x1);

/// Torque realizing qdd_a = u: the collocated partial feedback linearization.
double u_pl(const MechanicalSystem& sys, const State4& x, double u);

SpongForm spong_form(const MechanicalSystem& sys);

}  // namespace orbistab
