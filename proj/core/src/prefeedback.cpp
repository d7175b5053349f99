#include "orbistab/prefeedback.hpp"

#include <cmath>

namespace orbistab {

double schur_complement(const MechanicalSystem& sys, double x1) {
  const double mau = sys.m_au(x1);
  return sys.m_aa(x1) - mau * mau / sys.m_uu(x1);
}

double u_pl(const MechanicalSystem& sys, const State4& x, double u) {
  if (!x.finite() || !std::isfinite(u))
    throw DomainError(sys.name + ": non-finite state or input");
  const double x1 = x.x1;
  const double mau = sys.m_au(x1);
  const double muu = sys.m_uu(x1);
  const double unact = sys.c_a(x1) * x.x3 * x.x3 +
                       sys.c_u_bar(x1) * x.x4 * x.x4 + sys.dV_du(x1, x.x2);
  const double act = sys.c_q(x1) * x.x3 * x.x3 + sys.c_p(x1) * x.x3 * x.x4 +
                     sys.c_s(x1) * x.x4 * x.x4 + sys.dV_da(x1, x.x2);
  return schur_complement(sys, x1) * u + act - (mau / muu) * unact;
}

Eigen::Vector4d SpongForm::f(const State4& x) const {
  if (!x.finite()) throw DomainError(sys.name + ": non-finite state");
  const double x1 = x.x1;
  const double unact = sys.c_a(x1) * x.x3 * x.x3 +
                       sys.c_u_bar(x1) * x.x4 * x.x4 + sys.dV_du(x1, x.x2);
  return {x.x3, x.x4, -unact / sys.m_uu(x1), 0.0};
}

Eigen::Vector4d SpongForm::g(const State4& x) const {
  return {0.0, 0.0, -sys.m_au(x.x1) / sys.m_uu(x.x1), 1.0};
}

Eigen::Vector4d SpongForm::field(const State4& x, double u) const {
  return f(x) + g(x) * u;
}

SpongForm spong_form(const MechanicalSystem& sys) { return SpongForm{sys}; }

}  // namespace orbistab
