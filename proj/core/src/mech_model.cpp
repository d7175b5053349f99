#include "orbistab/mech_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace orbistab {

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * M_PI;
  double r = std::fmod(a + M_PI, two_pi);
  if (r <= 0.0) r += two_pi;
  return r - M_PI;
}

bool State4::finite() const {
  return std::isfinite(x1) && std::isfinite(x2) && std::isfinite(x3) &&
         std::isfinite(x4);
}

double MechanicalSystem::det_inertia(double x1) const {
  const double mau = m_au(x1);
  return m_uu(x1) * m_aa(x1) - mau * mau;
}

Eigen::Vector4d eval_el_dynamics(const MechanicalSystem& sys, const State4& x,
                                 double tau) {
  if (!x.finite() || !std::isfinite(tau))
    throw DomainError(sys.name + ": non-finite state or torque");

  const double muu = sys.m_uu(x.x1);
  const double mau = sys.m_au(x.x1);
  const double maa = sys.m_aa(x.x1);
  const double det = muu * maa - mau * mau;
  if (!(std::abs(det) > 0.0)) {
    std::ostringstream os;
    os << sys.name << ": singular inertia matrix at x1 = " << x.x1;
    throw DomainError(os.str());
  }

  const double b_u = -(sys.c_a(x.x1) * x.x3 * x.x3 +
                       sys.c_u_bar(x.x1) * x.x4 * x.x4 +
                       sys.dV_du(x.x1, x.x2));
  const double b_a = tau - (sys.c_q(x.x1) * x.x3 * x.x3 +
                            sys.c_p(x.x1) * x.x3 * x.x4 +
                            sys.c_s(x.x1) * x.x4 * x.x4 +
                            sys.dV_da(x.x1, x.x2));

  return {x.x3, x.x4, (maa * b_u - mau * b_a) / det,
          (muu * b_a - mau * b_u) / det};
}

namespace {

void require_positive(const char* what, double v) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream os;
    os << "system parameter " << what << " must be positive, got " << v;
    throw DomainError(os.str());
  }
}

}  // namespace

MechanicalSystem furuta_system(double m, double l, double r, double J,
                               double J_a, double gravity) {
  require_positive("m", m);
  require_positive("l", l);
  require_positive("r", r);
  require_positive("J", J);
  require_positive("J_a", J_a);
  require_positive("gravity", gravity);

  const double a1 = m * r * l / J;
  const double a2 = (m * r * r + J_a) / J;
  const double a3 = m * gravity * l;

  MechanicalSystem sys;
  sys.name = "furuta";
  sys.m_uu = [J](double) { return J; };
  sys.m_au = [J, a1](double x1) { return J * a1 * std::cos(x1); };
  sys.m_aa = [J, a2](double x1) {
    const double s = std::sin(x1);
    return J * (a2 + s * s);
  };
  sys.dm_uu = [](double) { return 0.0; };
  sys.dm_au = [J, a1](double x1) { return -J * a1 * std::sin(x1); };
  sys.dm_aa = [J](double x1) { return J * std::sin(2.0 * x1); };

  sys.c_a = [](double) { return 0.0; };
  sys.c_u_bar = [J](double x1) { return -J * std::sin(x1) * std::cos(x1); };
  sys.c_q = [J, a1](double x1) { return -J * a1 * std::sin(x1); };
  sys.c_p = [J](double x1) { return J * std::sin(2.0 * x1); };
  sys.c_s = [](double) { return 0.0; };

  sys.V = [a3](double x1, double) { return a3 * std::cos(x1); };
  sys.dV_du = [a3](double x1, double) { return -a3 * std::sin(x1); };
  sys.dV_da = [](double, double) { return 0.0; };
  sys.d2V_duda = [](double, double) { return 0.0; };

  sys.params = {{"m", m},   {"l", l},   {"r", r},   {"J", J},
                {"J_a", J_a}, {"gravity", gravity}, {"a1", a1},
                {"a2", a2}, {"a3", a3}};
  return sys;
}

MechanicalSystem pendubot_system(double m1, double m2, double l1, double l2,
                                 double lc1, double lc2, double I1, double I2,
                                 double gravity) {
  require_positive("m1", m1);
  require_positive("m2", m2);
  require_positive("l1", l1);
  require_positive("l2", l2);
  require_positive("lc1", lc1);
  require_positive("lc2", lc2);
  require_positive("I1", I1);
  require_positive("I2", I2);
  require_positive("gravity", gravity);

  const double c1 = m1 * lc1 * lc1 + m2 * l1 * l1 + I1;
  const double c2 = m2 * lc2 * lc2 + I2;
  const double c3 = m2 * l1 * lc2;
  const double c4 = m1 * lc1 + m2 * l1;
  const double c5 = m2 * lc2;

  MechanicalSystem sys;
  sys.name = "pendubot";
  sys.m_uu = [c2](double) { return c2; };
  sys.m_au = [c2, c3](double x1) { return c2 + c3 * std::cos(x1); };
  sys.m_aa = [c1, c2, c3](double x1) {
    return c1 + c2 + 2.0 * c3 * std::cos(x1);
  };
  sys.dm_uu = [](double) { return 0.0; };
  sys.dm_au = [c3](double x1) { return -c3 * std::sin(x1); };
  sys.dm_aa = [c3](double x1) { return -2.0 * c3 * std::sin(x1); };

  sys.c_a = [](double) { return 0.0; };
  sys.c_u_bar = [c3](double x1) { return c3 * std::sin(x1); };
  sys.c_q = [c3](double x1) { return -c3 * std::sin(x1); };
  sys.c_p = [c3](double x1) { return -2.0 * c3 * std::sin(x1); };
  sys.c_s = [](double) { return 0.0; };

  const double g = gravity;
  sys.V = [c4, c5, g](double x1, double x2) {
    return -c4 * g * std::cos(x2) - c5 * g * std::cos(x2 + x1);
  };
  sys.dV_du = [c5, g](double x1, double x2) {
    return c5 * g * std::sin(x2 + x1);
  };
  sys.dV_da = [c4, c5, g](double x1, double x2) {
    return c4 * g * std::sin(x2) + c5 * g * std::sin(x2 + x1);
  };
  sys.d2V_duda = [c5, g](double x1, double x2) {
    return c5 * g * std::cos(x2 + x1);
  };

  sys.params = {{"m1", m1}, {"m2", m2}, {"l1", l1},  {"l2", l2},
                {"lc1", lc1}, {"lc2", lc2}, {"I1", I1}, {"I2", I2},
                {"gravity", gravity}, {"c1", c1}, {"c2", c2}, {"c3", c3},
                {"c4", c4}, {"c5", c5}};
  return sys;
}

AssumptionReport check_assumptions(const MechanicalSystem& sys, Interval range,
                                   int grid_points, double threshold) {
  if (grid_points < 2) throw DomainError("check_assumptions: need >= 2 grid points");
  if (!(range.hi > range.lo))
    throw DomainError("check_assumptions: empty interval");

  AssumptionReport rep;
  rep.threshold = threshold;
  rep.grid_points = grid_points;
  rep.m_uu_min = std::numeric_limits<double>::infinity();
  rep.pd_margin = std::numeric_limits<double>::infinity();
  rep.m_au_min_abs = std::numeric_limits<double>::infinity();
  rep.c_u_bar_min_abs = std::numeric_limits<double>::infinity();

  int last_sign_mau = 0, last_sign_cu = 0;
  const auto sign_of = [](double v) { return (v > 0.0) - (v < 0.0); };
  const double dx = range.length() / (grid_points - 1);
  for (int i = 0; i < grid_points; ++i) {
    const double x1 = range.lo + i * dx;
    const double muu = sys.m_uu(x1);
    const double mau = sys.m_au(x1);
    const double maa = sys.m_aa(x1);
    const double cu = sys.c_u_bar(x1);

    rep.m_uu_min = std::min(rep.m_uu_min, muu);
    rep.m_au_min_abs = std::min(rep.m_au_min_abs, std::abs(mau));
    rep.c_u_bar_min_abs = std::min(rep.c_u_bar_min_abs, std::abs(cu));

    // smaller eigenvalue of the symmetric 2x2 inertia matrix
    const double tr = muu + maa;
    const double gap = std::hypot(muu - maa, 2.0 * mau);
    rep.pd_margin = std::min(rep.pd_margin, 0.5 * (tr - gap));

    if (const int s = sign_of(mau); s != 0) {
      if (last_sign_mau != 0 && s != last_sign_mau) rep.m_au_sign_change = true;
      last_sign_mau = s;
    }
    if (const int s = sign_of(cu); s != 0) {
      if (last_sign_cu != 0 && s != last_sign_cu) rep.c_u_bar_sign_change = true;
      last_sign_cu = s;
    }
  }

  rep.m_au_ok = !rep.m_au_sign_change && rep.m_au_min_abs >= threshold;
  rep.c_u_bar_ok = !rep.c_u_bar_sign_change && rep.c_u_bar_min_abs >= threshold;
  rep.positive_definite = rep.pd_margin > 0.0;
  return rep;
}

}  // namespace orbistab
