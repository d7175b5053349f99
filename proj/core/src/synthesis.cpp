#include "orbistab/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <utility>

namespace orbistab {

namespace {

[[noreturn]] void synth_fail(const std::string& msg) {
  throw SynthesisError(msg);
}

std::string at_x1(double x1) {
  std::ostringstream os;
  os << "x1 = " << x1;
  return os.str();
}

double guarded_s(const MechanicalSystem& sys, const Profile& s, double x1) {
  const double v = s(x1);
  if (std::abs(v) < 1e-8 * std::max(1.0, std::abs(sys.m_uu(x1)))) {
    std::ostringstream os;
    os << sys.name << ": mapping s vanishes at " << at_x1(x1)
       << "; the control law is undefined there";
    throw SingularityError(os.str());
  }
  return v;
}

double beta_value(const MechanicalSystem& sys, const Generator& gen,
                  const Profile& s, double x1) {
  const double dk = gen.dK(x1);
  return -(sys.c_u_bar(x1) * dk * dk + sys.c_a(x1) +
           sys.m_au(x1) * gen.d2K(x1)) /
         guarded_s(sys, s, x1);
}

double rho_value(const MechanicalSystem& sys, const Generator& gen,
                 const Profile& s, double x1) {
  return -sys.dV_du(x1, gen.K(x1)) / guarded_s(sys, s, x1);
}

}  // namespace

Generator furuta_generator(double a1, double k1) {
  if (!(a1 > 0.0) || !std::isfinite(a1)) synth_fail("furuta generator: a1 must be positive");
  if (!(k1 > 0.0) || !std::isfinite(k1)) synth_fail("furuta generator: k1 must be positive");
  const double c = -(1.0 + k1) / a1;
  Generator gen;
  gen.name = "furuta-k1";
  gen.params = {{"k1", k1}, {"a1", a1}};
  gen.K = [c](double x1) {
    return c * std::log((1.0 + std::sin(x1)) / std::cos(x1));
  };
  gen.dK = [c](double x1) { return c / std::cos(x1); };
  gen.d2K = [c](double x1) {
    const double sec = 1.0 / std::cos(x1);
    return c * sec * sec * std::sin(x1);
  };
  return gen;
}

Profile furuta_s(double J, double k1) {
  if (!(J > 0.0) || !(k1 > 0.0)) synth_fail("furuta mapping: J and k1 must be positive");
  return [J, k1](double) { return -J * k1; };
}

Generator pendubot_generator(double k2) {
  if (!std::isfinite(k2) || k2 == 0.0)
    synth_fail("pendubot generator: k2 must be finite and nonzero");
  Generator gen;
  gen.name = "pendubot-k2";
  gen.params = {{"k2", k2}};
  gen.K = [k2](double x1) { return -k2 * x1; };
  gen.dK = [k2](double) { return -k2; };
  gen.d2K = [](double) { return 0.0; };
  return gen;
}

Profile pendubot_s(double c2, double c3, double k2) {
  if (!(c2 > 0.0) || !(c3 > 0.0)) synth_fail("pendubot mapping: c2, c3 must be positive");
  return [c2, c3, k2](double x1) {
    return c2 - k2 * (c2 + c3 * std::cos(x1));
  };
}

Generator generator_from_s(const MechanicalSystem& sys, Profile s, Profile ds,
                           Interval domain) {
  if (!s) synth_fail("generator_from_s: empty mapping");
  if (!ds) {
    const Profile s_copy = s;
    ds = [s_copy](double x1) {
      // cbrt(eps)-scaled step balances roundoff against truncation
      const double h = 6e-6 * (1.0 + std::abs(x1));
      return (s_copy(x1 + h) - s_copy(x1 - h)) / (2.0 * h);
    };
  }

  // K' = (s - m_uu)/m_au, differentiated once more by the quotient rule
  const MechanicalSystem sys_c = sys;
  const Profile s_c = s, ds_c = ds;
  Profile dK = [sys_c, s_c](double x1) {
    return (s_c(x1) - sys_c.m_uu(x1)) / sys_c.m_au(x1);
  };
  Profile d2K = [sys_c, s_c, ds_c](double x1) {
    const double mau = sys_c.m_au(x1);
    const double num = s_c(x1) - sys_c.m_uu(x1);
    const double dnum = ds_c(x1) - sys_c.dm_uu(x1);
    return (dnum * mau - num * sys_c.dm_au(x1)) / (mau * mau);
  };

  auto table = std::make_shared<CumulativeIntegral>(dK, 0.0, domain, 4096,
                                                    1e-12);
  Generator gen;
  gen.name = "from-s";
  gen.K = [table](double x1) { return table->value(x1); };
  gen.dK = std::move(dK);
  gen.d2K = std::move(d2K);
  return gen;
}

SynthesisProfile::SynthesisProfile(MechanicalSystem sys, Generator gen,
                                   Profile s, double gamma1, double gamma2,
                                   Interval operating, TablePtr beta_int,
                                   TablePtr rho_m_int)
    : sys_(std::move(sys)),
      gen_(std::move(gen)),
      s_(std::move(s)),
      gamma1_(gamma1),
      gamma2_(gamma2),
      operating_(operating),
      beta_int_(std::move(beta_int)),
      rho_m_int_(std::move(rho_m_int)) {}

double SynthesisProfile::s_checked(double x1) const {
  return guarded_s(sys_, s_, x1);
}

double SynthesisProfile::beta(double x1) const {
  return beta_value(sys_, gen_, s_, x1);
}

double SynthesisProfile::rho(double x1) const {
  return rho_value(sys_, gen_, s_, x1);
}

double SynthesisProfile::mass(double x1) const {
  return std::exp(-2.0 * beta_int_->value(x1));
}

double SynthesisProfile::dmass(double x1) const {
  return -2.0 * beta_int_->derivative(x1) * mass(x1);
}

double SynthesisProfile::potential(double x1) const {
  return -rho_m_int_->value(x1);
}

double SynthesisProfile::dpotential(double x1) const {
  return -rho_m_int_->derivative(x1);
}

namespace {

// bisect h to tol_x on [a, b] where h(a), h(b) have opposite signs
double bisect(const std::function<double(double)>& h, double a, double b,
              double tol_x) {
  double fa = h(a);
  if (fa == 0.0) return a;
  if (h(b) == 0.0) return b;
  while (b - a > tol_x) {
    const double m = 0.5 * (a + b);
    const double fm = h(m);
    if (fm == 0.0) return m;
    if ((fa < 0.0) != (fm < 0.0)) {
      b = m;
    } else {
      a = m;
      fa = fm;
    }
  }
  return 0.5 * (a + b);
}

void check_generator_consistency(const Generator& gen, Interval operating) {
  const int n = 101;
  const double dx = operating.length() / (n + 1);
  const double h = std::min(1e-6, dx / 16.0);
  for (int i = 1; i <= n; ++i) {
    const double x = operating.lo + i * dx;
    const double fd_dk = (gen.K(x + h) - gen.K(x - h)) / (2.0 * h);
    if (std::abs(fd_dk - gen.dK(x)) > 1e-5 * (1.0 + std::abs(gen.dK(x))))
      synth_fail("generator '" + gen.name +
                 "': dK is not the derivative of K near " + at_x1(x));
    const double fd_d2k = (gen.dK(x + h) - gen.dK(x - h)) / (2.0 * h);
    if (std::abs(fd_d2k - gen.d2K(x)) > 1e-5 * (1.0 + std::abs(gen.d2K(x))))
      synth_fail("generator '" + gen.name +
                 "': d2K is not the derivative of dK near " + at_x1(x));
  }
}

}  // namespace

SynthesisProfile make_profile(const MechanicalSystem& sys, Generator gen,
                              Profile s, double gamma1, double gamma2,
                              Interval operating, std::size_t table_nodes) {
  if (!(gamma1 > 0.0) || !(gamma2 > 0.0) || !std::isfinite(gamma1) ||
      !std::isfinite(gamma2))
    synth_fail("gains gamma1, gamma2 must be positive and finite");
  if (!(operating.hi > operating.lo))
    synth_fail("operating interval is empty");
  if (!gen.K || !gen.dK || !gen.d2K) synth_fail("generator has empty profiles");
  if (!s) synth_fail("mapping s is empty");

  check_generator_consistency(gen, operating);

  // s must agree with m_uu + m_au*K' everywhere we will trust it
  const int n_scan = 2048;
  const double dx = operating.length() / (n_scan - 1);
  const auto s_residual = [&](double x) {
    return s(x) - (sys.m_uu(x) + sys.m_au(x) * gen.dK(x));
  };
  int last_sign = 0;
  double prev_x = operating.lo;
  for (int i = 0; i < n_scan; ++i) {
    const double x = operating.lo + i * dx;
    const double sv = s(x);
    if (!std::isfinite(sv))
      synth_fail(sys.name + ": mapping s is non-finite at " + at_x1(x));
    if (std::abs(s_residual(x)) > 1e-9 * (1.0 + std::abs(sv)))
      synth_fail(sys.name + ": mapping s does not equal m_uu + m_au*K' at " +
                 at_x1(x));

    const double guard = 1e-8 * std::max(1.0, std::abs(sys.m_uu(x)));
    if (std::abs(sv) < guard)
      synth_fail(sys.name + ": mapping s vanishes near " + at_x1(x) +
                 "; shrink the operating interval or change the generator");
    const int sign = sv > 0.0 ? 1 : -1;
    if (last_sign != 0 && sign != last_sign) {
      const double xc = bisect([&s](double t) { return s(t); }, prev_x, x, 1e-12);
      synth_fail(sys.name + ": mapping s crosses zero near " + at_x1(xc) +
                 "; shrink the operating interval or change the generator");
    }
    last_sign = sign;
    prev_x = x;
  }

  // integrands capture their own copies so the tables outlive any one profile
  std::shared_ptr<const CumulativeIntegral> beta_table, rho_m_table;
  try {
    beta_table = std::make_shared<const CumulativeIntegral>(
        [sys, gen, s](double x) { return beta_value(sys, gen, s, x); }, 0.0,
        operating, table_nodes, 1e-10);
    const auto bt = beta_table;
    rho_m_table = std::make_shared<const CumulativeIntegral>(
        [sys, gen, s, bt](double x) {
          return rho_value(sys, gen, s, x) * std::exp(-2.0 * bt->value(x));
        },
        0.0, operating, table_nodes, 1e-10);
  } catch (const DomainError& e) {
    synth_fail(sys.name + ": quadrature table construction failed: " +
               e.what());
  }

  SynthesisProfile profile(sys, std::move(gen), std::move(s), gamma1, gamma2,
                           operating, std::move(beta_table),
                           std::move(rho_m_table));

  for (int i = 0; i < n_scan; ++i) {
    const double x = operating.lo + i * dx;
    const double m = profile.mass(x);
    if (!std::isfinite(m) || !(m > 0.0))
      synth_fail(sys.name +
                 ": target mass is not finite and positive at " + at_x1(x));
    if (!std::isfinite(profile.potential(x)))
      synth_fail(sys.name + ": target potential is non-finite at " + at_x1(x));
  }

  return profile;
}

Eigen::Vector2d off_manifold(const SynthesisProfile& p, const State4& x) {
  return {x.x2 - p.generator().K(x.x1),
          x.x4 - p.generator().dK(x.x1) * x.x3};
}

double control_u(const SynthesisProfile& p, const State4& x) {
  if (!x.finite()) throw DomainError("control_u: non-finite state");
  const MechanicalSystem& sys = p.system();
  const double x1 = x.x1;
  const double s = p.s_checked(x1);
  const double dk = p.generator().dK(x1);
  const double muu = sys.m_uu(x1);
  const Eigen::Vector2d z = off_manifold(p, x);
  return -(dk * (sys.c_u_bar(x1) * x.x4 * x.x4 + sys.c_a(x1) * x.x3 * x.x3) -
           muu * p.generator().d2K(x1) * x.x3 * x.x3 +
           dk * sys.dV_du(x1, x.x2) +
           muu * (p.gamma1() * z[0] + p.gamma2() * z[1])) /
         s;
}

double v_control(const SynthesisProfile& p, const State4& x,
                 const Eigen::Vector2d& z) {
  if (!x.finite()) throw DomainError("v_control: non-finite state");
  const MechanicalSystem& sys = p.system();
  const double x1 = x.x1;
  const double s = p.s_checked(x1);
  const double dk = p.generator().dK(x1);
  const double muu = sys.m_uu(x1);
  return (-dk * (sys.c_u_bar(x1) * x.x4 * x.x4 + sys.c_a(x1) * x.x3 * x.x3) +
          muu * p.generator().d2K(x1) * x.x3 * x.x3 -
          dk * sys.dV_du(x1, x.x2)) /
             s -
         muu * (p.gamma1() * z[0] + p.gamma2() * z[1]) / s;
}

State4 immersion(const SynthesisProfile& p, const Eigen::Vector2d& xi) {
  return {xi[0], p.generator().K(xi[0]), xi[1],
          p.generator().dK(xi[0]) * xi[1]};
}

std::vector<PotentialCritical> find_potential_minima(const SynthesisProfile& p,
                                                     Interval range,
                                                     int scan_points) {
  if (scan_points < 3) throw DomainError("find_potential_minima: scan too coarse");
  if (!(range.hi > range.lo))
    throw DomainError("find_potential_minima: empty range");

  // exact slope -rho*m is smoother than the table derivative near roots
  const auto dU = [&p](double x) { return -p.rho(x) * p.mass(x); };

  std::vector<PotentialCritical> found;
  const double dx = range.length() / (scan_points - 1);
  double xa = range.lo, fa = dU(xa);
  for (int i = 1; i < scan_points; ++i) {
    const double xb = range.lo + i * dx;
    const double fb = dU(xb);
    const bool bracket = (fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0) ||
                         (fa == 0.0 && i == 1) || fb == 0.0;
    if (bracket) {
      const double root = (fa == 0.0)   ? xa
                          : (fb == 0.0) ? xb
                                        : bisect(dU, xa, xb, 1e-10);
      if (root > range.lo + 1e-12 && root < range.hi - 1e-12) {
        const double h = 1e-5 * std::max(1.0, range.length() / 2.0);
        const double curv = (dU(root + h) - dU(root - h)) / (2.0 * h);
        PotentialCritical c;
        c.x1 = root;
        c.U = p.potential(root);
        c.curvature_sign = std::abs(curv) < 1e-10 ? 0 : (curv > 0.0 ? 1 : -1);
        if (found.empty() || std::abs(found.back().x1 - root) > 1e-8)
          found.push_back(c);
      }
    }
    xa = xb;
    fa = fb;
  }

  const bool has_min = std::any_of(found.begin(), found.end(),
                                   [](const auto& c) { return c.is_minimum(); });
  if (!has_min)
    synth_fail(p.system().name +
               ": target potential has no interior minimum on the scanned "
               "range; the synthesis cannot produce an oscillation there");
  return found;
}

}  // namespace orbistab
