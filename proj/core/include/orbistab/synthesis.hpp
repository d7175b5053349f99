#pragma once

#include "orbistab/mech_model.hpp"
#include "orbistab/quadrature.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace orbistab {

/// Manifold generator: the actuated coordinate tracked as x2 = K(x1), with
/// the exact first and second derivatives. dK and d2K must be true
/// derivatives of K; construction of a SynthesisProfile cross-checks them by
/// finite differences and refuses inconsistent triples.
struct Generator {
  Profile K;
  Profile dK;
  Profile d2K;
  std::string name;
  std::map<std::string, double> params;
};

/// Generator for the rotary pendulum with free mapping s = -J*k1, k1 > 0:
/// K(x1) = -(1 + k1)/a1 * ln((1 + sin x1)/cos x1).
Generator furuta_generator(double a1, double k1);
Profile furuta_s(double J, double k1);

/// Generator for the two-link pendulum: K(x1) = -k2*x1, giving the mapping
/// s = c2 - k2*(c2 + c3*cos x1). The printed closed forms assume k2 = -1.
Generator pendubot_generator(double k2);
Profile pendubot_s(double c2, double c3, double k2);

/// Derive a generator from a chosen mapping s via K' = (s - m_uu)/m_au with
/// K(0) = 0, K by quadrature and K'' by differentiating that quotient. If ds
/// is empty, s is differentiated by central differences (step 1e-6).
Generator generator_from_s(const MechanicalSystem& sys, Profile s, Profile ds,
                           Interval domain);

/// All data the controller and the target oscillator need, frozen at
/// construction: the system, the generator, gains, the operating interval,
/// and cumulative quadrature tables for the target mass and potential.
/// Immutable after construction; safe to share across threads.
class SynthesisProfile {
 public:
  const MechanicalSystem& system() const { return sys_; }
  const Generator& generator() const { return gen_; }
  double gamma1() const { return gamma1_; }
  double gamma2() const { return gamma2_; }
  Interval operating() const { return operating_; }

  /// Free mapping s(x1) = m_uu + m_au*K'.
  double s(double x1) const { return s_(x1); }
  /// s(x1) with the singularity guard; throws SingularityError when
  /// |s| < 1e-8 * max(1, |m_uu|).
  double s_checked(double x1) const;

  /// Quadratic velocity coefficient of the target oscillator.
  double beta(double x1) const;
  /// Forcing term of the target oscillator.
  double rho(double x1) const;
  /// Target mass m = exp(-2 * int_0^x1 beta), from the quadrature table.
  double mass(double x1) const;
  /// Target potential U = -int_0^x1 rho * m, from the quadrature table.
  double potential(double x1) const;
  /// dU/dx1 and dm/dx1 consistent with the tables' interpolants.
  double dpotential(double x1) const;
  double dmass(double x1) const;

 private:
  using TablePtr = std::shared_ptr<const CumulativeIntegral>;

  SynthesisProfile(MechanicalSystem sys, Generator gen, Profile s,
                   double gamma1, double gamma2, Interval operating,
                   TablePtr beta_int, TablePtr rho_m_int);
  friend SynthesisProfile make_profile(const MechanicalSystem&, Generator,
                                       Profile, double, double, Interval,
                                       std::size_t);

  MechanicalSystem sys_;
  Generator gen_;
  Profile s_;
  double gamma1_, gamma2_;
  Interval operating_;
  TablePtr beta_int_;   // B(x) = int_0^x beta
  TablePtr rho_m_int_;  // P(x) = int_0^x rho * m
};

/// Builds and validates a profile. Throws SynthesisError on non-positive
/// gains, an inconsistent generator (dK/d2K not matching K by finite
/// differences), s inconsistent with m_uu + m_au*K', s crossing zero in the
/// operating interval (the message names the location), or a non-finite or
/// non-positive target mass on the interval.
SynthesisProfile make_profile(const MechanicalSystem& sys, Generator gen,
                              Profile s, double gamma1, double gamma2,
                              Interval operating,
                              std::size_t table_nodes = 4096);

/// Off-manifold coordinates z = (x2 - K(x1), x4 - K'(x1)*x3).
Eigen::Vector2d off_manifold(const SynthesisProfile& p, const State4& x);

/// The stabilizing input for the partially linearized system.
double control_u(const SynthesisProfile& p, const State4& x);

/// Same control expressed in (x, z); coincides with control_u when
/// z = off_manifold(x).
double v_control(const SynthesisProfile& p, const State4& x,
                 const Eigen::Vector2d& z);

/// Immersion of the target coordinates: (xi1, K(xi1), xi2, K'(xi1)*xi2).
State4 immersion(const SynthesisProfile& p, const Eigen::Vector2d& xi);

/// Critical point of the target potential with its classification from the
/// sign of U'' (central differences): +1 minimum, -1 maximum, 0 degenerate.
struct PotentialCritical {
  double x1 = 0.0;
  double U = 0.0;
  int curvature_sign = 0;

  bool is_minimum() const { return curvature_sign > 0; }
};

/// All interior critical points of U on `range`, located by bisection on U'
/// to 1e-10. Throws SynthesisError if the scan finds no minimum.
std::vector<PotentialCritical> find_potential_minima(const SynthesisProfile& p,
                                                     Interval range,
                                                     int scan_points = 2000);

}  // namespace orbistab
