#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace orbistab {

template <int N>
using Vec = Eigen::Matrix<double, N, 1>;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Non-finite or otherwise out-of-domain input.
struct DomainError : Error {
  using Error::Error;
};

/// The mapping s(x1) = m_uu + m_au*K' vanished; the control law is undefined there.
struct SingularityError : Error {
  using Error::Error;
};

/// A synthesis precondition failed (bad gains, s crossing zero, no potential minimum, ...).
struct SynthesisError : Error {
  using Error::Error;
};

/// Trajectory post-processing could not produce a meaningful answer.
struct AnalysisError : Error {
  using Error::Error;
};

/// Malformed config file, expression string, or CSV input.
struct ConfigError : Error {
  using Error::Error;
};

/// Closed interval [lo, hi] on the unactuated axis.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
  double clamp(double x) const { return x < lo ? lo : (x > hi ? hi : x); }
};

/// Reduce an angle to the branch (-pi, pi].
double wrap_angle(double a);

/// State of a 2-DOF system: unactuated angle, actuated angle, and their rates.
/// x1 lives on the real line; wrap_angle gives the circle representative.
struct State4 {
  double x1 = 0.0;
  double x2 = 0.0;
  double x3 = 0.0;
  double x4 = 0.0;

  Eigen::Vector4d vec() const { return {x1, x2, x3, x4}; }
  static State4 from(const Eigen::Vector4d& v) { return {v[0], v[1], v[2], v[3]}; }
  bool finite() const;
};

}  // namespace orbistab
