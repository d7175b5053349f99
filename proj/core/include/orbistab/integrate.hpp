#pragma once

#include "orbistab/types.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

namespace orbistab {

enum class Method { RK4Fixed, RK45Adaptive };

struct IntegratorConfig {
  Method method = Method::RK45Adaptive;
  double t_end = 30.0;
  double h = 1e-3;       // fixed-step size
  double rel_tol = 1e-9;
  double abs_tol = 1e-11;
  double h_init = 1e-4;
  double h_max = 2e-2;   // also bounds the dense-output error, keep modest
  double h_min = 1e-14;  // below this the run is cut short
  int stride = 1;        // keep every stride-th accepted step
};

/// Sampled solution with the field value at each sample, so values between
/// samples come from cubic Hermite interpolation. `complete` is false when
/// the run was cut short; `diagnostic` then says why.
template <int N>
struct RawTrajectory {
  std::vector<double> t;
  std::vector<Vec<N>> x;
  std::vector<Vec<N>> xdot;
  bool complete = true;
  std::string diagnostic;

  std::size_t size() const { return t.size(); }

  std::size_t segment_index(double time) const {
    if (t.size() < 2 || time < t.front() || time > t.back()) {
      std::ostringstream os;
      os << "interpolation time " << time << " outside trajectory";
      throw DomainError(os.str());
    }
    auto it = std::upper_bound(t.begin(), t.end(), time);
    std::size_t i = (std::size_t)std::distance(t.begin(), it);
    if (i > 0) --i;
    if (i >= t.size() - 1) i = t.size() - 2;
    return i;
  }

  Vec<N> at(double time) const {
    const std::size_t i = segment_index(time);
    const double h = t[i + 1] - t[i];
    const double s = (time - t[i]) / h;
    const double s2 = s * s, s3 = s2 * s;
    return (2.0 * s3 - 3.0 * s2 + 1.0) * x[i] +
           (s3 - 2.0 * s2 + s) * h * xdot[i] +
           (-2.0 * s3 + 3.0 * s2) * x[i + 1] + (s3 - s2) * h * xdot[i + 1];
  }

  Vec<N> deriv_at(double time) const {
    const std::size_t i = segment_index(time);
    const double h = t[i + 1] - t[i];
    const double s = (time - t[i]) / h;
    const double s2 = s * s;
    return ((6.0 * s2 - 6.0 * s) / h) * x[i] +
           (3.0 * s2 - 4.0 * s + 1.0) * xdot[i] +
           ((-6.0 * s2 + 6.0 * s) / h) * x[i + 1] +
           (3.0 * s2 - 2.0 * s) * xdot[i + 1];
  }
};

namespace detail {

template <int N>
void truncate(RawTrajectory<N>& out, double t, const std::string& why) {
  out.complete = false;
  std::ostringstream os;
  os << why << " (t = " << t << ")";
  out.diagnostic = os.str();
}

}  // namespace detail

/// Integrate xdot = field(t, x) from t = 0 to cfg.t_end. A SingularityError
/// thrown by the field, a non-finite state, or adaptive step-size underflow
/// stops the run early and returns the samples collected so far with
/// complete = false.
template <int N>
RawTrajectory<N> integrate(
    const std::function<Vec<N>(double, const Vec<N>&)>& field, const Vec<N>& x0,
    const IntegratorConfig& cfg) {
  if (!(cfg.t_end > 0.0) || !std::isfinite(cfg.t_end))
    throw DomainError("integrate: t_end must be positive");
  if (cfg.stride < 1) throw DomainError("integrate: stride must be >= 1");
  if (!x0.allFinite()) throw DomainError("integrate: non-finite initial state");

  RawTrajectory<N> out;
  double t = 0.0;
  Vec<N> x = x0;
  Vec<N> f;
  try {
    f = field(t, x);
  } catch (const SingularityError& e) {
    detail::truncate(out, t, e.what());
    return out;
  }

  long step_index = 0;
  const auto store = [&](double tt, const Vec<N>& xx, const Vec<N>& ff) {
    out.t.push_back(tt);
    out.x.push_back(xx);
    out.xdot.push_back(ff);
  };
  store(t, x, f);

  if (cfg.method == Method::RK4Fixed) {
    if (!(cfg.h > 0.0)) throw DomainError("integrate: fixed step must be positive");
    while (t < cfg.t_end) {
      const double h = std::min(cfg.h, cfg.t_end - t);
      try {
        const Vec<N> k1 = f;
        const Vec<N> k2 = field(t + 0.5 * h, x + 0.5 * h * k1);
        const Vec<N> k3 = field(t + 0.5 * h, x + 0.5 * h * k2);
        const Vec<N> k4 = field(t + h, x + h * k3);
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += h;
        if (!x.allFinite()) {
          detail::truncate(out, t, "state became non-finite");
          return out;
        }
        f = field(t, x);
      } catch (const SingularityError& e) {
        detail::truncate(out, t, e.what());
        return out;
      }
      ++step_index;
      if (step_index % cfg.stride == 0 || t >= cfg.t_end) store(t, x, f);
    }
    if (out.t.back() != t) store(t, x, f);
    return out;
  }

  // Dormand-Prince 5(4) with FSAL
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                          c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695,
                          e4 = b4 - 393.0 / 640, e5 = b5 + 92097.0 / 339200,
                          e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;

  double h = std::min({cfg.h_init, cfg.h_max, cfg.t_end});
  while (t < cfg.t_end) {
    const double remaining = cfg.t_end - t;
    if (remaining < cfg.h_min) break;  // within roundoff of t_end
    h = std::min(h, remaining);
    if (h < cfg.h_min) {
      detail::truncate(out, t, "adaptive step size underflow");
      return out;
    }
    bool accepted = false;
    try {
      const Vec<N> k1 = f;
      const Vec<N> k2 = field(t + c2 * h, x + h * (a21 * k1));
      const Vec<N> k3 = field(t + c3 * h, x + h * (a31 * k1 + a32 * k2));
      const Vec<N> k4 =
          field(t + c4 * h, x + h * (a41 * k1 + a42 * k2 + a43 * k3));
      const Vec<N> k5 = field(
          t + c5 * h, x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      const Vec<N> k6 =
          field(t + h,
                x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      const Vec<N> x_new =
          x + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const Vec<N> k7 = field(t + h, x_new);

      const Vec<N> err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 +
                              e6 * k6 + e7 * k7);
      double norm2 = 0.0;
      for (int i = 0; i < N; ++i) {
        const double scale =
            cfg.abs_tol +
            cfg.rel_tol * std::max(std::abs(x[i]), std::abs(x_new[i]));
        const double q = err[i] / scale;
        norm2 += q * q;
      }
      const double err_norm = std::sqrt(norm2 / N);

      if (!x_new.allFinite() || !std::isfinite(err_norm)) {
        h *= 0.2;
        continue;
      }
      if (err_norm <= 1.0) {
        t += h;
        x = x_new;
        f = k7;
        accepted = true;
      }
      const double factor = err_norm > 0.0
                                ? 0.9 * std::pow(err_norm, -0.2)
                                : 5.0;
      h *= std::clamp(factor, 0.2, 5.0);
      h = std::min(h, cfg.h_max);
    } catch (const SingularityError& e) {
      detail::truncate(out, t, e.what());
      return out;
    }
    if (accepted) {
      ++step_index;
      if (step_index % cfg.stride == 0 || t >= cfg.t_end) store(t, x, f);
    }
  }
  if (out.t.back() != t) store(t, x, f);
  return out;
}

template <int N>
struct SectionEvent {
  double t = 0.0;
  Vec<N> state;
  int direction = 0;  // +1: value goes negative to positive
};

/// Crossings of the scalar section value(x) = 0 on a trajectory, localized by
/// bisection on the interpolant. direction: +1 ascending only, -1 descending
/// only, 0 both.
template <int N>
std::vector<SectionEvent<N>> find_crossings(
    const RawTrajectory<N>& traj, const std::function<double(const Vec<N>&)>& value,
    int direction = 0, double t_tol = 1e-9) {
  std::vector<SectionEvent<N>> events;
  if (traj.size() < 2) return events;

  int last_sign = 0;
  double last_sign_t = traj.t.front();
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double v = value(traj.x[i]);
    const int s = (v > 0.0) - (v < 0.0);
    if (s == 0) continue;
    if (last_sign != 0 && s != last_sign) {
      double a = last_sign_t, b = traj.t[i];
      const double sign_a = (double)last_sign;
      while (b - a > t_tol) {
        const double m = 0.5 * (a + b);
        const double vm = value(traj.at(m));
        if (vm == 0.0 || (vm > 0.0) == (sign_a > 0.0)) {
          a = m;
        } else {
          b = m;
        }
      }
      SectionEvent<N> ev;
      ev.t = 0.5 * (a + b);
      ev.state = traj.at(ev.t);
      ev.direction = s;
      if (direction == 0 || ev.direction == direction) events.push_back(ev);
    }
    last_sign = s;
    last_sign_t = traj.t[i];
  }
  return events;
}

}  // namespace orbistab
