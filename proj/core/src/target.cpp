#include "orbistab/target.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace orbistab {

Eigen::Vector2d target_field(const SynthesisProfile& p,
                             const Eigen::Vector2d& xi) {
  const double b = p.beta(xi[0]);
  const double r = p.rho(xi[0]);
  return {xi[1], r + b * xi[1] * xi[1]};
}

double hamiltonian(const SynthesisProfile& p, const Eigen::Vector2d& xi) {
  return 0.5 * p.mass(xi[0]) * xi[1] * xi[1] + p.potential(xi[0]);
}

Eigen::Vector2d grad_hamiltonian(const SynthesisProfile& p,
                                 const Eigen::Vector2d& xi) {
  const double dH1 = 0.5 * p.dmass(xi[0]) * xi[1] * xi[1] + p.dpotential(xi[0]);
  return {dH1, p.mass(xi[0]) * xi[1]};
}

Eigen::Vector2d hamiltonian_field(const SynthesisProfile& p,
                                  const Eigen::Vector2d& xi) {
  const Eigen::Vector2d g = grad_hamiltonian(p, xi);
  const double inv_m = 1.0 / p.mass(xi[0]);
  return {inv_m * g[1], -inv_m * g[0]};
}

Eigen::Vector2d damped_aux_field(const SynthesisProfile& p,
                                 const Eigen::Vector2d& eta, double r_damp) {
  if (!(r_damp >= 0.0)) throw DomainError("damped_aux_field: r must be >= 0");
  const Eigen::Vector2d g = grad_hamiltonian(p, eta);
  const double inv_m = 1.0 / p.mass(eta[0]);
  return {inv_m * g[1] - r_damp * g[0], -inv_m * g[0] - r_damp * g[1]};
}

namespace {

// turning point: U(x) = level, walking from x_from towards `direction` until
// U rises above the level or the range edge blocks
double turning_point(const SynthesisProfile& p, double level, double x_from,
                     int direction, Interval range, bool& hit_edge) {
  const double span = range.length();
  double step = 1e-3 * span;
  double a = x_from;
  double b = a;
  hit_edge = false;
  for (;;) {
    b = a + direction * step;
    if (b < range.lo || b > range.hi) {
      b = direction > 0 ? range.hi : range.lo;
      if (p.potential(b) < level) {
        hit_edge = true;
        return b;
      }
      break;
    }
    if (p.potential(b) >= level) break;
    a = b;
    step *= 1.5;
  }
  // bisect U - level between a (below) and b (at or above)
  double lo = a, hi = b;
  for (int it = 0; it < 200 && std::abs(hi - lo) > 1e-12 * (1.0 + std::abs(hi));
       ++it) {
    const double mid = 0.5 * (lo + hi);
    if (p.potential(mid) < level) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<SectionEvent<2>> xi2_crossings(const SynthesisProfile& p,
                                           const Eigen::Vector2d& xi0,
                                           double t_max, int needed,
                                           bool use_xi1_section,
                                           double section_value) {
  const auto field = [&p](double, const Vec<2>& xi) {
    return target_field(p, xi);
  };
  IntegratorConfig cfg;
  cfg.method = Method::RK45Adaptive;
  cfg.rel_tol = 1e-10;
  cfg.abs_tol = 1e-12;
  cfg.h_max = 1e-2;

  const auto section = [use_xi1_section, section_value](const Vec<2>& v) {
    return use_xi1_section ? v[0] - section_value : v[1] - section_value;
  };

  std::vector<SectionEvent<2>> events;
  double chunk = 20.0;
  double t_done = 0.0;
  Eigen::Vector2d xi = xi0;
  while (t_done < t_max) {
    cfg.t_end = std::min(chunk, t_max - t_done);
    RawTrajectory<2> traj = integrate<2>(field, xi, cfg);
    auto ev = find_crossings<2>(traj, section, 0, 1e-10);
    for (auto& e : ev) {
      e.t += t_done;
      events.push_back(e);
    }
    if (!traj.complete)
      throw AnalysisError("target orbit integration stopped early: " +
                          traj.diagnostic);
    if ((int)events.size() >= needed) return events;
    xi = traj.x.back();
    t_done += traj.t.back();
  }
  return events;
}

double period_from_events(const std::vector<SectionEvent<2>>& events,
                          const std::string& what) {
  // first two crossings sharing a direction bound one full revolution
  for (std::size_t i = 0; i < events.size(); ++i) {
    for (std::size_t j = i + 1; j < events.size(); ++j) {
      if (events[j].direction == events[i].direction) {
        const double T = events[j].t - events[i].t;
        if (T > 1e-9) return T;
      }
    }
    break;  // only anchor at the first event
  }
  throw AnalysisError(what + ": not enough section crossings to measure a period");
}

}  // namespace

double orbit_period(const SynthesisProfile& p, const Eigen::Vector2d& xi0,
                    bool use_xi1_section, double section_value, double t_max) {
  const auto events =
      xi2_crossings(p, xi0, t_max, 3, use_xi1_section, section_value);
  return period_from_events(events, "orbit_period");
}

OrbitLevel orbit_from_ic(const SynthesisProfile& p, const Eigen::Vector2d& xi0,
                         Interval scan_range, double t_max) {
  if (!xi0.allFinite()) throw DomainError("orbit_from_ic: non-finite state");

  const auto criticals = find_potential_minima(p, scan_range);
  const PotentialCritical* nearest = nullptr;
  for (const auto& c : criticals) {
    if (!c.is_minimum()) continue;
    if (!nearest || std::abs(c.x1 - xi0[0]) < std::abs(nearest->x1 - xi0[0]))
      nearest = &c;
  }
  // find_potential_minima guarantees at least one minimum
  OrbitLevel orbit;
  orbit.x1_star = nearest->x1;
  orbit.energy = hamiltonian(p, xi0);
  orbit.start = xi0;

  const double h_min = nearest->U;
  const double scale = std::max({1.0, std::abs(orbit.energy), std::abs(h_min)});
  if (orbit.energy - h_min <= 1e-10 * scale) {
    std::ostringstream os;
    os << "orbit_from_ic: energy level " << orbit.energy
       << " is degenerate at the potential minimum (x1 = " << nearest->x1
       << "); the orbit is the equilibrium point itself";
    throw AnalysisError(os.str());
  }

  bool edge_l = false, edge_r = false;
  orbit.x1_left =
      turning_point(p, orbit.energy, nearest->x1, -1, scan_range, edge_l);
  orbit.x1_right =
      turning_point(p, orbit.energy, nearest->x1, +1, scan_range, edge_r);
  if (edge_l || edge_r)
    orbit.warning =
        "energy level leaves the scanned range before turning; the orbit may "
        "not be closed";

  // a second critical point strictly inside the oscillation band means the
  // level set is no longer a single closed loop
  for (const auto& c : criticals) {
    if (std::abs(c.x1 - nearest->x1) < 1e-9) continue;
    if (c.x1 > orbit.x1_left + 1e-9 && c.x1 < orbit.x1_right - 1e-9) {
      std::ostringstream os;
      os << "energy level encloses another critical point of the potential "
            "at x1 = "
         << c.x1 << "; the flow there is not provably periodic";
      orbit.warning = os.str();
    }
  }

  if (orbit.warning.empty()) {
    const auto events = xi2_crossings(p, xi0, t_max, 3, false, 0.0);
    orbit.period = period_from_events(events, "orbit_from_ic");
  }
  return orbit;
}

}  // namespace orbistab
