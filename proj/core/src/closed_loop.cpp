#include "orbistab/closed_loop.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

namespace orbistab {

namespace {

Vec<6> zx_field(const SynthesisProfile& p, const Vec<6>& s) {
  const double z1 = s[0], z2 = s[1];
  const State4 x{s[2], s[3], s[4], s[5]};
  const MechanicalSystem& sys = p.system();
  const double x1 = x.x1;

  const double sv = p.s_checked(x1);
  const double dk = p.generator().dK(x1);
  const double K = p.generator().K(x1);
  const double g1 = p.gamma1(), g2 = p.gamma2();

  Vec<6> d;
  d[0] = z2;
  d[1] = -g1 * z1 - g2 * z2;
  d[2] = x.x3;
  d[3] = x.x4;
  // unactuated acceleration written in (z, x): the x2 dependence of gravity
  // enters through K + z1, and the Coriolis term through x4 = z2 + K'*x3
  d[4] = p.beta(x1) * x.x3 * x.x3 - sys.dV_du(x1, K + z1) / sv -
         sys.c_u_bar(x1) * (z2 + 2.0 * dk * x.x3) * z2 / sv +
         sys.m_au(x1) * (g1 * z1 + g2 * z2) / sv;
  d[5] = v_control(p, x, {z1, z2});
  return d;
}

}  // namespace

Trajectory simulate_closed_loop(const SynthesisProfile& profile,
                                const State4& x0, const IntegratorConfig& cfg,
                                Representation rep) {
  if (!x0.finite())
    throw DomainError("simulate_closed_loop: non-finite initial state");

  Trajectory traj;
  traj.representation = rep;

  if (rep == Representation::OffManifold) {
    const Eigen::Vector2d z0 = off_manifold(profile, x0);
    Vec<6> s0;
    s0 << z0[0], z0[1], x0.x1, x0.x2, x0.x3, x0.x4;
    const auto field = [&profile](double, const Vec<6>& s) {
      return zx_field(profile, s);
    };
    RawTrajectory<6> raw = integrate<6>(field, s0, cfg);

    traj.path.complete = raw.complete;
    traj.path.diagnostic = raw.diagnostic;
    traj.path.t = raw.t;
    traj.path.x.reserve(raw.size());
    traj.path.xdot.reserve(raw.size());
    traj.z.reserve(raw.size());
    traj.u.reserve(raw.size());
    traj.Hx.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
      const Vec<6>& s = raw.x[i];
      traj.path.x.push_back({s[2], s[3], s[4], s[5]});
      const Vec<6>& d = raw.xdot[i];
      traj.path.xdot.push_back({d[2], d[3], d[4], d[5]});
      traj.z.push_back({s[0], s[1]});
      traj.u.push_back(d[5]);  // the applied input is the x4 slope
      const State4 x = State4::from(traj.path.x.back());
      traj.Hx.push_back(0.5 * profile.mass(x.x1) * x.x3 * x.x3 +
                        profile.potential(x.x1));
    }
    return traj;
  }

  const SpongForm spong = spong_form(profile.system());
  const auto field = [&profile, &spong, rep](double, const Vec<4>& v) {
    const State4 x = State4::from(v);
    const double u = control_u(profile, x);
    if (rep == Representation::Spong) return Vec<4>(spong.field(x, u));
    const double tau = u_pl(profile.system(), x, u);
    return Vec<4>(eval_el_dynamics(profile.system(), x, tau));
  };
  traj.path = integrate<4>(field, x0.vec(), cfg);

  traj.z.reserve(traj.size());
  traj.u.reserve(traj.size());
  traj.Hx.reserve(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const State4 x = traj.state(i);
    traj.z.push_back(off_manifold(profile, x));
    traj.u.push_back(control_u(profile, x));
    traj.Hx.push_back(0.5 * profile.mass(x.x1) * x.x3 * x.x3 +
                      profile.potential(x.x1));
  }
  return traj;
}

std::vector<Crossing> poincare_crossings(const Trajectory& traj,
                                         const Section& section,
                                         double t_tol) {
  if (!section.value) throw DomainError("poincare_crossings: empty section");
  if (traj.path.xdot.size() != traj.path.x.size())
    throw DomainError(
        "poincare_crossings: trajectory has no derivative channel (read back "
        "from CSV?)");
  const auto value = [&section](const Vec<4>& v) {
    return section.value(State4::from(v));
  };
  const auto raw =
      find_crossings<4>(traj.path, value, section.direction, t_tol);
  std::vector<Crossing> out;
  out.reserve(raw.size());
  for (const auto& e : raw)
    out.push_back({e.t, State4::from(e.state), e.direction});
  return out;
}

OrbitSummary extract_steady_orbit(const Trajectory& traj,
                                  double tail_fraction) {
  if (traj.size() < 2)
    throw AnalysisError("extract_steady_orbit: trajectory too short");
  if (!(tail_fraction > 0.0) || !(tail_fraction <= 1.0))
    throw AnalysisError("extract_steady_orbit: tail fraction must be in (0, 1]");

  const double t0 = traj.path.t.front();
  const double t1 = traj.path.t.back();
  OrbitSummary sum;
  sum.tail_start = t1 - tail_fraction * (t1 - t0);

  std::size_t first = 0;
  while (first < traj.size() && traj.path.t[first] < sum.tail_start) ++first;
  if (first + 1 >= traj.size())
    throw AnalysisError("extract_steady_orbit: tail holds too few samples");

  for (int c = 0; c < 4; ++c) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    double integral = 0.0;
    for (std::size_t i = first; i < traj.size(); ++i) {
      const double v = traj.path.x[i][c];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      if (i > first) {
        const double dt = traj.path.t[i] - traj.path.t[i - 1];
        integral += 0.5 * dt * (v + traj.path.x[i - 1][c]);
      }
    }
    sum.amplitude[(std::size_t)c] = 0.5 * (hi - lo);
    sum.mean[(std::size_t)c] =
        integral / (traj.path.t.back() - traj.path.t[first]);
  }

  // settled at an equilibrium: no motion left in the tail
  if (sum.amplitude[2] < 1e-6 && sum.amplitude[3] < 1e-6 &&
      sum.amplitude[0] < 1e-6) {
    sum.degenerate = true;
    return sum;
  }

  Section sec{[](const State4& x) { return x.x3; }, +1};
  const auto all = poincare_crossings(traj, sec);
  std::vector<double> times;
  for (const auto& c : all)
    if (c.t >= sum.tail_start) times.push_back(c.t);

  if (times.size() < 5)
    throw AnalysisError(
        "extract_steady_orbit: fewer than 5 cycle markers in the tail; run "
        "longer or enlarge the tail fraction");

  double lo = std::numeric_limits<double>::infinity(), hi = -lo, mean = 0.0;
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double dt = times[i] - times[i - 1];
    lo = std::min(lo, dt);
    hi = std::max(hi, dt);
    mean += dt;
  }
  mean /= (double)(times.size() - 1);
  sum.period = mean;
  sum.crossings_used = (int)times.size();
  sum.crossing_spread = hi - lo;
  sum.converged = sum.crossing_spread <= 0.01 * sum.period;
  return sum;
}

namespace {

void append_g17(std::string& line, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  line += buf;
}

}  // namespace

void write_trajectory_csv(const Trajectory& traj, std::ostream& os) {
  os << "t,x1,x2,x3,x4,z1,z2,u,Hx\n";
  std::string line;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    line.clear();
    append_g17(line, traj.path.t[i]);
    for (int c = 0; c < 4; ++c) {
      line += ',';
      append_g17(line, traj.path.x[i][c]);
    }
    line += ',';
    append_g17(line, traj.z[i][0]);
    line += ',';
    append_g17(line, traj.z[i][1]);
    line += ',';
    append_g17(line, traj.u[i]);
    line += ',';
    append_g17(line, traj.Hx[i]);
    line += '\n';
    os << line;
  }
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open for writing: " + path);
  write_trajectory_csv(traj, os);
  os.flush();
  if (!os) throw ConfigError("write failed: " + path);
}

Trajectory read_trajectory_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line))
    throw ConfigError("trajectory CSV: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,x1,x2,x3,x4,z1,z2,u,Hx")
    throw ConfigError("trajectory CSV: unexpected header \"" + line + "\"");

  Trajectory traj;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    double vals[9];
    const char* ptr = line.c_str();
    for (int k = 0; k < 9; ++k) {
      char* end = nullptr;
      vals[k] = std::strtod(ptr, &end);
      if (end == ptr) {
        std::ostringstream os;
        os << "trajectory CSV: bad number in column " << k + 1 << " on line "
           << lineno;
        throw ConfigError(os.str());
      }
      ptr = end;
      if (k < 8) {
        if (*ptr != ',') {
          std::ostringstream os;
          os << "trajectory CSV: expected 9 columns on line " << lineno;
          throw ConfigError(os.str());
        }
        ++ptr;
      }
    }
    if (*ptr != '\0') {
      std::ostringstream os;
      os << "trajectory CSV: trailing characters on line " << lineno;
      throw ConfigError(os.str());
    }

    traj.path.t.push_back(vals[0]);
    traj.path.x.push_back({vals[1], vals[2], vals[3], vals[4]});
    traj.z.push_back({vals[5], vals[6]});
    traj.u.push_back(vals[7]);
    traj.Hx.push_back(vals[8]);
  }
  if (traj.size() == 0) throw ConfigError("trajectory CSV: no data rows");
  return traj;
}

Trajectory read_trajectory_csv(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open: " + path);
  return read_trajectory_csv(is);
}

}  // namespace orbistab
