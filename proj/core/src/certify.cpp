#include "orbistab/certify.hpp"

#include "orbistab/prefeedback.hpp"
#include "orbistab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace orbistab {

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 2) throw DomainError("grid needs at least 2 points");
  if (!(hi > lo)) throw DomainError("grid range is empty");
  std::vector<double> v(static_cast<std::size_t>(n));
  const double dx = (hi - lo) / (n - 1);
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = lo + i * dx;
  v.back() = hi;
  return v;
}

std::string fmt(double v, int prec = 4) {
  std::ostringstream os;
  os << std::setprecision(prec) << v;
  return os.str();
}

// least squares slope of y over x; requires >= 2 distinct points
double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  if (den <= 0.0) throw AnalysisError("slope fit: degenerate abscissae");
  return (n * sxy - sx * sy) / den;
}

double get_param(const std::map<std::string, double>& m, const char* key,
                 const char* who) {
  auto it = m.find(key);
  if (it == m.end())
    throw AnalysisError(std::string(who) + ": missing parameter '" + key + "'");
  return it->second;
}

// Dpi(xi) * alpha for the immersion (xi1, K, xi2, K'*xi2)
Eigen::Vector4d immersed_velocity(const SynthesisProfile& p,
                                  const Eigen::Vector2d& xi,
                                  const Eigen::Vector2d& alpha) {
  const double dk = p.generator().dK(xi[0]);
  const double d2k = p.generator().d2K(xi[0]);
  Eigen::Vector4d v;
  v << alpha[0], dk * alpha[0], alpha[1], d2k * xi[1] * alpha[0] + dk * alpha[1];
  return v;
}

}  // namespace

bool CertReport::all_pass() const {
  for (const auto& c : checks)
    if (c.hard && !c.pass) return false;
  return true;
}

const CheckResult* CertReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

void CertReport::write_text(std::ostream& os) const {
  int hard_total = 0, hard_failed = 0;
  for (const auto& c : checks) {
    const char* tag = c.hard ? (c.pass ? "[PASS]" : "[FAIL]")
                             : (c.pass ? "[ok]  " : "[WARN]");
    char head[128];
    std::snprintf(head, sizeof(head), "%s %-34s observed %11.4e  tol %8.2e",
                  tag, c.name.c_str(), c.observed, c.tolerance);
    os << head;
    if (!c.detail.empty()) os << "  " << c.detail;
    os << '\n';
    if (c.hard) {
      ++hard_total;
      if (!c.pass) ++hard_failed;
    }
  }
  if (hard_failed == 0)
    os << "RESULT: all " << hard_total << " hard checks passed\n";
  else
    os << "RESULT: " << hard_failed << " of " << hard_total
       << " hard checks FAILED\n";
}

void CertReport::write_csv(std::ostream& os) const {
  os << "name,pass,hard,observed,tolerance,detail\n";
  for (const auto& c : checks) {
    char num[64];
    os << c.name << ',' << (c.pass ? 1 : 0) << ',' << (c.hard ? 1 : 0) << ',';
    std::snprintf(num, sizeof(num), "%.17g", c.observed);
    os << num << ',';
    std::snprintf(num, sizeof(num), "%.17g", c.tolerance);
    os << num << ',';
    std::string quoted = "\"";
    for (char ch : c.detail) {
      quoted += ch;
      if (ch == '"') quoted += '"';
    }
    quoted += '"';
    os << quoted << '\n';
  }
}

InvarianceScan invariance_residual(const SynthesisProfile& p,
                                   Interval xi1_range, double xi2_max, int n1,
                                   int n2, double dk_scale) {
  if (!(xi2_max > 0.0))
    throw DomainError("invariance_residual: xi2_max must be positive");
  const SpongForm sp = spong_form(p.system());
  const auto g1 = linspace(xi1_range.lo, xi1_range.hi, n1);
  const auto g2 = linspace(-xi2_max, xi2_max, n2);

  InvarianceScan scan;
  for (double xi1 : g1) {
    const double muu = p.system().m_uu(xi1);
    const double mau = p.system().m_au(xi1);
    const double dk = dk_scale * p.generator().dK(xi1);
    const double d2k = dk_scale * p.generator().d2K(xi1);
    Eigen::Vector4d gperp;
    gperp << 0.0, 0.0, 1.0, mau / muu;
    for (double xi2 : g2) {
      const Eigen::Vector2d xi(xi1, xi2);
      State4 x = immersion(p, xi);
      x.x4 = dk * xi2;
      const Eigen::Vector4d F = sp.field(x, control_u(p, x));
      const Eigen::Vector2d al = target_field(p, xi);
      Eigen::Vector4d vel;
      vel << al[0], dk * al[0], al[1], d2k * xi2 * al[0] + dk * al[1];
      const Eigen::Vector4d res = F - vel;
      const double raw = std::abs(gperp.dot(res));
      const double scaled = raw / (1.0 + F.norm());
      if (scaled > scan.max_scaled) {
        scan.max_scaled = scaled;
        scan.max_raw = raw;
        scan.worst = xi;
      }
    }
  }
  return scan;
}

SynthesisIdentityScan synthesis_identity_check(const SynthesisProfile& p,
                                               Interval xi1_range,
                                               double xi2_max, int n1,
                                               int n2) {
  const MechanicalSystem& sys = p.system();
  const Generator& gen = p.generator();
  const SpongForm sp = spong_form(sys);
  const auto g1 = linspace(xi1_range.lo, xi1_range.hi, n1);
  const auto g2 = linspace(-xi2_max, xi2_max, n2);

  SynthesisIdentityScan scan;
  for (double x1 : g1) {
    const double s = p.s(x1);
    const double dk = gen.dK(x1);
    const double sr = std::abs(s - (sys.m_uu(x1) + sys.m_au(x1) * dk)) /
                      (1.0 + std::abs(s));
    scan.s_residual = std::max(scan.s_residual, sr);

    const double bs = p.beta(x1) * s;
    const double br =
        std::abs(bs + (sys.c_u_bar(x1) * dk * dk + sys.c_a(x1) +
                       sys.m_au(x1) * gen.d2K(x1))) /
        (1.0 + std::abs(bs));
    scan.beta_residual = std::max(scan.beta_residual, br);

    const double rs = p.rho(x1) * s;
    const double rr = std::abs(rs + sys.dV_du(x1, gen.K(x1))) / (1.0 + std::abs(rs));
    scan.rho_residual = std::max(scan.rho_residual, rr);

    for (double xi2 : g2) {
      const Eigen::Vector2d xi(x1, xi2);
      const State4 x = immersion(p, xi);
      const double c_direct = control_u(p, x);
      const Eigen::Vector4d varpi =
          immersed_velocity(p, xi, target_field(p, xi)) - sp.f(x);
      const Eigen::Vector4d g = sp.g(x);
      const double c_ls = g.dot(varpi) / g.dot(g);
      const double cr = std::abs(c_ls - c_direct) / (1.0 + std::abs(c_direct));
      scan.control_two_path = std::max(scan.control_two_path, cr);
    }
  }
  return scan;
}

double immersion_consistency(const SynthesisProfile& p, Interval xi1_range,
                             double xi2_max, int n1, int n2) {
  const auto g1 = linspace(xi1_range.lo, xi1_range.hi, n1);
  const auto g2 = linspace(-xi2_max, xi2_max, n2);
  double worst = 0.0;
  for (double xi1 : g1)
    for (double xi2 : g2) {
      const Eigen::Vector2d z =
          off_manifold(p, immersion(p, Eigen::Vector2d(xi1, xi2)));
      worst = std::max(worst, z.cwiseAbs().maxCoeff());
    }
  return worst;
}

ZDecayFit z_decay_fit(const Trajectory& traj, double gamma1, double gamma2) {
  if (!(gamma1 > 0.0) || !(gamma2 > 0.0))
    throw DomainError("z_decay_fit: gains must be positive");
  const std::size_t N = traj.size();
  if (N < 8) throw AnalysisError("z_decay_fit: run too short");

  ZDecayFit fit;
  const double disc = gamma2 * gamma2 - 4.0 * gamma1;
  fit.predicted_rate =
      disc >= 0.0 ? 0.5 * (gamma2 - std::sqrt(disc)) : 0.5 * gamma2;

  std::vector<double> n(N);
  for (std::size_t i = 0; i < N; ++i) {
    n[i] = traj.z[i].norm();
    fit.max_norm = std::max(fit.max_norm, n[i]);
  }
  for (std::size_t i = (9 * N) / 10; i < N; ++i)
    fit.tail_norm = std::max(fit.tail_norm, n[i]);

  if (fit.max_norm <= 1e-8) {
    fit.vacuous = true;
    fit.fitted_rate = fit.predicted_rate;
    return fit;
  }

  const double floor_v = std::max(1e-10, 1e-8 * fit.max_norm);
  std::size_t i0 = N, i1 = 0;
  for (std::size_t i = 0; i < N; ++i)
    if (n[i] > floor_v) {
      if (i0 == N) i0 = i;
      i1 = i;
    }
  if (i0 == N || i1 < i0 + 4) {
    fit.rel_error = 1.0;  // nothing usable to fit; report as a miss
    return fit;
  }

  const std::vector<double>& t = traj.path.t;

  // peaks over the whole above-floor stretch; they track the envelope and
  // are immune to the log dips of a ringing norm
  std::vector<double> ts, ys;
  for (std::size_t i = std::max<std::size_t>(i0, 1);
       i <= std::min(i1, N - 2); ++i)
    if (n[i] > floor_v && n[i] >= n[i - 1] && n[i] >= n[i + 1]) {
      ts.push_back(t[i]);
      ys.push_back(std::log(n[i]));
    }

  if (ts.size() >= 3) {
    fit.used_peaks = true;
  } else {
    // smooth decay: fit the later samples, after the fast mode has died
    ts.clear();
    ys.clear();
    const double t_start = t[i0] + 0.4 * (t[i1] - t[i0]);
    for (std::size_t i = i0; i <= i1; ++i)
      if (n[i] > floor_v && t[i] >= t_start) {
        ts.push_back(t[i]);
        ys.push_back(std::log(n[i]));
      }
  }
  if (ts.size() < 2) {
    fit.rel_error = 1.0;
    return fit;
  }
  fit.points_used = static_cast<int>(ts.size());
  fit.fitted_rate = -ls_slope(ts, ys);
  fit.rel_error = std::abs(fit.fitted_rate - fit.predicted_rate) /
                  std::max(fit.predicted_rate, 1e-300);
  return fit;
}

ExpEnvelope fit_dominating_exponential(const std::vector<double>& t,
                                       const std::vector<double>& y) {
  if (t.size() != y.size() || t.size() < 4)
    throw DomainError("envelope fit: need matching series of >= 4 samples");
  const std::size_t N = t.size();
  double ymax = 0.0;
  for (double v : y) ymax = std::max(ymax, v);
  if (ymax <= 1e-14) return {0.0, 1.0};

  const double floor_v = std::max(1e-14, 1e-8 * ymax);
  std::vector<std::size_t> above;
  for (std::size_t i = 0; i < N; ++i)
    if (y[i] > floor_v) above.push_back(i);

  std::vector<double> ts, ys;
  for (std::size_t i : above)
    if (i > 0 && i + 1 < N && y[i] >= y[i - 1] && y[i] >= y[i + 1]) {
      ts.push_back(t[i]);
      ys.push_back(std::log(y[i]));
    }
  if (ts.size() < 3) {
    ts.clear();
    ys.clear();
    for (std::size_t i : above) {
      ts.push_back(t[i]);
      ys.push_back(std::log(y[i]));
    }
  }
  ExpEnvelope env;
  env.k = ts.size() >= 2 ? std::max(-ls_slope(ts, ys), 1e-6) : 1e-6;

  // lift until the envelope clears every sample above the noise floor
  double a = 0.0;
  for (std::size_t i : above) {
    const double cand = y[i] * std::exp(env.k * t[i]);
    if (std::isfinite(cand)) a = std::max(a, cand);
  }
  env.a = a;
  return env;
}

double comparison_closed_form(double a1, double k1, double a2, double k2,
                              double r0, double t) {
  if (!(k1 > 0.0) || !(k2 > 0.0))
    throw DomainError("comparison bound: decay rates must be positive");
  if (a1 < 0.0 || a2 < 0.0 || r0 < 0.0 || t < 0.0)
    throw DomainError("comparison bound: negative coefficient");
  const double E = 0.5 * a1 / k1;
  if (E > 700.0)
    throw AnalysisError("comparison bound overflows: a1/(2*k1) too large");

  // sqrt r(t) = e^{E(1-e^{-k1 t})} (sqrt r0 + int_0^t a2/2 e^{E(e^{-k1 s}-1)} e^{-k2 s} ds);
  // keeping exponent differences bounded by E avoids overflow for any t
  const auto integrand = [E, a2, k1, k2](double s) {
    return 0.5 * a2 * std::exp(E * (std::exp(-k1 * s) - 1.0) - k2 * s);
  };
  const double I = t > 0.0 ? integrate_adaptive(integrand, 0.0, t, 1e-13) : 0.0;
  const double w = std::exp(E * (1.0 - std::exp(-k1 * t))) * (std::sqrt(r0) + I);
  return w * w;
}

ComparisonScan comparison_selftest(double a1, double k1, double a2, double k2,
                                   double r0, double t_end, int samples) {
  if (!(r0 > 0.0) || !(t_end > 0.0) || samples < 2)
    throw DomainError("comparison selftest: bad arguments");

  const auto field = [a1, k1, a2, k2](double t, const Vec<1>& r) {
    Vec<1> d;
    d[0] = a1 * std::exp(-k1 * t) * r[0] +
           a2 * std::exp(-k2 * t) * std::sqrt(std::max(r[0], 0.0));
    return d;
  };
  IntegratorConfig cfg;
  cfg.method = Method::RK45Adaptive;
  cfg.t_end = t_end;
  cfg.rel_tol = 1e-11;
  cfg.abs_tol = 1e-13;
  cfg.h_max = 2e-2;
  Vec<1> r0v;
  r0v[0] = r0;
  const auto traj = integrate<1>(field, r0v, cfg);
  if (!traj.complete)
    throw AnalysisError("comparison selftest: integration truncated: " +
                        traj.diagnostic);

  ComparisonScan scan;
  scan.t = linspace(0.0, traj.t.back(), samples);
  scan.r_numeric.resize(scan.t.size());
  scan.r_closed.resize(scan.t.size());
  for (std::size_t i = 0; i < scan.t.size(); ++i) {
    scan.r_numeric[i] = traj.at(scan.t[i])[0];
    scan.r_closed[i] = comparison_closed_form(a1, k1, a2, k2, r0, scan.t[i]);
    scan.r_sup = std::max(scan.r_sup, scan.r_closed[i]);
    const double dev = std::abs(scan.r_numeric[i] - scan.r_closed[i]) /
                       std::max(scan.r_closed[i], 1e-300);
    scan.max_rel_dev = std::max(scan.max_rel_dev, dev);
  }
  return scan;
}

EnergyReport energy_convergence(const Trajectory& traj,
                                const SynthesisProfile& p,
                                double tail_fraction) {
  const std::size_t N = traj.size();
  if (N < 16) throw AnalysisError("energy_convergence: run too short");
  if (traj.path.xdot.empty())
    throw AnalysisError(
        "energy_convergence: needs the derivative channel of a simulated run");
  if (!(tail_fraction > 0.0) || !(tail_fraction < 1.0))
    throw DomainError("energy_convergence: tail_fraction must be in (0,1)");

  const MechanicalSystem& sys = p.system();
  const Generator& gen = p.generator();
  const std::vector<double>& t = traj.path.t;

  EnergyReport rep;

  // shift: U may be negative on the interval; the square-root manipulations
  // need a nonnegative energy, and a constant shift is dynamically invisible
  double u_min = 0.0;
  for (double x : linspace(p.operating().lo, p.operating().hi, 1024))
    u_min = std::min(u_min, p.potential(x));
  rep.shift = -std::min(0.0, u_min);

  rep.m_floor = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < N; ++i)
    rep.m_floor = std::min(rep.m_floor, p.mass(traj.path.x[i][0]));
  if (!(rep.m_floor > 0.0))
    throw AnalysisError("energy_convergence: target mass not positive on run");

  // exact transient coefficients of dHx/dt along the run
  std::vector<double> eps1(N), eps2(N), Hs(N);
  double exact_max = 0.0, ident_max = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double x1 = traj.path.x[i][0];
    const double x3 = traj.path.x[i][2];
    const double z1 = traj.z[i][0];
    const double z2 = traj.z[i][1];
    const double s = p.s(x1);
    const double m = p.mass(x1);
    const double cu = sys.c_u_bar(x1);
    const double dk = gen.dK(x1);
    const double K = gen.K(x1);
    const double gained = p.gamma1() * z1 + p.gamma2() * z2;

    eps1[i] = -2.0 * cu * dk * z2 * m / s;
    eps2[i] = (sys.dV_du(x1, K) - sys.dV_du(x1, K + z1)) * m / s -
              cu * z2 * z2 * m / s + m * sys.m_au(x1) * gained / s;

    const double exact = (0.5 * p.dmass(x1) * x3 * x3 + p.dpotential(x1)) * x3 +
                         m * x3 * traj.path.xdot[i][2];
    const double form = eps1[i] * x3 * x3 + eps2[i] * x3;
    exact_max = std::max(exact_max, std::abs(exact));
    ident_max = std::max(ident_max, std::abs(exact - form));

    Hs[i] = std::max(0.0, traj.Hx[i] + rep.shift);
  }
  rep.identity_residual = ident_max / (1.0 + exact_max);
  rep.h0_shifted = Hs.front();

  // envelopes on the rescaled transient magnitudes
  std::vector<double> y1(N), y2(N);
  const double c1 = 2.0 / rep.m_floor;
  const double c2 = std::sqrt(2.0 / rep.m_floor);
  for (std::size_t i = 0; i < N; ++i) {
    y1[i] = c1 * std::abs(eps1[i]);
    y2[i] = c2 * std::abs(eps2[i]);
  }
  rep.env1 = fit_dominating_exponential(t, y1);
  rep.env2 = fit_dominating_exponential(t, y2);

  // finite-difference energy rate against the envelope right side
  const double tau0 = t.front();
  for (std::size_t i = 1; i + 1 < N; ++i) {
    const double fd = (traj.Hx[i + 1] - traj.Hx[i - 1]) / (t[i + 1] - t[i - 1]);
    rep.fd_max = std::max(rep.fd_max, std::abs(fd));
    const double tau = t[i] - tau0;
    const double rhs = rep.env1.a * std::exp(-rep.env1.k * tau) * Hs[i] +
                       rep.env2.a * std::exp(-rep.env2.k * tau) * std::sqrt(Hs[i]);
    rep.envelope_margin = std::max(rep.envelope_margin, fd - rhs);
  }

  // closed-form comparison solution accumulated panel by panel
  {
    const double E = 0.5 * rep.env1.a / rep.env1.k;
    if (E > 700.0)
      throw AnalysisError("energy_convergence: comparison bound overflows");
    const double a2h = 0.5 * rep.env2.a;
    const double k1 = rep.env1.k, k2 = rep.env2.k;
    const auto integrand = [E, a2h, k1, k2](double s) {
      return a2h * std::exp(E * (std::exp(-k1 * s) - 1.0) - k2 * s);
    };
    const double r0 = std::max(Hs.front(), 1e-12);
    double acc = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double tau = t[i] - tau0;
      if (i > 0) acc += integrate_adaptive(integrand, t[i - 1] - tau0, tau, 1e-14);
      const double w =
          std::exp(E * (1.0 - std::exp(-k1 * tau))) * (std::sqrt(r0) + acc);
      const double r = w * w;
      rep.r_sup = std::max(rep.r_sup, r);
      rep.comparison_gap = std::max(rep.comparison_gap, Hs[i] - r);
    }
  }

  // settledness of the raw energy over the trailing part of the run
  {
    const double t_tail = t.front() + (1.0 - tail_fraction) * (t.back() - t.front());
    std::size_t j0 = N - 1;
    for (std::size_t i = 0; i < N; ++i)
      if (t[i] >= t_tail) {
        j0 = i;
        break;
      }
    if (j0 + 2 >= N)
      throw AnalysisError("energy_convergence: tail too short to assess");
    double hmin = traj.Hx[j0], hmax = traj.Hx[j0], area = 0.0;
    for (std::size_t i = j0; i + 1 < N; ++i) {
      hmin = std::min(hmin, traj.Hx[i + 1]);
      hmax = std::max(hmax, traj.Hx[i + 1]);
      area += 0.5 * (traj.Hx[i] + traj.Hx[i + 1]) * (t[i + 1] - t[i]);
    }
    const double mean = area / (t.back() - t[j0]);
    rep.tail_rel_variation = (hmax - hmin) / std::max(std::abs(mean), 1e-12);
  }
  return rep;
}

D4Result counterexample_run(bool with_disturbance, double t_end,
                            double rel_tol) {
  const auto field = [with_disturbance](double t, const Vec<2>& xi) {
    Vec<2> d;
    d[0] = xi[1];
    d[1] = -xi[0] / (xi[0] * xi[0] + 1.0);
    if (with_disturbance) {
      d[0] += std::exp(-t / 5.0);
      d[1] += -2.0 * std::exp(-t / 5.0);
    }
    return d;
  };
  const auto energy = [](const Vec<2>& xi) {
    return 0.5 * std::log(xi[0] * xi[0] + 1.0) + 0.5 * xi[1] * xi[1];
  };

  IntegratorConfig cfg;
  cfg.method = Method::RK45Adaptive;
  cfg.t_end = t_end;
  cfg.rel_tol = rel_tol;
  cfg.abs_tol = rel_tol * 1e-2;
  cfg.h_max = 2e-2;

  Vec<2> xi0;
  xi0 << -1.0, 1.0;

  D4Result res;
  res.traj = integrate<2>(field, xi0, cfg);
  res.H0 = energy(xi0);

  std::size_t first_double = 0;
  for (std::size_t i = 0; i < res.traj.size(); ++i) {
    const double H = energy(res.traj.x[i]);
    res.max_H = std::max(res.max_H, H);
    res.sup_norm = std::max(res.sup_norm, res.traj.x[i].cwiseAbs().maxCoeff());
    res.H_drift_rel = std::max(res.H_drift_rel, std::abs(H - res.H0) / res.H0);
    if (first_double == 0 && i > 0 && H > 2.0 * res.H0) first_double = i;
  }
  res.H_end = energy(res.traj.x.back());

  if (first_double > 0) {
    double ta = res.traj.t[first_double - 1];
    double tb = res.traj.t[first_double];
    for (int it = 0; it < 80 && tb - ta > 1e-12; ++it) {
      const double tm = 0.5 * (ta + tb);
      (energy(res.traj.at(tm)) > 2.0 * res.H0 ? tb : ta) = tm;
    }
    res.t_doubling = 0.5 * (ta + tb);
  }
  return res;
}

CrosscheckResult closed_form_crosscheck(const SynthesisProfile& p,
                                        BenchmarkForm form, Interval range,
                                        int n) {
  if (n < 8) throw DomainError("crosscheck: grid too coarse");
  const auto& sp = p.system().params;
  const auto& gp = p.generator().params;

  std::function<double(double)> printed;
  bool potential_form = false;
  switch (form) {
    case BenchmarkForm::FurutaMass: {
      const double k1 = get_param(gp, "k1", "furuta mass form");
      const double a1 = get_param(gp, "a1", "furuta mass form");
      const double kap1 =
          (1.0 + k1) * (1.0 + k1 + a1 * a1) / (a1 * a1 * k1);
      printed = [kap1](double x) { return std::pow(std::cos(x), -kap1); };
      break;
    }
    case BenchmarkForm::FurutaPotential: {
      const double k1 = get_param(gp, "k1", "furuta potential form");
      const double a1 = get_param(gp, "a1", "furuta potential form");
      const double a3 = get_param(sp, "a3", "furuta potential form");
      const double J = get_param(sp, "J", "furuta potential form");
      const double kap1 =
          (1.0 + k1) * (1.0 + k1 + a1 * a1) / (a1 * a1 * k1);
      const double kap2 = k1 * (2.0 * kap1 - 1.0);
      printed = [a3, J, kap2](double x) {
        return a3 / (J * kap2) * (std::pow(std::cos(x), -kap2) - 1.0);
      };
      potential_form = true;
      break;
    }
    case BenchmarkForm::PendubotMass: {
      const double k2 = get_param(gp, "k2", "pendubot mass form");
      if (std::abs(k2 + 1.0) > 1e-12)
        throw AnalysisError("pendubot mass form assumes k2 = -1");
      const double c2 = get_param(sp, "c2", "pendubot mass form");
      const double c3 = get_param(sp, "c3", "pendubot mass form");
      printed = [c2, c3](double x) {
        const double d = 2.0 * c2 + c3 * std::cos(x);
        return 1.0 / (d * d);
      };
      break;
    }
    case BenchmarkForm::PendubotPotential: {
      const double k2 = get_param(gp, "k2", "pendubot potential form");
      if (std::abs(k2 + 1.0) > 1e-12)
        throw AnalysisError("pendubot potential form assumes k2 = -1");
      const double c2 = get_param(sp, "c2", "pendubot potential form");
      const double c3 = get_param(sp, "c3", "pendubot potential form");
      const double c5 = get_param(sp, "c5", "pendubot potential form");
      const double g = get_param(sp, "gravity", "pendubot potential form");
      printed = [c2, c3, c5, g](double x) {
        const double d = 2.0 * c2 + c3 * std::cos(x);
        return 2.0 * c5 * g * (c2 + c3 * std::cos(x)) / (c3 * c3 * d * d);
      };
      potential_form = true;
      break;
    }
  }

  const auto xs = linspace(range.lo, range.hi, n);
  std::vector<double> q(xs.size()), pr(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    q[i] = potential_form ? p.potential(xs[i]) : p.mass(xs[i]);
    pr[i] = printed(xs[i]);
    if (!std::isfinite(q[i]) || !std::isfinite(pr[i]))
      throw AnalysisError("crosscheck: non-finite sample at x1 = " + fmt(xs[i]));
  }

  CrosscheckResult res;
  if (!potential_form) {
    double spq = 0.0, spp = 0.0, qmax = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      spq += pr[i] * q[i];
      spp += pr[i] * pr[i];
      qmax = std::max(qmax, std::abs(q[i]));
    }
    if (spp <= 0.0) throw AnalysisError("crosscheck: degenerate reference");
    res.scale = spq / spp;
    double worst = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
      worst = std::max(worst, std::abs(q[i] - res.scale * pr[i]));
    res.residual = worst / (qmax + 1e-300);
  } else {
    const double m = static_cast<double>(xs.size());
    double spp = 0.0, sp1 = 0.0, spq = 0.0, sq = 0.0;
    double qlo = q[0], qhi = q[0];
    for (std::size_t i = 0; i < xs.size(); ++i) {
      spp += pr[i] * pr[i];
      sp1 += pr[i];
      spq += pr[i] * q[i];
      sq += q[i];
      qlo = std::min(qlo, q[i]);
      qhi = std::max(qhi, q[i]);
    }
    const double den = spp * m - sp1 * sp1;
    if (std::abs(den) <= 0.0)
      throw AnalysisError("crosscheck: degenerate reference");
    res.scale = (spq * m - sp1 * sq) / den;
    res.offset = (spp * sq - sp1 * spq) / den;
    double worst = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
      worst = std::max(worst, std::abs(q[i] - (res.scale * pr[i] + res.offset)));
    res.residual = worst / (qhi - qlo + 1e-300);
  }
  res.matches = res.residual <= 1e-6;
  return res;
}

BoundsScan mapping_bounds(const SynthesisProfile& p, int n) {
  BoundsScan b;
  b.s_min_abs = b.m_min = std::numeric_limits<double>::infinity();
  for (double x : linspace(p.operating().lo, p.operating().hi, n)) {
    const double sv = std::abs(p.s(x));
    const double mv = p.mass(x);
    b.s_min_abs = std::min(b.s_min_abs, sv);
    b.s_max_abs = std::max(b.s_max_abs, sv);
    b.m_min = std::min(b.m_min, mv);
    b.m_max = std::max(b.m_max, mv);
  }
  return b;
}

GravityBoundScan gravity_difference_check(const Trajectory& traj,
                                          const SynthesisProfile& p) {
  const std::size_t N = traj.size();
  if (N == 0) throw AnalysisError("gravity check: empty run");
  const MechanicalSystem& sys = p.system();
  const Generator& gen = p.generator();

  GravityBoundScan scan;
  std::vector<double> lhs(N), z1a(N);
  double dv_scale = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double x1 = traj.path.x[i][0];
    const double z1 = traj.z[i][0];
    const double K = gen.K(x1);
    lhs[i] = std::abs(sys.dV_du(x1, K) - sys.dV_du(x1, K + z1));
    z1a[i] = std::abs(z1);
    dv_scale = std::max(dv_scale, std::abs(sys.dV_du(x1, K)));
    for (double x2 : {K, K + 0.5 * z1, K + z1})
      scan.lipschitz = std::max(scan.lipschitz, std::abs(sys.d2V_duda(x1, x2)));
  }

  if (scan.lipschitz <= 1e-14) {
    scan.trivial = true;
    double worst = 0.0;
    for (double v : lhs) worst = std::max(worst, v);
    scan.max_ratio = worst <= 1e-9 * (1.0 + dv_scale)
                         ? 0.0
                         : std::numeric_limits<double>::infinity();
    return scan;
  }
  for (std::size_t i = 0; i < N; ++i) {
    const double den = scan.lipschitz * z1a[i];
    if (den >= 1e-12 * (1.0 + dv_scale))
      scan.max_ratio = std::max(scan.max_ratio, lhs[i] / den);
  }
  return scan;
}

CertReport certify(const SynthesisProfile& p, const Trajectory& traj,
                   const VerifyOptions& opt) {
  CertReport rep;
  const auto add = [&rep](std::string name, bool pass, bool hard, double obs,
                          double tol, std::string detail) {
    rep.checks.push_back(
        {std::move(name), pass, hard, obs, tol, std::move(detail)});
  };

  const Interval op = p.operating();
  const double glo =
      std::isnan(opt.xi1_lo) ? op.lo + 0.02 * op.length() : opt.xi1_lo;
  const double ghi =
      std::isnan(opt.xi1_hi) ? op.hi - 0.02 * op.length() : opt.xi1_hi;
  const Interval grid{glo, ghi};

  // standing assumptions on the mechanical system
  const AssumptionReport ar = check_assumptions(
      p.system(), op, opt.assumption_grid, opt.assumption_threshold);
  add("assumptions-inertia-pd", ar.positive_definite, true, ar.pd_margin,
      ar.threshold, "smallest inertia eigenvalue over the interval");
  add("assumptions-coupling-nonzero", ar.m_au_ok, true, ar.m_au_min_abs,
      ar.threshold,
      ar.m_au_sign_change ? "m_au changes sign on the interval"
                          : "min |m_au| over the interval");
  add("assumptions-velocity-coupling-sign", ar.c_u_bar_ok, false,
      ar.c_u_bar_min_abs, ar.threshold,
      "advisory: isolated zeros of c_u_bar do not break the identities below");

  const BoundsScan b = mapping_bounds(p);
  add("mapping-s-nonvanishing", b.s_min_abs > 0.0, true, b.s_min_abs, 0.0,
      "min |s|; max " + fmt(b.s_max_abs));
  add("target-mass-positive", b.m_min > 0.0, true, b.m_min, 0.0,
      "min target mass; max " + fmt(b.m_max));

  try {
    const auto crits = find_potential_minima(p, op);
    const PotentialCritical* best = nullptr;
    for (const auto& c : crits)
      if (c.is_minimum() && !best) best = &c;
    add("target-potential-minimum", best != nullptr, true,
        best ? best->x1 : 0.0, 0.0,
        best ? "minimum at x1 = " + fmt(best->x1) + ", U = " + fmt(best->U)
             : "no interior minimum found");
  } catch (const SynthesisError& e) {
    add("target-potential-minimum", false, true, 0.0, 0.0, e.what());
  }

  // immersion and synthesis identities
  const InvarianceScan inv =
      invariance_residual(p, grid, opt.xi2_max, opt.grid_n1, opt.grid_n2,
                          opt.immersion_dk_scale);
  std::string inv_detail =
      "worst at xi1 = " + fmt(inv.worst[0]) + ", xi2 = " + fmt(inv.worst[1]);
  if (opt.immersion_dk_scale != 1.0)
    inv_detail += " (injected slope fault, scale " +
                  fmt(opt.immersion_dk_scale) + ")";
  add("invariance-residual", inv.max_scaled <= 1e-8, true, inv.max_scaled,
      1e-8, inv_detail);

  const SynthesisIdentityScan ids =
      synthesis_identity_check(p, grid, opt.xi2_max, opt.grid_n1, opt.grid_n2);
  add("synthesis-identity-s", ids.s_residual <= 1e-9, true, ids.s_residual,
      1e-9, "s vs m_uu + m_au*K'");
  add("synthesis-identity-beta", ids.beta_residual <= 1e-9, true,
      ids.beta_residual, 1e-9, "beta*s vs its defining quotient");
  add("synthesis-identity-rho", ids.rho_residual <= 1e-9, true,
      ids.rho_residual, 1e-9, "rho*s vs the gravity slope on the manifold");
  add("control-two-path", ids.control_two_path <= 1e-9, true,
      ids.control_two_path, 1e-9,
      "direct control vs least squares from the immersed velocity");

  const double imc =
      immersion_consistency(p, grid, opt.xi2_max, opt.grid_n1, opt.grid_n2);
  add("immersion-consistency", imc <= 1e-12, true, imc, 1e-12,
      "max |off_manifold(immersion)|");

  // the run itself
  add("run-complete", traj.complete(), true,
      static_cast<double>(traj.size()), 0.0,
      traj.diagnostic().empty() ? "integration reached t_end"
                                : traj.diagnostic());

  double sup = 0.0;
  double x1_lo = std::numeric_limits<double>::infinity(), x1_hi = -x1_lo;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    sup = std::max(sup, traj.path.x[i].cwiseAbs().maxCoeff());
    x1_lo = std::min(x1_lo, traj.path.x[i][0]);
    x1_hi = std::max(x1_hi, traj.path.x[i][0]);
  }
  add("state-bounded", std::isfinite(sup) && sup < 1e3, true, sup, 1e3,
      "sup |x|_inf over the run");
  const double excursion =
      std::max({0.0, x1_hi - op.hi, op.lo - x1_lo});
  add("x1-within-operating", excursion == 0.0, false, excursion, 0.0,
      "x1 range seen [" + fmt(x1_lo) + ", " + fmt(x1_hi) + "] vs operating [" +
          fmt(op.lo) + ", " + fmt(op.hi) + "]");

  try {
    const ZDecayFit zf = z_decay_fit(traj, p.gamma1(), p.gamma2());
    std::string detail =
        zf.vacuous
            ? "run never leaves the manifold; decay holds by invariance"
            : "fitted " + fmt(zf.fitted_rate) + " vs predicted " +
                  fmt(zf.predicted_rate) + " from " +
                  std::to_string(zf.points_used) +
                  (zf.used_peaks ? " peaks" : " samples");
    add("z-decay-rate", zf.vacuous || zf.rel_error <= 0.10, true,
        zf.rel_error, 0.10, std::move(detail));
    add("z-tail-vanishes",
        zf.tail_norm <= std::max(1e-6 * (1.0 + zf.max_norm), 1e-8), true,
        zf.tail_norm, std::max(1e-6 * (1.0 + zf.max_norm), 1e-8),
        "max |z| over the last tenth of the run");
  } catch (const AnalysisError& e) {
    add("z-decay-rate", false, true, 0.0, 0.10, e.what());
    add("z-tail-vanishes", false, true, 0.0, 0.0, e.what());
  }

  try {
    const EnergyReport er = energy_convergence(traj, p, opt.tail_fraction);
    add("energy-tail-settled", er.tail_rel_variation <= 0.01, true,
        er.tail_rel_variation, 0.01,
        "relative spread of Hx over the trailing fraction");
    add("energy-rate-identity", er.identity_residual <= 1e-6, true,
        er.identity_residual, 1e-6,
        "exact dHx/dt vs its transient form along the run");
    const double env_tol = 1e-2 * (1.0 + er.fd_max);
    add("energy-envelope-domination", er.envelope_margin <= env_tol, true,
        er.envelope_margin, env_tol,
        "envelopes a1 = " + fmt(er.env1.a) + ", k1 = " + fmt(er.env1.k) +
            ", a2 = " + fmt(er.env2.a) + ", k2 = " + fmt(er.env2.k));
    const double cmp_tol = 1e-6 * (1.0 + er.h0_shifted);
    add("energy-comparison-bound", er.comparison_gap <= cmp_tol, true,
        er.comparison_gap, cmp_tol,
        "shifted energy vs the closed-form bound; shift " + fmt(er.shift) +
            ", sup r " + fmt(er.r_sup));
  } catch (const AnalysisError& e) {
    for (const char* name :
         {"energy-tail-settled", "energy-rate-identity",
          "energy-envelope-domination", "energy-comparison-bound"})
      add(name, false, true, 0.0, 0.0, e.what());
  }

  try {
    const ComparisonScan cs = comparison_selftest(1.0, 0.5, 2.0, 0.3, 1.0, 50.0);
    add("comparison-machinery", cs.max_rel_dev <= 1e-6, true, cs.max_rel_dev,
        1e-6, "closed form vs numeric integration of the bound equation");
  } catch (const Error& e) {
    add("comparison-machinery", false, true, 0.0, 1e-6, e.what());
  }

  try {
    const GravityBoundScan gs = gravity_difference_check(traj, p);
    add("gravity-difference-bound", gs.max_ratio <= 1.1, true, gs.max_ratio,
        1.1,
        gs.trivial ? "mixed second derivative vanishes identically"
                   : "Lipschitz constant " + fmt(gs.lipschitz));
  } catch (const AnalysisError& e) {
    add("gravity-difference-bound", false, true, 0.0, 1.1, e.what());
  }

  // steady orbit of the run and closure of the matching target orbit
  try {
    const OrbitSummary orb = extract_steady_orbit(traj, opt.tail_fraction);
    if (orb.degenerate) {
      add("steady-orbit", true, true, 0.0, 0.01,
          "tail settled at the equilibrium (point orbit)");
      add("target-orbit-closed", true, true, 0.0, 0.0,
          "equilibrium; closure vacuous");
    } else {
      add("steady-orbit", orb.converged, true,
          orb.crossing_spread / orb.period, 0.01,
          "period " + fmt(orb.period) + " s from " +
              std::to_string(orb.crossings_used) + " crossings");
      const Eigen::Vector2d xi0(orb.mean[0] + orb.amplitude[0], 0.0);
      try {
        const OrbitLevel lev = orbit_from_ic(p, xi0, op);
        if (!lev.warning.empty() || !(lev.period > 0.0)) {
          add("target-orbit-closed", false, true, 0.0, 0.0,
              lev.warning.empty() ? "no period found" : lev.warning);
        } else {
          const auto fld = [&p](double, const Vec<2>& v) {
            return Vec<2>(target_field(p, v));
          };
          IntegratorConfig cfg;
          cfg.method = Method::RK45Adaptive;
          cfg.t_end = lev.period;
          cfg.rel_tol = 1e-10;
          cfg.abs_tol = 1e-12;
          cfg.h_max = 1e-2;
          const auto back = integrate<2>(fld, lev.start, cfg);
          const double dist =
              (back.x.back() - lev.start).cwiseAbs().maxCoeff();
          const double tol = 1e-5 * (1.0 + lev.start.norm());
          add("target-orbit-closed", back.complete && dist <= tol, true, dist,
              tol,
              "return gap after one period " + fmt(lev.period) + " s at level " +
                  fmt(lev.energy));
        }
      } catch (const Error& e) {
        add("target-orbit-closed", false, true, 0.0, 0.0, e.what());
      }
    }
  } catch (const AnalysisError& e) {
    add("steady-orbit", false, true, 0.0, 0.01, e.what());
    add("target-orbit-closed", false, true, 0.0, 0.0,
        "steady orbit unavailable");
  }

  // quoted closed forms for the benchmark generators; deviations that are
  // understood are expected, so the soft verdict is "matches expectation"
  const std::string& gname = p.generator().name;
  if (gname == "furuta-k1") {
    const double k1 = get_param(p.generator().params, "k1", "crosscheck");
    try {
      const auto cm =
          closed_form_crosscheck(p, BenchmarkForm::FurutaMass, grid);
      add("quoted-form-mass", !cm.matches, false, cm.residual, 1e-6,
          "quoted mass form carries half the true exponent; mismatch expected "
          "(fit scale " + fmt(cm.scale) + ")");
      const auto cu =
          closed_form_crosscheck(p, BenchmarkForm::FurutaPotential, grid);
      const bool expect_match = std::abs(k1 - 1.0) <= 1e-9;
      add("quoted-form-potential", cu.matches == expect_match, false,
          cu.residual, 1e-6,
          expect_match
              ? "quoted potential form is exact at k1 = 1"
              : "quoted potential form is exact only at k1 = 1; observed k1 = " +
                    fmt(k1));
    } catch (const AnalysisError& e) {
      add("quoted-form-mass", false, false, 0.0, 1e-6, e.what());
    }
  } else if (gname == "pendubot-k2") {
    const double k2 = get_param(p.generator().params, "k2", "crosscheck");
    if (std::abs(k2 + 1.0) <= 1e-12) {
      try {
        const auto cm =
            closed_form_crosscheck(p, BenchmarkForm::PendubotMass, grid);
        add("quoted-form-mass", cm.matches, false, cm.residual, 1e-6,
            "matches up to normalization; fit scale " + fmt(cm.scale));
        const auto cu =
            closed_form_crosscheck(p, BenchmarkForm::PendubotPotential, grid);
        add("quoted-form-potential", cu.matches, false, cu.residual, 1e-6,
            "matches up to normalization; fit scale " + fmt(cu.scale) +
                ", offset " + fmt(cu.offset));
      } catch (const AnalysisError& e) {
        add("quoted-form-mass", false, false, 0.0, 1e-6, e.what());
      }
    }
  }

  if (opt.run_counterexample) {
    const D4Result cons = counterexample_run(false, opt.counterexample_t_end);
    add("counterexample-conservative",
        cons.H_drift_rel <= 1e-6 && cons.sup_norm <= 10.0, true,
        cons.H_drift_rel, 1e-6,
        "energy drift without disturbance; sup |xi| = " + fmt(cons.sup_norm));
    const D4Result drv = counterexample_run(true, opt.counterexample_t_end);
    add("counterexample-escape", drv.t_doubling > 0.0, true,
        drv.max_H / drv.H0, 2.0,
        drv.t_doubling > 0.0
            ? "energy doubles at t = " + fmt(drv.t_doubling) +
                  " although the disturbance decays"
            : "energy never doubled; the escape did not reproduce");
  }

  return rep;
}

}  // namespace orbistab
