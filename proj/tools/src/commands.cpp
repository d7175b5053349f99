#include "commands.hpp"

#include "config.hpp"

#include <orbistab/certify.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>
#include <vector>

namespace orbistab::cli {

namespace {

std::string fmt(double v, const char* spec = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string replace_extension(const std::string& path, const std::string& ext) {
  const std::size_t slash = path.find_last_of("/\\");
  const std::size_t dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return path + ext;
  return path.substr(0, dot) + ext;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot open output file: " + path);
  return f;
}

}  // namespace

RunSummary summarize_run(const Scenario& sc, const SynthesisProfile& profile,
                         const Trajectory& traj) {
  RunSummary s;
  s.name = sc.name;
  s.complete = traj.complete();
  s.diagnostic = traj.diagnostic();
  s.samples = traj.size();
  if (s.samples == 0) return s;
  s.t_end = traj.path.t.back();

  s.x1_min = traj.path.x.front()[0];
  s.x1_max = s.x1_min;
  for (std::size_t i = 0; i < s.samples; ++i) {
    const State4 x = traj.state(i);
    s.x1_min = std::min(s.x1_min, x.x1);
    s.x1_max = std::max(s.x1_max, x.x1);
    s.max_abs_x3 = std::max(s.max_abs_x3, std::abs(x.x3));
    s.max_abs_x4 = std::max(s.max_abs_x4, std::abs(x.x4));
    s.z_max = std::max(s.z_max, traj.z[i].norm());
  }
  s.hx_end = traj.Hx.back();

  // tail = last 20% of the run, by time
  const double t_tail = s.t_end - 0.2 * (s.t_end - traj.path.t.front());
  double lo = s.hx_end, hi = s.hx_end;
  for (std::size_t i = 0; i < s.samples; ++i) {
    if (traj.path.t[i] < t_tail) continue;
    lo = std::min(lo, traj.Hx[i]);
    hi = std::max(hi, traj.Hx[i]);
  }
  s.hx_tail_variation = (hi - lo) / std::max(1e-12, std::abs(hi));

  if (s.complete && s.samples > 10) {
    try {
      const ZDecayFit fit = z_decay_fit(traj, sc.gamma1, sc.gamma2);
      s.z_rate_fitted = fit.fitted_rate;
      s.z_rate_predicted = fit.predicted_rate;
      s.z_vacuous = fit.vacuous;
    } catch (const AnalysisError&) {
      // no usable decay window (e.g. very short runs); leave zeros
    }
  }

  try {
    const OrbitSummary orbit = extract_steady_orbit(traj, sc.verify.tail_fraction);
    s.degenerate = orbit.degenerate;
    if (orbit.degenerate) {
      s.orbit_note = "settled to an equilibrium (point orbit)";
      for (int i = 0; i < 4; ++i) s.mean[i] = orbit.mean[i];
    } else {
      s.orbit_ok = true;
      s.period = orbit.period;
      for (int i = 0; i < 4; ++i) {
        s.amplitude[i] = orbit.amplitude[i];
        s.mean[i] = orbit.mean[i];
      }
      s.crossing_spread = orbit.crossing_spread;
      s.crossings = orbit.crossings_used;
      if (!orbit.converged)
        s.orbit_note = "crossing intervals still drifting; run longer";
    }
  } catch (const AnalysisError& e) {
    s.orbit_note = e.what();
  }
  return s;
}

void write_summary(const RunSummary& s, std::ostream& os) {
  os << "run            : " << s.name << "\n";
  if (s.complete) {
    os << "status         : complete (" << s.samples << " samples, t = "
       << fmt(s.t_end) << ")\n";
  } else {
    os << "status         : stopped early at t = " << fmt(s.t_end) << " ("
       << (s.diagnostic.empty() ? "no diagnostic" : s.diagnostic) << ")\n";
  }
  if (s.samples == 0) return;
  os << "x1 range       : [" << fmt(s.x1_min) << ", " << fmt(s.x1_max)
     << "]\n";
  os << "max |x3|, |x4| : " << fmt(s.max_abs_x3) << ", " << fmt(s.max_abs_x4)
     << "\n";
  os << "H(x) final     : " << fmt(s.hx_end, "%.10g") << " (tail variation "
     << fmt(100.0 * s.hx_tail_variation, "%.2g") << "%)\n";
  os << "off-manifold   : max |z| = " << fmt(s.z_max);
  if (s.z_vacuous)
    os << " (never left the manifold)";
  else if (s.z_rate_predicted > 0.0)
    os << ", decay rate " << fmt(s.z_rate_fitted) << " fitted vs "
       << fmt(s.z_rate_predicted) << " predicted";
  os << "\n";
  if (s.orbit_ok) {
    os << "orbit          : period " << fmt(s.period) << ", amplitude x1 "
       << fmt(s.amplitude[0]) << ", mean x1 " << fmt(s.mean[0]) << "\n";
    os << "                 " << s.crossings
       << " section crossings, interval spread " << fmt(s.crossing_spread, "%.3g")
       << " s\n";
    if (!s.orbit_note.empty()) os << "                 (" << s.orbit_note << ")\n";
  } else if (s.degenerate) {
    os << "orbit          : " << s.orbit_note << ", mean x1 " << fmt(s.mean[0])
       << "\n";
  } else {
    os << "orbit          : not extracted (" << s.orbit_note << ")\n";
  }
}

int cmd_simulate(const Scenario& sc, std::ostream& out) {
  const BuiltScenario built = build_scenario(sc);
  const Trajectory traj =
      simulate_closed_loop(built.profile, sc.x0, sc.integ, sc.representation);

  if (!sc.csv_path.empty()) write_trajectory_csv(traj, sc.csv_path);

  const RunSummary s = summarize_run(sc, built.profile, traj);
  std::string sum_path = sc.summary_path;
  if (sum_path.empty() && !sc.csv_path.empty())
    sum_path = replace_extension(sc.csv_path, ".summary.txt");
  if (!sum_path.empty()) {
    std::ofstream f = open_out(sum_path);
    write_summary(s, f);
  }
  write_summary(s, out);
  if (!sc.csv_path.empty())
    out << "trajectory     : " << sc.csv_path << "\n";
  return traj.complete() ? 0 : 2;
}

namespace {

struct SweepRow {
  std::string label;
  bool ran = false;
  bool complete = false;
  bool degenerate = false;
  RunSummary summary;
  std::string error;
};

std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(text);
  while (std::getline(is, cur, sep)) {
    // trim
    const auto b = cur.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    const auto e = cur.find_last_not_of(" \t");
    parts.push_back(cur.substr(b, e - b + 1));
  }
  return parts;
}

std::vector<Scenario> sweep_variants(const Scenario& base,
                                     const std::string& axis,
                                     const std::string& values,
                                     std::vector<std::string>& labels) {
  std::vector<Scenario> out;
  if (axis == "gamma") {
    for (const std::string& item : split_list(values, ',')) {
      const std::size_t colon = item.find(':');
      if (colon == std::string::npos)
        throw ConfigError("gamma sweep values look like g1:g2, got '" + item +
                          "'");
      Scenario sc = base;
      sc.gamma1 = parse_double(item.substr(0, colon), "gamma sweep");
      sc.gamma2 = parse_double(item.substr(colon + 1), "gamma sweep");
      labels.push_back(item);
      out.push_back(std::move(sc));
    }
  } else if (axis == "k") {
    for (const std::string& item : split_list(values, ',')) {
      Scenario sc = base;
      const double v = parse_double(item, "k sweep");
      if (sc.generator == "furuta-k1")
        sc.k1 = v;
      else if (sc.generator == "pendubot-k2")
        sc.k2 = v;
      else
        throw ConfigError("k sweep needs a one-parameter generator, not '" +
                          sc.generator + "'");
      labels.push_back(item);
      out.push_back(std::move(sc));
    }
  } else if (axis == "x0") {
    for (const std::string& item : split_list(values, ';')) {
      const std::vector<double> v = parse_doubles(item, "x0 sweep");
      if (v.size() != 4)
        throw ConfigError("x0 sweep entries need 4 numbers, got '" + item +
                          "'");
      Scenario sc = base;
      sc.x0 = State4{v[0], v[1], v[2], v[3]};
      labels.push_back(item);
      out.push_back(std::move(sc));
    }
  } else {
    throw ConfigError("unknown sweep axis '" + axis +
                      "' (expected gamma, k or x0)");
  }
  if (out.empty()) throw ConfigError("sweep has no values");
  return out;
}

}  // namespace

unsigned sweep_jobs() {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ORBISTAB_JOBS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1)
      throw ConfigError("ORBISTAB_JOBS must be a positive integer, got '" +
                        std::string(env) + "'");
    return static_cast<unsigned>(std::min<long>(v, hw));
  }
  return hw;
}

int cmd_sweep(const Scenario& base, const std::string& axis,
              const std::string& values, const std::string& out_path,
              std::ostream& out) {
  std::vector<std::string> labels;
  std::vector<Scenario> variants = sweep_variants(base, axis, values, labels);

  const std::size_t n = variants.size();
  std::vector<SweepRow> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i].label = labels[i];

  // workers pull indices; rows land in input order regardless of timing
  std::atomic<std::size_t> next{0};
  const unsigned jobs =
      static_cast<unsigned>(std::min<std::size_t>(sweep_jobs(), n));
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      SweepRow& row = rows[i];
      try {
        const Scenario& sc = variants[i];
        const BuiltScenario built = build_scenario(sc);
        const Trajectory traj = simulate_closed_loop(built.profile, sc.x0,
                                                     sc.integ,
                                                     sc.representation);
        row.summary = summarize_run(sc, built.profile, traj);
        row.ran = true;
        row.complete = row.summary.complete;
        row.degenerate = row.summary.degenerate;
      } catch (const Error& e) {
        row.error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (std::thread& th : pool) th.join();

  std::ostringstream csv;
  csv << "index,value,complete,degenerate,period,amp_x1,amp_x2,max_abs_x3,"
         "max_abs_x4,mean_x1,Hx_end,z_rate\n";
  bool all_complete = true;
  for (std::size_t i = 0; i < n; ++i) {
    const SweepRow& row = rows[i];
    const RunSummary& s = row.summary;
    all_complete = all_complete && row.complete;
    csv << i << ',' << row.label << ',' << (row.complete ? 1 : 0) << ','
        << (row.degenerate ? 1 : 0) << ',';
    if (row.ran && s.orbit_ok)
      csv << fmt(s.period, "%.10g") << ',' << fmt(s.amplitude[0], "%.10g")
          << ',' << fmt(s.amplitude[1], "%.10g");
    else
      csv << "nan,nan,nan";
    if (row.ran)
      csv << ',' << fmt(s.max_abs_x3, "%.10g") << ','
          << fmt(s.max_abs_x4, "%.10g") << ',' << fmt(s.mean[0], "%.10g")
          << ',' << fmt(s.hx_end, "%.10g") << ','
          << fmt(s.z_vacuous ? 0.0 : s.z_rate_fitted, "%.10g") << '\n';
    else
      csv << ",nan,nan,nan,nan,nan\n";
  }

  if (!out_path.empty()) {
    std::ofstream f = open_out(out_path);
    f << csv.str();
  } else {
    out << csv.str();
  }

  std::size_t failed = 0;
  for (const SweepRow& row : rows)
    if (!row.complete) ++failed;
  out << "sweep " << axis << ": " << n << " runs, " << (n - failed)
      << " complete";
  if (!out_path.empty()) out << ", wrote " << out_path;
  out << "\n";
  for (std::size_t i = 0; i < n; ++i)
    if (!rows[i].error.empty())
      out << "  run " << i << " (" << rows[i].label << "): " << rows[i].error
          << "\n";
  return all_complete ? 0 : 2;
}

int cmd_verify(const Scenario& sc, std::ostream& out) {
  const BuiltScenario built = build_scenario(sc);
  const Trajectory traj =
      simulate_closed_loop(built.profile, sc.x0, sc.integ, sc.representation);
  const CertReport report = certify(built.profile, traj, sc.verify);

  report.write_text(out);
  if (!sc.report_path.empty()) {
    std::ofstream f = open_out(sc.report_path);
    report.write_text(f);
  }
  if (!sc.report_csv_path.empty()) {
    std::ofstream f = open_out(sc.report_csv_path);
    report.write_csv(f);
  }
  if (!traj.complete()) return 2;
  return report.all_pass() ? 0 : 1;
}

namespace {

// Largest-triangle-three-buckets downsampling; returns ascending indices,
// always keeping the endpoints. Deterministic for a given series.
std::vector<std::size_t> lttb_indices(const std::vector<double>& xs,
                                      const std::vector<double>& ys,
                                      std::size_t cap) {
  const std::size_t n = xs.size();
  std::vector<std::size_t> idx;
  if (n <= cap) {
    idx.resize(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    return idx;
  }
  idx.reserve(cap);
  idx.push_back(0);
  const double bucket = static_cast<double>(n - 2) / static_cast<double>(cap - 2);
  std::size_t prev = 0;
  for (std::size_t b = 0; b < cap - 2; ++b) {
    const std::size_t lo = 1 + static_cast<std::size_t>(b * bucket);
    std::size_t hi = 1 + static_cast<std::size_t>((b + 1) * bucket);
    hi = std::min(hi, n - 1);

    // average of the next bucket is the third triangle vertex
    std::size_t nlo = 1 + static_cast<std::size_t>((b + 1) * bucket);
    std::size_t nhi = 1 + static_cast<std::size_t>((b + 2) * bucket);
    nlo = std::min(nlo, n - 1);
    nhi = std::min(nhi, n);
    double ax = 0.0, ay = 0.0;
    const std::size_t m = std::max<std::size_t>(1, nhi - nlo);
    for (std::size_t i = nlo; i < nhi; ++i) {
      ax += xs[i];
      ay += ys[i];
    }
    if (nhi > nlo) {
      ax /= static_cast<double>(m);
      ay /= static_cast<double>(m);
    } else {
      ax = xs[n - 1];
      ay = ys[n - 1];
    }

    double best = -1.0;
    std::size_t pick = lo;
    for (std::size_t i = lo; i < hi; ++i) {
      const double area = std::abs((xs[prev] - ax) * (ys[i] - ys[prev]) -
                                   (xs[prev] - xs[i]) * (ay - ys[prev]));
      if (area > best) {
        best = area;
        pick = i;
      }
    }
    idx.push_back(pick);
    prev = pick;
  }
  idx.push_back(n - 1);
  return idx;
}

void write_pairs(const std::string& path, const char* header,
                 const std::vector<double>& a, const std::vector<double>& b,
                 const std::vector<std::size_t>& idx) {
  std::ofstream f = open_out(path);
  f << header << "\n";
  char buf[80];
  for (const std::size_t i : idx) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", a[i], b[i]);
    f << buf;
  }
}

}  // namespace

int cmd_plotdata(const std::string& csv_in, const std::string& kind,
                 const std::string& out_prefix, std::ostream& out) {
  const Trajectory traj = read_trajectory_csv(csv_in);
  const std::size_t n = traj.size();
  if (n < 2)
    throw ConfigError("plotdata needs at least 2 trajectory rows, got " +
                      std::to_string(n));
  constexpr std::size_t kCap = 5000;

  std::vector<double> cols[8];
  static const char* names[8] = {"x1", "x2", "x3", "x4", "z1", "z2", "u", "Hx"};
  for (auto& c : cols) c.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int j = 0; j < 4; ++j) cols[j][i] = traj.path.x[i][j];
    cols[4][i] = traj.z[i][0];
    cols[5][i] = traj.z[i][1];
    cols[6][i] = traj.u[i];
    cols[7][i] = traj.Hx[i];
  }

  if (kind == "timeseries") {
    for (int j = 0; j < 8; ++j) {
      const auto idx = lttb_indices(traj.path.t, cols[j], kCap);
      const std::string path = out_prefix + "_" + names[j] + ".csv";
      write_pairs(path, ("t," + std::string(names[j])).c_str(), traj.path.t,
                  cols[j], idx);
    }
    out << "plotdata: wrote 8 timeseries files (" << out_prefix
        << "_<channel>.csv, <= " << kCap << " points each)\n";
  } else if (kind == "phase") {
    const auto i13 = lttb_indices(cols[0], cols[2], kCap);
    write_pairs(out_prefix + "_x1x3.csv", "x1,x3", cols[0], cols[2], i13);
    const auto i24 = lttb_indices(cols[1], cols[3], kCap);
    write_pairs(out_prefix + "_x2x4.csv", "x2,x4", cols[1], cols[3], i24);
    out << "plotdata: wrote " << out_prefix << "_x1x3.csv and " << out_prefix
        << "_x2x4.csv\n";
  } else {
    throw ConfigError("unknown plotdata kind '" + kind +
                      "' (expected timeseries or phase)");
  }
  return 0;
}

}  // namespace orbistab::cli
