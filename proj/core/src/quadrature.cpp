#include "orbistab/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace orbistab {

namespace {

using GK15 = boost::math::quadrature::gauss_kronrod<double, 15>;

struct Panel {
  double value = 0.0;
  double err = 0.0;
  double l1 = 0.0;
};

Panel eval_panel(const std::function<double(double)>& f, double a, double b) {
  // reference shim: the quadrature backend takes the functor by value, and
  // copying a std::function that closes over a whole system is not free
  const auto fr = [&f](double x) { return f(x); };
  // single non-adaptive Kronrod panel with error estimate and L1 norm
  Panel p;
  p.value = GK15::integrate(fr, a, b, 0, 0.0, &p.err, &p.l1);
  return p;
}

double adapt(const std::function<double(double)>& f, double a, double b,
             double tol, int depth, const Panel& p) {
  // The reported error never falls below ~1.3e-12 * L1 no matter how far a
  // converged panel is refined (it floors at roundoff scaled by max |f|, not
  // by width), so an absolute tol below that floor must be treated as met or
  // the bisection explodes. 1e-11 sits safely above the floor.
  if (p.err <= std::max(tol, 1e-11 * p.l1) || depth >= 30 ||
      !(b - a > 1e-15 * (1.0 + std::abs(a))))
    return p.value;
  const double mid = 0.5 * (a + b);
  const Panel left = eval_panel(f, a, mid);
  const Panel right = eval_panel(f, mid, b);
  // Stagnation guard: when the integrand carries noise (finite-difference
  // derivatives, roundoff-limited cancellation), the error estimate scales
  // with the noise and stops shrinking under bisection. Refining past that
  // point multiplies work exponentially without gaining a digit.
  if (left.err + right.err >= 0.9 * p.err) return left.value + right.value;
  return adapt(f, a, mid, 0.5 * tol, depth + 1, left) +
         adapt(f, mid, b, 0.5 * tol, depth + 1, right);
}

double adapt(const std::function<double(double)>& f, double a, double b,
             double tol, int depth) {
  return adapt(f, a, b, tol, depth, eval_panel(f, a, b));
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double tol) {
  if (!std::isfinite(a) || !std::isfinite(b) || !(tol > 0.0))
    throw DomainError("integrate_adaptive: bad interval or tolerance");
  if (a == b) return 0.0;
  if (a > b) return -adapt(f, b, a, tol, 0);
  return adapt(f, a, b, tol, 0);
}

CumulativeIntegral::CumulativeIntegral(std::function<double(double)> f,
                                       double anchor, Interval range,
                                       std::size_t nodes, double tol)
    : f_(std::move(f)) {
  if (nodes < 2) throw DomainError("CumulativeIntegral: need >= 2 nodes");
  // the table must bracket the anchor so every node integral is cumulative
  const double lo = std::min(range.lo, anchor);
  const double hi = std::max(range.hi, anchor);
  if (!(hi > lo)) throw DomainError("CumulativeIntegral: empty range");

  n_ = nodes;
  x0_ = lo;
  dx_ = (hi - lo) / (double)(n_ - 1);
  F_.resize(n_);
  fx_.resize(n_);

  const double panel_tol = std::max(tol / (double)n_, 1e-16);
  std::vector<double> panel(n_ - 1);
  for (std::size_t i = 0; i < n_; ++i) {
    const double x = x0_ + dx_ * (double)i;
    fx_[i] = f_(x);
    if (!std::isfinite(fx_[i])) {
      std::ostringstream os;
      os << "CumulativeIntegral: integrand non-finite at x = " << x;
      throw DomainError(os.str());
    }
    if (i > 0) panel[i - 1] = integrate_adaptive(f_, x - dx_, x, panel_tol);
  }

  // accumulate from the anchor's nearest node, then shift so F(anchor) = 0
  F_[0] = 0.0;
  for (std::size_t i = 1; i < n_; ++i) F_[i] = F_[i - 1] + panel[i - 1];
  const double at_anchor = value(anchor);
  for (auto& v : F_) v -= at_anchor;
}

double CumulativeIntegral::value(double x) const {
  if (n_ == 0) throw DomainError("CumulativeIntegral: empty table");
  const double xlo = x0_;
  const double xhi = x0_ + dx_ * (double)(n_ - 1);
  if (x < xlo) return F_.front() + integrate_adaptive(f_, xlo, x, 1e-12);
  if (x > xhi) return F_.back() + integrate_adaptive(f_, xhi, x, 1e-12);

  std::size_t i = (std::size_t)((x - x0_) / dx_);
  if (i >= n_ - 1) i = n_ - 2;
  const double t = (x - (x0_ + dx_ * (double)i)) / dx_;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = t3 - 2.0 * t2 + t;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = t3 - t2;
  return h00 * F_[i] + h10 * dx_ * fx_[i] + h01 * F_[i + 1] +
         h11 * dx_ * fx_[i + 1];
}

double CumulativeIntegral::derivative(double x) const {
  if (n_ == 0) throw DomainError("CumulativeIntegral: empty table");
  const double xlo = x0_;
  const double xhi = x0_ + dx_ * (double)(n_ - 1);
  if (x < xlo || x > xhi) return f_(x);

  std::size_t i = (std::size_t)((x - x0_) / dx_);
  if (i >= n_ - 1) i = n_ - 2;
  const double t = (x - (x0_ + dx_ * (double)i)) / dx_;
  const double t2 = t * t;
  const double dh00 = (6.0 * t2 - 6.0 * t) / dx_;
  const double dh10 = (3.0 * t2 - 4.0 * t + 1.0) / dx_;
  const double dh01 = (-6.0 * t2 + 6.0 * t) / dx_;
  const double dh11 = (3.0 * t2 - 2.0 * t) / dx_;
  return dh00 * F_[i] + dh10 * dx_ * fx_[i] + dh01 * F_[i + 1] +
         dh11 * dx_ * fx_[i + 1];
}

}  // namespace orbistab
