#pragma once

#include "orbistab/types.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace orbistab {

/// Integral of f over [a, b] to absolute tolerance tol (adaptive bisection on
/// a Gauss-Kronrod kernel). a > b is allowed and flips the sign.
double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double tol = 1e-10);

/// Cumulative integral F(x) = int_anchor^x f, tabulated on a uniform grid and
/// evaluated between nodes by cubic Hermite interpolation. Node slopes are
/// the exact integrand values, so derivative() returns a C^1-consistent f.
///
/// Queries outside the table fall back to direct adaptive quadrature from the
/// nearest edge node; that path allocates nothing and keeps the object
/// immutable, so evaluation is safe from concurrent threads.
class CumulativeIntegral {
 public:
  CumulativeIntegral() = default;
  CumulativeIntegral(std::function<double(double)> f, double anchor,
                     Interval range, std::size_t nodes = 4096,
                     double tol = 1e-10);

  double value(double x) const;
  double derivative(double x) const;
  Interval range() const { return {x0_, x0_ + dx_ * (double)(n_ - 1)}; }
  std::size_t nodes() const { return n_; }

 private:
  std::function<double(double)> f_;
  std::vector<double> F_;   // cumulative values at nodes
  std::vector<double> fx_;  // integrand at nodes
  double x0_ = 0.0;
  double dx_ = 0.0;
  std::size_t n_ = 0;
};

}  // namespace orbistab
