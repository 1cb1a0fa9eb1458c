#pragma once

// Small numerical helpers shared by the norm and gain modules.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace rinorm::detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// n points log-spaced on [lo, hi], endpoints included.
inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi >= lo) || n == 0) throw std::invalid_argument("log_grid: bad range");
  std::vector<double> g(n);
  if (n == 1) {
    g[0] = lo;
    return g;
  }
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i)
    g[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

/// Root of an increasing function `f` on [lo, hi] with f(lo) <= target <= f(hi),
/// bisected until the bracket is below `rel` relative width (or `abs_tol`).
template <class F>
double bisect_increasing(F&& f, double target, double lo, double hi, double rel = 1e-15,
                         double abs_tol = 0.0) {
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) < target)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= rel * std::max(std::abs(lo), std::abs(hi)) || hi - lo <= abs_tol) break;
  }
  return 0.5 * (lo + hi);
}

/// Solve f(x) = target for increasing f on the real line, expanding a bracket
/// around `guess` geometrically.
template <class F>
double solve_increasing(F&& f, double target, double guess = 0.0) {
  double step = 1.0;
  double lo = guess - step, hi = guess + step;
  for (int k = 0; f(lo) > target; ++k) {
    if (k > 1100) throw std::domain_error("solve_increasing: no lower bracket");
    step *= 2.0;
    lo = guess - step;
  }
  for (int k = 0; f(hi) < target; ++k) {
    if (k > 1100) throw std::domain_error("solve_increasing: no upper bracket");
    step *= 2.0;
    hi = guess + step;
  }
  return bisect_increasing(f, target, lo, hi, 1e-16, 1e-300);
}

/// Adaptive Gauss-Kronrod integral; `hi` may be +infinity.
template <class F>
double integrate(F&& f, double lo, double hi, double rel_tol = 1e-13) {
  if (!(hi > lo)) return 0.0;
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 20, rel_tol,
                                                                       &err);
}

inline bool leq_rel(double lhs, double rhs, double rel) {
  return lhs <= rhs + rel * std::max(std::abs(lhs), std::abs(rhs));
}

}  // namespace rinorm::detail
