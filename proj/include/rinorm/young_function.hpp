#pragma once

// Young functions: convex nondecreasing A with A(0) = 0.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

#include "rinorm/numeric.hpp"

namespace rinorm {

class YoungFunction {
 public:
  using Fn = std::function<double(double)>;

  /// `log_eval(x)` = ln A(e^x); `log_inverse(L)` = ln A^{-1}(e^L). Missing
  /// closed forms fall back to log(A(exp x)) and monotone bisection.
  YoungFunction(std::string name, Fn eval, Fn inverse = {}, Fn log_eval = {},
                Fn log_inverse = {})
      : name_(std::move(name)),
        eval_(std::move(eval)),
        inverse_(std::move(inverse)),
        log_eval_(std::move(log_eval)),
        log_inverse_(std::move(log_inverse)) {
    if (!eval_) throw std::invalid_argument("Young function needs an evaluator");
  }

  const std::string& name() const { return name_; }

  double operator()(double t) const { return t <= 0.0 ? 0.0 : eval_(t); }

  double log_at_exp(double x) const {
    if (log_eval_) return log_eval_(x);
    return std::log(eval_(std::exp(x)));
  }

  double inverse(double u) const {
    if (!(u >= 0.0)) throw std::domain_error("Young inverse of a negative value");
    if (u == 0.0) return 0.0;
    if (std::isinf(u)) return u;
    if (inverse_) return inverse_(u);
    return std::exp(log_inverse(std::log(u)));
  }

  double log_inverse(double log_u) const {
    if (log_inverse_) return log_inverse_(log_u);
    return detail::solve_increasing([this](double x) { return log_at_exp(x); }, log_u,
                                    log_u > 0.0 ? 0.0 : log_u);
  }

 private:
  std::string name_;
  Fn eval_, inverse_, log_eval_, log_inverse_;
};

/// A(t) = t^p, p >= 1.
inline YoungFunction power_young(double p) {
  if (!(p >= 1.0) || !std::isfinite(p))
    throw std::invalid_argument("power(p) needs 1 <= p < inf");
  char buf[64];
  std::snprintf(buf, sizeof buf, "power(%g)", p);
  return YoungFunction(
      buf, [p](double t) { return std::pow(t, p); },
      [p](double u) { return std::pow(u, 1.0 / p); }, [p](double x) { return p * x; },
      [p](double l) { return l / p; });
}

/// A(t) = e^t - 1.
inline YoungFunction exp_minus_one_young() {
  return YoungFunction(
      "exp_minus_one", [](double t) { return std::expm1(t); },
      [](double u) { return std::log1p(u); },
      [](double x) {
        const double y = std::exp(x);
        return y > 30.0 ? y + std::log1p(-std::exp(-y)) : std::log(std::expm1(y));
      },
      [](double l) {
        const double v = l > 30.0 ? l + std::log1p(std::exp(-l)) : std::log1p(std::exp(l));
        return std::log(v);
      });
}

/// A(t) = t (1 + ln^+ t)^alpha, alpha >= 0.
inline YoungFunction t_log_alpha_young(double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("t_log_alpha(alpha) needs alpha >= 0");
  char buf[64];
  std::snprintf(buf, sizeof buf, "t_log_alpha(%g)", alpha);
  return YoungFunction(
      buf,
      [alpha](double t) { return t <= 1.0 ? t : t * std::pow(1.0 + std::log(t), alpha); },
      {},
      [alpha](double x) { return x <= 0.0 ? x : x + alpha * std::log1p(x); },
      [alpha](double l) {
        if (l <= 0.0) return l;
        // x + alpha ln(1+x) = l has its root in [l/(1+alpha), l]
        return detail::bisect_increasing(
            [alpha](double x) { return x + alpha * std::log1p(x); }, l, l / (1.0 + alpha), l,
            1e-16);
      });
}

struct YoungCheck {
  bool vanishes_at_zero = true;
  bool nondecreasing = true;
  bool convex = true;
  double max_inverse_error = 0.0;  // relative, over the test grid

  bool ok(double inverse_tol = 1e-10) const {
    return vanishes_at_zero && nondecreasing && convex && max_inverse_error <= inverse_tol;
  }
};

/// Midpoint convexity, monotonicity and inverse round trip on a log grid
/// [lo, hi].
inline YoungCheck check_young(const YoungFunction& a, double lo = 1e-6, double hi = 1e6,
                              std::size_t n = 241) {
  YoungCheck c;
  c.vanishes_at_zero = a(0.0) == 0.0;
  const auto grid = detail::log_grid(lo, hi, n);
  double prev = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    const double v = a(t);
    if (v < prev) c.nondecreasing = false;
    prev = v;
    if (i > 0) {
      const double s = grid[i - 1];
      const double mid = a(0.5 * (s + t));
      if (mid > 0.5 * (a(s) + v) * (1.0 + 1e-12)) c.convex = false;
    }
    if (std::isfinite(v) && v > 0.0) {
      const double back = a.inverse(v);
      c.max_inverse_error = std::max(c.max_inverse_error, std::abs(back - t) / t);
    }
  }
  return c;
}

}  // namespace rinorm
