#pragma once

// Gain functions g : [1, inf) -> [1, inf) with g(1) = 1, Ermakoff's condition
// lim t g(t) / g(e^t) = 0, the series c1 = sum 1/(j g(j)), the Psi ratio of
// fundamental functions, the claim inequality, the Orlicz gain criterion,
// Zippin indices and the slowly varying example families.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rinorm/numeric.hpp"
#include "rinorm/ri_norms.hpp"
#include "rinorm/young_function.hpp"

namespace rinorm {

class GainFunction {
 public:
  using Fn = std::function<double(double)>;

  /// `log_at_exp(x)` must return ln g(e^x); it is the only path used for
  /// arguments beyond the double range.
  GainFunction(std::string name, Fn eval, Fn log_at_exp = {})
      : name_(std::move(name)), eval_(std::move(eval)), log_at_exp_(std::move(log_at_exp)) {}

  const std::string& name() const { return name_; }
  double operator()(double t) const { return eval_(t); }
  bool has_log_path() const { return static_cast<bool>(log_at_exp_); }

  double log_at_exp(double x) const {
    if (!log_at_exp_)
      throw std::logic_error("gain " + name_ + " has no log-domain evaluator for g(e^t)");
    return log_at_exp_(x);
  }

  /// ln g(t), through the log path when there is one.
  double log_at(double t) const { return log_at_exp_ ? log_at_exp_(std::log(t)) : std::log(eval_(t)); }

 private:
  std::string name_;
  Fn eval_, log_at_exp_;
};

/// g(t) = (1 + ln t)^alpha.
inline GainFunction log_alpha_gain(double alpha) {
  return GainFunction("log_alpha(" + RISpace::num(alpha) + ")",
                      [alpha](double t) { return std::pow(1.0 + std::log(t), alpha); },
                      [alpha](double x) { return alpha * std::log1p(x); });
}

/// g(t) = t^eps.
inline GainFunction pow_gain(double eps) {
  return GainFunction("pow(" + RISpace::num(eps) + ")",
                      [eps](double t) { return std::pow(t, eps); },
                      [eps](double x) { return eps * x; });
}

/// g(t) = Psi(1/t) / Psi(1) with Psi = phi_X / phi_Y.
inline GainFunction psi_of_gain(const RISpace& x, const RISpace& y) {
  const double at_one = log_fundamental(x, 0.0) - log_fundamental(y, 0.0);
  std::string name = "psi_of(" + x.name() + "," + y.name() + ")";
  return GainFunction(
      std::move(name),
      [x, y, at_one](double t) {
        const double u = std::log(t);
        return std::exp(log_fundamental(x, u) - log_fundamental(y, u) - at_one);
      },
      [x, y, at_one](double s) {
        return log_fundamental(x, s) - log_fundamental(y, s) - at_one;
      });
}

struct GainCheck {
  bool unit_at_one = true;
  bool nondecreasing = true;
  bool at_least_one = true;
  bool ok() const { return unit_at_one && nondecreasing && at_least_one; }
};

inline GainCheck check_gain(const GainFunction& g, double hi = 1e12, std::size_t n = 241) {
  GainCheck c;
  c.unit_at_one = g(1.0) == 1.0;
  double prev = 1.0;
  for (double t : detail::log_grid(1.0, hi, n)) {
    const double v = g(t);
    if (v < prev * (1.0 - 1e-14)) c.nondecreasing = false;
    if (v < 1.0 - 1e-14) c.at_least_one = false;
    prev = v;
  }
  return c;
}

// ---------------------------------------------------------------- Ermakoff

enum class Verdict { pass, fail, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    default: return "inconclusive";
  }
}

struct ErmakoffSample {
  double t;
  double ratio;      // t g(t) / g(e^t), may underflow to 0
  double log_ratio;  // always finite
};

struct ErmakoffResult {
  double estimated_limit = 0.0;  // last trace value
  Verdict verdict = Verdict::inconclusive;
  std::vector<ErmakoffSample> trace;
  int max_k = 40;           // samples at t = 2^k, k = 0..max_k
  int tail = 8;             // trailing samples inspected for the trend
  double pass_below = 1e-3;
  double fail_above = 0.1;
};

/// Samples t g(t)/g(e^t) at t = 2^k in the log domain. Pass: the tail of the
/// trace is strictly decreasing and ends below 1e-3. Fail: the trace ends at
/// or above 0.1 and its tail is nondecreasing or flat to within 5%.
inline ErmakoffResult ermakoff_test(const GainFunction& g, int max_k = 40) {
  if (!g.has_log_path())
    throw std::logic_error("ermakoff_test: gain " + g.name() + " has no log-domain evaluator");
  ErmakoffResult r;
  r.max_k = max_k;
  for (int k = 0; k <= max_k; ++k) {
    const double t = std::ldexp(1.0, k);
    const double lr = std::log(t) + g.log_at_exp(std::log(t)) - g.log_at_exp(t);
    if (std::isnan(lr)) throw std::domain_error("ermakoff_test: NaN in trace of " + g.name());
    r.trace.push_back({t, std::exp(lr), lr});
  }
  const int n = static_cast<int>(r.trace.size());
  const int start = std::max(0, n - r.tail);
  bool decreasing = true, nondecreasing = true;
  double lo = r.trace[start].log_ratio, hi = lo;
  for (int i = start + 1; i < n; ++i) {
    const double a = r.trace[i - 1].log_ratio, b = r.trace[i].log_ratio;
    if (!(b < a)) decreasing = false;
    if (b < a) nondecreasing = false;
    lo = std::min(lo, b);
    hi = std::max(hi, b);
  }
  const auto& last = r.trace.back();
  r.estimated_limit = last.ratio;
  const bool flat = hi - lo <= std::log(1.05);
  if (decreasing && last.ratio < r.pass_below)
    r.verdict = Verdict::pass;
  else if (last.ratio >= r.fail_above && (nondecreasing || flat))
    r.verdict = Verdict::fail;
  else
    r.verdict = Verdict::inconclusive;
  return r;
}

// ------------------------------------------------------------------ series

struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SeriesSum {
  double value = 0.0;       // partial sum + midpoint tail integral
  double partial = 0.0;     // S_N
  std::size_t terms = 0;    // N
  double tail_upper = 0.0;  // int_N^inf dt / h(t); the true sum lies in [S_N, S_N + tail_upper]
};

/// c1 = sum_{j >= 1} 1/h(j), h(j) = j g(j). The partial sum runs until a term
/// falls below tol * S or the term cap is reached; the remainder is the
/// integral int_{N+1/2}^inf dt / h(t), done in x = ln t as int dx / g(e^x).
/// The midpoint tail is off by about |(1/h)'(N)| / 24, under 1e-10 for the
/// default cap. Ermakoff's test guards convergence.
inline SeriesSum series_c1(const GainFunction& g, double tol = 1e-12,
                           std::size_t max_terms = std::size_t{1} << 16) {
  const auto er = ermakoff_test(g);
  if (er.verdict == Verdict::fail)
    throw DivergenceError("series_c1: sum 1/(j g(j)) diverges for " + g.name() +
                          " (Ermakoff ratio does not fall below 1)");
  SeriesSum s;
  double sum = 0.0, comp = 0.0;  // Neumaier
  std::size_t j = 1;
  for (; j <= max_terms; ++j) {
    const double jd = static_cast<double>(j);
    const double term = 1.0 / (jd * g(jd));
    const double t = sum + term;
    comp += std::abs(sum) >= term ? (sum - t) + term : (term - t) + sum;
    sum = t;
    if (term < tol * (sum + comp)) break;
  }
  s.terms = std::min(j, max_terms);
  s.partial = sum + comp;
  auto tail_from = [&g](double a) {
    return detail::integrate([&g](double x) { return std::exp(-g.log_at_exp(x)); }, std::log(a),
                             detail::kInf, 1e-10);
  };
  const double n = static_cast<double>(s.terms);
  const double mid_tail = tail_from(n + 0.5);
  s.tail_upper = tail_from(n);
  if (!std::isfinite(mid_tail) || !std::isfinite(s.tail_upper) || s.tail_upper > 1e6 * s.partial)
    throw DivergenceError("series_c1: tail integral diverges for " + g.name());
  s.value = s.partial + mid_tail;
  return s;
}

// ----------------------------------------------------------- Psi and claim

inline double psi_gain(const RISpace& x, const RISpace& y, double t) {
  return fundamental_function(x, t) / fundamental_function(y, t);
}

struct ClaimReport {
  std::size_t points = 0;
  std::size_t hypothesis_violations = 0;  // Psi(t) < g(1/t)
  std::size_t concavity_violations = 0;   // t > phi_X(t)
  std::size_t conclusion_violations = 0;  // phi_X^{-1}(t) > phi_Y^{-1}(t / g(1/t))
  std::size_t skipped = 0;                // t outside the range of phi_X
  double worst_conclusion_ratio = 0.0;    // max LHS / RHS

  bool hypothesis_holds() const { return hypothesis_violations == 0 && concavity_violations == 0; }
};

/// Grid check of phi_X^{-1}(t) <= phi_Y^{-1}(t / g(1/t)) on t in (0, 1),
/// together with its hypotheses Psi(t) >= g(1/t) and t <= phi_X(t).
inline ClaimReport claim_check(const RISpace& x, const RISpace& y, const GainFunction& g,
                               std::span<const double> grid, double rel_tol = 1e-9) {
  ClaimReport r;
  const double x_top = fundamental_function(x, 1.0);
  for (double t : grid) {
    if (!(t > 0.0 && t < 1.0)) throw std::domain_error("claim_check: grid must lie in (0,1)");
    ++r.points;
    const double gx = g(1.0 / t);
    const double phix = fundamental_function(x, t);
    if (!detail::leq_rel(gx, phix / fundamental_function(y, t), rel_tol)) ++r.hypothesis_violations;
    if (!detail::leq_rel(t, phix, rel_tol)) ++r.concavity_violations;
    if (t > x_top) {
      ++r.skipped;
      continue;
    }
    const double lhs = fundamental_inverse(x, t);
    const double rhs = fundamental_inverse(y, t / gx);
    r.worst_conclusion_ratio = std::max(r.worst_conclusion_ratio, lhs / rhs);
    if (!detail::leq_rel(lhs, rhs, rel_tol)) ++r.conclusion_violations;
  }
  return r;
}

struct YoungGainReport {
  std::size_t points = 0;
  std::size_t violations = 0;              // A(t g(t)) > A_hat(t)
  std::size_t consequence_violations = 0;  // phi_{A_hat}^{-1}(s) > phi_A^{-1}(s / g(1/s)), s = 1/t
  std::optional<double> first_violation;   // smallest violating t
};

/// A(t g(t)) <= A_hat(t) for t > 1 on the grid, and the fundamental-function
/// form of the same inequality.
inline YoungGainReport young_gain_check(const YoungFunction& a, const YoungFunction& a_hat,
                                        const GainFunction& g, std::span<const double> grid,
                                        double rel_tol = 1e-9) {
  YoungGainReport r;
  const auto lx = RISpace::orlicz(a_hat);
  const auto ly = RISpace::orlicz(a);
  const double x_top = fundamental_function(lx, 1.0);
  const double y_top = fundamental_function(ly, 1.0);
  for (double t : grid) {
    if (!(t > 1.0)) throw std::domain_error("young_gain_check: grid must lie in (1, inf)");
    ++r.points;
    const double gt = g(t);
    if (!detail::leq_rel(a(t * gt), a_hat(t), rel_tol)) {
      ++r.violations;
      if (!r.first_violation || t < *r.first_violation) r.first_violation = t;
    }
    const double s = 1.0 / t;
    if (s > x_top || s / gt > y_top) continue;
    const double lhs = fundamental_inverse(lx, s);
    const double rhs = fundamental_inverse(ly, s / gt);
    if (!detail::leq_rel(lhs, rhs, rel_tol)) ++r.consequence_violations;
  }
  return r;
}

// ------------------------------------------------------------------ Zippin

/// Grid sup of phi(ts)/phi(t) over t in `t_grid` with t, ts in (0, 1]. This is
/// a lower estimate of M_X(s).
inline double zippin_dilation(const FundamentalFunction& phi, double s,
                              std::span<const double> t_grid) {
  if (!(s > 0.0)) throw std::domain_error("zippin_dilation: s must be positive");
  double best = -detail::kInf;
  bool any = false;
  for (double t : t_grid) {
    if (!(t > 0.0) || t > 1.0 || t * s > 1.0) continue;
    any = true;
    const double u = -std::log(t);
    best = std::max(best, phi.log_at(std::max(u - std::log(s), 0.0)) - phi.log_at(u));
  }
  if (!any) throw std::domain_error("zippin_dilation: no admissible grid points");
  return std::exp(best);
}

/// Uniform grid in u = ln(1/t) with spacing `log_step` up to `log_t_max`;
/// dilations s = e^{+-m log_step} for m in a geometric set up to `log_s_max`.
struct ZippinGrid {
  double log_step = 0.05;
  double log_t_max = 2000.0;
  double log_s_max = 1000.0;
  double s_growth = 1.05;

  ZippinGrid scaled(int scale) const {
    ZippinGrid g = *this;
    g.log_step /= scale;
    g.s_growth = 1.0 + (s_growth - 1.0) / scale;
    return g;
  }
};

struct ZippinEstimate {
  double lower = 0.0;  // sup_{s<1} ln M(s) / ln s
  double upper = 1.0;  // inf_{s>1} ln M(s) / ln s
  bool ordered = true;      // 0 <= lower <= upper <= 1 within slack
  bool sandwich_ok = true;  // s^lower <= M(s) (s<1) and s^upper <= M(s) (s>1) on the grid
  std::size_t t_points = 0;
  std::size_t s_points = 0;
  ZippinGrid grid;
};

inline std::vector<std::size_t> zippin_steps(const ZippinGrid& grid, std::size_t k_max) {
  std::vector<std::size_t> m_set;
  std::size_t m = 1;
  const auto m_max = static_cast<std::size_t>(std::floor(grid.log_s_max / grid.log_step + 1e-9));
  while (m <= std::min(m_max, k_max)) {
    m_set.push_back(m);
    m = std::max(m + 1, static_cast<std::size_t>(std::ceil(static_cast<double>(m) * grid.s_growth)));
  }
  return m_set;
}

inline ZippinEstimate zippin_indices(const FundamentalFunction& phi, const ZippinGrid& grid = {},
                                     double slack = 1e-9) {
  if (!(grid.log_step > 0.0) || !(grid.log_t_max > grid.log_s_max) || !(grid.s_growth > 1.0))
    throw std::invalid_argument("zippin_indices: bad grid");
  const auto k_max = static_cast<std::size_t>(std::floor(grid.log_t_max / grid.log_step + 1e-9));
  std::vector<double> lp(k_max + 1);
  for (std::size_t k = 0; k <= k_max; ++k) lp[k] = phi.log_at(static_cast<double>(k) * grid.log_step);
  ZippinEstimate z;
  z.grid = grid;
  z.t_points = k_max + 1;
  z.lower = -detail::kInf;
  z.upper = detail::kInf;
  const auto steps = zippin_steps(grid, k_max);
  z.s_points = 2 * steps.size();
  std::vector<std::pair<double, double>> samples;  // (ln s, ln M(s))
  for (std::size_t m : steps) {
    const double sigma = static_cast<double>(m) * grid.log_step;
    double down = -detail::kInf, up = -detail::kInf;
    for (std::size_t k = 0; k + m <= k_max; ++k) down = std::max(down, lp[k + m] - lp[k]);
    for (std::size_t k = m; k <= k_max; ++k) up = std::max(up, lp[k - m] - lp[k]);
    z.lower = std::max(z.lower, down / -sigma);
    z.upper = std::min(z.upper, up / sigma);
    samples.emplace_back(-sigma, down);
    samples.emplace_back(sigma, up);
  }
  z.ordered = z.lower >= -slack && z.lower <= z.upper + slack && z.upper <= 1.0 + slack;
  for (const auto& [ls, lm] : samples) {
    const double bound = (ls < 0.0 ? z.lower : z.upper) * ls;
    if (lm < bound - 1e-12 * std::max(1.0, std::abs(bound))) z.sandwich_ok = false;
  }
  return z;
}

// --------------------------------------------------- slowly varying examples

struct SlowlyVaryingExample {
  enum class Family { iterated_log, c, d, b };
  Family family = Family::iterated_log;
  int k = 1;                  // L_k for iterated_log; c_{k,m}
  int m = 1;                  // c_{k,m}; b_{m,alpha}
  std::vector<double> alphas; // d_k
  double alpha = 1.0;         // b_{m,alpha}

  static SlowlyVaryingExample iterated_log(int n) {
    if (n < 1) throw std::invalid_argument("L_n needs n >= 1");
    return {Family::iterated_log, n, 1, {}, 1.0};
  }
  static SlowlyVaryingExample c(int k, int m) {
    if (k < 1 || m <= k) throw std::invalid_argument("c(k,m) needs 1 <= k < m");
    return {Family::c, k, m, {}, 1.0};
  }
  static SlowlyVaryingExample d(std::vector<double> alphas) {
    if (alphas.empty()) throw std::invalid_argument("d(alphas) needs at least one exponent");
    for (double a : alphas)
      if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("d(alphas) needs 0 < alpha_j < 1");
    return {Family::d, static_cast<int>(alphas.size()), 1, std::move(alphas), 1.0};
  }
  static SlowlyVaryingExample b(int m, double alpha) {
    if (m < 1) throw std::invalid_argument("b(m,alpha) needs m >= 1");
    if (!(alpha > 0.0) || !std::isfinite(alpha))
      throw std::invalid_argument("b(m,alpha) needs alpha > 0");
    return {Family::b, 1, m, {}, alpha};
  }

  std::string name() const {
    switch (family) {
      case Family::iterated_log: return "L(" + std::to_string(k) + ")";
      case Family::c: return "c(" + std::to_string(k) + "," + std::to_string(m) + ")";
      case Family::d: {
        std::string s = "d(";
        for (std::size_t i = 0; i < alphas.size(); ++i)
          s += (i ? "," : "") + RISpace::num(alphas[i]);
        return s + ")";
      }
      default: return "b(" + std::to_string(m) + "," + RISpace::num(alpha) + ")";
    }
  }

  /// L_1..L_n at t = e^{-u}.
  static std::vector<double> iterated_logs(double u, int n) {
    std::vector<double> l(static_cast<std::size_t>(n));
    l[0] = 1.0 + u;
    for (int j = 1; j < n; ++j) l[j] = 1.0 + std::log(l[j - 1]);
    return l;
  }

  /// ln example(e^{-u}), u >= 0.
  double log_value_at(double u) const {
    switch (family) {
      case Family::iterated_log: return std::log(iterated_logs(u, k).back());
      case Family::c: {
        const auto l = iterated_logs(u, m);
        return l[k - 1] / l[m - 1];
      }
      case Family::d: {
        const auto l = iterated_logs(u, k);
        double s = 0.0;
        for (int j = 0; j < k; ++j) s += alphas[j] * std::log(l[j]);
        return std::exp(s);
      }
      default: {
        const auto l = iterated_logs(u, m);
        double s = 0.0;
        for (int j = 0; j + 1 < m; ++j) s += std::log(l[j]);
        return s + alpha * std::log(l[m - 1]);
      }
    }
  }

  double operator()(double t) const {
    if (!(t > 0.0 && t < 1.0)) throw std::domain_error("slowly varying examples live on (0,1)");
    return std::exp(log_value_at(-std::log(t)));
  }
};

/// g(t) = example(1/t) / example(1).
inline GainFunction gain_from_example(const SlowlyVaryingExample& ex) {
  const double at_one = ex.log_value_at(0.0);
  return GainFunction(
      "example:" + ex.name() + "/example(1)",
      [ex, at_one](double t) { return std::exp(ex.log_value_at(std::log(t)) - at_one); },
      [ex, at_one](double x) { return ex.log_value_at(x) - at_one; });
}

inline ErmakoffResult ermakoff_for_example(const SlowlyVaryingExample& ex, int max_k = 40) {
  return ermakoff_test(gain_from_example(ex), max_k);
}

// -------------------------------------------------------- index-gap criterion

struct IndexGapReport {
  ZippinEstimate x, y;
  double slack = 2e-2;
  bool gap_satisfied = false;        // upper index of X below lower index of Y
  double exponent = 0.0;             // upper_X - lower_Y
  std::size_t bound_points = 0;
  std::size_t bound_violations = 0;  // Psi(t) < t^exponent on the small-t grid
  std::optional<ErmakoffResult> slowly_varying;  // Ermakoff on Psi(1/t) when the gap fails
};

/// Psi(t) = phi_X(t)/phi_Y(t) grows like t^{upper_X - lower_Y} near 0, so a
/// strict index gap upper_X < lower_Y yields a power gain. Without a gap the
/// ratio is at most slowly varying and Ermakoff's test on Psi(1/t) decides.
inline IndexGapReport index_gap_doubling_criterion(const RISpace& x, const RISpace& y,
                                                   const ZippinGrid& grid = {},
                                                   double slack = 2e-2) {
  IndexGapReport r;
  r.slack = slack;
  r.x = zippin_indices(fundamental_of(x), grid);
  r.y = zippin_indices(fundamental_of(y), grid);
  r.exponent = r.x.upper - r.y.lower;
  r.gap_satisfied = r.x.upper < r.y.lower - slack;
  for (double u = 5.0; u <= 200.0; u += 5.0) {
    ++r.bound_points;
    const double log_psi = log_fundamental(x, u) - log_fundamental(y, u);
    if (log_psi < -u * r.exponent - 1e-9 * u) ++r.bound_violations;
  }
  if (!r.gap_satisfied) r.slowly_varying = ermakoff_test(psi_of_gain(x, y));
  return r;
}

}  // namespace rinorm
