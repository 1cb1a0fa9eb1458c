#pragma once

// The iterative doubling certificate: shrinking radii r_j, cutoffs f_j with
// gradients 2 c1 h(j) / r on B_j, the quantities
//   P_j(B) = 1 / (C h(j) phi_Y(mu(B_j) / mu(2B))),   C = 8 c c1,
// the key inequality phi_X(mu(B_{j+1}) / mu(2B)) <= 1 / P_j(B), the log-domain
// replay of the induction P_j >= P_1 e^{j-1}, and the sweep of P_1 over balls.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rinorm/gain.hpp"
#include "rinorm/measure_space.hpp"
#include "rinorm/poincare.hpp"
#include "rinorm/ri_norms.hpp"

namespace rinorm {

namespace detail {

inline bool epa_holds(const GainFunction& g, double log_d, double log_c, double t_step) {
  for (double t = 1.0; t <= 50.0 + 1e-12; t += t_step)
    if (!(g.log_at_exp(log_d + t) - g.log_at(t) - std::log(t) - 1.0 - log_c > 0.0)) return false;
  return true;
}

}  // namespace detail

/// ln D for the smallest D = 2^k with g(D e^t) / (t g(t)) > e C on a grid of
/// t in [1, 50], checked in the log domain. k runs through 0..60 first; slow
/// gains then continue with k doubling up to 2^30 and a bisection on k, so D
/// may lie far outside the double range.
inline double find_epa_log_constant(const GainFunction& g, double big_c, double t_step = 0.05) {
  const double log_c = std::log(big_c), ln2 = std::log(2.0);
  for (int k = 0; k <= 60; ++k)
    if (detail::epa_holds(g, k * ln2, log_c, t_step)) return k * ln2;
  std::int64_t lo = 60, hi = 120;
  while (!detail::epa_holds(g, static_cast<double>(hi) * ln2, log_c, t_step)) {
    lo = hi;
    hi *= 2;
    if (hi > (std::int64_t{1} << 30))
      throw std::domain_error("gain too weak: no D <= 2^(2^30) satisfies g(D e^t)/(t g(t)) > eC for " +
                              g.name());
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    (detail::epa_holds(g, static_cast<double>(mid) * ln2, log_c, t_step) ? hi : lo) = mid;
  }
  return static_cast<double>(hi) * ln2;
}

struct CertificateConfig {
  GainFunction gain;
  double c1;       // sum_j 1/h(j)
  double c;        // Poincare constant hypothesis
  double big_c;    // 8 c c1
  double log_d;    // ln D, from find_epa_log_constant
  int j_max;

  /// Requires Ermakoff's condition for `g`; c1 and D are computed unless given.
  static CertificateConfig make(GainFunction g, double c, int j_max = 30,
                                std::optional<double> c1 = {}, std::optional<double> d = {}) {
    if (d && !(*d >= 1.0)) throw std::invalid_argument("certificate: D must be >= 1");
    if (!(c > 0.0) || !std::isfinite(c))
      throw std::invalid_argument("certificate: Poincare constant c must be positive");
    if (j_max < 1) throw std::invalid_argument("certificate: J_max must be >= 1");
    const auto er = ermakoff_test(g);
    if (er.verdict != Verdict::pass)
      throw std::invalid_argument("certificate: gain " + g.name() +
                                  " does not pass Ermakoff's test (" + to_string(er.verdict) + ")");
    const double series = c1 ? *c1 : series_c1(g).value;
    const double big_c = 8.0 * c * series;
    const double ld = d ? std::log(*d) : find_epa_log_constant(g, big_c);
    return CertificateConfig{std::move(g), series, c, big_c, ld, j_max};
  }

  /// D itself; +inf once ln D passes the double range.
  double d() const { return std::exp(log_d); }

  double h(double t) const { return t * gain(t); }
  double log_h(double t) const { return std::log(t) + gain.log_at(t); }
};

/// r_1 = r, r_j - r_{j+1} = r / (2 c1 h(j)); returns r_1 .. r_J.
inline std::vector<double> radii_sequence(double r, const CertificateConfig& cfg, int count) {
  if (!(r > 0.0)) throw std::invalid_argument("radii_sequence: r must be positive");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  double partial = 0.0;
  for (int j = 1; j <= count; ++j) {
    out.push_back(r - r / (2.0 * cfg.c1) * partial);
    partial += 1.0 / cfg.h(j);
  }
  return out;
}

/// f_j: 1 on the closed ball of radius r_{j+1}, 0 off the closed ball of
/// radius r_j, linear in the distance between. `radii` holds r_1, r_2, ...
inline std::vector<double> cutoff_function(const MetricMeasureSpace& space, std::size_t center,
                                           int j, std::span<const double> radii) {
  if (j < 1 || static_cast<std::size_t>(j) >= radii.size())
    throw std::invalid_argument("cutoff_function: need r_j and r_{j+1}");
  return ramp_cutoff(space, center, radii[j], radii[j - 1]);
}

inline double cutoff_gradient_bound(double r, const CertificateConfig& cfg, int j) {
  return 2.0 * cfg.c1 * cfg.h(j) / r;
}

/// 1 / (C h_j phi_Y(ratio)).
inline double pj_from_ratio(double ratio, double big_c, double h_j, const RISpace& y) {
  return 1.0 / (big_c * h_j * fundamental_function(y, ratio));
}

/// mu(B_j) / mu(2B) with B_j closed of radius r_j and 2B open of radius 2r.
inline double certificate_ratio(const MetricMeasureSpace& space, const Ball& ball, double r_j) {
  const double inner = measure_of(space, Ball{ball.center, r_j, Closure::closed});
  const double outer = measure_of(space, Ball{ball.center, 2.0 * ball.radius, Closure::open});
  return inner / outer;
}

inline double pj_value(const MetricMeasureSpace& space, const Ball& ball, int j,
                       const CertificateConfig& cfg, const RISpace& y) {
  const auto radii = radii_sequence(ball.radius, cfg, j);
  return pj_from_ratio(certificate_ratio(space, ball, radii.back()), cfg.big_c, cfg.h(j), y);
}

struct KeyRecord {
  int j;
  double r_j;
  double mu_bj;
  double p_j;
  double lhs;    // phi_X(mu(B_{j+1}) / mu(2B))
  double rhs;    // 1 / P_j(B)
  double slack;  // rhs - lhs
  bool satisfied;
};

/// phi_X(mu(B_{j+1})/mu(2B)) <= 1/P_j(B) for j = 1..J from actual ball measures.
inline std::vector<KeyRecord> key_inequality_check(const MetricMeasureSpace& space,
                                                   const Ball& ball, const CertificateConfig& cfg,
                                                   const RISpace& x, const RISpace& y, int count) {
  const auto radii = radii_sequence(ball.radius, cfg, count + 1);
  const double outer = measure_of(space, Ball{ball.center, 2.0 * ball.radius, Closure::open});
  std::vector<KeyRecord> out;
  for (int j = 1; j <= count; ++j) {
    const double mu_bj = measure_of(space, Ball{ball.center, radii[j - 1], Closure::closed});
    const double mu_next = measure_of(space, Ball{ball.center, radii[j], Closure::closed});
    const double p = pj_from_ratio(mu_bj / outer, cfg.big_c, cfg.h(j), y);
    const double lhs = fundamental_function(x, mu_next / outer);
    const double rhs = 1.0 / p;
    out.push_back({j, radii[j - 1], mu_bj, p, lhs, rhs, rhs - lhs,
                   lhs <= rhs * (1.0 + 1e-12)});
  }
  return out;
}

// --------------------------------------------------------------- induction

struct InductionStep {
  int j;               // step j -> j+1
  double log_p_next;   // ln P_{j+1}
  double log_bound;    // ln(P_1 e^j)
  bool recursion_ok;   // P_{j+1} >= P_j g(P_j) / (C h(j+1))
  bool monotone_ok;    // ... >= P_1 e^j g(P_1 e^{j-1}) / (C e (j+1) g(j+1))
  bool nodobla_ok;     // ... >= P_1 e^j g(D e^{j+1}) / (C e (j+1) g(j+1))
  bool epa_ok;         // ... >= P_1 e^j
  bool certified;      // P_{j+1} >= P_1 e^j
};

enum class InductionStatus { certified, hypothesis_not_met, chain_broken };

inline const char* to_string(InductionStatus s) {
  switch (s) {
    case InductionStatus::certified: return "certified";
    case InductionStatus::hypothesis_not_met: return "hypothesis not met";
    default: return "chain broken";
  }
}

struct InductionReport {
  InductionStatus status = InductionStatus::hypothesis_not_met;
  std::vector<InductionStep> steps;
  std::optional<int> blow_up_at;  // first j with P_1 e^{j-1} above the cap on P_j
};

/// P_{j+1} = P_j g(P_j) / (C h(j+1)): the smallest sequence the recursion
/// admits, in logs.
inline std::vector<double> minimal_admissible_sequence(double log_p1, const CertificateConfig& cfg,
                                                       int count) {
  std::vector<double> lp{log_p1};
  for (int j = 1; j < count; ++j)
    lp.push_back(lp.back() + cfg.gain.log_at_exp(lp.back()) - std::log(cfg.big_c) -
                 cfg.log_h(j + 1));
  return lp;
}

/// Replays each inequality of the inductive step in the log domain for a given
/// sequence ln P_1, ln P_2, ... Requires P_1 > e^2 D. When `log_cap_base` =
/// ln(1 / (C phi_Y(mu(B/2)/mu(2B)))) is given, also reports the first j where
/// the certified lower bound exceeds the cap ln P_j <= log_cap_base - ln h(j).
inline InductionReport induction_step_check(std::span<const double> log_p,
                                            const CertificateConfig& cfg,
                                            std::optional<double> log_cap_base = {},
                                            double tol = 1e-9) {
  InductionReport rep;
  if (log_p.empty()) throw std::invalid_argument("induction_step_check: empty sequence");
  const double lp1 = log_p[0];
  const double log_c = std::log(cfg.big_c), log_d = cfg.log_d;
  if (!(lp1 > 2.0 + log_d)) return rep;
  rep.status = InductionStatus::certified;
  const auto& g = cfg.gain;
  for (std::size_t i = 0; i + 1 < log_p.size(); ++i) {
    const int j = static_cast<int>(i) + 1;
    const double jd = j;
    InductionStep s{};
    s.j = j;
    s.log_p_next = log_p[i + 1];
    s.log_bound = lp1 + jd;
    const double a = log_p[i] + g.log_at_exp(log_p[i]) - log_c - cfg.log_h(jd + 1.0);
    const double common = lp1 + jd - log_c - 1.0 - std::log(jd + 1.0) - g.log_at(jd + 1.0);
    const double b = common + g.log_at_exp(lp1 + jd - 1.0);
    const double c = common + g.log_at_exp(log_d + jd + 1.0);
    s.recursion_ok = s.log_p_next >= a - tol;
    s.monotone_ok = a >= b - tol;
    s.nodobla_ok = b >= c - tol;
    s.epa_ok = c >= s.log_bound - tol;
    s.certified = s.log_p_next >= s.log_bound - tol;
    if (!(s.recursion_ok && s.monotone_ok && s.nodobla_ok && s.epa_ok && s.certified))
      rep.status = InductionStatus::chain_broken;
    rep.steps.push_back(s);
  }
  if (log_cap_base) {
    for (int j = 1; j <= static_cast<int>(log_p.size()); ++j)
      if (lp1 + (j - 1) > *log_cap_base - cfg.log_h(j)) {
        rep.blow_up_at = j;
        break;
      }
  }
  return rep;
}

// ------------------------------------------------------------ ball sweep

enum class CertificateVerdict { doubling_consistent, blow_up_detected, cap_reached };

inline const char* to_string(CertificateVerdict v) {
  switch (v) {
    case CertificateVerdict::doubling_consistent: return "doubling-consistent";
    case CertificateVerdict::blow_up_detected: return "blow-up-detected";
    default: return "cap-reached";
  }
}

struct DoublingVerdict {
  CertificateVerdict verdict = CertificateVerdict::doubling_consistent;
  double sup_p1 = 0.0;
  std::optional<Ball> worst_ball;
  double log_threshold = 0.0;            // ln(e^2 D)
  double implied_doubling_bound = 1.0;   // 1 / phi_Y^{-1}(1 / (C sup P_1))
  double direct_doubling_constant = 1.0; // sup mu(2B)/mu(B) over the same sweep
  std::size_t balls = 0;
  std::size_t above_threshold = 0;
  std::optional<InductionReport> chain;  // for the worst ball when above threshold
};

/// P_1(B) = 1 / (C phi_Y(mu(B)/mu(2B))) over the sweep (open B and 2B). A
/// bound sup P_1 <= C~ is the quantitative doubling statement.
inline DoublingVerdict doubling_verdict(const MetricMeasureSpace& space, const RISpace& y,
                                        const CertificateConfig& cfg, const BallSweep& sweep) {
  DoublingVerdict v;
  v.log_threshold = 2.0 + cfg.log_d;
  for (std::size_t c : sweep.centers)
    for (double r : sweep.radii) {
      const Ball b{c, r, Closure::open};
      const double ratio = measure_of(space, b) / measure_of(space, dilate(b, 2.0));
      const double p1 = 1.0 / (cfg.big_c * fundamental_function(y, ratio));
      ++v.balls;
      if (std::log(p1) > v.log_threshold) ++v.above_threshold;
      v.direct_doubling_constant = std::max(v.direct_doubling_constant, 1.0 / ratio);
      if (p1 > v.sup_p1) {
        v.sup_p1 = p1;
        v.worst_ball = b;
      }
    }
  if (v.balls == 0) throw std::invalid_argument("doubling_verdict: empty ball sweep");
  const double s = 1.0 / (cfg.big_c * v.sup_p1);
  v.implied_doubling_bound = s >= fundamental_function(y, 1.0) ? 1.0 : 1.0 / fundamental_inverse(y, s);
  if (std::log(v.sup_p1) <= v.log_threshold) return v;
  const Ball& b = *v.worst_ball;
  const double half = measure_of(space, Ball{b.center, 0.5 * b.radius, Closure::open});
  const double twice = measure_of(space, dilate(b, 2.0));
  const double cap = -std::log(cfg.big_c * fundamental_function(y, half / twice));
  const auto seq = minimal_admissible_sequence(std::log(v.sup_p1), cfg, cfg.j_max);
  v.chain = induction_step_check(seq, cfg, cap);
  v.verdict = v.chain->blow_up_at ? CertificateVerdict::blow_up_detected
                                  : CertificateVerdict::cap_reached;
  return v;
}

}  // namespace rinorm
