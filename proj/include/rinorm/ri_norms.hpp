#pragma once

// Rearrangement-invariant norms evaluated on decreasing step functions:
// Lebesgue, Lorentz, Lorentz-Zygmund, Orlicz (Luxemburg), Marcinkiewicz and
// Lorentz Lambda spaces, their fundamental functions, and the localized norm
// ||f||_{X(B, mu_B)} = ||(f chi_B)*(s mu(B))||_{X(0,1)}.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rinorm/measure_space.hpp"
#include "rinorm/numeric.hpp"
#include "rinorm/rearrangement.hpp"
#include "rinorm/young_function.hpp"

namespace rinorm {

/// phi on (0, 1], with a log-domain path u -> ln phi(e^{-u}) so that
/// asymptotics at 0 can be probed far below the double range.
struct FundamentalFunction {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> log_at_neg_exp;

  double operator()(double t) const { return value(t); }

  double log_at(double u) const {
    if (log_at_neg_exp) return log_at_neg_exp(u);
    return std::log(value(std::exp(-u)));
  }
};

/// phi(t) = t^a (1 + ln^+(1/t))^b.
inline FundamentalFunction power_log_phi(double a, double b = 0.0) {
  char buf[96];
  if (b == 0.0)
    std::snprintf(buf, sizeof buf, "pow(%g)", a);
  else
    std::snprintf(buf, sizeof buf, "pow_log(%g,%g)", a, b);
  return {buf,
          [a, b](double t) {
            const double l = t < 1.0 ? 1.0 - std::log(t) : 1.0;
            return std::pow(t, a) * std::pow(l, b);
          },
          [a, b](double u) { return -a * u + b * std::log1p(std::max(u, 0.0)); }};
}

struct PhiCheck {
  bool positive = true;
  bool nondecreasing = true;
  bool quasi_concave = true;  // phi(t)/t nonincreasing
  bool ok() const { return positive && nondecreasing && quasi_concave; }
};

/// Grid check of phi on [1e-12, 1].
inline PhiCheck check_phi(const FundamentalFunction& phi, std::size_t n = 241) {
  PhiCheck c;
  double prev_v = 0.0, prev_ratio = detail::kInf;
  for (double t : detail::log_grid(1e-12, 1.0, n)) {
    const double v = phi(t);
    if (!(v > 0.0) || !std::isfinite(v)) c.positive = false;
    if (v < prev_v * (1.0 - 1e-12)) c.nondecreasing = false;
    if (v / t > prev_ratio * (1.0 + 1e-12)) c.quasi_concave = false;
    prev_v = v;
    prev_ratio = v / t;
  }
  return c;
}

struct Lp {
  double p;
};
struct Lorentz {
  double p, q;
};
struct LorentzZygmund {
  double p, q, alpha;
};
struct Orlicz {
  YoungFunction young;
};
struct Marcinkiewicz {
  FundamentalFunction phi;
};
struct LambdaLorentz {
  FundamentalFunction phi;
};

class RISpace {
 public:
  using Kind = std::variant<Lp, Lorentz, LorentzZygmund, Orlicz, Marcinkiewicz, LambdaLorentz>;

  static RISpace lp(double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("Lp needs p in [1, inf]");
    return RISpace(Lp{p});
  }

  /// Admissible: 1 < p < inf with 1 <= q <= inf, or p = q = 1, or p = q = inf.
  static RISpace lorentz(double p, double q) {
    const bool ok = (p > 1.0 && std::isfinite(p) && q >= 1.0) || (p == 1.0 && q == 1.0) ||
                    (std::isinf(p) && std::isinf(q));
    if (!ok) throw std::invalid_argument("Lorentz(p,q): inadmissible parameters");
    return RISpace(Lorentz{p, q});
  }

  /// Admissible: 1 < p < inf with 1 <= q <= inf and any alpha; p = q = 1 with
  /// alpha >= 0; p = q = inf with alpha <= 0; p = inf, 1 <= q <= inf with
  /// alpha + 1/q < 0.
  static RISpace lorentz_zygmund(double p, double q, double alpha) {
    const bool ok = (p > 1.0 && std::isfinite(p) && q >= 1.0) ||
                    (p == 1.0 && q == 1.0 && alpha >= 0.0) ||
                    (std::isinf(p) && std::isinf(q) && alpha <= 0.0) ||
                    (std::isinf(p) && q >= 1.0 && alpha + 1.0 / q < 0.0);
    if (!ok || !std::isfinite(alpha))
      throw std::invalid_argument("LZ(p,q,alpha): inadmissible parameters");
    return RISpace(LorentzZygmund{p, q, alpha});
  }

  static RISpace orlicz(YoungFunction a) {
    const auto check = check_young(a);
    if (!check.ok()) throw std::invalid_argument("Orlicz: " + a.name() + " is not a Young function");
    return RISpace(Orlicz{std::move(a)});
  }

  /// phi must be positive, nondecreasing and quasi-concave on (0, 1].
  static RISpace marcinkiewicz(FundamentalFunction phi) {
    require_phi(phi, "M");
    return RISpace(Marcinkiewicz{std::move(phi)});
  }
  static RISpace lambda(FundamentalFunction phi) {
    require_phi(phi, "Lambda");
    return RISpace(LambdaLorentz{std::move(phi)});
  }

  const Kind& kind() const { return kind_; }

  bool is_linf() const {
    if (auto* l = std::get_if<Lp>(&kind_)) return std::isinf(l->p);
    if (auto* l = std::get_if<Lorentz>(&kind_)) return std::isinf(l->p);
    if (auto* l = std::get_if<LorentzZygmund>(&kind_))
      return std::isinf(l->p) && std::isinf(l->q) && l->alpha == 0.0;
    return false;
  }

  std::string name() const {
    return std::visit(
        [](const auto& k) -> std::string {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Lp>) return "Lp(" + num(k.p) + ")";
          if constexpr (std::is_same_v<K, Lorentz>)
            return "Lorentz(" + num(k.p) + "," + num(k.q) + ")";
          if constexpr (std::is_same_v<K, LorentzZygmund>)
            return "LZ(" + num(k.p) + "," + num(k.q) + "," + num(k.alpha) + ")";
          if constexpr (std::is_same_v<K, Orlicz>) return "Orlicz(" + k.young.name() + ")";
          if constexpr (std::is_same_v<K, Marcinkiewicz>) return "M(of=" + k.phi.name + ")";
          if constexpr (std::is_same_v<K, LambdaLorentz>) return "Lambda(of=" + k.phi.name + ")";
        },
        kind_);
  }

  static std::string num(double x) {
    if (std::isinf(x)) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
  }

 private:
  explicit RISpace(Kind k) : kind_(std::move(k)) {}
  static void require_phi(const FundamentalFunction& phi, const char* what) {
    const auto c = check_phi(phi);
    if (!c.ok())
      throw std::invalid_argument(std::string(what) + ": " + phi.name +
                                  (!c.positive        ? " is not positive"
                                   : !c.nondecreasing ? " is not nondecreasing on (0,1]"
                                                      : " is not quasi-concave on (0,1]"));
  }
  Kind kind_;
};

namespace detail {

/// int_a^b t^{q/p-1} (1 + ln^+(1/t))^{alpha q} dt, 0 <= a < b.
inline double lz_weight_integral(double p, double q, double alpha, double a, double b) {
  const double e = std::isinf(p) ? 0.0 : q / p;  // exponent of t in t^{q/p-1}
  const double aq = alpha * q;
  double total = 0.0;
  if (a < 1.0) {
    // u = ln(1/t) turns the piece into int e^{-u e} (1+u)^{aq} du
    const double lo = -std::log(std::min(b, 1.0));
    const double hi = a > 0.0 ? -std::log(a) : kInf;
    total += integrate([e, aq](double u) { return std::exp(-u * e) * std::pow(1.0 + u, aq); },
                       std::max(lo, 0.0), hi);
  }
  if (b > 1.0) {
    const double lo = std::max(a, 1.0);
    total += e == 0.0 ? std::log(b / lo) : (std::pow(b, e) - std::pow(lo, e)) / e;
  }
  return total;
}

/// sup over t in [a, b] (a excluded when 0) of t^{1/p} (1 + ln^+(1/t))^alpha.
inline double lz_weight_sup(double p, double alpha, double a, double b) {
  const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
  auto w = [&](double t) {
    const double l = t < 1.0 ? 1.0 - std::log(t) : 1.0;
    return std::pow(t, inv_p) * std::pow(l, alpha);
  };
  double best = w(b);
  if (a > 0.0) best = std::max(best, w(a));
  if (alpha > 0.0 && inv_p > 0.0) {
    const double star = std::exp(1.0 - alpha * p);
    if (star > a && star < b && star < 1.0) best = std::max(best, w(star));
  }
  return best;
}

inline void check_rearrangement(const StepFunction& u) {
  if (!u.is_nonincreasing() || !u.is_nonnegative())
    throw std::invalid_argument("norm: argument must be a nonnegative nonincreasing step function");
}

/// inf{lambda > 0 : sum_i mass_i A(v_i / lambda) <= 1} for v_i >= 0.
inline double luxemburg(const YoungFunction& a, std::span<const double> v,
                        std::span<const double> mass) {
  double vmax = 0.0, m_at_max = 0.0, m_total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    m_total += mass[i];
    if (v[i] > vmax) {
      vmax = v[i];
      m_at_max = mass[i];
    } else if (v[i] == vmax) {
      m_at_max += mass[i];
    }
  }
  if (vmax == 0.0) return 0.0;
  auto modular = [&](double lambda) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] > 0.0) s += mass[i] * a(v[i] / lambda);
    return s;
  };
  double lo = 0.5 * vmax / a.inverse(1.0 / m_at_max);
  double hi = 2.0 * vmax / a.inverse(1.0 / m_total);
  for (int k = 0; !(modular(lo) > 1.0); ++k) {
    if (k > 200) throw std::domain_error("luxemburg: lower bracket failure for " + a.name());
    lo *= 0.5;
  }
  for (int k = 0; !(modular(hi) <= 1.0); ++k) {
    if (k > 200) throw std::domain_error("luxemburg: upper bracket failure for " + a.name());
    hi *= 2.0;
  }
  for (int it = 0; it < 400 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (modular(mid) <= 1.0)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

inline double marcinkiewicz_norm(const FundamentalFunction& phi, const StepFunction& u) {
  // F(t) = (1/t) int_0^t u * phi(t), piecewise smooth between breakpoints
  double best = 0.0;
  double mass_before = 0.0;
  for (std::size_t i = 0; i < u.pieces(); ++i) {
    const double a = u.breaks()[i], b = u.breaks()[i + 1], v = u.values()[i];
    auto F = [&](double t) { return (mass_before + v * (t - a)) * phi(t) / t; };
    constexpr int kRefine = 64;
    int best_k = -1;
    double piece_best = 0.0;
    for (int k = 1; k <= kRefine; ++k) {
      const double t = a + (b - a) * k / kRefine;
      const double val = F(t);
      if (val > piece_best) {
        piece_best = val;
        best_k = k;
      }
    }
    if (best_k > 0 && best_k < kRefine) {
      // golden-section polish inside the two cells around the best sample
      double lo = a + (b - a) * (best_k - 1) / kRefine, hi = a + (b - a) * (best_k + 1) / kRefine;
      constexpr double g = 0.6180339887498949;
      double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
      double f1 = F(x1), f2 = F(x2);
      for (int it = 0; it < 80; ++it) {
        if (f1 < f2) {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + g * (hi - lo);
          f2 = F(x2);
        } else {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - g * (hi - lo);
          f1 = F(x1);
        }
      }
      piece_best = std::max({piece_best, f1, f2});
    }
    best = std::max(best, piece_best);
    mass_before += v * (b - a);
  }
  return best;
}

}  // namespace detail

/// The norm of a decreasing rearrangement u on (0, T) in the given space.
inline double norm(const RISpace& spec, const StepFunction& u) {
  detail::check_rearrangement(u);
  if (u.empty()) return 0.0;
  const auto br = u.breaks();
  const auto val = u.values();
  const std::size_t n = u.pieces();
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Lp>) {
          if (std::isinf(k.p)) return val[0];
          double s = 0.0;
          for (std::size_t i = 0; i < n; ++i) s += std::pow(val[i], k.p) * u.length(i);
          return std::pow(s, 1.0 / k.p);
        } else if constexpr (std::is_same_v<K, Lorentz>) {
          if (std::isinf(k.q)) {
            if (std::isinf(k.p)) return val[0];
            double best = 0.0;
            for (std::size_t i = 0; i < n; ++i)
              best = std::max(best, std::pow(br[i + 1], 1.0 / k.p) * val[i]);
            return best;
          }
          const double e = k.q / k.p;
          double s = 0.0;
          for (std::size_t i = 0; i < n; ++i)
            s += std::pow(val[i], k.q) * (std::pow(br[i + 1], e) - std::pow(br[i], e)) / e;
          return std::pow(s, 1.0 / k.q);
        } else if constexpr (std::is_same_v<K, LorentzZygmund>) {
          if (std::isinf(k.q)) {
            double best = 0.0;
            for (std::size_t i = 0; i < n; ++i)
              best = std::max(best, val[i] * detail::lz_weight_sup(k.p, k.alpha, br[i], br[i + 1]));
            return best;
          }
          double s = 0.0;
          for (std::size_t i = 0; i < n; ++i)
            s += std::pow(val[i], k.q) *
                 detail::lz_weight_integral(k.p, k.q, k.alpha, br[i], br[i + 1]);
          return std::pow(s, 1.0 / k.q);
        } else if constexpr (std::is_same_v<K, Orlicz>) {
          std::vector<double> len(n);
          for (std::size_t i = 0; i < n; ++i) len[i] = u.length(i);
          return detail::luxemburg(k.young, val, len);
        } else if constexpr (std::is_same_v<K, Marcinkiewicz>) {
          return detail::marcinkiewicz_norm(k.phi, u);
        } else {
          double s = 0.0;
          double prev = 0.0;
          for (std::size_t i = 0; i < n; ++i) {
            const double next = k.phi(br[i + 1]);
            s += val[i] * (next - prev);
            prev = next;
          }
          return s;
        }
      },
      spec.kind());
}

/// Luxemburg norm of f on the whole space; masses are divided by
/// `normalization` when given (e.g. the total mass for a probability measure).
inline double luxemburg_norm(const YoungFunction& a, const MetricMeasureSpace& space,
                             std::span<const double> f,
                             std::optional<double> normalization = {}) {
  detail::check_function(space, f);
  std::vector<double> v(f.size()), m(f.size());
  const double scale = normalization.value_or(1.0);
  if (!(scale > 0.0)) throw std::invalid_argument("luxemburg_norm: normalization must be positive");
  for (std::size_t i = 0; i < f.size(); ++i) {
    v[i] = std::abs(f[i]);
    m[i] = space.weight(i) / scale;
  }
  return detail::luxemburg(a, v, m);
}

/// Luxemburg norm of f restricted to B with the normalized measure mu / mu(B),
/// computed directly over the ball's points.
inline double local_luxemburg_direct(const YoungFunction& a, const MetricMeasureSpace& space,
                                     std::span<const double> f, const Ball& ball) {
  detail::check_function(space, f);
  const auto members = ball_members(space, ball);
  double mu_b = 0.0;
  for (std::size_t i : members) mu_b += space.weight(i);
  std::vector<double> v, m;
  for (std::size_t i : members) {
    v.push_back(std::abs(f[i]));
    m.push_back(space.weight(i) / mu_b);
  }
  return detail::luxemburg(a, v, m);
}

inline double local_norm(const MetricMeasureSpace& space, std::span<const double> f,
                         const Ball& ball, const RISpace& spec) {
  return norm(spec, localized_rearrangement(space, f, ball));
}

inline StepFunction indicator_step(double t) {
  return StepFunction({0.0, t}, {1.0});
}

/// phi_X(t) = ||chi_[0,t)||_X for t in (0, 1].
inline double fundamental_function(const RISpace& spec, double t) {
  if (!(t > 0.0)) throw std::domain_error("fundamental function needs t > 0");
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Lp>) {
          return std::isinf(k.p) ? 1.0 : std::pow(t, 1.0 / k.p);
        } else if constexpr (std::is_same_v<K, Orlicz>) {
          return 1.0 / k.young.inverse(1.0 / t);
        } else if constexpr (std::is_same_v<K, Marcinkiewicz> || std::is_same_v<K, LambdaLorentz>) {
          return k.phi(t);
        } else {
          return norm(spec, indicator_step(t));
        }
      },
      spec.kind());
}

/// ln phi_X(e^{-u}) for u >= 0, without leaving the log domain.
inline double log_fundamental(const RISpace& spec, double u) {
  if (!(u >= 0.0)) throw std::domain_error("log_fundamental needs u >= 0");
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Lp>) {
          return std::isinf(k.p) ? 0.0 : -u / k.p;
        } else if constexpr (std::is_same_v<K, Lorentz>) {
          if (std::isinf(k.p)) return 0.0;
          const double c = std::isinf(k.q) ? 0.0 : std::log(k.p / k.q) / k.q;
          return c - u / k.p;
        } else if constexpr (std::is_same_v<K, LorentzZygmund>) {
          const double inv_p = std::isinf(k.p) ? 0.0 : 1.0 / k.p;
          if (std::isinf(k.q)) {
            // sup_{w >= u} -w/p + alpha ln(1+w)
            double w = u;
            if (k.alpha > 0.0 && inv_p > 0.0) w = std::max(u, k.alpha * k.p - 1.0);
            return -w * inv_p + k.alpha * std::log1p(w);
          }
          const double e = k.q * inv_p, aq = k.alpha * k.q, c = 1.0 + u;
          const double rest = detail::integrate(
              [e, aq, c](double v) { return std::exp(-v * e) * std::pow(1.0 + v / c, aq); }, 0.0,
              detail::kInf);
          return -u * inv_p + k.alpha * std::log1p(u) + std::log(rest) / k.q;
        } else if constexpr (std::is_same_v<K, Orlicz>) {
          return -k.young.log_inverse(u);
        } else {
          return k.phi.log_at(u);
        }
      },
      spec.kind());
}

inline FundamentalFunction fundamental_of(const RISpace& spec) {
  if (auto* m = std::get_if<Marcinkiewicz>(&spec.kind())) return m->phi;
  if (auto* l = std::get_if<LambdaLorentz>(&spec.kind())) return l->phi;
  return {spec.name(), [spec](double t) { return fundamental_function(spec, t); },
          [spec](double u) { return log_fundamental(spec, u); }};
}

/// phi^{-1}(s) for s in (0, phi(1)].
inline double fundamental_inverse(const RISpace& spec, double s) {
  if (spec.is_linf()) throw std::domain_error("fundamental_inverse: phi is constant for L^inf");
  const double top = fundamental_function(spec, 1.0);
  if (!(s > 0.0) || s > top * (1.0 + 1e-12))
    throw std::domain_error("fundamental_inverse: value outside the range of phi on (0,1]");
  if (s >= top) return 1.0;
  if (auto* l = std::get_if<Lp>(&spec.kind())) return std::pow(s, l->p);
  if (auto* o = std::get_if<Orlicz>(&spec.kind())) return 1.0 / o->young(1.0 / s);
  // ln phi(e^{-u}) is decreasing in u
  const double target = std::log(s);
  double hi = 1.0;
  for (int k = 0; log_fundamental(spec, hi) > target; ++k) {
    if (k > 60) throw std::domain_error("fundamental_inverse: no bracket");
    hi *= 2.0;
  }
  const double u = detail::bisect_increasing([&](double x) { return -log_fundamental(spec, x); },
                                             -target, 0.0, hi, 1e-16, 1e-15);
  return std::exp(-u);
}

}  // namespace rinorm
