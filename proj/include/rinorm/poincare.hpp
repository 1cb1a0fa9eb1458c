#pragma once

// (X,Y)-Poincare inequalities on finite graphs: discrete upper gradients,
// the ratio ||f - f_B||_{X(B)} / (r ||g||_{Y(sigma B)}), empirical constants,
// and the classical (q,p) form of the left and right sides.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rinorm/measure_space.hpp"
#include "rinorm/rearrangement.hpp"
#include "rinorm/ri_norms.hpp"

namespace rinorm {

struct PoincareSpec {
  RISpace x;
  RISpace y;
  double sigma = 1.0;
  std::optional<double> claimed_constant;

  PoincareSpec(RISpace x_, RISpace y_, double sigma_ = 1.0,
               std::optional<double> c = std::nullopt)
      : x(std::move(x_)), y(std::move(y_)), sigma(sigma_), claimed_constant(c) {
    if (!(sigma >= 1.0)) throw std::invalid_argument("Poincare dilation sigma must be >= 1");
  }
};

struct Edge {
  std::size_t to;
  double length;
};

/// Edges join distinct points at distance <= the connectivity radius.
class GraphStructure {
 public:
  GraphStructure(const MetricMeasureSpace& space, double radius)
      : radius_(radius), adj_(space.size()) {
    if (!(radius > 0.0)) throw std::invalid_argument("connectivity radius must be positive");
    for (std::size_t i = 0; i < space.size(); ++i)
      for (std::size_t j = 0; j < space.size(); ++j)
        if (i != j && space.distance(i, j) <= radius) adj_[i].push_back({j, space.distance(i, j)});
    if (!connected())
      throw std::invalid_argument("graph with connectivity radius " + RISpace::num(radius) +
                                  " is disconnected");
  }

  /// Smallest radius that connects the space (the bottleneck edge of a
  /// minimum spanning tree).
  static double minimal_connecting_radius(const MetricMeasureSpace& space) {
    const std::size_t n = space.size();
    if (n == 1) return 1.0;
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    std::vector<bool> in(n, false);
    best[0] = 0.0;
    double bottleneck = 0.0;
    for (std::size_t it = 0; it < n; ++it) {
      std::size_t u = n;
      for (std::size_t i = 0; i < n; ++i)
        if (!in[i] && (u == n || best[i] < best[u])) u = i;
      in[u] = true;
      bottleneck = std::max(bottleneck, best[u]);
      for (std::size_t v = 0; v < n; ++v)
        if (!in[v]) best[v] = std::min(best[v], space.distance(u, v));
    }
    return bottleneck;
  }

  static GraphStructure connecting(const MetricMeasureSpace& space) {
    return GraphStructure(space, minimal_connecting_radius(space));
  }

  std::size_t size() const { return adj_.size(); }
  double radius() const { return radius_; }
  std::span<const Edge> neighbors(std::size_t i) const { return adj_[i]; }

 private:
  bool connected() const {
    std::vector<bool> seen(adj_.size(), false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    std::size_t count = 1;
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      for (const auto& e : adj_[u])
        if (!seen[e.to]) {
          seen[e.to] = true;
          ++count;
          stack.push_back(e.to);
        }
    }
    return count == adj_.size();
  }

  double radius_;
  std::vector<std::vector<Edge>> adj_;
};

/// g(x) = max over neighbours y of |f(x) - f(y)| / d(x, y).
inline std::vector<double> discrete_upper_gradient(const GraphStructure& graph,
                                                   std::span<const double> f) {
  if (f.size() != graph.size()) throw std::invalid_argument("gradient: function size mismatch");
  std::vector<double> g(f.size(), 0.0);
  for (std::size_t x = 0; x < f.size(); ++x)
    for (const auto& e : graph.neighbors(x))
      g[x] = std::max(g[x], std::abs(f[x] - f[e.to]) / e.length);
  return g;
}

/// max over edges of |f(x) - f(y)| - max(g(x), g(y)) d(x, y); <= 0 when g is
/// a discrete upper gradient of f (then every edge path inequality holds).
inline double upper_gradient_defect(const GraphStructure& graph, std::span<const double> f,
                                    std::span<const double> g) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t x = 0; x < f.size(); ++x)
    for (const auto& e : graph.neighbors(x))
      worst = std::max(worst, std::abs(f[x] - f[e.to]) - std::max(g[x], g[e.to]) * e.length);
  return worst;
}

inline double ball_average(const MetricMeasureSpace& space, std::span<const double> f,
                           const Ball& ball) {
  double s = 0.0, m = 0.0;
  for (std::size_t i : ball_members(space, ball)) {
    s += f[i] * space.weight(i);
    m += space.weight(i);
  }
  return s / m;
}

struct PoincareRatio {
  double value = 0.0;  // +inf when the gradient side vanishes but f - f_B does not
  double lhs = 0.0;    // ||f - f_B||_{X(B, mu_B)}
  double rhs = 0.0;    // r ||g||_{Y(sigma B, mu_{sigma B})}
  bool infinite() const { return std::isinf(value); }
};

inline PoincareRatio poincare_ratio(const MetricMeasureSpace& space, const GraphStructure& graph,
                                    std::span<const double> f, const Ball& ball,
                                    const PoincareSpec& spec) {
  detail::check_function(space, f);
  const double avg = ball_average(space, f, ball);
  std::vector<double> centered(f.size());
  double scale = 0.0, spread = 0.0;
  for (std::size_t i : ball_members(space, ball)) {
    scale = std::max(scale, std::abs(f[i]));
    spread = std::max(spread, std::abs(f[i] - avg));
  }
  for (std::size_t i = 0; i < f.size(); ++i) centered[i] = f[i] - avg;
  PoincareRatio r;
  // f constant on B up to rounding in the average
  if (spread <= 64.0 * std::numeric_limits<double>::epsilon() * scale) return r;
  r.lhs = local_norm(space, centered, ball, spec.x);
  const auto g = discrete_upper_gradient(graph, f);
  r.rhs = ball.radius * local_norm(space, g, dilate(ball, spec.sigma), spec.y);
  if (r.lhs == 0.0) return r;
  r.value = r.rhs > 0.0 ? r.lhs / r.rhs : std::numeric_limits<double>::infinity();
  return r;
}

/// 1 on d(center, .) <= inner, 0 beyond outer, linear in the distance between
/// (closed-ball convention on both radii).
inline std::vector<double> ramp_cutoff(const MetricMeasureSpace& space, std::size_t center,
                                       double inner, double outer) {
  if (!(outer > inner) || !(inner >= 0.0)) throw std::invalid_argument("ramp_cutoff: need 0 <= inner < outer");
  std::vector<double> f(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) {
    const double d = space.distance(center, i);
    f[i] = d <= inner ? 1.0 : d > outer ? 0.0 : (outer - d) / (outer - inner);
  }
  return f;
}

enum class TestFamily { constants, distance, ramp_cutoffs, random_lipschitz, indicator_smoothings };

inline const char* to_string(TestFamily f) {
  switch (f) {
    case TestFamily::constants: return "constants";
    case TestFamily::distance: return "distance";
    case TestFamily::ramp_cutoffs: return "ramp_cutoffs";
    case TestFamily::random_lipschitz: return "random_lipschitz";
    default: return "indicator_smoothings";
  }
}

struct TestFunction {
  TestFamily family;
  std::string label;
  std::vector<double> values;
};

struct FamilyOptions {
  std::vector<TestFamily> families{TestFamily::distance, TestFamily::ramp_cutoffs,
                                   TestFamily::random_lipschitz,
                                   TestFamily::indicator_smoothings};
  std::size_t center_stride = 1;   // distance/ramp centers: every k-th point
  std::size_t radius_samples = 8;  // ramp/smoothing radii per center
  std::size_t random_count = 16;
  std::uint64_t seed = 1;
};

/// 1-Lipschitz random function on the graph: a random walk along a BFS tree
/// with slopes in [-1, 1], then clipped to the graph metric by relaxation.
inline std::vector<double> random_lipschitz(const MetricMeasureSpace& space,
                                            const GraphStructure& graph, std::mt19937_64& rng) {
  const std::size_t n = space.size();
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::uniform_real_distribution<double> slope(-1.0, 1.0);
  std::vector<double> f(n, 0.0);
  std::vector<bool> seen(n, false);
  std::queue<std::size_t> q;
  const std::size_t root = pick(rng);
  q.push(root);
  seen[root] = true;
  while (!q.empty()) {
    const auto u = q.front();
    q.pop();
    for (const auto& e : graph.neighbors(u))
      if (!seen[e.to]) {
        seen[e.to] = true;
        f[e.to] = f[u] + slope(rng) * e.length;
        q.push(e.to);
      }
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t u = 0; u < n; ++u)
      for (const auto& e : graph.neighbors(u))
        if (f[u] > f[e.to] + e.length) {
          f[u] = f[e.to] + e.length;
          changed = true;
        }
  }
  return f;
}

inline std::vector<TestFunction> generate_family(const MetricMeasureSpace& space,
                                                 const GraphStructure& graph,
                                                 const FamilyOptions& opt) {
  std::vector<TestFunction> out;
  const std::size_t n = space.size();
  const std::size_t stride = std::max<std::size_t>(1, opt.center_stride);
  double diameter = 0.0, min_edge = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      diameter = std::max(diameter, space.distance(i, j));
      if (i != j) min_edge = std::min(min_edge, space.distance(i, j));
    }
  if (n == 1) min_edge = diameter = 1.0;
  for (TestFamily fam : opt.families) {
    switch (fam) {
      case TestFamily::constants:
        out.push_back({fam, "const", std::vector<double>(n, 1.0)});
        break;
      case TestFamily::distance:
        for (std::size_t c = 0; c < n; c += stride) {
          std::vector<double> f(n);
          for (std::size_t i = 0; i < n; ++i) f[i] = space.distance(c, i);
          out.push_back({fam, "dist(" + std::to_string(c) + ")", std::move(f)});
        }
        break;
      case TestFamily::ramp_cutoffs:
      case TestFamily::indicator_smoothings:
        for (std::size_t c = 0; c < n; c += stride)
          for (std::size_t k = 1; k <= opt.radius_samples; ++k) {
            const double outer = diameter * static_cast<double>(k) / static_cast<double>(opt.radius_samples);
            const double inner = fam == TestFamily::ramp_cutoffs
                                     ? 0.5 * outer
                                     : std::max(0.0, outer - min_edge);
            if (!(outer > inner)) continue;
            out.push_back({fam,
                           std::string(fam == TestFamily::ramp_cutoffs ? "ramp(" : "smooth(") +
                               std::to_string(c) + "," + RISpace::num(outer) + ")",
                           ramp_cutoff(space, c, inner, outer)});
          }
        break;
      case TestFamily::random_lipschitz: {
        std::mt19937_64 rng(opt.seed);
        for (std::size_t k = 0; k < opt.random_count; ++k)
          out.push_back({fam, "lip#" + std::to_string(k), random_lipschitz(space, graph, rng)});
        break;
      }
    }
  }
  return out;
}

struct BallSweep {
  std::vector<std::size_t> centers;
  std::vector<double> radii;
  Closure closure = Closure::open;

  /// Every `stride`-th center; `radius_count` radii evenly picked from the
  /// canonical radii of the space.
  static BallSweep sampled(const MetricMeasureSpace& space, std::size_t stride,
                           std::size_t radius_count) {
    BallSweep s;
    for (std::size_t c = 0; c < space.size(); c += std::max<std::size_t>(1, stride))
      s.centers.push_back(c);
    const auto all = canonical_radii(space);
    if (radius_count == 0 || radius_count >= all.size()) {
      s.radii = all;
    } else {
      for (std::size_t k = 0; k < radius_count; ++k)
        s.radii.push_back(all[(all.size() - 1) * (k + 1) / radius_count]);
      s.radii.erase(std::unique(s.radii.begin(), s.radii.end()), s.radii.end());
    }
    return s;
  }
};

struct PoincareEstimate {
  double constant = 0.0;  // sup of the ratio: a lower bound on the true constant
  std::size_t evaluations = 0;
  std::optional<Ball> best_ball;
  std::string best_function;
  std::size_t infinite_ratios = 0;
};

/// Sup of poincare_ratio over functions x balls. With `zero_boundary`, only
/// functions vanishing off the (open) ball are paired with it.
inline PoincareEstimate estimate_poincare_constant(const MetricMeasureSpace& space,
                                                   const GraphStructure& graph,
                                                   const PoincareSpec& spec,
                                                   std::span<const TestFunction> family,
                                                   const BallSweep& balls,
                                                   bool zero_boundary = false) {
  if (family.empty() || balls.centers.empty() || balls.radii.empty())
    throw std::invalid_argument("estimate_poincare_constant: empty family or ball sweep");
  PoincareEstimate est;
  for (std::size_t c : balls.centers)
    for (double r : balls.radii) {
      const Ball b{c, r, balls.closure};
      std::vector<bool> inside(space.size());
      for (std::size_t i = 0; i < space.size(); ++i) inside[i] = in_ball(space, b, i);
      for (const auto& tf : family) {
        if (zero_boundary) {
          bool ok = true;
          for (std::size_t i = 0; i < space.size() && ok; ++i)
            if (!inside[i] && tf.values[i] != 0.0) ok = false;
          if (!ok) continue;
        }
        const auto pr = poincare_ratio(space, graph, tf.values, b, spec);
        ++est.evaluations;
        if (pr.infinite()) {
          ++est.infinite_ratios;
          continue;
        }
        if (pr.value > est.constant) {
          est.constant = pr.value;
          est.best_ball = b;
          est.best_function = tf.label;
        }
      }
    }
  return est;
}

struct ClassicalSides {
  double lhs_rearranged, lhs_direct;  // ||f - f_B||_{L^q(B, mu_B)}
  double rhs_rearranged, rhs_direct;  // ||g||_{L^p(B, mu_B)}
};

/// Both sides of the (q,p) inequality on B (sigma = 1), each computed through
/// the rearrangement and directly as normalized averages.
inline ClassicalSides classical_equivalence_check(const MetricMeasureSpace& space,
                                                  std::span<const double> f,
                                                  std::span<const double> g, const Ball& ball,
                                                  double q, double p) {
  const double avg = ball_average(space, f, ball);
  std::vector<double> centered(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) centered[i] = f[i] - avg;
  auto direct = [&](std::span<const double> h, double e) {
    double s = 0.0, m = 0.0;
    for (std::size_t i : ball_members(space, ball)) {
      s += std::pow(std::abs(h[i]), e) * space.weight(i);
      m += space.weight(i);
    }
    return std::pow(s / m, 1.0 / e);
  };
  return {local_norm(space, centered, ball, RISpace::lp(q)), direct(centered, q),
          local_norm(space, g, ball, RISpace::lp(p)), direct(g, p)};
}

}  // namespace rinorm
