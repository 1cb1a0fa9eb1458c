#pragma once

// Finite metric measure spaces: a distance matrix, positive point masses,
// balls with either closure convention, dilations and doubling constants.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rinorm {

enum class Closure { open, closed };

struct Ball {
  std::size_t center = 0;
  double radius = 1.0;
  Closure closure = Closure::open;

  bool operator==(const Ball&) const = default;
};

class MetricMeasureSpace {
 public:
  /// `dist` is row-major n*n. Symmetry, zero diagonal, positivity of the
  /// weights and the triangle inequality are all validated here (O(n^3)).
  MetricMeasureSpace(std::vector<double> dist, std::vector<double> weight)
      : MetricMeasureSpace(std::move(dist), std::move(weight), {}, true) {}

  /// Points a + (b-a)*i/(count-1) on a line. Weight is a function of the
  /// coordinate. The metric is (b-a)|i-j|/(count-1), so the triangle check is
  /// skipped.
  static MetricMeasureSpace line_grid(double a, double b, std::size_t count,
                                      const std::function<double(double)>& weight_of) {
    if (count == 0) throw std::invalid_argument("line_grid: count must be positive");
    if (count > 1 && !(b > a)) throw std::invalid_argument("line_grid: need end > start");
    std::vector<double> x(count);
    for (std::size_t i = 0; i < count; ++i)
      x[i] = count == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
    std::vector<double> d(count * count);
    std::vector<double> w(count);
    for (std::size_t i = 0; i < count; ++i) {
      w[i] = weight_of(x[i]);
      // from the index gap, so equal gaps give bitwise equal distances
      for (std::size_t j = 0; j < count; ++j)
        d[i * count + j] = count == 1 ? 0.0
                                      : (b - a) * static_cast<double>(i > j ? i - j : j - i) /
                                            static_cast<double>(count - 1);
    }
    return MetricMeasureSpace(std::move(d), std::move(w), std::move(x), false);
  }

  std::size_t size() const { return weight_.size(); }
  double distance(std::size_t i, std::size_t j) const { return dist_[i * size() + j]; }
  double weight(std::size_t i) const { return weight_[i]; }
  std::span<const double> weights() const { return weight_; }
  double total_mass() const { return total_; }

  /// Line coordinates when the space came from `line_grid`.
  const std::optional<std::vector<double>>& coordinates() const { return coords_; }

  /// Same metric, weights divided by the total mass.
  MetricMeasureSpace normalized() const {
    MetricMeasureSpace out = *this;
    for (double& w : out.weight_) w /= total_;
    out.total_ = 1.0;
    return out;
  }

 private:
  MetricMeasureSpace(std::vector<double> dist, std::vector<double> weight,
                     std::optional<std::vector<double>> coords, bool check_triangle)
      : dist_(std::move(dist)), weight_(std::move(weight)), coords_(std::move(coords)) {
    const std::size_t n = weight_.size();
    if (n == 0) throw std::invalid_argument("metric measure space needs at least one point");
    if (dist_.size() != n * n)
      throw std::invalid_argument("distance matrix must be n*n for n = " + std::to_string(n));
    total_ = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(weight_[i] > 0.0) || !std::isfinite(weight_[i]))
        throw std::invalid_argument("weight[" + std::to_string(i) + "] must be positive and finite");
      total_ += weight_[i];
      if (distance(i, i) != 0.0)
        throw std::invalid_argument("dist[" + std::to_string(i) + "][" + std::to_string(i) +
                                    "] must be 0");
      for (std::size_t j = 0; j < n; ++j) {
        const double dij = distance(i, j);
        if (!(dij >= 0.0) || !std::isfinite(dij))
          throw std::invalid_argument("distances must be finite and nonnegative");
        if (dij != distance(j, i)) throw std::invalid_argument("distance matrix must be symmetric");
        if (i != j && dij == 0.0)
          throw std::invalid_argument("distinct points must have positive distance");
      }
    }
    if (!check_triangle) return;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
          const double via = distance(i, j) + distance(j, k);
          if (distance(i, k) > via * (1.0 + 1e-12))
            throw std::invalid_argument("triangle inequality fails for points (" +
                                        std::to_string(i) + ", " + std::to_string(j) + ", " +
                                        std::to_string(k) + ")");
        }
  }

  std::vector<double> dist_;
  std::vector<double> weight_;
  std::optional<std::vector<double>> coords_;
  double total_ = 0.0;
};

inline bool in_ball(const MetricMeasureSpace& space, const Ball& ball, std::size_t i) {
  const double d = space.distance(ball.center, i);
  return ball.closure == Closure::open ? d < ball.radius : d <= ball.radius;
}

inline void check_ball(const MetricMeasureSpace& space, const Ball& ball) {
  if (ball.center >= space.size())
    throw std::out_of_range("ball center " + std::to_string(ball.center) +
                            " out of range for a space of " + std::to_string(space.size()) +
                            " points");
  if (!(ball.radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
}

inline std::vector<std::size_t> ball_members(const MetricMeasureSpace& space, const Ball& ball) {
  check_ball(space, ball);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < space.size(); ++i)
    if (in_ball(space, ball, i)) out.push_back(i);
  return out;
}

inline double measure_of(const MetricMeasureSpace& space, const Ball& ball) {
  check_ball(space, ball);
  double m = 0.0;
  for (std::size_t i = 0; i < space.size(); ++i)
    if (in_ball(space, ball, i)) m += space.weight(i);
  return m;
}

inline Ball dilate(const Ball& ball, double sigma) {
  if (!(sigma >= 1.0)) throw std::invalid_argument("dilation factor must be >= 1");
  return Ball{ball.center, ball.radius * sigma, ball.closure};
}

/// Radii at which r -> mu(B(x,r)) or r -> mu(B(x,2r)) can change: every
/// distinct positive distance d and every d/2. Between consecutive values the
/// doubling ratio is constant, and for open balls the constant is attained at
/// the right endpoint, so a sweep over this set is exact.
inline std::vector<double> canonical_radii(const MetricMeasureSpace& space) {
  std::vector<double> r;
  const std::size_t n = space.size();
  r.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      r.push_back(space.distance(i, j));
      r.push_back(0.5 * space.distance(i, j));
    }
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
  if (r.empty()) r.push_back(1.0);
  return r;
}

/// sup over centers x and r in `radii` of mu(B(x,2r)) / mu(B(x,r)), open balls.
inline double doubling_constant(const MetricMeasureSpace& space, std::span<const double> radii) {
  if (radii.empty()) throw std::invalid_argument("doubling_constant: empty radii set");
  const std::size_t n = space.size();
  double best = 1.0;
  std::vector<double> d(n);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t i = 0; i < n; ++i) d[i] = space.distance(x, i);
    for (double r : radii) {
      if (!(r > 0.0)) throw std::invalid_argument("doubling_constant: radii must be positive");
      double inner = 0.0, outer = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (d[i] < r) inner += space.weight(i);
        if (d[i] < 2.0 * r) outer += space.weight(i);
      }
      best = std::max(best, outer / inner);
    }
  }
  return best;
}

inline double doubling_constant(const MetricMeasureSpace& space) {
  const auto radii = canonical_radii(space);
  return doubling_constant(space, radii);
}

}  // namespace rinorm
