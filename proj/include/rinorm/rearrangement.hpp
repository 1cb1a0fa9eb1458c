#pragma once

// Distribution functions and decreasing rearrangements of point functions on a
// finite metric measure space, represented as right-continuous step functions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rinorm/measure_space.hpp"

namespace rinorm {

/// Right-continuous step function on [0, T): value[i] is held on
/// [breaks[i], breaks[i+1]). Outside [0, T) the function is 0.
class StepFunction {
 public:
  StepFunction() : breaks_{0.0} {}

  StepFunction(std::vector<double> breaks, std::vector<double> values)
      : breaks_(std::move(breaks)), values_(std::move(values)) {
    if (breaks_.empty() || breaks_.front() != 0.0)
      throw std::invalid_argument("step function breakpoints must start at 0");
    if (breaks_.size() != values_.size() + 1)
      throw std::invalid_argument("step function needs one more breakpoint than values");
    for (std::size_t i = 0; i + 1 < breaks_.size(); ++i)
      if (!(breaks_[i + 1] > breaks_[i]))
        throw std::invalid_argument("step function breakpoints must be strictly increasing");
  }

  std::span<const double> breaks() const { return breaks_; }
  std::span<const double> values() const { return values_; }
  std::size_t pieces() const { return values_.size(); }
  double domain_end() const { return breaks_.back(); }
  double length(std::size_t i) const { return breaks_[i + 1] - breaks_[i]; }
  bool empty() const { return values_.empty(); }

  double operator()(double t) const {
    if (t < 0.0 || t >= domain_end()) return 0.0;
    const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
    return values_[static_cast<std::size_t>(it - breaks_.begin()) - 1];
  }

  /// Exact integral of psi(value) over [0, T).
  template <class F>
  double integral_of(F&& psi) const {
    double s = 0.0;
    for (std::size_t i = 0; i < pieces(); ++i) s += psi(values_[i]) * length(i);
    return s;
  }

  double integral() const {
    return integral_of([](double v) { return v; });
  }

  /// Lebesgue measure of {s : u(s) > t}.
  double measure_above(double t) const {
    double m = 0.0;
    for (std::size_t i = 0; i < pieces(); ++i)
      if (values_[i] > t) m += length(i);
    return m;
  }

  bool is_nonincreasing() const {
    for (std::size_t i = 0; i + 1 < pieces(); ++i)
      if (values_[i + 1] > values_[i]) return false;
    return true;
  }

  bool is_nonnegative() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v >= 0.0; });
  }

  /// Same function with breakpoints divided by `scale`.
  StepFunction rescaled(double scale) const {
    std::vector<double> b(breaks_);
    for (double& x : b) x /= scale;
    b.front() = 0.0;
    return StepFunction(std::move(b), values_);
  }

  /// CSV rows "breakpoint,value"; the final row carries the terminal 0.
  void write_csv(std::ostream& os) const {
    char buf[64];
    os << "breakpoint,value\n";
    for (std::size_t i = 0; i < pieces(); ++i) {
      std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", breaks_[i], values_[i]);
      os << buf;
    }
    std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", domain_end(), 0.0);
    os << buf;
  }

 private:
  std::vector<double> breaks_;
  std::vector<double> values_;
};

namespace detail {

inline void check_function(const MetricMeasureSpace& space, std::span<const double> f) {
  if (f.size() != space.size())
    throw std::invalid_argument("function has " + std::to_string(f.size()) +
                                " values for a space of " + std::to_string(space.size()) +
                                " points");
}

/// (|f| value, mass) pairs over the restriction, ties merged, zeros dropped,
/// sorted by decreasing value.
inline std::vector<std::pair<double, double>> level_masses(
    const MetricMeasureSpace& space, std::span<const double> f,
    std::optional<std::span<const std::size_t>> restrict_to) {
  check_function(space, f);
  std::vector<std::pair<double, double>> lv;
  auto add = [&](std::size_t i) {
    if (i >= space.size()) throw std::out_of_range("restriction index out of range");
    const double a = std::abs(f[i]);
    if (a > 0.0) lv.emplace_back(a, space.weight(i));
  };
  if (restrict_to) {
    for (std::size_t i : *restrict_to) add(i);
  } else {
    for (std::size_t i = 0; i < space.size(); ++i) add(i);
  }
  std::sort(lv.begin(), lv.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<std::pair<double, double>> merged;
  for (const auto& [v, m] : lv) {
    if (!merged.empty() && merged.back().first == v)
      merged.back().second += m;
    else
      merged.emplace_back(v, m);
  }
  return merged;
}

}  // namespace detail

/// t -> mu{|f| > t} over the restriction. Breakpoints are 0 and the distinct
/// nonzero values of |f|; the function vanishes from max|f| on.
inline StepFunction distribution(const MetricMeasureSpace& space, std::span<const double> f,
                                 std::optional<std::span<const std::size_t>> restrict_to = {}) {
  auto lv = detail::level_masses(space, f, restrict_to);
  std::reverse(lv.begin(), lv.end());  // increasing values
  double above = 0.0;
  for (const auto& [v, m] : lv) above += m;
  std::vector<double> breaks{0.0};
  std::vector<double> values;
  for (const auto& [v, m] : lv) {
    values.push_back(above);
    breaks.push_back(v);
    above -= m;
  }
  return StepFunction(std::move(breaks), std::move(values));
}

/// f*(s) = inf{t >= 0 : mu_f(t) <= s}, on (0, mu(supp f)) with the zero tail
/// dropped.
inline StepFunction decreasing_rearrangement(
    const MetricMeasureSpace& space, std::span<const double> f,
    std::optional<std::span<const std::size_t>> restrict_to = {}) {
  const auto lv = detail::level_masses(space, f, restrict_to);
  std::vector<double> breaks{0.0};
  std::vector<double> values;
  double s = 0.0;
  for (const auto& [v, m] : lv) {
    s += m;
    values.push_back(v);
    breaks.push_back(s);
  }
  return StepFunction(std::move(breaks), std::move(values));
}

/// s -> (f chi_B)*(s mu(B)) on (0, 1).
inline StepFunction localized_rearrangement(const MetricMeasureSpace& space,
                                            std::span<const double> f, const Ball& ball) {
  const auto members = ball_members(space, ball);
  double mu_b = 0.0;
  for (std::size_t i : members) mu_b += space.weight(i);
  return decreasing_rearrangement(space, f, std::span<const std::size_t>(members)).rescaled(mu_b);
}

struct LayerCake {
  double on_space;        // sum_i psi(|f_i|) w_i
  double on_rearranged;   // int_0^T psi(f*(s)) ds
};

/// Both sides of int psi(|f|) dmu = int_0^{mu(Omega)} psi(f*(s)) ds, computed
/// independently. psi must satisfy psi(0) = 0.
template <class Psi>
LayerCake layer_cake(const MetricMeasureSpace& space, std::span<const double> f, Psi&& psi) {
  detail::check_function(space, f);
  double direct = 0.0;
  for (std::size_t i = 0; i < space.size(); ++i) direct += psi(std::abs(f[i])) * space.weight(i);
  const auto star = decreasing_rearrangement(space, f);
  return {direct, star.integral_of(psi)};
}

}  // namespace rinorm
