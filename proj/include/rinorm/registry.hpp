#pragma once

// Text names for spaces, Young functions, gains and fundamental functions:
//   spaces  Lp(p) Lorentz(p,q) LZ(p,q,alpha) Orlicz(<young>) M(of=<space>) Lambda(of=<space>)
//   young   power(p) exp_minus_one t_log_alpha(alpha)
//   gains   log_alpha(a) pow(eps) psi_of(<X>,<Y>) example:c(k,m) example:d(a1,...)
//           example:b(m,alpha) example:L(n)
//   phi     pow(a) pow_log(a,b) or any space name

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rinorm/gain.hpp"
#include "rinorm/ri_norms.hpp"
#include "rinorm/young_function.hpp"

namespace rinorm {

struct RegistryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// name, or name(arg, ...), where each arg is a number, key=expr, or expr.
struct Expr {
  std::string name;
  std::optional<double> number;
  std::string key;  // set for key=expr arguments
  std::vector<Expr> args;
  bool call = false;

  std::string text() const {
    if (number) return RISpace::num(*number);
    std::string s = key.empty() ? name : key + "=" + name;
    if (call) {
      s += "(";
      for (std::size_t i = 0; i < args.size(); ++i) s += (i ? "," : "") + args[i].text();
      s += ")";
    }
    return s;
  }
};

namespace detail {

class ExprParser {
 public:
  explicit ExprParser(std::string_view src) : src_(src) {}

  Expr parse() {
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw RegistryError("cannot parse '" + std::string(src_) + "': " + what + " at column " +
                        std::to_string(pos_ + 1));
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == ':';
  }

  Expr parse_expr() {
    skip_ws();
    if (pos_ >= src_.size()) fail("expected a name or number");
    const char c = src_[pos_];
    Expr e;
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.') {
      const std::string rest(src_.substr(pos_));
      char* end = nullptr;
      const double v = std::strtod(rest.c_str(), &end);
      if (end == rest.c_str()) fail("bad number");
      pos_ += static_cast<std::size_t>(end - rest.c_str());
      e.number = v;
      return e;
    }
    const std::size_t start = pos_;
    while (pos_ < src_.size() && ident_char(src_[pos_])) ++pos_;
    if (pos_ == start) fail("expected a name");
    e.name = std::string(src_.substr(start, pos_ - start));
    if (e.name == "inf") {
      e.number = INFINITY;
      e.name.clear();
      return e;
    }
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == '=') {
      ++pos_;
      Expr v = parse_expr();
      v.key = e.name;
      return v;
    }
    if (pos_ < src_.size() && src_[pos_] == '(') {
      ++pos_;
      e.call = true;
      skip_ws();
      if (pos_ < src_.size() && src_[pos_] == ')') {
        ++pos_;
        return e;
      }
      for (;;) {
        e.args.push_back(parse_expr());
        skip_ws();
        if (pos_ >= src_.size()) fail("unterminated argument list");
        if (src_[pos_] == ')') {
          ++pos_;
          break;
        }
        if (src_[pos_] != ',') fail("expected ',' or ')'");
        ++pos_;
      }
    }
    return e;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

inline double num_arg(const Expr& e, std::size_t i) {
  if (i >= e.args.size() || !e.args[i].number)
    throw RegistryError(e.name + ": argument " + std::to_string(i + 1) + " must be a number");
  return *e.args[i].number;
}

inline void arity(const Expr& e, std::size_t n) {
  if (e.args.size() != n)
    throw RegistryError(e.name + " takes " + std::to_string(n) + " argument(s), got " +
                        std::to_string(e.args.size()));
}

inline int int_arg(const Expr& e, std::size_t i) {
  const double v = num_arg(e, i);
  if (v != std::floor(v)) throw RegistryError(e.name + ": argument " + std::to_string(i + 1) + " must be an integer");
  return static_cast<int>(v);
}

}  // namespace detail

inline Expr parse_expr(std::string_view text) { return detail::ExprParser(text).parse(); }

YoungFunction young_from(const Expr& e);
RISpace space_from(const Expr& e);

inline YoungFunction young_from(const Expr& e) {
  try {
    if (e.name == "power") {
      detail::arity(e, 1);
      return power_young(detail::num_arg(e, 0));
    }
    if (e.name == "exp_minus_one") {
      detail::arity(e, 0);
      return exp_minus_one_young();
    }
    if (e.name == "t_log_alpha") {
      detail::arity(e, 1);
      return t_log_alpha_young(detail::num_arg(e, 0));
    }
  } catch (const std::invalid_argument& err) {
    throw RegistryError(err.what());
  }
  throw RegistryError("unknown Young function '" + e.text() + "'");
}

inline FundamentalFunction phi_from(const Expr& e) {
  if (e.name == "pow") {
    detail::arity(e, 1);
    return power_log_phi(detail::num_arg(e, 0));
  }
  if (e.name == "pow_log") {
    detail::arity(e, 2);
    return power_log_phi(detail::num_arg(e, 0), detail::num_arg(e, 1));
  }
  return fundamental_of(space_from(e));
}

inline RISpace space_from(const Expr& e) {
  using detail::arity;
  using detail::num_arg;
  try {
    if (e.name == "Lp") {
      arity(e, 1);
      return RISpace::lp(num_arg(e, 0));
    }
    if (e.name == "Lorentz") {
      arity(e, 2);
      return RISpace::lorentz(num_arg(e, 0), num_arg(e, 1));
    }
    if (e.name == "LZ") {
      arity(e, 3);
      return RISpace::lorentz_zygmund(num_arg(e, 0), num_arg(e, 1), num_arg(e, 2));
    }
    if (e.name == "Orlicz") {
      arity(e, 1);
      return RISpace::orlicz(young_from(e.args[0]));
    }
    if (e.name == "M" || e.name == "Lambda") {
      arity(e, 1);
      auto phi = phi_from(e.args[0]);
      return e.name == "M" ? RISpace::marcinkiewicz(std::move(phi)) : RISpace::lambda(std::move(phi));
    }
  } catch (const std::invalid_argument& err) {
    throw RegistryError(err.what());
  }
  throw RegistryError("unknown space '" + e.text() + "'");
}

inline RISpace parse_space(std::string_view text) { return space_from(parse_expr(text)); }
inline YoungFunction parse_young(std::string_view text) { return young_from(parse_expr(text)); }
inline FundamentalFunction parse_phi(std::string_view text) { return phi_from(parse_expr(text)); }

inline SlowlyVaryingExample example_from(const Expr& e) {
  const std::string fam = e.name.substr(e.name.find(':') + 1);
  try {
    if (fam == "c") {
      detail::arity(e, 2);
      return SlowlyVaryingExample::c(detail::int_arg(e, 0), detail::int_arg(e, 1));
    }
    if (fam == "d") {
      std::vector<double> a;
      for (std::size_t i = 0; i < e.args.size(); ++i) a.push_back(detail::num_arg(e, i));
      return SlowlyVaryingExample::d(std::move(a));
    }
    if (fam == "b") {
      detail::arity(e, 2);
      return SlowlyVaryingExample::b(detail::int_arg(e, 0), detail::num_arg(e, 1));
    }
    if (fam == "L") {
      detail::arity(e, 1);
      return SlowlyVaryingExample::iterated_log(detail::int_arg(e, 0));
    }
  } catch (const std::invalid_argument& err) {
    throw RegistryError(err.what());
  }
  throw RegistryError("unknown example family '" + e.text() + "'");
}

/// `psi_of` without arguments uses the given X and Y.
inline GainFunction parse_gain(std::string_view text, const RISpace* x = nullptr,
                               const RISpace* y = nullptr) {
  const Expr e = parse_expr(text);
  if (e.name == "log_alpha") {
    detail::arity(e, 1);
    return log_alpha_gain(detail::num_arg(e, 0));
  }
  if (e.name == "pow") {
    detail::arity(e, 1);
    return pow_gain(detail::num_arg(e, 0));
  }
  if (e.name == "psi_of") {
    if (e.args.empty()) {
      if (!x || !y) throw RegistryError("psi_of needs X and Y");
      return psi_of_gain(*x, *y);
    }
    detail::arity(e, 2);
    return psi_of_gain(space_from(e.args[0]), space_from(e.args[1]));
  }
  if (e.name.rfind("example:", 0) == 0) return gain_from_example(example_from(e));
  throw RegistryError("unknown gain '" + e.text() + "'");
}

}  // namespace rinorm
