#include "app/config.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "rinorm/registry.hpp"

namespace rinorm::app {

namespace {

std::string at_line(int line) { return "line " + std::to_string(line); }

}  // namespace

Cfg Cfg::load_file(const std::filesystem::path& file) {
  if (!std::filesystem::exists(file)) throw ConfigError("config file not found: " + file.string());
  try {
    return Cfg(YAML::LoadFile(file.string()), "");
  } catch (const YAML::ParserException& e) {
    throw ConfigError(at_line(e.mark.line + 1) + ": " + e.msg);
  } catch (const YAML::BadFile&) {
    throw ConfigError("cannot read config file " + file.string());
  }
}

Cfg Cfg::load_string(const std::string& text, const std::string& origin) {
  try {
    return Cfg(YAML::Load(text), "");
  } catch (const YAML::ParserException& e) {
    throw ConfigError(origin + ": " + at_line(e.mark.line + 1) + ": " + e.msg);
  }
}

void Cfg::fail(const std::string& what) const {
  const std::string key = path_.empty() ? "" : ", key '" + path_ + "'";
  throw ConfigError(at_line(line()) + key + ": " + what);
}

bool Cfg::has(const std::string& key) const {
  return node_.IsMap() && node_[key].IsDefined() && !node_[key].IsNull();
}

Cfg Cfg::at(const std::string& key) const {
  if (!node_.IsMap()) fail("expected a mapping containing '" + key + "'");
  const YAML::Node child = node_[key];
  if (!child.IsDefined() || child.IsNull())
    throw ConfigError(at_line(line()) + ": missing key '" + child_path(key) + "'");
  return Cfg(child, child_path(key));
}

std::optional<Cfg> Cfg::get(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return at(key);
}

void Cfg::allow_only(std::initializer_list<std::string_view> keys) const {
  if (!node_.IsMap()) fail("expected a mapping");
  for (const auto& kv : node_) {
    const auto k = kv.first.as<std::string>();
    if (std::find(keys.begin(), keys.end(), k) == keys.end())
      throw ConfigError(at_line(kv.first.Mark().line + 1) + ": unknown key '" + child_path(k) + "'");
  }
}

double Cfg::number() const {
  if (!node_.IsScalar()) fail("expected a number");
  const auto s = node_.Scalar();
  if (s == "inf" || s == ".inf") return INFINITY;
  try {
    return node_.as<double>();
  } catch (const YAML::Exception&) {
    fail("expected a number, got '" + s + "'");
  }
}

std::int64_t Cfg::integer() const {
  const double v = number();
  if (v != std::floor(v) || std::abs(v) > 9e15) fail("expected an integer");
  return static_cast<std::int64_t>(v);
}

std::string Cfg::str() const {
  if (!node_.IsScalar()) fail("expected a string");
  return node_.Scalar();
}

bool Cfg::boolean() const {
  if (!node_.IsScalar()) fail("expected true or false");
  try {
    return node_.as<bool>();
  } catch (const YAML::Exception&) {
    fail("expected true or false, got '" + node_.Scalar() + "'");
  }
}

std::vector<Cfg> Cfg::items() const {
  if (!node_.IsSequence()) fail("expected a list");
  std::vector<Cfg> out;
  for (std::size_t i = 0; i < node_.size(); ++i)
    out.emplace_back(node_[i], path_ + "[" + std::to_string(i) + "]");
  return out;
}

std::vector<double> Cfg::numbers() const {
  std::vector<double> v;
  for (const auto& c : items()) v.push_back(c.number());
  return v;
}

double Cfg::number_or(const std::string& key, double fallback) const {
  return has(key) ? at(key).number() : fallback;
}
std::int64_t Cfg::integer_or(const std::string& key, std::int64_t fallback) const {
  return has(key) ? at(key).integer() : fallback;
}
bool Cfg::boolean_or(const std::string& key, bool fallback) const {
  return has(key) ? at(key).boolean() : fallback;
}
std::string Cfg::str_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? at(key).str() : fallback;
}

// ------------------------------------------------------------------ space

namespace {

std::function<double(double)> weight_expression(const Cfg& c) {
  Expr e;
  try {
    e = parse_expr(c.str());
  } catch (const RegistryError& err) {
    c.fail(err.what());
  }
  auto is_x = [](const Expr& a) { return !a.number && a.name == "x" && !a.call; };
  if (e.name == "uniform" && !e.call) return [](double) { return 1.0; };
  if (e.name == "exp" && e.args.size() == 1 && is_x(e.args[0]))
    return [](double x) { return std::exp(x); };
  if (e.name == "pow" && e.args.size() == 2 && is_x(e.args[0]) && e.args[1].number) {
    const double a = *e.args[1].number;
    return [a](double x) { return std::pow(x, a); };
  }
  c.fail("unknown weight expression '" + c.str() + "' (expected uniform, exp(x) or pow(x,a))");
}

}  // namespace

MetricMeasureSpace load_space(const Cfg& c) {
  c.allow_only({"line_grid", "dist", "weight", "points", "normalize"});
  std::optional<MetricMeasureSpace> space;
  try {
    if (auto g = c.get("line_grid")) {
      g->allow_only({"start", "end", "count", "weight"});
      if (c.has("dist")) c.fail("give either line_grid or dist/weight, not both");
      const auto count = g->at("count").integer();
      if (count < 1) g->at("count").fail("count must be >= 1");
      const auto wf = g->has("weight") ? weight_expression(g->at("weight"))
                                       : std::function<double(double)>([](double) { return 1.0; });
      space = MetricMeasureSpace::line_grid(g->at("start").number(), g->at("end").number(),
                                            static_cast<std::size_t>(count), wf);
    } else {
      const auto rows = c.at("dist").items();
      const auto w = c.at("weight").numbers();
      if (auto p = c.get("points"); p && p->integer() != static_cast<std::int64_t>(w.size()))
        p->fail("points does not match the weight vector length");
      std::vector<double> d;
      for (const auto& row : rows) {
        const auto r = row.numbers();
        if (r.size() != rows.size()) row.fail("distance rows must have n entries");
        d.insert(d.end(), r.begin(), r.end());
      }
      space = MetricMeasureSpace(std::move(d), w);
    }
  } catch (const std::invalid_argument& e) {
    c.fail(e.what());
  }
  return c.boolean_or("normalize", false) ? space->normalized() : *space;
}

RISpace load_spec(const Cfg& c) {
  try {
    return parse_space(c.str());
  } catch (const RegistryError& e) {
    c.fail(e.what());
  }
}

GainFunction load_gain(const Cfg& c, const RISpace* x, const RISpace* y) {
  try {
    return parse_gain(c.str(), x, y);
  } catch (const RegistryError& e) {
    c.fail(e.what());
  } catch (const std::invalid_argument& e) {
    c.fail(e.what());
  }
}

FundamentalFunction load_phi(const Cfg& c) {
  try {
    return parse_phi(c.str());
  } catch (const RegistryError& e) {
    c.fail(e.what());
  }
}

Ball load_ball(const Cfg& c, const MetricMeasureSpace& space) {
  c.allow_only({"center", "radius", "closure"});
  Ball b;
  const auto center = c.at("center").integer();
  if (center < 0 || static_cast<std::size_t>(center) >= space.size())
    c.at("center").fail("center index out of range");
  b.center = static_cast<std::size_t>(center);
  b.radius = c.at("radius").number();
  if (!(b.radius > 0.0)) c.at("radius").fail("radius must be positive");
  const auto cl = c.str_or("closure", "open");
  if (cl == "open")
    b.closure = Closure::open;
  else if (cl == "closed")
    b.closure = Closure::closed;
  else
    c.at("closure").fail("closure must be open or closed");
  return b;
}

std::vector<double> load_function(const Cfg& c, const MetricMeasureSpace& space,
                                  std::uint64_t seed) {
  c.allow_only({"values", "generator"});
  if (auto v = c.get("values")) {
    auto f = v->numbers();
    if (f.size() != space.size())
      v->fail("expected " + std::to_string(space.size()) + " values, got " +
              std::to_string(f.size()));
    return f;
  }
  const auto gen = c.at("generator");
  Expr e;
  try {
    e = parse_expr(gen.str());
  } catch (const RegistryError& err) {
    gen.fail(err.what());
  }
  std::vector<double> f(space.size());
  if (e.name == "coordinate" && e.args.empty()) {
    if (!space.coordinates()) gen.fail("coordinate needs a line_grid space");
    return *space.coordinates();
  }
  if (e.name == "distance" && e.args.size() == 1 && e.args[0].number) {
    const double ci = *e.args[0].number;
    if (ci < 0 || ci != std::floor(ci) || ci >= static_cast<double>(space.size()))
      gen.fail("distance(i) needs a point index");
    for (std::size_t i = 0; i < space.size(); ++i)
      f[i] = space.distance(static_cast<std::size_t>(ci), i);
    return f;
  }
  if (e.name == "random" && e.args.size() == 2 && e.args[0].number && e.args[1].number) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(*e.args[0].number, *e.args[1].number);
    for (double& x : f) x = u(rng);
    return f;
  }
  gen.fail("unknown generator '" + gen.str() +
           "' (expected coordinate, distance(i) or random(lo,hi))");
}

}  // namespace rinorm::app
