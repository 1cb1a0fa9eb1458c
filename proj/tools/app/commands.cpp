#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>

#include "app/app.hpp"
#include "rinorm/rinorm.hpp"

namespace rinorm::app {

namespace {

using json = nlohmann::ordered_json;

std::int64_t as_int(std::size_t v) { return static_cast<std::int64_t>(v); }
std::string yes_no(bool b) { return b ? "true" : "false"; }

/// Shared inputs, resolved lazily so each subcommand only demands what it uses.
struct Context {
  const Cfg& cfg;
  std::uint64_t seed;
  int grid_scale;

  Cfg section(const std::string& name) const {
    if (auto s = cfg.get(name)) return *s;
    return Cfg(YAML::Node(YAML::NodeType::Map), name);
  }
  MetricMeasureSpace space() const { return load_space(cfg.at("space")); }
  RISpace x() const { return load_spec(cfg.at("X")); }
  RISpace y() const { return load_spec(cfg.at("Y")); }
  double sigma() const {
    const double s = cfg.number_or("sigma", 1.0);
    if (!(s >= 1.0)) cfg.at("sigma").fail("sigma must be >= 1");
    return s;
  }
  std::vector<double> function(const MetricMeasureSpace& sp) const {
    return load_function(cfg.at("function"), sp, seed);
  }
  std::optional<Ball> ball(const MetricMeasureSpace& sp) const {
    if (auto b = cfg.get("ball")) return load_ball(*b, sp);
    return std::nullopt;
  }
};

json ball_json(const Ball& b) {
  return {{"center", b.center},
          {"radius", b.radius},
          {"closure", b.closure == Closure::open ? "open" : "closed"}};
}

std::size_t positive_count(const Cfg& sec, const std::string& key, std::int64_t fallback,
                           bool zero_ok = false) {
  const auto v = sec.integer_or(key, fallback);
  if (v < (zero_ok ? 0 : 1)) sec.at(key).fail(key + (zero_ok ? " must be >= 0" : " must be >= 1"));
  return static_cast<std::size_t>(v);
}

void step_rows(CsvTable& t, const StepFunction& u) {
  for (std::size_t i = 0; i < u.pieces(); ++i) t.add({u.breaks()[i], u.values()[i]});
  t.add({u.domain_end(), 0.0});
}

// ------------------------------------------------------------------ norm

RunResult run_norm(const Context& ctx) {
  const auto sec = ctx.section("norm");
  sec.allow_only({"specs"});
  const auto sp = ctx.space();
  const auto f = ctx.function(sp);
  const auto ball = ctx.ball(sp);
  std::vector<std::pair<std::string, RISpace>> specs;
  if (auto list = sec.get("specs")) {
    for (const auto& s : list->items()) specs.emplace_back(s.str(), load_spec(s));
  } else {
    specs.emplace_back("X", ctx.x());
    if (ctx.cfg.has("Y")) specs.emplace_back("Y", ctx.y());
  }
  RunResult out;
  CsvTable t({"spec", "scope", "value"});
  json rows = json::array();
  const auto star = decreasing_rearrangement(sp, f);
  for (const auto& [label, spec] : specs) {
    json r{{"spec", spec.name()}, {"global", norm(spec, star)}};
    t.add({spec.name(), std::string("global"), r["global"].get<double>()});
    if (ball) {
      const double local = local_norm(sp, f, *ball, spec);
      r["ball"] = local;
      t.add({spec.name(), std::string("ball"), local});
      if (const auto* o = std::get_if<Orlicz>(&spec.kind())) {
        const double direct = local_luxemburg_direct(o->young, sp, f, *ball);
        r["ball_direct"] = direct;
        t.add({spec.name(), std::string("ball_direct"), direct});
      }
    }
    rows.push_back(std::move(r));
  }
  out.summary["points"] = sp.size();
  out.summary["total_mass"] = sp.total_mass();
  if (ball) out.summary["ball"] = ball_json(*ball);
  out.summary["norms"] = std::move(rows);
  out.summary["estimators"] = {{"quadrature", "gauss_kronrod_31"},
                               {"quadrature_rel_tol", 1e-13},
                               {"luxemburg_rel_tol", 1e-15},
                               {"marcinkiewicz_refine", 64}};
  out.tables.emplace("norm.csv", std::move(t));
  return out;
}

// -------------------------------------------------------------- rearrange

RunResult run_rearrange(const Context& ctx) {
  ctx.section("rearrange").allow_only({});
  const auto sp = ctx.space();
  const auto f = ctx.function(sp);
  const auto ball = ctx.ball(sp);
  StepFunction star, dist;
  if (ball) {
    const auto members = ball_members(sp, *ball);
    star = localized_rearrangement(sp, f, *ball);
    dist = distribution(sp, f, std::span<const std::size_t>(members));
  } else {
    star = decreasing_rearrangement(sp, f);
    dist = distribution(sp, f);
  }
  RunResult out;
  CsvTable tr({"breakpoint", "value"});
  step_rows(tr, star);
  CsvTable td({"breakpoint", "value"});
  step_rows(td, dist);
  out.summary["points"] = sp.size();
  out.summary["total_mass"] = sp.total_mass();
  if (ball) out.summary["ball"] = ball_json(*ball);
  out.summary["pieces"] = star.pieces();
  out.summary["domain_end"] = star.domain_end();
  out.summary["integral"] = star.integral();
  out.summary["max"] = star.empty() ? 0.0 : star.values()[0];
  out.tables.emplace("rearrangement.csv", std::move(tr));
  out.tables.emplace("distribution.csv", std::move(td));
  return out;
}

// ---------------------------------------------------------------- indices

json grid_json(const ZippinGrid& g) {
  return {{"log_step", g.log_step},
          {"log_t_max", g.log_t_max},
          {"log_s_max", g.log_s_max},
          {"s_growth", g.s_growth}};
}

RunResult run_indices(const Context& ctx) {
  const auto sec = ctx.section("indices");
  sec.allow_only({"phi", "grid"});
  ZippinGrid grid;
  if (auto g = sec.get("grid")) {
    g->allow_only({"log_step", "log_t_max", "log_s_max", "s_growth"});
    grid.log_step = g->number_or("log_step", grid.log_step);
    grid.log_t_max = g->number_or("log_t_max", grid.log_t_max);
    grid.log_s_max = g->number_or("log_s_max", grid.log_s_max);
    grid.s_growth = g->number_or("s_growth", grid.s_growth);
    if (!(grid.log_step > 0.0 && grid.log_t_max > grid.log_s_max && grid.log_s_max > 0.0 &&
          grid.s_growth > 1.0))
      g->fail("need log_step > 0, log_t_max > log_s_max > 0 and s_growth > 1");
  }
  grid = grid.scaled(ctx.grid_scale);
  std::vector<FundamentalFunction> phis;
  if (auto list = sec.get("phi")) {
    for (const auto& p : list->items()) phis.push_back(load_phi(p));
  } else {
    phis.push_back(fundamental_of(ctx.x()));
    if (ctx.cfg.has("Y")) phis.push_back(fundamental_of(ctx.y()));
  }
  RunResult out;
  CsvTable t({"phi", "lower", "upper", "ordered", "sandwich_ok"});
  json rows = json::array();
  for (const auto& phi : phis) {
    const auto z = zippin_indices(phi, grid);
    t.add({phi.name, z.lower, z.upper, yes_no(z.ordered), yes_no(z.sandwich_ok)});
    rows.push_back({{"phi", phi.name},
                    {"lower", z.lower},
                    {"upper", z.upper},
                    {"ordered", z.ordered},
                    {"sandwich_ok", z.sandwich_ok},
                    {"t_points", z.t_points},
                    {"s_points", z.s_points}});
  }
  out.summary["indices"] = std::move(rows);
  if (ctx.cfg.has("X") && ctx.cfg.has("Y")) {
    const auto gap = index_gap_doubling_criterion(ctx.x(), ctx.y(), grid);
    json g{{"X", ctx.x().name()},
           {"Y", ctx.y().name()},
           {"criterion_satisfied", gap.gap_satisfied},
           {"exponent", gap.exponent},
           {"slack", gap.slack},
           {"bound_points", gap.bound_points},
           {"bound_violations", gap.bound_violations}};
    if (gap.slowly_varying) g["psi_ermakoff"] = to_string(gap.slowly_varying->verdict);
    out.summary["index_gap"] = std::move(g);
  }
  out.summary["estimators"] = {{"zippin_grid", grid_json(grid)}};
  out.tables.emplace("indices.csv", std::move(t));
  return out;
}

// --------------------------------------------------------------- ermakoff

RunResult run_ermakoff(const Context& ctx) {
  const auto sec = ctx.section("ermakoff");
  sec.allow_only({"gains", "max_k", "series"});
  const int max_k = static_cast<int>(sec.integer_or("max_k", 40));
  if (max_k < 8 || max_k > 1000) sec.at("max_k").fail("max_k must lie in [8, 1000]");
  const bool series = sec.boolean_or("series", true);
  std::optional<RISpace> x, y;
  if (ctx.cfg.has("X")) x = ctx.x();
  if (ctx.cfg.has("Y")) y = ctx.y();
  std::vector<GainFunction> gains;
  const auto resolve = [&](const Cfg& c) {
    return load_gain(c, x ? &*x : nullptr, y ? &*y : nullptr);
  };
  if (auto list = sec.get("gains")) {
    for (const auto& g : list->items()) gains.push_back(resolve(g));
  } else {
    gains.push_back(resolve(ctx.cfg.at("gain")));
  }
  RunResult out;
  CsvTable t({"gain", "k", "t", "ratio", "log_ratio"});
  json rows = json::array();
  for (const auto& g : gains) {
    const auto r = ermakoff_test(g, max_k);
    for (std::size_t k = 0; k < r.trace.size(); ++k)
      t.add({g.name(), as_int(k), r.trace[k].t, r.trace[k].ratio, r.trace[k].log_ratio});
    json row{{"gain", g.name()},
             {"verdict", to_string(r.verdict)},
             {"estimated_limit", r.estimated_limit},
             {"final_log_ratio", r.trace.back().log_ratio}};
    if (series && r.verdict == Verdict::pass) {
      const auto s = series_c1(g);
      row["c1"] = s.value;
      row["c1_terms"] = s.terms;
      row["c1_bracket"] = {s.partial, s.partial + s.tail_upper};
    }
    rows.push_back(std::move(row));
  }
  out.summary["gains"] = std::move(rows);
  out.summary["estimators"] = {{"ermakoff_samples", "t = 2^k, k = 0.." + std::to_string(max_k)},
                               {"tail", 8},
                               {"pass_below", 1e-3},
                               {"fail_above", 0.1},
                               {"flat_within", 0.05}};
  out.tables.emplace("ermakoff.csv", std::move(t));
  return out;
}

// --------------------------------------------------------------- doubling

RunResult run_doubling(const Context& ctx) {
  const auto sec = ctx.section("doubling");
  sec.allow_only({"radii"});
  const auto sp = ctx.space();
  std::vector<double> radii;
  if (auto r = sec.get("radii")) {
    if (r->is_scalar() && r->str() == "canonical") {
      radii = canonical_radii(sp);
    } else {
      radii = r->numbers();
      if (radii.empty()) r->fail("radii list is empty");
      for (double v : radii)
        if (!(v > 0.0)) r->fail("radii must be positive");
    }
  } else {
    radii = canonical_radii(sp);
  }
  RunResult out;
  CsvTable t({"center", "radius", "mu_B", "mu_2B", "ratio"});
  double best = 1.0;
  json worst;
  for (std::size_t c = 0; c < sp.size(); ++c) {
    double ratio = 0.0, at = radii.front(), mb = 0.0, m2b = 0.0;
    for (double r : radii) {
      const Ball b{c, r, Closure::open};
      const double inner = measure_of(sp, b), outer = measure_of(sp, dilate(b, 2.0));
      if (outer / inner > ratio) {
        ratio = outer / inner;
        at = r;
        mb = inner;
        m2b = outer;
      }
    }
    t.add({as_int(c), at, mb, m2b, ratio});
    if (ratio > best || worst.is_null()) {
      best = std::max(best, ratio);
      worst = ball_json(Ball{c, at, Closure::open});
    }
  }
  out.summary["points"] = sp.size();
  out.summary["doubling_constant"] = best;
  out.summary["worst_ball"] = std::move(worst);
  out.summary["estimators"] = {{"radii", radii.size()},
                               {"radii_source", sec.has("radii") ? "config" : "canonical"},
                               {"balls", "open"}};
  out.tables.emplace("doubling.csv", std::move(t));
  return out;
}

// --------------------------------------------------------------- poincare

struct PoincareSetup {
  FamilyOptions family;
  std::size_t ball_stride = 1;
  std::size_t ball_radii = 16;
  Closure closure = Closure::open;
  bool zero_boundary = false;
  std::optional<double> connectivity;
};

PoincareSetup poincare_setup(const Context& ctx) {
  const auto sec = ctx.section("poincare");
  sec.allow_only({"families", "center_stride", "radius_samples", "random_count", "ball_stride",
                  "ball_radii", "closure", "zero_boundary", "connectivity_radius"});
  PoincareSetup s;
  if (auto fams = sec.get("families")) {
    s.family.families.clear();
    for (const auto& f : fams->items()) {
      const auto n = f.str();
      if (n == "constants") s.family.families.push_back(TestFamily::constants);
      else if (n == "distance") s.family.families.push_back(TestFamily::distance);
      else if (n == "ramp_cutoffs") s.family.families.push_back(TestFamily::ramp_cutoffs);
      else if (n == "random_lipschitz") s.family.families.push_back(TestFamily::random_lipschitz);
      else if (n == "indicator_smoothings")
        s.family.families.push_back(TestFamily::indicator_smoothings);
      else f.fail("unknown test family '" + n + "'");
    }
    if (s.family.families.empty()) fams->fail("families list is empty");
  }
  s.family.center_stride = positive_count(sec, "center_stride", 1);
  s.family.radius_samples = positive_count(sec, "radius_samples", 8) * static_cast<std::size_t>(ctx.grid_scale);
  s.family.random_count = positive_count(sec, "random_count", 16);
  s.family.seed = ctx.seed;
  s.ball_stride = positive_count(sec, "ball_stride", 1);
  s.ball_radii = positive_count(sec, "ball_radii", 16, true) * static_cast<std::size_t>(ctx.grid_scale);
  const auto cl = sec.str_or("closure", "open");
  if (cl != "open" && cl != "closed") sec.at("closure").fail("closure must be open or closed");
  s.closure = cl == "open" ? Closure::open : Closure::closed;
  s.zero_boundary = sec.boolean_or("zero_boundary", false);
  if (sec.has("connectivity_radius")) {
    s.connectivity = sec.at("connectivity_radius").number();
    if (!(*s.connectivity > 0.0)) sec.at("connectivity_radius").fail("must be positive");
  }
  return s;
}

GraphStructure make_graph(const MetricMeasureSpace& sp, const PoincareSetup& s) {
  return s.connectivity ? GraphStructure(sp, *s.connectivity) : GraphStructure::connecting(sp);
}

json poincare_meta(const PoincareSetup& s, const GraphStructure& graph, std::size_t family_size,
                   const BallSweep& sweep) {
  json fams = json::array();
  for (auto f : s.family.families) fams.push_back(to_string(f));
  return {{"families", std::move(fams)},
          {"family_size", family_size},
          {"center_stride", s.family.center_stride},
          {"radius_samples", s.family.radius_samples},
          {"random_count", s.family.random_count},
          {"seed", s.family.seed},
          {"ball_centers", sweep.centers.size()},
          {"ball_radii", sweep.radii.size()},
          {"closure", s.closure == Closure::open ? "open" : "closed"},
          {"zero_boundary", s.zero_boundary},
          {"connectivity_radius", graph.radius()}};
}

RunResult run_poincare(const Context& ctx) {
  const auto setup = poincare_setup(ctx);
  const auto sp = ctx.space();
  const auto graph = make_graph(sp, setup);
  const PoincareSpec spec(ctx.x(), ctx.y(), ctx.sigma());
  const auto family = generate_family(sp, graph, setup.family);
  auto sweep = BallSweep::sampled(sp, setup.ball_stride, setup.ball_radii);
  sweep.closure = setup.closure;
  RunResult out;
  CsvTable t({"center", "radius", "function", "lhs", "rhs", "ratio"});
  PoincareEstimate total;
  for (std::size_t c : sweep.centers)
    for (double r : sweep.radii) {
      const BallSweep one{{c}, {r}, sweep.closure};
      const auto est = estimate_poincare_constant(sp, graph, spec, family, one, setup.zero_boundary);
      total.evaluations += est.evaluations;
      total.infinite_ratios += est.infinite_ratios;
      if (!est.best_ball) continue;
      const auto it = std::find_if(family.begin(), family.end(),
                                   [&](const TestFunction& f) { return f.label == est.best_function; });
      const auto pr = poincare_ratio(sp, graph, it->values, *est.best_ball, spec);
      t.add({as_int(c), r, est.best_function, pr.lhs, pr.rhs, pr.value});
      if (est.constant > total.constant) {
        total.constant = est.constant;
        total.best_ball = est.best_ball;
        total.best_function = est.best_function;
      }
    }
  out.summary["X"] = spec.x.name();
  out.summary["Y"] = spec.y.name();
  out.summary["sigma"] = spec.sigma;
  out.summary["constant_lower_bound"] = total.constant;
  if (total.best_ball) out.summary["best_ball"] = ball_json(*total.best_ball);
  out.summary["best_function"] = total.best_function;
  out.summary["evaluations"] = total.evaluations;
  out.summary["infinite_ratios"] = total.infinite_ratios;
  out.summary["estimators"] = poincare_meta(setup, graph, family.size(), sweep);
  out.tables.emplace("poincare.csv", std::move(t));
  return out;
}

// ---------------------------------------------------------------- certify

RunResult run_certify(const Context& ctx) {
  const auto sec = ctx.section("certify");
  sec.allow_only({"c", "safety", "j", "j_max", "ball_stride", "ball_radii"});
  const auto sp = ctx.space();
  const auto x = ctx.x(), y = ctx.y();
  const double sigma = ctx.sigma();
  const auto gain = ctx.cfg.has("gain") ? load_gain(ctx.cfg.at("gain"), &x, &y) : psi_of_gain(x, y);
  const int j_count = static_cast<int>(positive_count(sec, "j", 20));
  const int j_max = static_cast<int>(positive_count(sec, "j_max", 30));
  if (j_count > j_max) sec.at("j").fail("j must not exceed j_max");
  RunResult out;
  json cinfo;
  double c = 0.0;
  if (sec.has("c")) {
    c = sec.at("c").number();
    if (!(c > 0.0) || !std::isfinite(c)) sec.at("c").fail("Poincare constant c must be positive");
    cinfo = {{"source", "config"}, {"c", c}};
  } else {
    const double safety = sec.number_or("safety", 2.0);
    if (!(safety >= 1.0)) sec.at("safety").fail("safety must be >= 1");
    const auto setup = poincare_setup(ctx);
    const auto graph = make_graph(sp, setup);
    const auto family = generate_family(sp, graph, setup.family);
    auto psweep = BallSweep::sampled(sp, setup.ball_stride, setup.ball_radii);
    psweep.closure = setup.closure;
    const auto est = estimate_poincare_constant(sp, graph, PoincareSpec(x, y, sigma), family, psweep,
                                                setup.zero_boundary);
    if (!(est.constant > 0.0)) throw std::runtime_error("certify: empirical Poincare constant is 0");
    c = safety * est.constant;
    cinfo = {{"source", "estimated"},
             {"c", c},
             {"safety", safety},
             {"empirical", est.constant},
             {"estimator", poincare_meta(setup, graph, family.size(), psweep)}};
  }
  CertificateConfig cfg = [&] {
    try {
      return CertificateConfig::make(gain, c, j_max);
    } catch (const std::invalid_argument& e) {
      ctx.cfg.fail(e.what());
    }
  }();
  const auto sweep = BallSweep::sampled(sp, positive_count(sec, "ball_stride", 1),
                                        positive_count(sec, "ball_radii", 0, true) *
                                            static_cast<std::size_t>(ctx.grid_scale));
  CsvTable t({"center", "r", "j", "r_j", "mu_Bj", "P_j", "key_slack"});
  std::size_t checks = 0, violations = 0;
  double min_slack = std::numeric_limits<double>::infinity();
  for (std::size_t center : sweep.centers)
    for (double r : sweep.radii) {
      const auto rec = key_inequality_check(sp, Ball{center, r, Closure::open}, cfg, x, y, j_count);
      for (const auto& k : rec) {
        t.add({as_int(center), r, std::int64_t{k.j}, k.r_j, k.mu_bj, k.p_j, k.slack});
        ++checks;
        if (!k.satisfied) ++violations;
        min_slack = std::min(min_slack, k.slack);
      }
    }
  const auto dv = doubling_verdict(sp, y, cfg, sweep);
  out.summary["X"] = x.name();
  out.summary["Y"] = y.name();
  out.summary["sigma"] = sigma;
  out.summary["gain"] = cfg.gain.name();
  out.summary["poincare_constant"] = std::move(cinfo);
  out.summary["c1"] = cfg.c1;
  out.summary["C"] = cfg.big_c;
  out.summary["log2_D"] = std::round(cfg.log_d / std::log(2.0));
  out.summary["key_inequality"] = {{"checks", checks},
                                   {"violations", violations},
                                   {"min_slack", min_slack},
                                   {"j", j_count}};
  json verdict{{"verdict", to_string(dv.verdict)},
               {"sup_P1", dv.sup_p1},
               {"log_threshold_e2D", dv.log_threshold},
               {"balls_above_threshold", dv.above_threshold},
               {"implied_doubling_bound", dv.implied_doubling_bound},
               {"direct_doubling_constant", dv.direct_doubling_constant}};
  if (dv.worst_ball) verdict["worst_ball"] = ball_json(*dv.worst_ball);
  if (dv.chain && dv.chain->blow_up_at) verdict["blow_up_at_j"] = *dv.chain->blow_up_at;
  out.summary["doubling"] = std::move(verdict);
  out.summary["estimators"] = {{"ball_centers", sweep.centers.size()},
                               {"ball_radii", sweep.radii.size()},
                               {"epa_t_grid", "[1, 50] step 0.05"},
                               {"D_scan", "D = 2^k, k <= 60, then k doubled up to 2^30 and bisected"},
                               {"series_tol", 1e-12},
                               {"j_max", j_max}};
  out.tables.emplace("certificate.csv", std::move(t));
  return out;
}

}  // namespace

RunResult execute(const std::string& command, const Cfg& config, std::uint64_t seed,
                  int grid_scale) {
  config.allow_only({"space", "X", "Y", "gain", "sigma", "seed", "function", "ball", "norm",
                     "rearrange", "indices", "ermakoff", "doubling", "poincare", "certify"});
  if (grid_scale < 1) throw ConfigError("--grid-scale must be >= 1");
  const Context ctx{config, seed, grid_scale};
  static const std::map<std::string, std::function<RunResult(const Context&)>> table{
      {"norm", run_norm},         {"rearrange", run_rearrange}, {"indices", run_indices},
      {"ermakoff", run_ermakoff}, {"doubling", run_doubling},   {"poincare", run_poincare},
      {"certify", run_certify}};
  const auto it = table.find(command);
  if (it == table.end()) throw ConfigError("unknown subcommand '" + command + "'");
  RunResult r = it->second(ctx);
  json head{{"command", command}, {"seed", seed}, {"grid_scale", grid_scale}};
  json outputs = json::array();
  for (const auto& [name, tab] : r.tables) outputs.push_back({{"file", name}, {"rows", tab.rows()}});
  head["outputs"] = std::move(outputs);
  head.update(r.summary);
  r.summary = std::move(head);
  return r;
}

int run(const RunOptions& opt, std::ostream& err) {
  try {
    const auto cfg = Cfg::load_file(opt.config);
    std::uint64_t seed = 1;
    if (opt.seed) {
      seed = *opt.seed;
    } else if (auto s = cfg.get("seed")) {
      const auto v = s->integer();
      if (v < 0) s->fail("seed must be nonnegative");
      seed = static_cast<std::uint64_t>(v);
    }
    auto result = execute(opt.command, cfg, seed, opt.grid_scale);
    std::filesystem::create_directories(opt.out);
    for (const auto& [name, tab] : result.tables) tab.write(opt.out / name);
    std::ofstream js(opt.out / "summary.json", std::ios::binary);
    if (!js) throw std::runtime_error("cannot write " + (opt.out / "summary.json").string());
    js << result.summary.dump(2) << '\n';
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << opt.config.string() << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace rinorm::app
