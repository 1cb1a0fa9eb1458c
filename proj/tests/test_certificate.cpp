#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "rinorm/certificate.hpp"
#include "rinorm/registry.hpp"

using namespace rinorm;
using Catch::Approx;

namespace {

constexpr double kPi2Over6 = std::numbers::pi * std::numbers::pi / 6;

MetricMeasureSpace grid(double a, double b, std::size_t n, double (*w)(double)) {
  return MetricMeasureSpace::line_grid(a, b, n, w);
}

double one(double) { return 1.0; }
double expo(double x) { return std::exp(x); }

MetricMeasureSpace points_on_line(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> d(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d[i * n + j] = std::abs(x[i] - x[j]);
  return MetricMeasureSpace(std::move(d), std::vector<double>(n, 1.0));
}

}  // namespace

TEST_CASE("configuration") {
  const auto cfg = CertificateConfig::make(pow_gain(1), 1.0);
  CHECK(cfg.c1 == Approx(kPi2Over6).epsilon(1e-9));
  CHECK(cfg.big_c == Approx(8 * kPi2Over6).epsilon(1e-9));
  CHECK(cfg.h(3) == 9.0);
  CHECK(cfg.log_h(3) == Approx(std::log(9.0)).epsilon(1e-15));

  CHECK_THROWS(CertificateConfig::make(pow_gain(1), 0.0));
  CHECK_THROWS(CertificateConfig::make(pow_gain(1), -1.0));
  CHECK_THROWS(CertificateConfig::make(pow_gain(1), 1.0, 0));
  CHECK_THROWS(CertificateConfig::make(log_alpha_gain(1), 1.0));
  const auto given = CertificateConfig::make(pow_gain(1), 2.0, 10, 1.5, 64.0);
  CHECK(given.c1 == 1.5);
  CHECK(given.big_c == 24.0);
  CHECK(given.d() == Approx(64.0).epsilon(1e-15));
  CHECK_THROWS(CertificateConfig::make(pow_gain(1), 1.0, 10, 1.5, 0.5));
}

TEST_CASE("the constant D") {
  // every registry gain that passes Ermakoff's test yields a D
  for (const char* name : {"log_alpha(1.5)", "log_alpha(2)", "log_alpha(4)", "pow(0.25)", "pow(1)",
                           "pow(2)", "psi_of(Lp(4),Lp(2))", "psi_of(Orlicz(t_log_alpha(2)),Lp(1))",
                           "example:c(1,2)", "example:d(0.5)", "example:b(1,2)", "example:b(1,1.5)"}) {
    INFO(name);
    const auto g = parse_gain(name);
    REQUIRE(ermakoff_test(g).verdict == Verdict::pass);
    const double c1 = series_c1(g).value;
    for (double c : {0.5, 2.0, 20.0}) {
      const auto cfg = CertificateConfig::make(g, c, 30, c1);
      // D = 2^k satisfies g(D e^t) > e C t g(t) on the grid, D/2 does not
      auto holds = [&](double log_d) {
        for (int i = 0; i <= 980; ++i) {
          const double t = 1.0 + 0.05 * i;
          if (!(g.log_at_exp(log_d + t) > 1.0 + std::log(cfg.big_c) + std::log(t) + g.log_at(t)))
            return false;
        }
        return true;
      };
      const double k = cfg.log_d / std::log(2.0);
      CHECK(k == Approx(std::round(k)).margin(1e-9));
      CHECK(holds(cfg.log_d));
      if (cfg.log_d > 0.0) CHECK_FALSE(holds(cfg.log_d - std::log(2.0)));
    }
  }
}

TEST_CASE("radii sequence") {
  const auto cfg = CertificateConfig::make(pow_gain(1), 1.0, 30, kPi2Over6);
  const auto r = radii_sequence(1.0, cfg, 400);
  CHECK(r[0] == 1.0);
  CHECK(r[1] == Approx(1 - 3 / (std::numbers::pi * std::numbers::pi)).epsilon(1e-14));
  CHECK(r[1] == Approx(0.69604).margin(5e-6));
  double partial = 0.0;
  for (std::size_t j = 1; j <= r.size(); ++j) {
    CHECK(r[j - 1] > 0.5);
    // telescoping: r_1 - r_J = (r / 2c1) sum_{j<J} 1/h(j)
    CHECK(1.0 - r[j - 1] == Approx(partial / (2 * cfg.c1)).epsilon(1e-13).margin(1e-16));
    partial += 1.0 / (static_cast<double>(j) * j);
  }
  // r_J - r/2 = (r/2c1) sum_{j>=J} 1/j^2 <= (r/2c1) / (J-1)
  const double j = 400.0;
  CHECK(r.back() - 0.5 <= 1.0 / (2 * cfg.c1 * (j - 1)));
  CHECK(r.back() - 0.5 >= 1.0 / (2 * cfg.c1 * j));

  const auto r3 = radii_sequence(3.0, cfg, 10);
  for (std::size_t k = 0; k < 10; ++k) CHECK(r3[k] == Approx(3.0 * radii_sequence(1.0, cfg, 10)[k]).epsilon(1e-15));
  CHECK_THROWS(radii_sequence(0.0, cfg, 3));
}

TEST_CASE("cutoff functions") {
  const auto s = points_on_line({0.0, 0.6, 0.8, 1.0, 1.2});
  const std::vector<double> radii{1.0, 0.6};
  const auto f = cutoff_function(s, 0, 1, radii);
  CHECK(f[0] == 1.0);
  CHECK(f[1] == 1.0);
  CHECK(f[2] == Approx(0.5).epsilon(1e-14));
  CHECK(f[3] == 0.0);
  CHECK(f[4] == 0.0);
  CHECK_THROWS(cutoff_function(s, 0, 2, radii));
  CHECK_THROWS(cutoff_function(s, 0, 0, radii));

  const auto cfg = CertificateConfig::make(pow_gain(1), 1.0);
  CHECK(cutoff_gradient_bound(1.0, cfg, 1) == Approx(2 * kPi2Over6).epsilon(1e-9));
  CHECK(cutoff_gradient_bound(1.0, cfg, 1) == Approx(3.28987).margin(1e-5));

  std::mt19937_64 rng(41);
  for (int it = 0; it < 30; ++it) {
    const auto sp = oracle::random_space(rng, 30);
    const auto graph = GraphStructure::connecting(sp);
    const double r = 0.3 + 0.02 * it;
    const auto radii_r = radii_sequence(r, cfg, 12);
    const std::size_t c = static_cast<std::size_t>(it) % sp.size();
    for (int j = 1; j < 12; ++j) {
      const auto fj = cutoff_function(sp, c, j, radii_r);
      const double bound = cutoff_gradient_bound(r, cfg, j);
      CHECK(bound == Approx(1 / (radii_r[j - 1] - radii_r[j])).epsilon(1e-12));
      for (std::size_t x = 0; x < sp.size(); ++x) {
        CHECK(fj[x] >= 0.0);
        CHECK(fj[x] <= 1.0);
        if (sp.distance(c, x) <= radii_r[j]) CHECK(fj[x] == 1.0);
        if (sp.distance(c, x) > radii_r[j - 1]) CHECK(fj[x] == 0.0);
        for (std::size_t z = 0; z < sp.size(); ++z)
          CHECK(std::abs(fj[x] - fj[z]) <= sp.distance(x, z) * bound * (1 + 1e-12) + 1e-15);
      }
      const auto g = discrete_upper_gradient(graph, fj);
      for (std::size_t x = 0; x < sp.size(); ++x) {
        CHECK(g[x] <= bound * (1 + 1e-12));
        // the gradient vanishes away from the closed ball B_j and its neighbours
        if (sp.distance(c, x) > radii_r[j - 1] + graph.radius()) CHECK(g[x] == 0.0);
      }
    }
  }
}

TEST_CASE("P_j values") {
  CHECK(pj_from_ratio(0.25, 2.0, 1.0, RISpace::lp(1)) == Approx(2.0).epsilon(1e-15));
  CHECK(pj_from_ratio(0.25, 1.0, 1.0, RISpace::lp(2)) == Approx(2.0).epsilon(1e-15));

  const auto s = grid(0.0, 1.0, 51, one);
  const auto cfg = CertificateConfig::make(pow_gain(1), 1.0);
  const Ball b{25, 0.3, Closure::open};
  const double cap = 1.0 / (cfg.big_c * fundamental_function(RISpace::lp(1),
                                                             oracle::ball_mass(s, 25, 0.15, false) /
                                                                 oracle::ball_mass(s, 25, 0.6, false)));
  double prev = detail::kInf;
  for (int j = 1; j <= 60; ++j) {
    const double p = pj_value(s, b, j, cfg, RISpace::lp(1));
    CHECK(p <= prev);
    CHECK(p <= cap / cfg.h(j) * (1 + 1e-12));
    prev = p;
  }
  CHECK(prev < 1e-3);
  const double ratio = oracle::ball_mass(s, 25, 0.3, true) / oracle::ball_mass(s, 25, 0.6, false);
  CHECK(certificate_ratio(s, b, 0.3) == Approx(ratio).epsilon(1e-15));
}

TEST_CASE("key inequality") {
  const auto s = grid(0.0, 1.0, 41, one);
  const auto graph = GraphStructure::connecting(s);
  const auto x = RISpace::lp(2), y = RISpace::lp(1);

  FamilyOptions fo;
  fo.center_stride = 4;
  fo.random_count = 8;
  const auto family = generate_family(s, graph, fo);
  const auto est = estimate_poincare_constant(s, graph, PoincareSpec(x, y), family, BallSweep::sampled(s, 4, 10));
  REQUIRE(est.constant > 0.0);
  const auto cfg = CertificateConfig::make(pow_gain(1), 2.0 * est.constant, 20);
  std::size_t checks = 0;
  for (std::size_t c = 0; c < s.size(); ++c)
    for (double r : canonical_radii(s)) {
      const auto recs = key_inequality_check(s, Ball{c, r, Closure::open}, cfg, x, y, 20);
      REQUIRE(recs.size() == 20);
      for (const auto& k : recs) {
        ++checks;
        CHECK(k.satisfied);
        CHECK(k.rhs == Approx(1 / k.p_j).epsilon(1e-15));
      }
    }
  CHECK(checks > 0);

  // choose c so that the first inequality is an equality
  const Ball b{20, 0.25, Closure::open};
  const auto probe = CertificateConfig::make(pow_gain(1), 1.0, 5, kPi2Over6, 1.0);
  const auto radii = radii_sequence(b.radius, probe, 2);
  const double outer = oracle::ball_mass(s, 20, 0.5, false);
  const double lhs = fundamental_function(x, oracle::ball_mass(s, 20, radii[1], true) / outer);
  const double phi_y = fundamental_function(y, oracle::ball_mass(s, 20, radii[0], true) / outer);
  const double c_eq = lhs / (8 * kPi2Over6 * probe.h(1) * phi_y);
  const auto tight = CertificateConfig::make(pow_gain(1), c_eq, 5, kPi2Over6, 1.0);
  const auto rec = key_inequality_check(s, b, tight, x, y, 1).front();
  CHECK(rec.lhs == Approx(rec.rhs).epsilon(1e-12));
  CHECK(std::abs(rec.slack) <= 1e-12 * rec.rhs);
  // a tenth of that constant breaks it
  const auto loose = CertificateConfig::make(pow_gain(1), 0.1 * c_eq, 5, kPi2Over6, 1.0);
  CHECK_FALSE(key_inequality_check(s, b, loose, x, y, 1).front().satisfied);
}

TEST_CASE("induction chain") {
  const auto cfg = CertificateConfig::make(pow_gain(1), 1.0, 30);
  const double lp1 = 2.0 + cfg.log_d + std::log(1.01);
  const auto seq = minimal_admissible_sequence(lp1, cfg, 31);
  // independent recursion with g(t) = t: ln P_{j+1} = 2 ln P_j - ln C - 2 ln(j+1)
  long double l = lp1;
  for (int j = 1; j < 31; ++j) {
    l = 2 * l - std::log(static_cast<long double>(cfg.big_c)) - 2 * std::log(static_cast<long double>(j + 1));
    CHECK(seq[j] == Approx(static_cast<double>(l)).epsilon(1e-12));
  }
  const auto rep = induction_step_check(seq, cfg);
  CHECK(rep.status == InductionStatus::certified);
  REQUIRE(rep.steps.size() == 30);
  for (const auto& s : rep.steps) {
    CHECK(s.certified);
    CHECK(s.recursion_ok);
    CHECK(s.monotone_ok);
    CHECK(s.nodobla_ok);
    CHECK(s.epa_ok);
    CHECK(s.log_bound == Approx(lp1 + s.j).epsilon(1e-15));
    CHECK(s.log_p_next >= s.log_bound - 1e-9);
  }
  CHECK_FALSE(rep.blow_up_at);

  const auto low = induction_step_check(std::vector<double>{1.0 + cfg.log_d}, cfg);
  CHECK(low.status == InductionStatus::hypothesis_not_met);
  CHECK(low.steps.empty());

  // a sequence that stalls is flagged
  const std::vector<double> flat(10, lp1);
  CHECK(induction_step_check(flat, cfg).status == InductionStatus::chain_broken);

  // the certified growth meets the cap ln P_j <= base - ln h(j)
  const double base = lp1 + 12.0;
  const auto capped = induction_step_check(seq, cfg, base);
  int expect = 0;
  for (int j = 1; j <= 31 && !expect; ++j)
    if (lp1 + (j - 1) > base - 2 * std::log(static_cast<double>(j))) expect = j;
  REQUIRE(capped.blow_up_at);
  CHECK(*capped.blow_up_at == expect);
  CHECK_THROWS(induction_step_check(std::vector<double>{}, cfg));
}

TEST_CASE("chain lemma on random admissible inputs") {
  // porfin + claim give P_{j+1} >= P_j g(P_j) / (C h(j+1))
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> sd(1.1, 4.0), pd(0.0, 12.0), ud(0.01, 1.0), cd(0.1, 10.0);
  for (int it = 0; it < 500; ++it) {
    const double sigma = sd(rng);
    const auto x = RISpace::lp(2 * sigma), y = RISpace::lp(2);
    // c1 and D play no part in the lemma
    const auto cfg = CertificateConfig::make(psi_of_gain(x, y), cd(rng), 30, 1.0, 1.0);
    const int j = 1 + it % 20;
    const double pj = std::exp(pd(rng));
    const double m = fundamental_inverse(x, 1.0 / pj) * ud(rng);  // porfin holds
    REQUIRE(fundamental_function(x, m) <= 1.0 / pj * (1 + 1e-12));
    const double next = pj_from_ratio(m, cfg.big_c, cfg.h(j + 1), y);
    CHECK(std::log(next) >= std::log(pj) + cfg.gain.log_at(pj) - std::log(cfg.big_c) - cfg.log_h(j + 1) - 1e-9);
  }
}

TEST_CASE("doubling verdict") {
  const auto cfg = CertificateConfig::make(pow_gain(1), 1.0, 30);
  const MetricMeasureSpace single(std::vector<double>{0.0}, std::vector<double>{2.0});
  BallSweep one_ball;
  one_ball.centers = {0};
  one_ball.radii = {1.0};
  const auto v1 = doubling_verdict(single, RISpace::lp(1), cfg, one_ball);
  CHECK(v1.sup_p1 == Approx(1 / cfg.big_c).epsilon(1e-15));
  CHECK(v1.verdict == CertificateVerdict::doubling_consistent);
  CHECK(v1.direct_doubling_constant == 1.0);
  CHECK_THROWS(doubling_verdict(single, RISpace::lp(1), cfg, BallSweep{}));

  const auto s = grid(0.0, 1.0, 101, one);
  for (const auto& y : {RISpace::lp(1), RISpace::lp(2)}) {
    const auto coarse = doubling_verdict(s, y, cfg, BallSweep::sampled(s, 10, 10));
    const auto fine = doubling_verdict(s, y, cfg, BallSweep::sampled(s, 5, 20));
    CHECK(fine.sup_p1 >= coarse.sup_p1);
    CHECK(fine.verdict == CertificateVerdict::doubling_consistent);
    CHECK(fine.log_threshold == Approx(2.0 + cfg.log_d).epsilon(1e-15));
    // mu(B)/mu(2B) >= phi_Y^{-1}(1/(C sup P1)), so the implied bound dominates
    CHECK(fine.direct_doubling_constant <= fine.implied_doubling_bound * (1 + 1e-9));
  }
  const auto l2 = doubling_verdict(s, RISpace::lp(2), cfg, BallSweep::sampled(s, 1, 0));
  CHECK(std::isfinite(l2.sup_p1));
  CHECK(l2.direct_doubling_constant <= 3.0);

  // exponential weights: sup P1 grows with the domain
  double prev = 0.0;
  for (double len : {2.0, 4.0, 6.0, 8.0, 10.0}) {
    const auto sp = grid(0.0, len, static_cast<std::size_t>(len * 10) + 1, expo);
    const auto v = doubling_verdict(sp, RISpace::lp(1), cfg, BallSweep::sampled(sp, 1, 0));
    CHECK(v.sup_p1 > prev);
    prev = v.sup_p1;
  }

  // with a tiny C the threshold is crossed and the chain is replayed
  const auto weak = CertificateConfig::make(pow_gain(1), 1e-6, 30, kPi2Over6, 1.0);
  const auto sp = grid(0.0, 10.0, 101, expo);
  const auto v = doubling_verdict(sp, RISpace::lp(1), weak, BallSweep::sampled(sp, 1, 0));
  CHECK(v.above_threshold > 0);
  REQUIRE(v.chain);
  CHECK(v.verdict != CertificateVerdict::doubling_consistent);
}
