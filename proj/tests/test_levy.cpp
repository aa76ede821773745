#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <memory>
#include <numbers>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "dre/levy.hpp"
#include "dre/stats.hpp"

using namespace dre;

namespace {

LevyPath2D hand_path(std::vector<Jump> jumps) {
  LevyPath2D p;
  p.c2 = tail_constant(0.5);
  p.jumps = std::move(jumps);
  return p;
}

std::shared_ptr<const std::vector<double>> pool_of(std::size_t n, std::uint64_t seed) {
  // Any positive marks with a finite mean serve the structural checks.
  Rng rng(RngStream{seed, 0});
  auto v = std::make_shared<std::vector<double>>(n);
  for (double& x : *v) x = 0.5 + rng.exponential(1.0);
  return v;
}

}  // namespace

TEST_CASE("largest jump and first passage on a hand path") {
  const LevyPath2D p = hand_path({{1.0, 0.3, 1.0}, {2.0, 0.5, 0.5}, {3.0, 0.2, 4.0}});
  CHECK(largest_jump(p, Coordinate::y1, 0.5) == 0.0);
  CHECK(largest_jump(p, Coordinate::y1, 2.0) == 0.5);
  CHECK(largest_jump(p, Coordinate::y1, 2.0, true) == 0.3);
  CHECK(largest_jump(p, Coordinate::y2, 10.0) == doctest::Approx(0.8));
  CHECK(first_passage(p, Coordinate::y1, 0.7) == 2.0);
  CHECK(first_passage(p, Coordinate::y2, 0.3) == 2.0);
  CHECK(first_passage(p, Coordinate::y2, 0.55) == 3.0);
  CHECK_THROWS_AS(first_passage(p, Coordinate::y1, 5.0), HorizonNotReached);
  CHECK(p.value(Coordinate::y2, 2.0) == doctest::Approx(0.55));

  // f(f^{-1}(a)) > a and f(f^{-1}(a)-) <= a.
  for (double a : {0.1, 0.29, 0.31, 0.79, 0.9}) {
    const double s = first_passage(p, Coordinate::y1, a);
    CHECK(p.value(Coordinate::y1, s) > a);
    CHECK(p.value(Coordinate::y1, std::nextafter(s, 0.0)) <= a);
  }
}

TEST_CASE("passage report: passage on the first jump") {
  const PassageReport r = passage_report(hand_path({{0.7, 2.0, 1.0}}));
  CHECK(r.tau == 0.7);
  CHECK(r.undershoot == 0.0);
  CHECK(r.overshoot == 2.0);
  CHECK(r.i1 == 0.0);
  CHECK(r.i2 == 1.0);
  CHECK(r.i == 1.0);
  CHECK(std::isnan(r.fstar));
  CHECK(r.passage_index == 0);
  CHECK(check_passage_invariants(r).empty());
}

TEST_CASE("passage report: two jumps") {
  const PassageReport r = passage_report(hand_path({{1.0, 0.4, 1.5}, {3.0, 0.5, 2.0}}));
  CHECK(r.tau == 3.0);
  CHECK(r.undershoot == doctest::Approx(0.6));
  CHECK(r.overshoot == doctest::Approx(1.6));
  CHECK(r.i1 == 0.4);
  CHECK(r.i2 == doctest::Approx(0.2));
  CHECK(r.i == 0.4);
  CHECK(r.fstar == 1.0);
  CHECK(r.fstar_fraction == doctest::Approx(1.0 / 3.0));
  CHECK(r.y1_natural_tau == 0.5);
  CHECK(r.y1_before == doctest::Approx(0.4));
  CHECK(r.y1_at == doctest::Approx(0.9));
  CHECK(check_passage_invariants(r).empty());
  CHECK_THROWS_AS(passage_report(hand_path({{1.0, 0.4, 1.5}})), HorizonNotReached);
}

TEST_CASE("ties keep the earliest jump and are counted") {
  const PassageReport r = passage_report(hand_path({{1.0, 0.3, 0.1}, {2.0, 0.3, 0.1}, {4.0, 0.3, 0.1}, {5.0, 1.0, 2.0}}));
  CHECK(r.fstar == 1.0);
  CHECK(r.ties == 2);
  CHECK(r.fstar_fraction == doctest::Approx(0.2));
}

TEST_CASE("sampled paths satisfy the passage invariants") {
  MarkSource marks(pool_of(1000, 60), MarkSource::Mode::bootstrap);
  const LevyParams params{0.5, 0.0, 1e-3};
  const LimitLawTable t = limit_law_samples(100'000, params, marks, RngStream{61, 0});
  std::size_t below = 0;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& r = t.rows[i];
    REQUIRE(check_passage_invariants(r).empty());
    if (r.i1 < r.i2) {
      ++below;
      REQUIRE(t.favorite_mixture[i] == 1.0);
    } else {
      REQUIRE(t.favorite_mixture[i] == r.fstar_fraction);
    }
  }
  CHECK(t.p_i1_below_i2 == doctest::Approx(static_cast<double>(below) / 1e5));
  CHECK(t.total_jumps > t.rows.size());

  std::ostringstream os;
  write_reports_csv(t, os);
  CHECK(os.str().rfind("tau,undershoot,overshoot,i1,i2,i,fstar_fraction,favorite_mixture,", 0) == 0);
}

TEST_CASE("jump rate and size law") {
  const double kappa = 0.5, c2 = tail_constant(kappa), eps = 1e-3;
  MarkSource marks(pool_of(100, 62), MarkSource::Mode::bootstrap);
  Rng rng(RngStream{62, 1});
  const std::size_t n = 200'000;
  const auto j = sample_jumps(kappa, c2, eps, n, marks, rng);
  const double T = j.back().time;
  for (double x : {1e-2, 1e-1, 1.0}) {
    std::size_t count = 0;
    for (const auto& jj : j) count += jj.size > x;
    const double rate = static_cast<double>(count) / T;
    const double expect = c2 * std::pow(x, -kappa);
    CHECK(std::fabs(rate - expect) <= 3.0 * std::sqrt(static_cast<double>(count)) / T + 0.005 * expect);
  }
  CHECK(c2 == doctest::Approx(2.0));
}

TEST_CASE("missed mass closed form") {
  const double kappa = 0.4, c2 = 1.7, eps = 0.02;
  // Integral of x against the Levy density c2 kappa x^{-1-kappa} on (0, eps).
  boost::math::quadrature::tanh_sinh<double> ts;
  const double q = ts.integrate([&](double x) { return c2 * kappa * std::pow(x, -kappa); }, 0.0, eps);
  CHECK(missed_mass_rate(kappa, c2, eps) == doctest::Approx(q).epsilon(1e-8));
}

TEST_CASE("cutoff for budget") {
  const double e = cutoff_for_budget(0.5, 3.0, 1.6, 5e-3);
  CHECK(e > 0.0);
  CHECK(e <= 1e-4);
  CHECK(cutoff_for_budget(0.5, 3.0, 1.6, 5e-4) < e);
  CHECK(cutoff_for_budget(0.5, 3.0, 1.6, 0.5, 1e-4) == 1e-4);
  // Both error terms sit at or under the budget at the returned cutoff.
  const double kappa = 0.3, mr = 3.0, mk = 1.4, b = 5e-3;
  const double c = cutoff_for_budget(kappa, mr, mk, b, 1.0);
  const double drift = mr * kappa * std::pow(c, 1.0 - kappa) / ((1.0 - kappa) * std::tgamma(1.0 - kappa) * mk);
  const double under = std::sin(std::numbers::pi * kappa) / (std::numbers::pi * kappa) * std::pow(c * mr, kappa);
  CHECK(drift <= b * (1 + 1e-9));
  CHECK(under <= b * (1 + 1e-9));
  CHECK(std::max(drift, under) == doctest::Approx(b));
}

TEST_CASE("strict marks run out") {
  MarkSource strict(pool_of(5, 63), MarkSource::Mode::strict);
  Rng rng(RngStream{63, 1});
  CHECK_THROWS_AS(sample_jumps(0.5, 2.0, 1e-3, 6, strict, rng), PoolExhausted);
  MarkSource s2(pool_of(5, 63), MarkSource::Mode::strict);
  const auto j = sample_jumps(0.5, 2.0, 1e-3, 5, s2, rng);
  CHECK(j[4].mark == s2.pool()[4]);
  CHECK(s2.used() == 5);
  CHECK_THROWS_AS(MarkSource(std::make_shared<std::vector<double>>(), MarkSource::Mode::strict), PoolExhausted);
}

TEST_CASE("results do not depend on the worker count") {
  MarkSource marks(pool_of(500, 64), MarkSource::Mode::bootstrap);
  const LevyParams params{0.5, 0.0, 1e-3};
  setenv("DRE_WORKERS", "1", 1);
  const LimitLawTable a = limit_law_samples(2000, params, marks, RngStream{65, 0});
  setenv("DRE_WORKERS", "4", 1);
  const LimitLawTable b = limit_law_samples(2000, params, marks, RngStream{65, 0});
  unsetenv("DRE_WORKERS");
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    REQUIRE(a.rows[i].tau == b.rows[i].tau);
    REQUIRE(a.favorite_mixture[i] == b.favorite_mixture[i]);
  }
}

TEST_CASE("renewal count transform") {
  MarkSource marks(pool_of(500, 66), MarkSource::Mode::bootstrap);
  const LevyParams params{0.5, 0.0, 1e-3};
  const std::vector<double> u{0.0, 0.5, 1.0, 2.0};
  const TransformTable t = renewal_count_transform(params, marks, u, 2000, RngStream{67, 0});
  CHECK(t.rows[0].empirical == doctest::Approx(1.0));
  CHECK(t.rows[0].series == doctest::Approx(1.0));
  for (std::size_t k = 1; k < t.rows.size(); ++k) {
    CHECK(t.rows[k].empirical < t.rows[k - 1].empirical);
    CHECK(t.rows[k].series < t.rows[k - 1].series);
  }
  CHECK(t.c_kappa_hat == doctest::Approx(std::tgamma(0.5) * 2.0 * marks.mean_pow(0.5)));
}

TEST_CASE("passage law is stable under a smaller cutoff") {
  // Shrinking eps tenfold must leave the law of I within the two-sample band.
  MarkSource marks(pool_of(1000, 68), MarkSource::Mode::bootstrap);
  const LimitLawTable a = limit_law_samples(4000, LevyParams{0.5, 0.0, 1e-5}, marks, RngStream{69, 0});
  const LimitLawTable b = limit_law_samples(4000, LevyParams{0.5, 0.0, 1e-6}, marks, RngStream{69, 1});
  std::vector<double> ia, ib;
  for (const auto& r : a.rows) ia.push_back(r.i);
  for (const auto& r : b.rows) ib.push_back(r.i);
  CHECK(ks_two_sample(ia, ib) < 1.63 * std::sqrt(2.0 / 4000.0));
}
