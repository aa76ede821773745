#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <utility>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "dre/rng.hpp"
#include "dre/stats.hpp"

using namespace dre;

namespace {

std::vector<double> uniforms(std::size_t n, const RngStream& s) {
  Rng rng(s);
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform();
  return v;
}

double uniform_cdf(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

}  // namespace

TEST_CASE("rng streams are reproducible and distinct") {
  Rng a(RngStream{42, 7}), b(RngStream{42, 7}), c(RngStream{42, 8});
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.bits();
    CHECK(x == b.bits());
    differs = differs || x != c.bits();
  }
  CHECK(differs);
  const RngStream s{5, 1};
  CHECK(s.child(3) == s.child(3));
  CHECK_FALSE(s.child(3) == s.child(4));
  CHECK_FALSE(s.child(0) == s);

  Rng u(RngStream{1, 1});
  for (int i = 0; i < 100000; ++i) {
    const double x = u.uniform();
    REQUIRE(x > 0.0);
    REQUIRE(x < 1.0);
  }
}

TEST_CASE("rng variates follow their laws") {
  Rng rng(RngStream{9, 0});
  std::vector<double> z(20000), e(20000);
  for (auto& x : z) x = rng.normal();
  for (auto& x : e) x = rng.exponential(2.0);
  const boost::math::normal nd;
  CHECK(ks_one_sample(z, [&](double x) { return boost::math::cdf(nd, x); }).p_value > 0.01);
  CHECK(ks_one_sample(e, [](double x) { return x <= 0 ? 0.0 : 1.0 - std::exp(-x / 2.0); }).p_value > 0.01);
}

TEST_CASE("ecdf and quantile") {
  const Ecdf f({3.0, 1.0, 2.0, 2.0});
  CHECK(f(0.5) == 0.0);
  CHECK(f(2.0) == 0.75);
  CHECK(f(10.0) == 1.0);
  CHECK(quantile({1.0, 2.0, 3.0, 4.0}, 0.5) == doctest::Approx(2.5));
  CHECK(quantile({5.0}, 0.3) == 5.0);
  CHECK_THROWS_AS(quantile({}, 0.5), SampleSizeError);
}

TEST_CASE("ks_one_sample") {
  CHECK(kolmogorov_survival(1.63) == doctest::Approx(0.0098).epsilon(0.02));

  // Samples from the null: D < 1.63/sqrt(n) in about 99% of meta-replicas.
  const int meta = 400;
  const std::size_t n = 10'000;
  int exceed = 0;
  for (int m = 0; m < meta; ++m) {
    const auto v = uniforms(n, RngStream{100, static_cast<std::uint64_t>(m)});
    if (ks_one_sample(v, uniform_cdf).statistic >= 1.63 / std::sqrt(static_cast<double>(n))) ++exceed;
  }
  // 1% nominal plus three binomial standard errors.
  CHECK(static_cast<double>(exceed) / meta <= 0.01 + 3.0 * std::sqrt(0.01 * 0.99 / meta));

  const std::vector<double> constant(100, 0.5);
  CHECK(ks_one_sample(constant, uniform_cdf).statistic >= 0.5);
  CHECK_THROWS_AS(ks_one_sample(std::vector<double>{0.3}, uniform_cdf), SampleSizeError);

  // Against the sample's own ECDF the gap is at most one step.
  const auto v = uniforms(1000, RngStream{7, 7});
  const Ecdf own(v);
  CHECK(ks_one_sample(v, [&](double x) { return own(x); }).statistic <= 1.0 / 1000 + 1e-12);
}

TEST_CASE("ks_two_sample") {
  const auto a = uniforms(2000, RngStream{8, 0});
  CHECK(ks_two_sample(a, a) == 0.0);
  const std::vector<double> lo(50, 1.0), hi(70, 2.0);
  CHECK(ks_two_sample(lo, hi) == 1.0);
  CHECK_THROWS_AS(ks_two_sample(std::vector<double>{}, lo), SampleSizeError);

  // Random splits of one pool stay within the two-sample null band.
  int exceed = 0;
  for (int m = 0; m < 200; ++m) {
    const auto pool = uniforms(2000, RngStream{9, static_cast<std::uint64_t>(m)});
    const std::vector<double> x(pool.begin(), pool.begin() + 1000), y(pool.begin() + 1000, pool.end());
    if (ks_two_sample(x, y) * std::sqrt(500.0) >= 1.63) ++exceed;
  }
  CHECK(exceed <= 6);
}

TEST_CASE("grid_independence") {
  const auto u = uniforms(2000, RngStream{11, 0});
  std::vector<std::pair<double, double>> dep;
  for (double x : u) dep.emplace_back(x, x);
  const auto r = grid_independence(dep, 4);
  CHECK(r.dof == 9);
  CHECK(r.statistic > 1000.0);
  CHECK(r.p_value < 1e-10);

  int rejected = 0;
  const int meta = 200;
  for (int m = 0; m < meta; ++m) {
    Rng rng(RngStream{12, static_cast<std::uint64_t>(m)});
    std::vector<std::pair<double, double>> ind(1000);
    for (auto& p : ind) p = {rng.uniform(), rng.uniform()};
    if (grid_independence(ind, 4).p_value < 0.01) ++rejected;
  }
  CHECK(static_cast<double>(meta - rejected) / meta >= 0.98 - 3.0 * std::sqrt(0.01 * 0.99 / meta));

  std::vector<std::pair<double, double>> few(100, {0.1, 0.2});
  CHECK_THROWS_AS(grid_independence(few, 4), SampleSizeError);
}

TEST_CASE("mean_ci") {
  const std::vector<double> c(10, 3.0);
  const auto ci = mean_ci(c);
  CHECK(ci.mean == 3.0);
  CHECK(ci.half_width == 0.0);
  CHECK_THROWS_AS(mean_ci(std::vector<double>{1.0}), SampleSizeError);

  int inside = 0;
  for (int m = 0; m < 200; ++m) {
    Rng rng(RngStream{13, static_cast<std::uint64_t>(m)});
    std::vector<double> z(10'000);
    for (double& x : z) x = rng.normal();
    if (std::fabs(mean_ci(z).mean) <= 0.05) ++inside;
  }
  CHECK(inside >= 190);
}
