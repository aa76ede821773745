#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "dre/renewal.hpp"
#include "dre/stats.hpp"

using namespace dre;

namespace {

BesselSimConfig coarse(double dt_b = 1e-3) {
  BesselSimConfig c;
  c.dt_b = dt_b;
  return c;
}

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST_CASE("small level gives a small functional") {
  Rng rng(RngStream{50, 0});
  for (int i = 0; i < 50; ++i) {
    CHECK(sample_wup_hitting_functionals(0.5, 1e-3, Sign::minus, coarse(1e-6), rng) < 1e-3);
  }
}

TEST_CASE("F- is monotone in the level on a common path") {
  for (std::uint64_t i = 0; i < 30; ++i) {
    double prev = 0.0;
    for (double h : {0.5, 1.0, 2.0, 4.0, 8.0}) {
      Rng rng(RngStream{51, i});
      const double v = sample_wup_hitting_functionals(0.5, h, Sign::minus, coarse(), rng);
      REQUIRE(v >= prev);
      prev = v;
    }
  }
}

TEST_CASE("drifted 3-d Brownian norm has the Gaussian second moment") {
  const double kappa = 0.6, s = 2.0, v = kappa / 2.0;
  Rng rng(RngStream{52, 0});
  std::vector<double> sq;
  for (int i = 0; i < 5000; ++i) {
    const double w = sample_wup_at(kappa, s, coarse(1e-2), rng);
    sq.push_back(w * w);
  }
  const MeanCi ci = mean_ci(sq);
  CHECK(std::fabs(ci.mean - (3.0 * s + v * v * s * s)) <= 3.0 * ci.std_error);
}

TEST_CASE("R_kappa samples") {
  const auto a = sample_r_kappa_batch(0.5, 1000, coarse(), RngStream{53, 0});
  const auto b = sample_r_kappa_batch(0.5, 2000, coarse(), RngStream{53, 1});
  CHECK(std::all_of(a.begin(), a.end(), [](double x) { return x > 0.0; }));
  std::vector<double> ka, kb;
  for (double x : a) ka.push_back(std::sqrt(x));
  for (double x : b) kb.push_back(std::sqrt(x));
  const MeanCi ca = mean_ci(ka), cb = mean_ci(kb);
  CHECK(std::fabs(ca.mean - cb.mean) <= 3.0 * std::hypot(ca.std_error, cb.std_error));
  // Sample i comes from child(i): prefixes agree.
  CHECK(std::equal(a.begin(), a.begin() + 10, sample_r_kappa_batch(0.5, 10, coarse(), RngStream{53, 0}).begin()));
  CHECK(r_kappa_truncation_bound(0.5, 30.0) == doctest::Approx(4.0 / 0.5 * std::exp(-15.0) / 0.5));
}

TEST_CASE("G+ functional") {
  Rng rng(RngStream{54, 0});
  CHECK(sample_g_plus(0.5, 10.0 - 1e-9, 10.0, coarse(1e-8), rng) < 1e-3 * std::exp(10.0));
  CHECK_THROWS_AS(sample_g_plus(0.5, 2.0, 1.0, coarse(), rng), std::invalid_argument);

  const double h = 10.0;
  std::vector<double> g1, g2;
  for (int i = 0; i < 400; ++i) g1.push_back(sample_g_plus(0.5, h / 2, h, coarse(), rng) / std::exp(h));
  for (int i = 0; i < 800; ++i) g2.push_back(sample_g_plus(0.5, h / 2, h, coarse(), rng) / std::exp(h));
  const MeanCi c1 = mean_ci(g1), c2 = mean_ci(g2);
  CHECK(std::isfinite(c1.mean));
  CHECK(std::fabs(c1.mean - c2.mean) <= 3.0 * std::hypot(c1.std_error, c2.std_error));
  // P(G+ <= b e^h) grows with b.
  double prev = 0.0;
  for (double bb : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    const double p = static_cast<double>(std::count_if(g2.begin(), g2.end(), [&](double x) { return x <= bb; })) /
                     static_cast<double>(g2.size());
    CHECK(p >= prev);
    prev = p;
  }
  CHECK(prev > 0.0);
}

TEST_CASE("renewal draws") {
  const std::size_t n = 100'000;
  const auto d = sample_renewal_batch(0.5, 2.0, n, coarse(1e-2), RngStream{55, 0});
  std::vector<double> e, S, R;
  for (const auto& x : d) {
    REQUIRE(x.ell == x.e * x.S);
    REQUIRE(x.H == x.ell * x.R);
    REQUIRE(x.H / x.ell == doctest::Approx(x.R).epsilon(1e-15));
    REQUIRE(x.S > 0.0);
    REQUIRE(x.R > 0.0);
    e.push_back(x.e);
    S.push_back(x.S);
    R.push_back(x.R);
  }
  const MeanCi ce = mean_ci(e);
  CHECK(std::fabs(ce.mean - 2.0) <= 3.0 * ce.std_error);
  const double se0 = 1.0 / std::sqrt(static_cast<double>(n));
  CHECK(std::fabs(correlation(S, R)) <= 3.0 * se0);
  CHECK(std::fabs(correlation(S, e)) <= 3.0 * se0);
  CHECK(std::fabs(correlation(R, e)) <= 3.0 * se0);

  // R (levels h/2) is stochastically below R_kappa.
  const auto rk = sample_r_kappa_batch(0.5, 4000, coarse(1e-2), RngStream{55, 1});
  const Ecdf fr(std::vector<double>(R.begin(), R.begin() + 4000));
  const Ecdf fk(rk);
  for (double q = 0.1; q < 10.0; q *= 1.3) CHECK(fr(q) >= fk(q) - 0.04);

  std::stringstream io;
  write_draws_csv(std::span<const RenewalDraw>(d.data(), 50), io);
  const auto back = read_draws_csv(io);
  REQUIRE(back.size() == 50);
  for (std::size_t i = 0; i < 50; ++i) {
    CHECK(back[i].S == d[i].S);
    CHECK(back[i].H == d[i].H);
  }
}

TEST_CASE("dt_b refinement of E[F-(10)]") {
  // Pre-registered tolerance: 3 combined standard errors plus 2% of the mean.
  std::vector<double> a, b;
  Rng ra(RngStream{56, 0}), rb(RngStream{56, 1});
  for (int i = 0; i < 3000; ++i) {
    a.push_back(sample_wup_hitting_functionals(0.5, 10.0, Sign::minus, coarse(1e-2), ra));
    b.push_back(sample_wup_hitting_functionals(0.5, 10.0, Sign::minus, coarse(2.5e-3), rb));
  }
  const MeanCi ca = mean_ci(a), cb = mean_ci(b);
  CHECK(std::fabs(ca.mean - cb.mean) <= 3.0 * std::hypot(ca.std_error, cb.std_error) + 0.02 * cb.mean);
}

TEST_CASE("resample signal after repeated budget overruns") {
  BesselSimConfig c = coarse();
  c.max_steps = 1;
  CHECK_THROWS_AS(sample_renewal_draw(0.5, 5.0, c, RngStream{57, 0}), ResampleSignal);
  Rng rng(RngStream{57, 1});
  CHECK_THROWS_AS(sample_wup_hitting_functionals(0.5, 5.0, Sign::plus, c, rng), ResampleSignal);
}

TEST_CASE("tail constant check") {
  const auto d = sample_renewal_batch(0.5, 2.0, 2000, coarse(1e-2), RngStream{58, 0});
  const std::vector<double> rk{1.0, 4.0};
  const std::vector<double> xs{0.1, 1e300};
  const TailCheck tc = tail_constant_check(d, 0.5, 10.0, 1.0, xs, rk);
  CHECK(tc.ell_target == doctest::Approx(2.0));
  CHECK(tc.H_target == doctest::Approx(2.0 * 1.5));
  CHECK(tc.rows[1].ell_scaled == 0.0);
  CHECK(tc.rows[1].ell_count == 0);

  // Duplicating every draw doubles n at a fixed tail fraction: the binomial
  // standard error shrinks by sqrt(2).
  std::vector<RenewalDraw> dd(d);
  dd.insert(dd.end(), d.begin(), d.end());
  const TailCheck t2 = tail_constant_check(dd, 0.5, 10.0, 1.0, xs, rk);
  CHECK(t2.rows[0].ell_scaled == doctest::Approx(tc.rows[0].ell_scaled));
  CHECK(t2.rows[0].ell_se == doctest::Approx(tc.rows[0].ell_se / std::sqrt(2.0)));
  CHECK_THROWS_AS(tail_constant_check(std::vector<RenewalDraw>{}, 0.5, 10.0, 1.0, xs, rk), std::invalid_argument);
}
