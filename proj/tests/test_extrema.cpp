#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "dre/environment.hpp"
#include "dre/extrema.hpp"

using namespace dre;

namespace {

PotentialPath sawtooth(double h, double dx, int teeth) {
  std::vector<double> v;
  const int n = static_cast<int>(std::lround(2.0 * teeth / dx));
  for (int i = 0; i <= n; ++i) {
    const double x = i * dx;
    v.push_back(2.0 * h * std::fabs(std::fmod(x + 1.0, 2.0) - 1.0));
  }
  return make_path(0.5, dx, 0, v);
}

PotentialPath random_short(const RngStream& s, std::size_t len, bool coarse) {
  Rng rng(s);
  std::vector<double> v(len, 0.0);
  for (std::size_t k = 1; k < len; ++k) v[k] = v[k - 1] - 0.025 + std::sqrt(0.1) * rng.normal();
  if (coarse) {
    for (double& x : v) x = 0.5 * std::round(2.0 * x);
  }
  const std::size_t origin = len / 3;
  const double base = v[origin];
  for (double& x : v) x -= base;
  return make_path(0.5, 0.1, origin, v);
}

void check_alternating(const std::vector<HExtremum>& e) {
  for (std::size_t k = 1; k < e.size(); ++k) {
    REQUIRE(e[k].position > e[k - 1].position);
    REQUIRE(e[k].kind != e[k - 1].kind);
  }
}

}  // namespace

TEST_CASE("sawtooth extrema") {
  const double h = 1.0;
  const PotentialPath p = sawtooth(h, 0.25, 10);
  const auto e = find_h_extrema(p, h);
  check_alternating(e);
  CHECK(e.size() >= 17);
  for (const auto& x : e) {
    const long xi = std::lround(x.position);
    CHECK(std::fabs(x.position - static_cast<double>(xi)) < 1e-12);
    if (x.kind == ExtremumKind::minimum) {
      CHECK(xi % 2 == 0);
      CHECK(x.value == 0.0);
    } else {
      CHECK(xi % 2 == 1);
      CHECK(x.value == doctest::Approx(2.0 * h));
    }
  }
  CHECK(find_h_extrema(p, 3.0 * 2.0 * h).empty());
}

TEST_CASE("fast scan matches brute force") {
  for (std::uint64_t i = 0; i < 300; ++i) {
    Rng pick(RngStream{21, i});
    const std::size_t len = 20 + pick.index(1980);
    const PotentialPath p = random_short(RngStream{22, i}, len, i % 3 == 0);
    const double h = 0.2 + 2.5 * pick.uniform();
    const Window w{-p.left_extent(), p.right_extent()};
    const auto fast = find_h_extrema(p, h, w);
    const auto slow = find_h_extrema_brute_force(p, h, w);
    check_alternating(fast);
    REQUIRE(fast.size() == slow.size());
    for (std::size_t k = 0; k < fast.size(); ++k) {
      REQUIRE(fast[k].index == slow[k].index);
      REQUIRE(fast[k].kind == slow[k].kind);
      // Leftmost point of a flat extremum.
      if (fast[k].index > 0) REQUIRE(p.values[fast[k].index - 1] != p.values[fast[k].index]);
    }
  }
}

TEST_CASE("window restricts the scan") {
  const PotentialPath p = sawtooth(1.0, 0.25, 10);
  for (const auto& x : find_h_extrema(p, 1.0, Window{4.5, 12.5})) {
    CHECK(x.position >= 4.5);
    CHECK(x.position <= 12.5);
  }
}

TEST_CASE("single deep well gives one valley") {
  const double kappa = 0.5, h_t = 1.0, delta = default_delta(kappa);
  const double hp = ValleyParams{h_t, delta}.h_plus(kappa);
  const double dx = 0.1;
  std::vector<double> v;
  const auto seg = [&](double from, double to, double len) {
    const int n = static_cast<int>(std::lround(len / dx));
    for (int i = 1; i <= n; ++i) v.push_back(from + (to - from) * i / n);
  };
  v.push_back(0.0);
  seg(0.0, -2.0 * hp, 5.0);
  seg(-2.0 * hp, -2.0 * hp + 2.0 * h_t, 2.0);
  seg(-2.0 * hp + 2.0 * h_t, -3.0 * hp - 2.0 * h_t, 6.0);
  const PotentialPath p = make_path(kappa, dx, 0, v);
  const auto valleys = build_valleys_all(p, h_t, delta);
  REQUIRE(valleys.size() == 1);
  const ValleyRecord& r = valleys[0];
  CHECK(r.bottom == doctest::Approx(5.0));
  CHECK(r.bottom_value == doctest::Approx(-2.0 * hp));
  CHECK(r.tau == doctest::Approx(5.0 + 1.0));
  CHECK(r.l_sharp == doctest::Approx(2.5));
  CHECK(r.l_minus == doctest::Approx(2.5));
  CHECK(r.top == doctest::Approx(7.0));
  CHECK(check_valley_invariants(p, valleys, h_t, delta).empty());
  CHECK_THROWS_AS(build_valleys(p, h_t, delta, 2), InsufficientExtent);
}

TEST_CASE("valley bottoms are h_t-minima and invariants hold") {
  const double h_t = 3.0;
  for (std::uint64_t i = 0; i < 200; ++i) {
    const double kappa = i % 2 ? 0.3 : 0.6;
    const double delta = default_delta(kappa);
    ExtentPolicy policy;
    policy.min_right_extent = 300.0;
    const PotentialPath p = sample_potential(kappa, 0.02, policy, RngStream{30, i});
    std::vector<ValleyRecord> v;
    try {
      v = build_valleys(p, h_t, delta, 3);
    } catch (const InsufficientExtent& e) {
      CHECK(!e.coordinate().empty());
      continue;
    }
    REQUIRE(check_valley_invariants(p, v, h_t, delta).empty());
    const auto ext = find_h_extrema(p, h_t);
    for (const auto& r : v) {
      const bool found = std::any_of(ext.begin(), ext.end(), [&](const HExtremum& e) {
        return e.kind == ExtremumKind::minimum && std::fabs(e.position - r.bottom) < 1e-9;
      });
      CHECK(found);
    }
  }
}

TEST_CASE("shifted valley potentials") {
  ExtentPolicy policy;
  policy.min_right_extent = 400.0;
  const PotentialPath p = sample_potential(0.5, 0.01, policy, RngStream{31, 0});
  const double h_t = 3.0;
  const auto v = build_valleys_all(p, h_t, default_delta(0.5));
  REQUIRE(!v.empty());
  const auto segs = valley_shifted_potentials(p, v);
  REQUIRE(segs.size() == v.size());
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const auto& s = segs[i];
    CHECK(s.value_at(v[i].bottom) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(s.value_at(v[i].tau) == doctest::Approx(h_t).epsilon(1e-9));
    CHECK(*std::min_element(s.v.begin(), s.v.end()) >= 0.0);
  }

  std::stringstream os;
  write_valleys_csv(v, os);
  std::string line;
  std::size_t lines = 0;
  while (std::getline(os, line)) ++lines;
  CHECK(lines == v.size() + 1);
  CHECK(grid_tolerance(0.01) == doctest::Approx(3.0 * std::sqrt(0.01 * std::log(100.0))));
}
