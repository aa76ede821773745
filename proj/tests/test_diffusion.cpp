#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "dre/diffusion.hpp"
#include "dre/stats.hpp"

using namespace dre;

namespace {

PotentialPath flat(double half_width, double dx) {
  const auto n = static_cast<std::size_t>(std::llround(half_width / dx));
  return make_path(0.5, dx, n, std::vector<double>(2 * n + 1, 0.0));
}

PotentialPath vee(double slope, double half_width, double dx) {
  const auto n = static_cast<std::size_t>(std::llround(half_width / dx));
  std::vector<double> v(2 * n + 1);
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = slope * std::fabs((static_cast<double>(i) - static_cast<double>(n)) * dx);
  }
  return make_path(0.5, dx, n, v);
}

ValleyRecord valley_at(double bottom) {
  ValleyRecord r;
  r.bottom = bottom;
  return r;
}

}  // namespace

TEST_CASE("config validation") {
  DiffusionConfig c;
  CHECK_NOTHROW(c.validate());
  c.dt = 1.0;
  CHECK_THROWS(c.validate());
  c = DiffusionConfig{};
  c.t_max = 2.0;  // log 2 - sqrt(log 2) < 0
  CHECK_THROWS(c.validate());
  c = DiffusionConfig{};
  CHECK(c.h_t() == doctest::Approx(std::log(1e4) - std::sqrt(std::log(1e4))));
}

TEST_CASE("flat potential gives Brownian motion") {
  DiffusionConfig cfg;
  cfg.t_max = 4.0;
  cfg.dt = 1e-3;
  cfg.bin_width = 0.05;
  const PotentialPath p = flat(40.0, 0.05);
  std::vector<double> sq;
  for (std::uint64_t i = 0; i < 2000; ++i) {
    const auto [traj, field] = simulate(p, cfg, RngStream{40, i});
    sq.push_back(traj.x_end * traj.x_end);
    REQUIRE(field.total_time() == doctest::Approx(cfg.t_max).epsilon(1e-12));
    REQUIRE(sup_local_time(field).value * field.bin_width <= field.elapsed * (1 + 1e-12));
  }
  const MeanCi ci = mean_ci(sq);
  CHECK(std::fabs(ci.mean - cfg.t_max) <= 3.0 * ci.std_error);
}

TEST_CASE("V-shaped potential occupation follows the Gibbs density") {
  const double s = 1.0;
  const PotentialPath p = vee(s, 40.0, 0.1);
  DiffusionConfig cfg;
  cfg.t_max = 2000.0;
  cfg.dt = 2e-3;
  cfg.bin_width = 0.1;
  std::vector<double> occ;
  LocalTimeField acc;
  for (std::uint64_t i = 0; i < 4; ++i) {
    const auto [traj, field] = simulate(p, cfg, RngStream{41, i});
    if (occ.empty()) {
      occ.assign(field.size(), 0.0);
      acc = field;
    }
    for (std::size_t b = 0; b < field.size(); ++b) occ[b] += field.density(b) / (4.0 * cfg.t_max);
  }
  // Stationary density (s/2) e^{-s|x|}; total variation over |x| < 4.
  double tv = 0.0;
  for (std::size_t b = 0; b < occ.size(); ++b) {
    const double x = acc.center(b);
    if (std::fabs(x) < 4.0) tv += std::fabs(occ[b] - 0.5 * s * std::exp(-s * std::fabs(x))) * cfg.bin_width;
  }
  CHECK(tv < 0.06);
}

TEST_CASE("hitting times") {
  const std::vector<double> t{0.0, 1.0, 2.0, 3.0};
  const std::vector<double> x{0.0, 0.5, 1.5, 2.0};
  const Trajectory tr = trajectory_from_samples(t, x);
  CHECK(*hitting_time(tr, 0.0) == 0.0);
  CHECK(*hitting_time(tr, 1.0) == doctest::Approx(1.5));
  CHECK_FALSE(hitting_time(tr, 2.5).has_value());
  CHECK_FALSE(hitting_time(tr, -0.1).has_value());

  DiffusionConfig cfg;
  cfg.t_max = 50.0;
  cfg.dt = 1e-3;
  cfg.bin_width = 0.05;
  const auto [traj, field] = simulate(flat(60.0, 0.05), cfg, RngStream{42, 0});
  double prev = 0.0;
  for (double r = 0.01; r < traj.running_max; r += 0.01) {
    const auto h = hitting_time(traj, r);
    REQUIRE(h.has_value());
    REQUIRE(*h >= prev);
    prev = *h;
  }
}

TEST_CASE("visited minima and localization gap") {
  const std::vector<ValleyRecord> v{valley_at(1.0), valley_at(3.0), valley_at(5.0)};
  const std::vector<double> t{0.0, 1.0, 2.0};
  CHECK(visited_minima_count(trajectory_from_samples(t, std::vector<double>{0.0, 0.5, 0.2}), v) == 0);
  const Trajectory tr = trajectory_from_samples(t, std::vector<double>{0.0, 4.0, 5.0 - 2.0});
  CHECK(visited_minima_count(tr, v) == 2);
  CHECK(localization_gap(tr, v) == doctest::Approx(0.0));
  const Trajectory tr2 = trajectory_from_samples(t, std::vector<double>{0.0, 5.0, 2.0});
  CHECK(visited_minima_count(tr2, v) == 3);
  CHECK(localization_gap(tr2, v) == doctest::Approx(3.0));
  CHECK_THROWS_AS(localization_gap(trajectory_from_samples(t, std::vector<double>{0.0, 0.5, 0.2}), v), UndefinedGap);
}

TEST_CASE("sup local time") {
  LocalTimeField f;
  f.bin_width = 0.5;
  f.step = 0.1;
  f.first_bin = -3;
  f.counts = {0, 0, 0, 7, 0, 0};
  auto s = sup_local_time(f);
  CHECK(s.position == 0.0);
  CHECK(s.value == doctest::Approx(7 * 0.1 / 0.5));
  f.counts = {0, 5, 2, 5, 1, 0};
  s = sup_local_time(f);
  CHECK(s.position == -1.0);

  Rng rng(RngStream{43, 0});
  for (auto& c : f.counts) c = rng.index(4);
  s = sup_local_time(f);
  std::size_t best = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f.counts[i] > f.counts[best]) best = i;
  }
  CHECK(s.position == f.center(best));
}

TEST_CASE("excursion beyond the path") {
  DiffusionConfig cfg;
  cfg.t_max = 100.0;
  cfg.dt = 1e-3;
  cfg.bin_width = 0.05;
  try {
    simulate(flat(1.0, 0.05), cfg, RngStream{44, 0});
    FAIL("expected an excursion");
  } catch (const DiffusionExcursion& e) {
    CHECK(std::fabs(e.position()) > 1.0);
    CHECK(e.right_side() == (e.position() > 0.0));
  }
  DiffusionConfig bad = cfg;
  bad.bin_width = 0.07;
  CHECK_THROWS_AS(simulate(flat(1.0, 0.05), bad, RngStream{44, 0}), std::invalid_argument);
}

TEST_CASE("watch levels record the sup local time at first hit") {
  DiffusionConfig cfg;
  cfg.t_max = 20.0;
  cfg.dt = 1e-3;
  cfg.bin_width = 0.05;
  SimulateOptions o;
  o.watch_levels = {0.5, 1.0, 1e6};
  const auto [traj, field] = simulate(flat(60.0, 0.05), cfg, RngStream{45, 1}, o);
  REQUIRE(traj.running_max > 1.0);
  CHECK(traj.sup_density_at_watch[0] <= traj.sup_density_at_watch[1]);
  CHECK(traj.sup_density_at_watch[1] <= sup_local_time(field).value);
  CHECK(std::isnan(traj.sup_density_at_watch[2]));
}

TEST_CASE("dt refinement of L*/t") {
  // Same environments, dt and dt/4; pre-registered tolerance 0.2 for 150
  // replicas (the two-sample 1% point is 0.188).
  ReplicaSetup a;
  a.kappa = 0.5;
  a.grid_step = 0.5;
  a.cfg.t_max = 1000.0;
  a.cfg.dt = 0.02;
  a.cfg.bin_width = 0.5;
  a.delta = default_delta(0.5);
  ReplicaSetup b = a;
  b.cfg.dt = 0.005;
  std::vector<double> la, lb;
  for (std::uint64_t i = 0; i < 150; ++i) {
    la.push_back(run_replica(a, RngStream{46, i}).summary.lstar_over_t);
    lb.push_back(run_replica(b, RngStream{46, i}).summary.lstar_over_t);
  }
  CHECK(ks_two_sample(la, lb) < 0.2);
}

TEST_CASE("replicas are deterministic and csv has fixed columns") {
  ReplicaSetup s;
  s.kappa = 0.5;
  s.grid_step = 0.5;
  s.cfg.t_max = 3000.0;
  s.cfg.dt = 0.02;
  s.cfg.bin_width = 0.5;
  s.delta = default_delta(0.5);
  s.policy.min_right_extent = 5.0;
  s.policy.stop_depth = 4.0;  // short path, forces extensions
  std::vector<DiffusionSummary> rows;
  std::size_t ext = 0;
  for (std::uint64_t i = 0; i < 5; ++i) {
    const ReplicaResult r1 = run_replica(s, RngStream{47, i});
    const ReplicaResult r2 = run_replica(s, RngStream{47, i});
    CHECK(r1.summary.lstar_over_t == r2.summary.lstar_over_t);
    CHECK(r1.summary.favorite_over_x == r2.summary.favorite_over_x);
    CHECK(r1.extensions == r2.extensions);
    ext += r1.extensions;
    rows.push_back(r1.summary);
  }
  CHECK(ext > 0);
  std::ostringstream os;
  write_diffusion_csv(rows, os);
  CHECK(os.str().rfind("seed,stream,t,h_t,n_t,hit_last_bottom,lstar_over_t,", 0) == 0);
}
