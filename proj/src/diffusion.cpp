#include "dre/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "dre/csv.hpp"

namespace dre {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

double DiffusionConfig::phi() const { return std::pow(std::log(t_max), phi_exponent); }

double DiffusionConfig::h_t() const { return std::log(t_max) - phi(); }

void DiffusionConfig::validate() const {
  if (!(t_max > 1.0)) throw std::invalid_argument("DiffusionConfig: t_max must be > 1");
  if (!(dt > 0.0)) throw std::invalid_argument("DiffusionConfig: dt must be > 0");
  if (!(bin_width > 0.0)) throw std::invalid_argument("DiffusionConfig: bin_width must be > 0");
  if (!(phi_exponent > 0.0 && phi_exponent < 1.0)) {
    throw std::invalid_argument("DiffusionConfig: phi_exponent must lie in (0,1)");
  }
  if (!(dt < bin_width * bin_width)) {
    throw std::invalid_argument("DiffusionConfig: dt must be smaller than bin_width^2");
  }
  if (!(h_t() > 0.0)) throw std::invalid_argument("DiffusionConfig: h_t = log t - phi(t) must be > 0");
}

DiffusionExcursion::DiffusionExcursion(double position, double time, double left, double right)
    : std::runtime_error("diffusion left the potential extents [" + std::to_string(left) + ", " +
                         std::to_string(right) + "] at x = " + std::to_string(position) +
                         ", t = " + std::to_string(time)),
      position_(position),
      time_(time),
      right_(position > right) {}

Trajectory trajectory_from_samples(std::span<const double> t, std::span<const double> x) {
  if (t.size() != x.size() || t.empty()) {
    throw std::invalid_argument("trajectory_from_samples: need equal, nonempty time and position arrays");
  }
  Trajectory tr;
  tr.running_max = x[0];
  tr.running_min = x[0];
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (x[i] > tr.running_max) {
      tr.max_records.push_back({t[i - 1], x[i - 1], t[i], x[i]});
      tr.running_max = x[i];
    }
    if (x[i] < tr.running_min) {
      tr.min_records.push_back({t[i - 1], x[i - 1], t[i], x[i]});
      tr.running_min = x[i];
    }
  }
  tr.t_end = t.back();
  tr.x_end = x.back();
  tr.sample_times.assign(t.begin(), t.end());
  tr.sample_positions.assign(x.begin(), x.end());
  return tr;
}

double LocalTimeField::total_time() const {
  std::uint64_t n = 0;
  for (auto c : counts) n += c;
  return static_cast<double>(n) * step;
}

std::pair<Trajectory, LocalTimeField> simulate(const PotentialPath& path, const DiffusionConfig& cfg,
                                               const RngStream& stream, const SimulateOptions& opts) {
  cfg.validate();
  const double ratio = cfg.bin_width / path.grid_step;
  if (std::fabs(ratio - std::round(ratio)) > 1e-9 * ratio || std::round(ratio) < 1.0) {
    throw std::invalid_argument("simulate: bin_width must be a whole multiple of the grid step");
  }
  if (!std::is_sorted(opts.watch_levels.begin(), opts.watch_levels.end())) {
    throw std::invalid_argument("simulate: watch levels must be ascending");
  }
  const auto n = static_cast<std::uint64_t>(std::ceil(cfg.t_max / cfg.dt - 1e-9));
  const double h = cfg.t_max / static_cast<double>(n);
  const double sq = std::sqrt(h);

  // Per-segment drift increment -W'/2 * h.
  const std::size_t nseg = path.values.size() - 1;
  std::vector<double> drift(nseg);
  for (std::size_t k = 0; k < nseg; ++k) {
    drift[k] = -0.5 * (path.values[k + 1] - path.values[k]) / path.grid_step * h;
  }
  const double lo = -path.left_extent();
  const double hi = path.right_extent();
  const double inv_dx = 1.0 / path.grid_step;
  const double inv_w = 1.0 / cfg.bin_width;

  LocalTimeField field;
  field.bin_width = cfg.bin_width;
  field.step = h;
  field.first_bin = static_cast<std::int64_t>(std::floor(lo * inv_w + 0.5));
  const auto last_bin = static_cast<std::int64_t>(std::floor(hi * inv_w + 0.5));
  field.counts.assign(static_cast<std::size_t>(last_bin - field.first_bin + 1), 0);

  Trajectory tr;
  tr.watch_levels = opts.watch_levels;
  tr.sup_density_at_watch.assign(opts.watch_levels.size(), kNaN);
  std::size_t next_watch = 0;
  while (next_watch < tr.watch_levels.size() && tr.watch_levels[next_watch] <= 0.0) {
    tr.sup_density_at_watch[next_watch++] = 0.0;
  }

  Rng rng(stream);
  double x = 0.0;
  double run_max = 0.0, run_min = 0.0;
  std::uint64_t sup_count = 0;
  if (opts.sample_every > 0) {
    tr.sample_times.push_back(0.0);
    tr.sample_positions.push_back(0.0);
  }
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto b = static_cast<std::size_t>(static_cast<std::int64_t>(std::floor(x * inv_w + 0.5)) - field.first_bin);
    const std::uint64_t c = ++field.counts[b];
    if (c > sup_count) sup_count = c;

    auto k = static_cast<std::size_t>((x - lo) * inv_dx);
    if (k >= nseg) k = nseg - 1;
    const double x_prev = x;
    x += drift[k] + sq * rng.normal();
    const double t_now = static_cast<double>(i + 1) * h;
    if (x < lo || x > hi) throw DiffusionExcursion(x, t_now, lo, hi);
    if (x > run_max) {
      tr.max_records.push_back({static_cast<double>(i) * h, x_prev, t_now, x});
      run_max = x;
      while (next_watch < tr.watch_levels.size() && tr.watch_levels[next_watch] <= run_max) {
        tr.sup_density_at_watch[next_watch++] = static_cast<double>(sup_count) * h / cfg.bin_width;
      }
    } else if (x < run_min) {
      tr.min_records.push_back({static_cast<double>(i) * h, x_prev, t_now, x});
      run_min = x;
    }
    if (opts.sample_every > 0 && (i + 1) % opts.sample_every == 0) {
      tr.sample_times.push_back(t_now);
      tr.sample_positions.push_back(x);
    }
  }
  tr.t_end = cfg.t_max;
  tr.x_end = x;
  tr.running_max = run_max;
  tr.running_min = run_min;
  field.elapsed = cfg.t_max;
  return {std::move(tr), std::move(field)};
}

std::optional<double> hitting_time(const Trajectory& traj, double r) {
  if (r == 0.0) return 0.0;
  const auto interp = [r](const RecordStep& s) {
    return s.t_prev + (r - s.x_prev) / (s.x - s.x_prev) * (s.t - s.t_prev);
  };
  if (r > 0.0) {
    if (r > traj.running_max) return std::nullopt;
    const auto it = std::lower_bound(traj.max_records.begin(), traj.max_records.end(), r,
                                     [](const RecordStep& s, double v) { return s.x < v; });
    if (it == traj.max_records.end()) return std::nullopt;
    return interp(*it);
  }
  if (r < traj.running_min) return std::nullopt;
  const auto it = std::lower_bound(traj.min_records.begin(), traj.min_records.end(), r,
                                   [](const RecordStep& s, double v) { return s.x > v; });
  if (it == traj.min_records.end()) return std::nullopt;
  return interp(*it);
}

std::size_t visited_minima_count(const Trajectory& traj, const std::vector<ValleyRecord>& valleys) {
  std::size_t k = 0;
  while (k < valleys.size() && valleys[k].bottom <= traj.running_max) ++k;
  return k;
}

SupLocalTime sup_local_time(const LocalTimeField& field) {
  if (field.counts.empty()) throw std::invalid_argument("sup_local_time: empty field");
  std::size_t best = 0;
  for (std::size_t i = 1; i < field.counts.size(); ++i) {
    if (field.counts[i] > field.counts[best]) best = i;
  }
  return {field.density(best), field.center(best)};
}

double localization_gap(const Trajectory& traj, const std::vector<ValleyRecord>& valleys) {
  const std::size_t nt = visited_minima_count(traj, valleys);
  if (nt == 0) throw UndefinedGap("localization_gap: no valley bottom visited (N_t = 0)");
  return std::fabs(traj.x_end - valleys[nt - 1].bottom);
}

DiffusionSummary summarize(const Trajectory& traj, const LocalTimeField& field,
                           const std::vector<ValleyRecord>& valleys, const DiffusionConfig& cfg,
                           const RngStream& stream) {
  DiffusionSummary s;
  s.seed = stream.base_seed;
  s.stream = stream.stream_id;
  s.t = cfg.t_max;
  s.h_t = cfg.h_t();
  s.n_t = visited_minima_count(traj, valleys);
  const SupLocalTime sup = sup_local_time(field);
  s.lstar_over_t = sup.value / cfg.t_max;
  s.favorite_over_x = sup.position / traj.x_end;
  if (s.n_t > 0) {
    const double m = valleys[s.n_t - 1].bottom;
    s.hit_last_bottom = hitting_time(traj, m).value_or(kNaN);
    s.lstar_at_last_bottom = kNaN;
    for (std::size_t i = 0; i < traj.watch_levels.size(); ++i) {
      if (traj.watch_levels[i] == m) s.lstar_at_last_bottom = traj.sup_density_at_watch[i] / cfg.t_max;
    }
    s.gap = std::fabs(traj.x_end - m);
    s.gap_over_phi = s.gap / cfg.phi();
  } else {
    s.hit_last_bottom = s.lstar_at_last_bottom = s.gap = s.gap_over_phi = kNaN;
  }
  double neg = 0.0;
  for (std::size_t i = 0; i < field.size() && field.center(i) < 0.0; ++i) neg = std::max(neg, field.density(i));
  s.negative_side_ratio = neg / cfg.t_max;
  return s;
}

ReplicaResult run_replica(const ReplicaSetup& setup, const RngStream& stream) {
  PotentialGenerator gen(setup.kappa, setup.grid_step, setup.policy, stream.child(0));
  PotentialPath path = gen.sample();
  ReplicaResult out;
  const double h_t = setup.cfg.h_t();
  for (;;) {
    const auto valleys = build_valleys_all(path, h_t, setup.delta);
    SimulateOptions opts;
    for (const auto& v : valleys) opts.watch_levels.push_back(v.bottom);
    try {
      const auto [traj, field] = simulate(path, setup.cfg, stream.child(1), opts);
      out.summary = summarize(traj, field, valleys, setup.cfg, stream);
      out.right_extent = path.right_extent();
      return out;
    } catch (const DiffusionExcursion& e) {
      if (!e.right_side() || out.extensions >= setup.max_extensions) throw;
      ++out.extensions;
      gen.extend_right(path, 2.0 * path.right_extent());
    }
  }
}

void write_diffusion_csv(const std::vector<DiffusionSummary>& rows, std::ostream& os) {
  CsvWriter w(os, {"seed", "stream", "t", "h_t", "n_t", "hit_last_bottom", "lstar_over_t",
                   "lstar_at_last_bottom_over_t", "favorite_over_x", "gap", "gap_over_phi",
                   "negative_side_ratio"});
  for (const auto& r : rows) {
    w << r.seed << r.stream << r.t << r.h_t << static_cast<std::uint64_t>(r.n_t) << r.hit_last_bottom
      << r.lstar_over_t << r.lstar_at_last_bottom << r.favorite_over_x << r.gap << r.gap_over_phi
      << r.negative_side_ratio;
    w.end_row();
  }
}

}  // namespace dre
