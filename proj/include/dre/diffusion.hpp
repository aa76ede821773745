#ifndef DRE_DIFFUSION_HPP
#define DRE_DIFFUSION_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dre/environment.hpp"
#include "dre/extrema.hpp"
#include "dre/rng.hpp"

namespace dre {

struct DiffusionConfig {
  double t_max = 1e4;
  double dt = 1e-3;
  /// phi(t) = (log t)^phi_exponent.
  double phi_exponent = 0.5;
  /// Local-time bin width; must be a whole multiple of the potential grid step.
  double bin_width = 0.05;

  double phi() const;
  /// h_t = log t - phi(t).
  double h_t() const;
  void validate() const;
};

/// The walker left the sampled potential.
class DiffusionExcursion : public std::runtime_error {
 public:
  DiffusionExcursion(double position, double time, double left, double right);
  double position() const { return position_; }
  double time() const { return time_; }
  /// True when the walker left through the right end.
  bool right_side() const { return right_; }

 private:
  double position_;
  double time_;
  bool right_;
};

/// A step that set a new running maximum (or minimum): the position before
/// and after, with the two step times.
struct RecordStep {
  double t_prev = 0.0;
  double x_prev = 0.0;
  double t = 0.0;
  double x = 0.0;
};

struct Trajectory {
  double t_end = 0.0;
  double x_end = 0.0;
  double running_max = 0.0;
  double running_min = 0.0;
  std::vector<RecordStep> max_records;
  std::vector<RecordStep> min_records;
  /// Optional thinned skeleton (every `sample_every` steps).
  std::vector<double> sample_times;
  std::vector<double> sample_positions;
  /// For every watched level, the sup of the local time (density) at the step
  /// the running maximum first reached it; NaN when never reached.
  std::vector<double> watch_levels;
  std::vector<double> sup_density_at_watch;
};

/// Builds the record structure from an explicit skeleton (t[0] = 0).
Trajectory trajectory_from_samples(std::span<const double> t, std::span<const double> x);

/// Occupation counts on bins of width w centred at integer multiples of w.
struct LocalTimeField {
  double bin_width = 0.0;
  double step = 0.0;  // time carried by one count
  std::int64_t first_bin = 0;
  std::vector<std::uint64_t> counts;
  double elapsed = 0.0;

  std::size_t size() const { return counts.size(); }
  double center(std::size_t i) const {
    return static_cast<double>(first_bin + static_cast<std::int64_t>(i)) * bin_width;
  }
  double density(std::size_t i) const {
    return static_cast<double>(counts[i]) * step / bin_width;
  }
  /// sum of density * bin_width.
  double total_time() const;
};

struct SimulateOptions {
  /// Ascending levels whose first hitting is watched (typically valley bottoms).
  std::vector<double> watch_levels;
  std::size_t sample_every = 0;
};

/// Euler-Maruyama for dX = dB - W'(X)/2 dt on the piecewise-linear potential,
/// with n = ceil(t_max/dt) equal steps. The position at the start of each step
/// is charged to its bin.
std::pair<Trajectory, LocalTimeField> simulate(const PotentialPath& path, const DiffusionConfig& cfg,
                                               const RngStream& stream,
                                               const SimulateOptions& opts = {});

/// First time the linear interpolation of the skeleton reaches r.
std::optional<double> hitting_time(const Trajectory& traj, double r);

/// N_t: number of valley bottoms at or below the running maximum.
std::size_t visited_minima_count(const Trajectory& traj, const std::vector<ValleyRecord>& valleys);

struct SupLocalTime {
  double value = 0.0;     // largest density
  double position = 0.0;  // leftmost bin centre attaining it
};

SupLocalTime sup_local_time(const LocalTimeField& field);

class UndefinedGap : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// |X(t_end) - bottom of valley N_t|; throws UndefinedGap when N_t = 0.
double localization_gap(const Trajectory& traj, const std::vector<ValleyRecord>& valleys);

/// One diffusion replica reduced to the observables compared with the limit laws.
struct DiffusionSummary {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  double t = 0.0;
  double h_t = 0.0;
  std::size_t n_t = 0;
  double hit_last_bottom = 0.0;      // H(m~_{N_t}), NaN when N_t = 0
  double lstar_over_t = 0.0;         // L*(t)/t
  double lstar_at_last_bottom = 0.0; // L*(H(m~_{N_t}))/t, NaN when N_t = 0
  double favorite_over_x = 0.0;      // F*_t / X(t)
  double gap = 0.0;                  // localization gap, NaN when N_t = 0
  double gap_over_phi = 0.0;
  double negative_side_ratio = 0.0;  // sup_{x<0} L(t,x) / t
};

DiffusionSummary summarize(const Trajectory& traj, const LocalTimeField& field,
                           const std::vector<ValleyRecord>& valleys, const DiffusionConfig& cfg,
                           const RngStream& stream);

struct ReplicaSetup {
  double kappa = 0.5;
  double grid_step = 5e-3;
  DiffusionConfig cfg;
  double delta = 0.1;
  ExtentPolicy policy;
  /// Doublings of the right extent allowed after the walker runs off the path.
  std::size_t max_extensions = 12;
};

struct ReplicaResult {
  DiffusionSummary summary;
  std::size_t extensions = 0;
  double right_extent = 0.0;
};

/// One environment (stream.child(0)) and one walk (stream.child(1)). When the
/// walk leaves through the right end the same environment is extended and the
/// walk is rerun with the same noise; leaving through the left end is fatal.
ReplicaResult run_replica(const ReplicaSetup& setup, const RngStream& stream);

void write_diffusion_csv(const std::vector<DiffusionSummary>& rows, std::ostream& os);

}  // namespace dre

#endif  // DRE_DIFFUSION_HPP
