#ifndef DRE_ENVIRONMENT_HPP
#define DRE_ENVIRONMENT_HPP

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "dre/rng.hpp"

namespace dre {

/// The sampled path grew past ExtentPolicy::max_points, or a path handed to
/// a_infinity was never driven deep enough for the integral to be truncated.
class ExtentOverflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A query point lies outside the sampled extents.
class OutOfExtent : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// When to stop growing the two halves of a potential path.
struct ExtentPolicy {
  /// Right half: stop once W_kappa sits this far below its running maximum.
  double stop_depth = 30.0;
  /// Left half: stop once W_kappa exceeds W_kappa(0) = 0 by this amount.
  double left_barrier = 30.0;
  /// Right half never stops before this abscissa.
  double min_right_extent = 0.0;
  std::size_t max_points = 50'000'000;

  void validate() const;
};

/// Two-sided sample of W_kappa(x) = W(x) - (kappa/2) x on a uniform grid,
/// read as a piecewise-linear function. values[origin] == 0 is the value at x = 0.
struct PotentialPath {
  double kappa = 0.5;
  double grid_step = 5e-3;
  std::size_t origin = 0;
  std::vector<double> values;
  RngStream stream{};

  std::size_t size() const { return values.size(); }
  double left_extent() const { return static_cast<double>(origin) * grid_step; }
  double right_extent() const {
    return static_cast<double>(values.size() - 1 - origin) * grid_step;
  }
  double x_at(std::size_t i) const {
    return (static_cast<double>(i) - static_cast<double>(origin)) * grid_step;
  }
  /// Grid index of the largest grid point <= x (clamped to the last segment).
  std::size_t segment_of(double x) const;
  /// Piecewise-linear interpolant; throws OutOfExtent outside the extents.
  double value_at(double x) const;
  /// Slope of the interpolant on the segment containing x (right-continuous).
  double slope_at(double x) const;
  bool contains(double x) const { return x >= -left_extent() && x <= right_extent(); }
};

/// Builds a path from explicit values, mainly for synthetic inputs.
PotentialPath make_path(double kappa, double grid_step, std::size_t origin,
                        std::vector<double> values);

/// Draws potential paths from one stream. The right and left halves use
/// separate sub-streams so a path can be extended to the right later and stay
/// a prefix-consistent realization.
class PotentialGenerator {
 public:
  PotentialGenerator(double kappa, double grid_step, ExtentPolicy policy, RngStream stream);

  /// Path grown per the extent policy.
  PotentialPath sample();
  /// Path with fixed extents (rounded up to whole grid steps).
  PotentialPath sample_fixed(double left_extent, double right_extent);
  /// Continues the right half of a path produced by this generator.
  void extend_right(PotentialPath& path, double new_right_extent);

 private:
  double right_step();
  double left_step();

  double kappa_;
  double grid_step_;
  ExtentPolicy policy_;
  RngStream stream_;
  Rng right_;
  Rng left_;
  double sd_;
};

PotentialPath sample_potential(double kappa, double grid_step, const ExtentPolicy& policy,
                               const RngStream& stream);

/// Halves the grid step: every new midpoint is drawn from the Brownian bridge
/// between its neighbours, so both grids describe the same realization.
PotentialPath refine(const PotentialPath& path, const RngStream& stream);

/// A(r) = int_0^r exp(W_kappa(x)) dx of the piecewise-linear interpolant,
/// negative for r < 0.
double a_integral(const PotentialPath& path, double r);

struct AInfinity {
  double value = 0.0;
  /// exp(W_kappa(right_extent)): the neglected tail equals this weight times
  /// an independent copy of A_infinity, hence at most exp(-stop_depth) times
  /// that copy relative to the running maximum.
  double tail_weight = 0.0;
};

/// A(right_extent). Throws ExtentOverflow unless the path ends at least
/// `stop_depth` below its running maximum on [0, right_extent].
AInfinity a_infinity(const PotentialPath& path, double stop_depth);

// Serialization: header (kappa, grid_step, extents, seed, stream) + values.
void write_path_csv(const PotentialPath& path, std::ostream& os);
PotentialPath read_path_csv(std::istream& is);
void write_path_binary(const PotentialPath& path, std::ostream& os);
PotentialPath read_path_binary(std::istream& is);

}  // namespace dre

#endif  // DRE_ENVIRONMENT_HPP
