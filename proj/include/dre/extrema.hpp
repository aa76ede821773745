#ifndef DRE_EXTREMA_HPP
#define DRE_EXTREMA_HPP

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "dre/environment.hpp"

namespace dre {

enum class ExtremumKind { minimum, maximum };

struct HExtremum {
  double position = 0.0;
  double value = 0.0;
  ExtremumKind kind = ExtremumKind::minimum;
  std::size_t index = 0;  // grid index of the point
};

/// Closed interval of abscissae.
struct Window {
  double lo = 0.0;
  double hi = 0.0;
};

/// h-extrema of the grid values inside `window`, in increasing position.
/// A point qualifies when both neighbouring excursions reach height h before
/// the path passes beyond it; flat extrema resolve to the leftmost grid point.
std::vector<HExtremum> find_h_extrema(const PotentialPath& path, double h, Window window);

/// Same as above over the whole path.
std::vector<HExtremum> find_h_extrema(const PotentialPath& path, double h);

/// Reference O(n^2) implementation testing the definition at every grid point.
std::vector<HExtremum> find_h_extrema_brute_force(const PotentialPath& path, double h, Window window);

/// Thrown when the path ends before a valley coordinate is reached.
class InsufficientExtent : public std::runtime_error {
 public:
  InsufficientExtent(std::string coordinate, std::size_t valley, double right_extent);

  const std::string& coordinate() const { return coordinate_; }
  std::size_t valley() const { return valley_; }

 private:
  std::string coordinate_;
  std::size_t valley_;
};

struct ValleyRecord {
  std::size_t index = 0;  // 1-based
  double l_sharp = 0.0;   // first drop of h_plus below the previous right end
  double bottom = 0.0;    // m~_i
  double tau = 0.0;       // first rise of h_t above the running minimum
  double l_plus = 0.0;    // first point h_t + h_plus below W(tau)
  double top = 0.0;       // M~_i, leftmost argmax of W on [bottom, l_plus]
  double l_star = 0.0;    // first point after tau at bottom value + 3 h_t / 4
  double l_exit = 0.0;    // L~_i: first point after tau at bottom value + h_t / 2
  double l_minus = 0.0;   // last point before bottom at bottom value + h_plus
  double bottom_value = 0.0;
  double top_value = 0.0;
  std::size_t bottom_index = 0;  // grid index of the bottom (or of the point after it)
};

/// Valley geometry parameters. `h_plus` = (1 + kappa + 2 delta) h_t.
struct ValleyParams {
  double h_t = 1.0;
  double delta = 0.1;

  double h_plus(double kappa) const { return (1.0 + kappa + 2.0 * delta) * h_t; }
};

/// Default delta = min(0.1, (1/kappa - 1)/6), which keeps kappa (1 + 3 delta) < 1.
double default_delta(double kappa);

/// The first n valleys on the positive half-line, by the recursive
/// stopping-time construction. All crossings are solved exactly on the
/// piecewise-linear interpolant. Throws InsufficientExtent naming the first
/// coordinate that could not be located.
std::vector<ValleyRecord> build_valleys(const PotentialPath& path, double h_t, double delta,
                                        std::size_t n);

/// Every valley whose right end l_plus lies inside the path (no error when the
/// path runs out).
std::vector<ValleyRecord> build_valleys_all(const PotentialPath& path, double h_t, double delta);

/// One valley potential W - W(bottom) sampled on [l_minus, l_exit]: the two
/// end crossings, the bottom, and every grid point in between.
struct ShiftedSegment {
  std::size_t index = 0;
  std::vector<double> x;
  std::vector<double> v;

  double value_at(double pos) const;
};

std::vector<ShiftedSegment> valley_shifted_potentials(const PotentialPath& path,
                                                      const std::vector<ValleyRecord>& valleys);

/// Worst-case one-step oscillation used for value identities on a grid:
/// 3 sqrt(dx log(1/dx)).
double grid_tolerance(double grid_step);

/// Returns an empty string when every ordering and value identity holds,
/// otherwise a description of the first violation.
std::string check_valley_invariants(const PotentialPath& path, const std::vector<ValleyRecord>& v,
                                    double h_t, double delta);

void write_valleys_csv(const std::vector<ValleyRecord>& valleys, std::ostream& os);

}  // namespace dre

#endif  // DRE_EXTREMA_HPP
