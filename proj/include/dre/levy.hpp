#ifndef DRE_LEVY_HPP
#define DRE_LEVY_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dre/rng.hpp"

namespace dre {

class PoolExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class HorizonNotReached : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Supplies the jump marks rho ~ R_kappa from a pre-generated sample.
/// `strict` hands out each pool entry once and throws PoolExhausted after the
/// last; `bootstrap` draws uniformly with replacement.
class MarkSource {
 public:
  enum class Mode { strict, bootstrap };

  MarkSource(std::shared_ptr<const std::vector<double>> pool, Mode mode);

  double next(Rng& rng);
  Mode mode() const { return mode_; }
  std::size_t used() const { return cursor_; }
  const std::vector<double>& pool() const { return *pool_; }
  /// Pool average of rho^p.
  double mean_pow(double p) const;

 private:
  std::shared_ptr<const std::vector<double>> pool_;
  Mode mode_;
  std::size_t cursor_ = 0;
};

struct Jump {
  double time = 0.0;
  double size = 0.0;  // jump of Y1
  double mark = 0.0;  // rho; jump of Y2 is size * mark
};

enum class Coordinate { y1, y2 };

struct LevyPath2D {
  double kappa = 0.5;
  double c2 = 0.0;
  double eps = 1e-4;
  std::vector<Jump> jumps;

  double jump_of(const Jump& j, Coordinate c) const { return c == Coordinate::y1 ? j.size : j.size * j.mark; }
  /// Value of a coordinate at time s (right-continuous).
  double value(Coordinate c, double s) const;
};

/// C_2 = 4^kappa.
double tail_constant(double kappa);

/// Expected total size of the Y1 jumps below eps per unit time:
/// C2 kappa eps^{1-kappa} / (1-kappa).
double missed_mass_rate(double kappa, double c2, double eps);

/// Largest cutoff (at most eps_max) keeping both truncation errors below
/// `budget`: the missed Y2 drift over the passage-time scale 1/C_kappa, and the
/// arcsine mass of undershoots below the resolution eps E[rho].
double cutoff_for_budget(double kappa, double mean_rho, double mean_rho_kappa, double budget,
                         double eps_max = 1e-4);

/// Jumps of Y1 above eps at rate C2 eps^{-kappa} per unit time with Pareto(kappa)
/// sizes above eps, each carrying a mark from `marks`. Generation stops at the
/// first jump after which Y2 exceeds `level`.
LevyPath2D sample_levy_path(double kappa, double c2, double eps, MarkSource& marks, Rng& rng,
                            double level = 1.0);

/// The first n jumps above eps, with no stopping level.
std::vector<Jump> sample_jumps(double kappa, double c2, double eps, std::size_t n, MarkSource& marks,
                               Rng& rng);

/// f^natural(s): largest jump with time <= s (strictly < s when `strict`).
double largest_jump(const LevyPath2D& path, Coordinate c, double s, bool strict = false);

/// f^{-1}(a): first jump time at which the running sum exceeds a.
double first_passage(const LevyPath2D& path, Coordinate c, double a);

struct PassageReport {
  double tau = 0.0;
  double undershoot = 0.0;  // Y2(tau-)
  double overshoot = 0.0;   // Y2(tau)
  double i1 = 0.0;          // largest Y1 jump before tau
  double i2 = 0.0;          // (1 - undershoot) / rho at the passage jump
  double i = 0.0;           // max(i1, i2)
  double fstar = 0.0;       // time of the jump attaining i1 (NaN if none)
  double fstar_fraction = 0.0;
  double y1_natural_tau = 0.0;  // largest Y1 jump up to and including tau
  double y1_before = 0.0;       // Y1(tau-)
  double y1_at = 0.0;           // Y1(tau)
  double passage_mark = 0.0;
  std::size_t passage_index = 0;
  std::size_t ties = 0;  // jumps before tau whose size equals i1 (besides the first)
};

PassageReport passage_report(const LevyPath2D& path, double level = 1.0);

/// Empty when every PassageReport invariant holds, else the first violation.
std::string check_passage_invariants(const PassageReport& r);

struct LevyParams {
  double kappa = 0.5;
  double c2 = 0.0;  // 0 means 4^kappa
  double eps = 1e-4;

  double c2_or_default() const;
};

struct LimitLawTable {
  std::vector<PassageReport> rows;
  /// Fraction of draws with i1 < i2.
  double p_i1_below_i2 = 0.0;
  /// Per draw: F*-fraction when i1 >= i2, else 1 (position of the favourite
  /// site relative to the current position).
  std::vector<double> favorite_mixture;
  std::size_t tie_events = 0;
  std::size_t total_jumps = 0;
};

/// n reports; draw i uses stream.child(i). Bootstrap marks run in parallel,
/// strict marks sequentially from one shared cursor.
LimitLawTable limit_law_samples(std::size_t n, const LevyParams& params, const MarkSource& marks,
                                const RngStream& stream);

struct TransformRow {
  double u = 0.0;
  double empirical = 0.0;
  double se = 0.0;
  double series = 0.0;
  /// |E e^{-u tau} - E e^{-u tau_c}| where tau_c adds the mean small-jump
  /// drift to Y2 on the same draws.
  double band = 0.0;
};

struct TransformTable {
  double c_kappa_hat = 0.0;  // Gamma(1-kappa) C2 E[R^kappa]
  double mean_rho_kappa = 0.0;
  std::vector<TransformRow> rows;
};

/// Empirical Laplace transform of tau = Y2^{-1}(1) against the Mittag-Leffler
/// series with the Tauberian constant.
TransformTable renewal_count_transform(const LevyParams& params, const MarkSource& marks,
                                       std::span<const double> u_grid, std::size_t n,
                                       const RngStream& stream);

/// First time Y2 plus the drift d*s exceeds `level`.
double first_passage_with_drift(const LevyPath2D& path, double drift, double level = 1.0);

void write_reports_csv(const LimitLawTable& table, std::ostream& os);

}  // namespace dre

#endif  // DRE_LEVY_HPP
