#ifndef DRE_STATS_HPP
#define DRE_STATS_HPP

#include <functional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace dre {

class SampleSizeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Empirical distribution function over a sorted copy of the samples.
class Ecdf {
 public:
  explicit Ecdf(std::vector<double> samples);

  /// Fraction of samples <= x.
  double operator()(double x) const;

  const std::vector<double>& sorted() const { return sorted_; }
  std::size_t size() const { return sorted_.size(); }

 private:
  std::vector<double> sorted_;
};

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Kolmogorov survival function Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_survival(double lambda);

/// One-sample KS test with the asymptotic Kolmogorov p-value. Requires n >= 10.
KsResult ks_one_sample(std::span<const double> samples, const std::function<double(double)>& cdf);

/// Two-sample KS statistic (sup-gap between the two ECDFs).
double ks_two_sample(std::span<const double> a, std::span<const double> b);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
  bool sparse_cells = false;  ///< some expected/observed cell count below 5
};

/// Chi-square test of independence on the k x k grid of marginal empirical
/// quantiles. Requires n >= 10 k^2.
ChiSquareResult grid_independence(std::span<const std::pair<double, double>> pairs, int k);

struct MeanCi {
  double mean = 0.0;
  double half_width = 0.0;
  double std_error = 0.0;
};

/// Normal-approximation confidence interval at the given two-sided level.
MeanCi mean_ci(std::span<const double> samples, double level = 0.95);

/// Linear-interpolation sample quantile, p in [0, 1].
double quantile(std::vector<double> samples, double p);

}  // namespace dre

#endif  // DRE_STATS_HPP
