#include "dre/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

namespace dre {

Ecdf::Ecdf(std::vector<double> samples) : sorted_(std::move(samples)) {
  std::sort(sorted_.begin(), sorted_.end());
}

double Ecdf::operator()(double x) const {
  if (sorted_.empty()) return 0.0;
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  // The alternating series is useless for small lambda; use the theta-function
  // form of the CDF there.
  if (lambda < 1.18) {
    const double y = std::exp(-std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda));
    double s = 0.0;
    for (int k = 1; k <= 9; k += 2) s += std::pow(y, k * k);
    const double cdf = std::sqrt(2.0 * std::numbers::pi) / lambda * s;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1) ? term : -term;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_one_sample(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.size() < 10) {
    throw SampleSizeError("ks_one_sample: need at least 10 samples, got " +
                          std::to_string(samples.size()));
  }
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = cdf(s[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  const double sqrt_n = std::sqrt(n);
  // Stephens' small-sample correction of the asymptotic argument.
  const double lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
  return {d, kolmogorov_survival(lambda)};
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw SampleSizeError("ks_two_sample: empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size());
  const double nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::fabs(i / na - j / nb));
  }
  return d;
}

namespace {

std::vector<int> quantile_bins(const std::vector<double>& v, int k) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<int> bin(n);
  for (std::size_t r = 0; r < n; ++r) {
    bin[order[r]] = static_cast<int>((r * static_cast<std::size_t>(k)) / n);
  }
  return bin;
}

}  // namespace

ChiSquareResult grid_independence(std::span<const std::pair<double, double>> pairs, int k) {
  if (k < 2) throw SampleSizeError("grid_independence: grid size must be >= 2");
  const std::size_t n = pairs.size();
  if (n < static_cast<std::size_t>(10 * k * k)) {
    throw SampleSizeError("grid_independence: need n >= 10 k^2 = " + std::to_string(10 * k * k) +
                          ", got " + std::to_string(n));
  }
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = pairs[i].first;
    ys[i] = pairs[i].second;
  }
  const auto bx = quantile_bins(xs, k);
  const auto by = quantile_bins(ys, k);

  std::vector<double> cell(static_cast<std::size_t>(k * k), 0.0);
  std::vector<double> row(k, 0.0), col(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    cell[bx[i] * k + by[i]] += 1.0;
    row[bx[i]] += 1.0;
    col[by[i]] += 1.0;
  }
  ChiSquareResult out;
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      const double expected = row[a] * col[b] / static_cast<double>(n);
      const double obs = cell[a * k + b];
      if (expected < 5.0 || obs < 5.0) out.sparse_cells = true;
      out.statistic += (obs - expected) * (obs - expected) / expected;
    }
  }
  out.dof = (k - 1) * (k - 1);
  boost::math::chi_squared dist(out.dof);
  out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
  return out;
}

MeanCi mean_ci(std::span<const double> samples, double level) {
  if (samples.size() < 2) throw SampleSizeError("mean_ci: need at least 2 samples");
  if (!(level > 0.0 && level < 1.0)) throw SampleSizeError("mean_ci: level must lie in (0,1)");
  const double n = static_cast<double>(samples.size());
  double mean = 0.0, m2 = 0.0;
  std::size_t count = 0;
  for (double x : samples) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }
  const double var = m2 / (n - 1.0);
  const double se = var > 0.0 ? std::sqrt(var / n) : 0.0;
  const double z = boost::math::quantile(boost::math::normal(), 0.5 + 0.5 * level);
  return {mean, z * se, se};
}

double quantile(std::vector<double> samples, double p) {
  if (samples.empty()) throw SampleSizeError("quantile: empty sample");
  std::sort(samples.begin(), samples.end());
  const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(samples.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, samples.size() - 1);
  const double w = pos - static_cast<double>(lo);
  return samples[lo] * (1.0 - w) + samples[hi] * w;
}

}  // namespace dre
