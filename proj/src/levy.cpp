#include "dre/levy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

#include "dre/csv.hpp"
#include "dre/parallel.hpp"
#include "dre/specialfn.hpp"

namespace dre {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

MarkSource::MarkSource(std::shared_ptr<const std::vector<double>> pool, Mode mode)
    : pool_(std::move(pool)), mode_(mode) {
  if (!pool_ || pool_->empty()) throw PoolExhausted("MarkSource: empty R_kappa pool");
  for (double r : *pool_) {
    if (!(r > 0.0)) throw std::invalid_argument("MarkSource: pool entries must be > 0");
  }
}

double MarkSource::next(Rng& rng) {
  if (mode_ == Mode::bootstrap) return (*pool_)[rng.index(pool_->size())];
  if (cursor_ >= pool_->size()) {
    throw PoolExhausted("MarkSource: R_kappa pool of " + std::to_string(pool_->size()) +
                        " samples exhausted");
  }
  return (*pool_)[cursor_++];
}

double MarkSource::mean_pow(double p) const {
  double s = 0.0;
  for (double r : *pool_) s += std::pow(r, p);
  return s / static_cast<double>(pool_->size());
}

double LevyPath2D::value(Coordinate c, double s) const {
  double v = 0.0;
  for (const auto& j : jumps) {
    if (j.time > s) break;
    v += jump_of(j, c);
  }
  return v;
}

double tail_constant(double kappa) { return std::pow(4.0, kappa); }

double missed_mass_rate(double kappa, double c2, double eps) {
  return c2 * kappa * std::pow(eps, 1.0 - kappa) / (1.0 - kappa);
}

double cutoff_for_budget(double kappa, double mean_rho, double mean_rho_kappa, double budget, double eps_max) {
  // Missed Y2 drift over the passage-time scale:
  //   E[rho] kappa eps^{1-kappa} / ((1-kappa) Gamma(1-kappa) E[rho^kappa]).
  const double coef = mean_rho * kappa / ((1.0 - kappa) * std::tgamma(1.0 - kappa) * mean_rho_kappa);
  const double eps_drift = std::pow(budget / coef, 1.0 / (1.0 - kappa));
  // Undershoot mass below the resolution eps E[rho]:
  //   sin(pi kappa)/(pi kappa) (eps E[rho])^kappa.
  const double c0 = std::sin(std::numbers::pi * kappa) / (std::numbers::pi * kappa);
  const double eps_under = std::pow(budget / c0, 1.0 / kappa) / mean_rho;
  return std::min({eps_drift, eps_under, eps_max});
}

LevyPath2D sample_levy_path(double kappa, double c2, double eps, MarkSource& marks, Rng& rng, double level) {
  if (!(kappa > 0.0 && kappa < 1.0)) throw std::invalid_argument("sample_levy_path: kappa must lie in (0,1)");
  if (!(eps > 0.0) || !(c2 > 0.0)) throw std::invalid_argument("sample_levy_path: need eps > 0 and c2 > 0");
  LevyPath2D p;
  p.kappa = kappa;
  p.c2 = c2;
  p.eps = eps;
  const double mean_gap = 1.0 / (c2 * std::pow(eps, -kappa));
  const double inv_k = -1.0 / kappa;
  double t = 0.0;
  double y2 = 0.0;
  while (y2 <= level) {
    t += rng.exponential(mean_gap);
    const double size = eps * std::pow(rng.uniform(), inv_k);
    const double mark = marks.next(rng);
    p.jumps.push_back({t, size, mark});
    y2 += size * mark;
  }
  return p;
}

std::vector<Jump> sample_jumps(double kappa, double c2, double eps, std::size_t n, MarkSource& marks,
                               Rng& rng) {
  if (!(kappa > 0.0 && kappa < 1.0)) throw std::invalid_argument("sample_jumps: kappa must lie in (0,1)");
  if (!(eps > 0.0) || !(c2 > 0.0)) throw std::invalid_argument("sample_jumps: need eps > 0 and c2 > 0");
  const double mean_gap = 1.0 / (c2 * std::pow(eps, -kappa));
  const double inv_k = -1.0 / kappa;
  std::vector<Jump> out;
  out.reserve(n);
  double t = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    t += rng.exponential(mean_gap);
    const double size = eps * std::pow(rng.uniform(), inv_k);
    out.push_back({t, size, marks.next(rng)});
  }
  return out;
}

double largest_jump(const LevyPath2D& path, Coordinate c, double s, bool strict) {
  double m = 0.0;
  for (const auto& j : path.jumps) {
    if (strict ? j.time >= s : j.time > s) break;
    m = std::max(m, path.jump_of(j, c));
  }
  return m;
}

double first_passage(const LevyPath2D& path, Coordinate c, double a) {
  double v = 0.0;
  for (const auto& j : path.jumps) {
    v += path.jump_of(j, c);
    if (v > a) return j.time;
  }
  throw HorizonNotReached("first_passage: path ends before exceeding " + std::to_string(a));
}

double first_passage_with_drift(const LevyPath2D& path, double drift, double level) {
  double y2 = 0.0;
  double prev_t = 0.0;
  for (const auto& j : path.jumps) {
    if (drift > 0.0 && y2 + drift * j.time > level) return std::max(prev_t, (level - y2) / drift);
    y2 += j.size * j.mark;
    if (y2 + drift * j.time > level) return j.time;
    prev_t = j.time;
  }
  throw HorizonNotReached("first_passage_with_drift: path ends before the level");
}

PassageReport passage_report(const LevyPath2D& path, double level) {
  PassageReport r;
  double y1 = 0.0, y2 = 0.0;
  double best = 0.0;
  double best_time = kNaN;
  for (std::size_t k = 0; k < path.jumps.size(); ++k) {
    const Jump& j = path.jumps[k];
    const double y2n = y2 + j.size * j.mark;
    if (y2n > level) {
      r.tau = j.time;
      r.undershoot = y2;
      r.overshoot = y2n;
      r.i1 = best;
      r.i2 = (level - y2) / j.mark;
      r.i = std::max(r.i1, r.i2);
      r.fstar = best_time;
      r.fstar_fraction = best_time / j.time;
      r.y1_natural_tau = std::max(best, j.size);
      r.y1_before = y1;
      r.y1_at = y1 + j.size;
      r.passage_mark = j.mark;
      r.passage_index = k;
      return r;
    }
    if (j.size > best) {
      best = j.size;
      best_time = j.time;
    } else if (j.size == best) {
      ++r.ties;
    }
    y1 += j.size;
    y2 = y2n;
  }
  throw HorizonNotReached("passage_report: Y2 never exceeds the level within the horizon");
}

std::string check_passage_invariants(const PassageReport& r) {
  if (!(r.undershoot <= 1.0 && 1.0 < r.overshoot)) return "Y2(tau-) <= 1 < Y2(tau) fails";
  if (!(r.i2 > 0.0 && r.i2 <= r.y1_at - r.y1_before)) return "0 < I2 <= Y1(tau) - Y1(tau-) fails";
  if (!(r.i1 <= r.y1_natural_tau)) return "I1 <= Y1^natural(tau) fails";
  if (r.passage_index > 0 && !(r.fstar_fraction > 0.0 && r.fstar_fraction < 1.0)) {
    return "F*-fraction outside (0,1)";
  }
  if (r.i != std::max(r.i1, r.i2)) return "I != max(I1, I2)";
  return {};
}

double LevyParams::c2_or_default() const { return c2 > 0.0 ? c2 : tail_constant(kappa); }

LimitLawTable limit_law_samples(std::size_t n, const LevyParams& params, const MarkSource& marks,
                                const RngStream& stream) {
  LimitLawTable out;
  out.rows.resize(n);
  std::vector<std::size_t> jump_counts(n);
  const double c2 = params.c2_or_default();
  if (marks.mode() == MarkSource::Mode::bootstrap) {
    parallel_for(n, [&](std::size_t i) {
      MarkSource local = marks;
      Rng rng(stream.child(i));
      const LevyPath2D p = sample_levy_path(params.kappa, c2, params.eps, local, rng);
      out.rows[i] = passage_report(p);
      jump_counts[i] = p.jumps.size();
    });
  } else {
    MarkSource local = marks;
    for (std::size_t i = 0; i < n; ++i) {
      Rng rng(stream.child(i));
      const LevyPath2D p = sample_levy_path(params.kappa, c2, params.eps, local, rng);
      out.rows[i] = passage_report(p);
      jump_counts[i] = p.jumps.size();
    }
  }
  std::size_t below = 0;
  out.favorite_mixture.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = out.rows[i];
    if (r.i1 < r.i2) ++below;
    out.favorite_mixture.push_back(r.i1 >= r.i2 ? r.fstar_fraction : 1.0);
    out.tie_events += r.ties;
    out.total_jumps += jump_counts[i];
  }
  out.p_i1_below_i2 = n > 0 ? static_cast<double>(below) / static_cast<double>(n) : kNaN;
  return out;
}

TransformTable renewal_count_transform(const LevyParams& params, const MarkSource& marks,
                                       std::span<const double> u_grid, std::size_t n,
                                       const RngStream& stream) {
  if (n < 2) throw std::invalid_argument("renewal_count_transform: need n >= 2");
  const double kappa = params.kappa;
  const double c2 = params.c2_or_default();
  TransformTable out;
  out.mean_rho_kappa = marks.mean_pow(kappa);
  out.c_kappa_hat = std::tgamma(1.0 - kappa) * c2 * out.mean_rho_kappa;
  const double drift = marks.mean_pow(1.0) * missed_mass_rate(kappa, c2, params.eps);

  std::vector<double> tau(n), tau_c(n);
  const auto body = [&](std::size_t i, MarkSource& src) {
    Rng rng(stream.child(i));
    const LevyPath2D p = sample_levy_path(kappa, c2, params.eps, src, rng);
    tau[i] = first_passage(p, Coordinate::y2, 1.0);
    tau_c[i] = first_passage_with_drift(p, drift);
  };
  if (marks.mode() == MarkSource::Mode::bootstrap) {
    parallel_for(n, [&](std::size_t i) {
      MarkSource local = marks;
      body(i, local);
    });
  } else {
    MarkSource local = marks;
    for (std::size_t i = 0; i < n; ++i) body(i, local);
  }
  for (double u : u_grid) {
    TransformRow row;
    row.u = u;
    double s = 0.0, s2 = 0.0, sc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = std::exp(-u * tau[i]);
      s += v;
      s2 += v * v;
      sc += std::exp(-u * tau_c[i]);
    }
    const double dn = static_cast<double>(n);
    row.empirical = s / dn;
    row.se = std::sqrt(std::max(0.0, (s2 / dn - row.empirical * row.empirical) / (dn - 1.0)));
    row.series = mittag_leffler_laplace(kappa, u, out.c_kappa_hat);
    row.band = std::fabs(row.empirical - sc / dn);
    out.rows.push_back(row);
  }
  return out;
}

void write_reports_csv(const LimitLawTable& table, std::ostream& os) {
  CsvWriter w(os, {"tau", "undershoot", "overshoot", "i1", "i2", "i", "fstar_fraction", "favorite_mixture",
                   "passage_mark", "ties"});
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    const auto& r = table.rows[k];
    w << r.tau << r.undershoot << r.overshoot << r.i1 << r.i2 << r.i << r.fstar_fraction
      << table.favorite_mixture[k] << r.passage_mark << static_cast<std::uint64_t>(r.ties);
    w.end_row();
  }
}

}  // namespace dre
