#include "dre/renewal.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "dre/csv.hpp"
#include "dre/parallel.hpp"

namespace dre {

void BesselSimConfig::validate() const {
  if (!(dt_b > 0.0)) throw std::invalid_argument("BesselSimConfig: dt_b must be > 0");
  if (!(L_cut > 0.0)) throw std::invalid_argument("BesselSimConfig: L_cut must be > 0");
  if (!(h > 0.0)) throw std::invalid_argument("BesselSimConfig: h must be > 0");
  if (!(dt_max >= dt_b)) throw std::invalid_argument("BesselSimConfig: dt_max must be >= dt_b");
  if (max_steps == 0) throw std::invalid_argument("BesselSimConfig: max_steps must be positive");
}

namespace {

double step_size(const BesselSimConfig& cfg, double gap) {
  if (!cfg.adaptive) return cfg.dt_b;
  const double cap = cfg.dt_max / cfg.dt_b;
  const double g = 2.0 * gap;
  return g >= std::log(cap) ? cfg.dt_max : cfg.dt_b * std::exp(g);
}

void check_kappa(double kappa, const char* who) {
  if (!(kappa > 0.0 && kappa < 1.0)) throw std::invalid_argument(std::string(who) + ": kappa must lie in (0,1)");
}

}  // namespace

double sample_wup_hitting_functionals(double kappa, double level, Sign sign, const BesselSimConfig& cfg,
                                      Rng& rng) {
  check_kappa(kappa, "sample_wup_hitting_functionals");
  if (!(level > 0.0)) throw std::invalid_argument("sample_wup_hitting_functionals: level must be > 0");
  const double v = 0.5 * kappa;
  const double sg = sign == Sign::plus ? 1.0 : -1.0;
  const double ref = sign == Sign::plus ? level : 0.0;
  double y1 = 0.0, y2 = 0.0, y3 = 0.0;
  double w = 0.0;
  double f = 1.0;
  double integral = 0.0;
  for (std::uint64_t k = 0; k < cfg.max_steps; ++k) {
    const double dt = step_size(cfg, ref - sg * w);
    const double sd = std::sqrt(dt);
    y1 += v * dt + sd * rng.normal();
    y2 += sd * rng.normal();
    y3 += sd * rng.normal();
    const double wn = std::sqrt(y1 * y1 + y2 * y2 + y3 * y3);
    if (wn >= level) {
      const double theta = (level - w) / (wn - w);
      return integral + 0.5 * theta * dt * (f + std::exp(sg * level));
    }
    const double fn = std::exp(sg * wn);
    integral += 0.5 * dt * (f + fn);
    w = wn;
    f = fn;
  }
  throw ResampleSignal("sample_wup_hitting_functionals: step budget exhausted before reaching level " +
                       std::to_string(level));
}

double sample_wup_at(double kappa, double s, const BesselSimConfig& cfg, Rng& rng) {
  check_kappa(kappa, "sample_wup_at");
  const double v = 0.5 * kappa;
  const auto n = static_cast<std::uint64_t>(std::ceil(s / cfg.dt_b - 1e-9));
  const double dt = s / static_cast<double>(n);
  const double sd = std::sqrt(dt);
  double y1 = 0.0, y2 = 0.0, y3 = 0.0;
  for (std::uint64_t k = 0; k < n; ++k) {
    y1 += v * dt + sd * rng.normal();
    y2 += sd * rng.normal();
    y3 += sd * rng.normal();
  }
  return std::sqrt(y1 * y1 + y2 * y2 + y3 * y3);
}

double sample_r_kappa(double kappa, const BesselSimConfig& cfg, Rng& rng) {
  const double a = sample_wup_hitting_functionals(kappa, cfg.L_cut, Sign::minus, cfg, rng);
  const double b = sample_wup_hitting_functionals(kappa, cfg.L_cut, Sign::minus, cfg, rng);
  return a + b;
}

double r_kappa_truncation_bound(double kappa, double L_cut) {
  return 4.0 / kappa * std::exp(-kappa * L_cut) / (1.0 - kappa);
}

double sample_g_plus(double kappa, double a, double b, const BesselSimConfig& cfg, Rng& rng) {
  check_kappa(kappa, "sample_g_plus");
  if (!(a < b)) throw std::invalid_argument("sample_g_plus: need a < b");
  const double v = 0.5 * kappa;
  double z = b;
  double top = b;
  double f = std::exp(b);
  double integral = 0.0;
  for (std::uint64_t k = 0; k < cfg.max_steps; ++k) {
    const double dt = step_size(cfg, top - z);
    const double zn = z - v * dt + std::sqrt(dt) * rng.normal();
    if (zn <= a) {
      const double theta = (z - a) / (z - zn);
      return integral + 0.5 * theta * dt * (f + std::exp(a));
    }
    const double fn = std::exp(zn);
    integral += 0.5 * dt * (f + fn);
    z = zn;
    f = fn;
    top = std::max(top, z);
  }
  throw ResampleSignal("sample_g_plus: step budget exhausted");
}

namespace {

template <class F>
double with_resample(const RngStream& s, F&& f) {
  for (std::uint64_t attempt = 0; attempt < 16; ++attempt) {
    Rng rng(s.child(attempt));
    try {
      return f(rng);
    } catch (const ResampleSignal&) {
    }
  }
  throw ResampleSignal("renewal draw: 16 consecutive resamples");
}

}  // namespace

RenewalDraw sample_renewal_draw(double kappa, double h_t, const BesselSimConfig& cfg, const RngStream& stream) {
  check_kappa(kappa, "sample_renewal_draw");
  if (!(h_t > 0.0)) throw std::invalid_argument("sample_renewal_draw: h_t must be > 0");
  cfg.validate();
  RenewalDraw d;
  const double f_plus = with_resample(stream.child(0), [&](Rng& r) {
    return sample_wup_hitting_functionals(kappa, h_t, Sign::plus, cfg, r);
  });
  const double g_plus = with_resample(stream.child(1), [&](Rng& r) {
    return sample_g_plus(kappa, 0.5 * h_t, h_t, cfg, r);
  });
  const double f_minus_1 = with_resample(stream.child(2), [&](Rng& r) {
    return sample_wup_hitting_functionals(kappa, 0.5 * h_t, Sign::minus, cfg, r);
  });
  const double f_minus_2 = with_resample(stream.child(3), [&](Rng& r) {
    return sample_wup_hitting_functionals(kappa, 0.5 * h_t, Sign::minus, cfg, r);
  });
  Rng er(stream.child(4));
  d.S = f_plus + g_plus;
  d.R = f_minus_1 + f_minus_2;
  d.e = er.exponential(2.0);
  d.ell = d.e * d.S;
  d.H = d.ell * d.R;
  return d;
}

std::vector<RenewalDraw> sample_renewal_batch(double kappa, double h_t, std::size_t n,
                                              const BesselSimConfig& cfg, const RngStream& stream) {
  std::vector<RenewalDraw> out(n);
  parallel_for(n, [&](std::size_t i) { out[i] = sample_renewal_draw(kappa, h_t, cfg, stream.child(i)); });
  return out;
}

std::vector<double> sample_r_kappa_batch(double kappa, std::size_t n, const BesselSimConfig& cfg,
                                         const RngStream& stream) {
  cfg.validate();
  std::vector<double> out(n);
  parallel_for(n, [&](std::size_t i) {
    out[i] = with_resample(stream.child(i), [&](Rng& r) { return sample_r_kappa(kappa, cfg, r); });
  });
  return out;
}

TailCheck tail_constant_check(std::span<const RenewalDraw> draws, double kappa, double t, double phi,
                              std::span<const double> x_grid, std::span<const double> rkappa_samples) {
  if (draws.empty()) throw std::invalid_argument("tail_constant_check: empty draw list");
  TailCheck out;
  out.kappa = kappa;
  out.t = t;
  out.phi = phi;
  out.ell_target = std::pow(4.0, kappa);
  if (!rkappa_samples.empty()) {
    double m = 0.0;
    for (double r : rkappa_samples) m += std::pow(r, kappa);
    out.H_target = out.ell_target * m / static_cast<double>(rkappa_samples.size());
  }
  std::vector<double> ell, H;
  ell.reserve(draws.size());
  H.reserve(draws.size());
  for (const auto& d : draws) {
    ell.push_back(d.ell / t);
    H.push_back(d.H / t);
  }
  std::sort(ell.begin(), ell.end());
  std::sort(H.begin(), H.end());
  const double n = static_cast<double>(draws.size());
  const double scale_phi = std::exp(kappa * phi);
  for (double x : x_grid) {
    TailRow row;
    row.x = x;
    const double scale = std::pow(x, kappa) * scale_phi;
    row.ell_count = static_cast<std::size_t>(ell.end() - std::upper_bound(ell.begin(), ell.end(), x));
    row.H_count = static_cast<std::size_t>(H.end() - std::upper_bound(H.begin(), H.end(), x));
    const double pe = static_cast<double>(row.ell_count) / n;
    const double ph = static_cast<double>(row.H_count) / n;
    row.ell_scaled = scale * pe;
    row.ell_se = scale * std::sqrt(pe * (1.0 - pe) / n);
    row.H_scaled = scale * ph;
    row.H_se = scale * std::sqrt(ph * (1.0 - ph) / n);
    out.rows.push_back(row);
  }
  return out;
}

void write_draws_csv(std::span<const RenewalDraw> draws, std::ostream& os) {
  CsvWriter w(os, {"S", "R", "e", "ell", "H"});
  for (const auto& d : draws) {
    w << d.S << d.R << d.e << d.ell << d.H;
    w.end_row();
  }
}

std::vector<RenewalDraw> read_draws_csv(std::istream& is) {
  const CsvTable t = read_csv(is);
  const auto S = t.numeric_column("S");
  const auto R = t.numeric_column("R");
  const auto e = t.numeric_column("e");
  const auto ell = t.numeric_column("ell");
  const auto H = t.numeric_column("H");
  std::vector<RenewalDraw> out(S.size());
  for (std::size_t i = 0; i < S.size(); ++i) out[i] = {S[i], R[i], e[i], ell[i], H[i]};
  return out;
}

}  // namespace dre
