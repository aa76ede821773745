#ifndef DRE_RENEWAL_HPP
#define DRE_RENEWAL_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "dre/rng.hpp"

namespace dre {

/// A sampled path ran past its step budget; draw again from a fresh stream.
class ResampleSignal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Time stepping for the Bessel-type integrals.
///
/// With `adaptive` set, the step at a point where the integrand exponent is E
/// is dt_b * exp(2 (E_ref - E)), capped at dt_max, where E_ref is the largest
/// exponent the integral can reach (the target level for e^{+W}, zero for
/// e^{-W}, the running maximum for G+). The integrand's contribution shrinks by
/// the same exponential, so the absolute error per unit time stays at the
/// dt_b level. Without it, every step is dt_b.
struct BesselSimConfig {
  double dt_b = 1e-4;
  double L_cut = 30.0;
  double h = 10.0;
  bool adaptive = true;
  double dt_max = 1.0;
  std::uint64_t max_steps = 200'000'000;

  void validate() const;
};

enum class Sign { plus = 1, minus = -1 };

/// F^{+-}(level) = int_0^{tau(level)} exp(+-W_up(s)) ds, with W_up the norm of a
/// 3-d Brownian motion with drift kappa/2 along one axis. Trapezoid rule on the
/// skeleton; the last step is cut at the linear crossing of `level`.
double sample_wup_hitting_functionals(double kappa, double level, Sign sign, const BesselSimConfig& cfg,
                                      Rng& rng);

/// W_up(s) at a fixed time s, stepped with dt_b.
double sample_wup_at(double kappa, double s, const BesselSimConfig& cfg, Rng& rng);

/// R_kappa truncated at L_cut: two independent F^-(L_cut).
double sample_r_kappa(double kappa, const BesselSimConfig& cfg, Rng& rng);

/// Upper bound on E[R_kappa] - E[truncated R_kappa]: the occupation density of
/// W_up below L_cut after reaching it is at most (2/kappa) e^{-kappa (L_cut - y)},
/// which integrates against e^{-y} to (4/kappa) e^{-kappa L_cut}/(1-kappa) for
/// both halves.
double r_kappa_truncation_bound(double kappa, double L_cut);

/// G^+(a, b): int exp(Z) up to the first passage of Z at a, for Z a Brownian
/// motion with drift -kappa/2 started at b > a.
double sample_g_plus(double kappa, double a, double b, const BesselSimConfig& cfg, Rng& rng);

struct RenewalDraw {
  double S = 0.0;
  double R = 0.0;
  double e = 0.0;
  double ell = 0.0;  // e S
  double H = 0.0;    // ell R
};

/// S = F^+(h_t) + G^+(h_t/2, h_t), R = F^-(h_t/2) + F^-(h_t/2), e ~ Exp(mean 2).
/// Each of the five constituents uses its own child stream; a ResampleSignal
/// on one constituent redraws only that constituent from the next child.
RenewalDraw sample_renewal_draw(double kappa, double h_t, const BesselSimConfig& cfg,
                                const RngStream& stream);

/// n draws, draw i from stream.child(i); parallel over DRE_WORKERS.
std::vector<RenewalDraw> sample_renewal_batch(double kappa, double h_t, std::size_t n,
                                              const BesselSimConfig& cfg, const RngStream& stream);

/// n truncated R_kappa samples, sample i from stream.child(i).
std::vector<double> sample_r_kappa_batch(double kappa, std::size_t n, const BesselSimConfig& cfg,
                                         const RngStream& stream);

struct TailRow {
  double x = 0.0;
  double ell_scaled = 0.0;  // x^k e^{k phi} P(ell/t > x)
  double ell_se = 0.0;
  std::size_t ell_count = 0;
  double H_scaled = 0.0;  // x^k e^{k phi} P(H/t > x)
  double H_se = 0.0;
  std::size_t H_count = 0;
};

struct TailCheck {
  double kappa = 0.0;
  double t = 0.0;
  double phi = 0.0;
  double ell_target = 0.0;  // 4^kappa
  double H_target = 0.0;    // 4^kappa * E[R_kappa^kappa]
  std::vector<TailRow> rows;
};

/// Scaled empirical tails of ell/t and H/t at t = exp(h_t + phi). The H target
/// uses the supplied R_kappa sample for E[R_kappa^kappa].
TailCheck tail_constant_check(std::span<const RenewalDraw> draws, double kappa, double t, double phi,
                              std::span<const double> x_grid, std::span<const double> rkappa_samples);

void write_draws_csv(std::span<const RenewalDraw> draws, std::ostream& os);
std::vector<RenewalDraw> read_draws_csv(std::istream& is);

}  // namespace dre

#endif  // DRE_RENEWAL_HPP
