#ifndef DRE_SPECIALFN_HPP
#define DRE_SPECIALFN_HPP

#include <span>
#include <stdexcept>

namespace dre {

/// Raised when an argument lies outside a function's domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Series truncation: stop once |term| < abs_tol or after max_terms terms.
struct SeriesParams {
  int max_terms = 500;
  double abs_tol = 1e-14;

  void validate() const;
};

double gamma_fn(double x);

/// Modified Bessel function of the first kind, I_nu(x), by its power series.
double bessel_i(double nu, double x, const SeriesParams& p = {});

/// Laplace transform E[exp(-gamma R_kappa)] of the two-sided trapping
/// functional:
///   ((2 gamma)^{kappa/2} / (kappa Gamma(kappa) I_kappa(2 sqrt(2 gamma))))^2.
double rkappa_laplace(double kappa, double gamma, const SeriesParams& p = {});

/// sum_j (-u / c_kappa)^j / Gamma(kappa j + 1), the Laplace transform of the
/// Mittag-Leffler law of a stable subordinator's first passage over 1.
double mittag_leffler_laplace(double kappa, double u, double c_kappa,
                              const SeriesParams& p = {});

/// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction, using
/// the symmetry I_x(a,b) = 1 - I_{1-x}(b,a) beyond x = a/(a+b).
double incomplete_beta(double a, double b, double x);

/// Generalized arcsine CDF: sin(pi kappa)/pi * int_0^x u^{kappa-1}(1-u)^{-kappa} du.
double arcsine_cdf(double kappa, double x);

/// Monte Carlo value of the bivariate tail nu([x,inf) x [y,inf)) of the
/// two-dimensional stable Levy measure, expectations over R_kappa replaced by
/// averages over `rkappa_samples`.
double nu_tail(double kappa, double c2, double x, double y,
               std::span<const double> rkappa_samples);

}  // namespace dre

#endif  // DRE_SPECIALFN_HPP
