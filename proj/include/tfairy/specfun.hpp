#ifndef TFAIRY_SPECFUN_HPP
#define TFAIRY_SPECFUN_HPP

#include <complex>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "tfairy/common.hpp"

namespace tfairy::specfun {

/// Arguments of the Wright function phi(lambda, mu; z).
/// The series requires lambda > -1; the dispersive kernels use
/// lambda = -alpha/3 in (-1/3, 0).
struct WrightArgs {
  double lambda;
  double mu;
  std::complex<double> z;
};

/// Gamma function. Throws std::domain_error at the poles x = 0, -1, -2, ...
double gamma_fn(double x);

/// 1/Gamma(x) with the removable zeros at the poles: returns exactly 0 for
/// x in {0, -1, -2, ...}. Safe for all real x (reflection-based for x <= 0.5).
double reciprocal_gamma(double x);

/// sin(pi*x) with exact argument reduction (exactly 0 at integers).
double sin_pi(double x);

/// Exponential decay envelope for |phi(-lambda0, mu; z)| in the sector
/// (1+lambda0)/2*pi < |arg z| <= pi, of the form C*exp(-nu*|z|^{1/(1-lambda0)}).
/// Returns nullopt when z lies outside the sector. The constant C is
/// calibrated empirically (validated against the series on a sweep); the
/// envelope is conservative but not proof-carrying.
std::optional<double> decay_envelope(double lambda0, double mu, std::complex<double> z);

/// Same as decay_envelope but throwing on sector violation; args.lambda must
/// be negative (lambda = -lambda0 with lambda0 in (0,1)).
double wright_tail_bound(const WrightArgs& args);

/// Coefficient table for phi(lambda, mu; z) = sum_n z^n / (n! Gamma(lambda*n + mu))
/// at fixed (lambda, mu). Terms whose Gamma argument hits a pole are zero.
/// Evaluation sums the series with a majorant-certified truncation and
/// escalates the working precision when the a-posteriori roundoff estimate
/// does not meet the requested accuracy.
class WrightSeries {
 public:
  WrightSeries(double lambda, double mu, int max_terms = 400);

  std::complex<double> eval(std::complex<double> z, const AccuracySpec& acc) const;

  double lambda() const { return lambda_; }
  double mu() const { return mu_; }

  /// Process-wide cache (thread-safe); tables are immutable once built.
  static std::shared_ptr<const WrightSeries> get(double lambda, double mu);

 private:
  double lambda_;
  double mu_;
  std::vector<double> coeff_;      // a_n = rgamma(lambda n + mu) / n!
  std::vector<double> maj_log_;    // log of a monotone-safe majorant of |a_n|
#if defined(__SIZEOF_FLOAT128__)
  std::vector<__float128> coeff_q_;
  // Deepest tier: double-double coefficients, built lazily on first use.
  struct HighPrecTable;
  const HighPrecTable& high_prec_table() const;
  mutable std::shared_ptr<const HighPrecTable> dd_table_;
  mutable std::once_flag dd_once_;
#endif
};

/// phi(lambda, mu; z). Uses the decay envelope as a shortcut when it already
/// certifies |phi| < acc.abs_tol; otherwise sums the Taylor series.
std::complex<double> wright(const WrightArgs& args, const AccuracySpec& acc = {});

struct IntegralIdentity {
  std::complex<double> numeric;
  std::complex<double> analytic;
};

/// Quadrature of int_0^inf phi(-lambda, mu; a z) dz against the closed form
/// -1/(a*Gamma(mu+lambda)); a must lie on a ray where the integrand decays
/// (|arg a| > (1+lambda)/2*pi). Built-in self test for the kernel algebra.
IntegralIdentity wright_integral_identity(double lambda, double mu,
                                          std::complex<double> a,
                                          const AccuracySpec& acc = {});

/// Mittag-Leffler function E_{alpha,beta}(z) for real z, alpha > 0.
double mittag_leffler(double alpha, double beta, double z,
                      const AccuracySpec& acc = {});

}  // namespace tfairy::specfun

#endif
