#ifndef TFAIRY_FUNDSOL_HPP
#define TFAIRY_FUNDSOL_HPP

#include <complex>
#include <memory>
#include <utility>
#include <vector>

#include "tfairy/common.hpp"
#include "tfairy/fraccalc.hpp"

namespace tfairy::fundsol {

/// Index pair of the fundamental-solution family: sigma is the equation's
/// fractional order in (0,1), mu the kernel superscript.
struct FundOrder {
  double sigma;
  double mu;
};

struct KernelPoint {
  double x;
  double t;  // strictly positive
};

enum class KernelKind { G, V };

/// G_sigma^mu(x,t). Two-branch Wright form; at x = 0 both branches share the
/// limit t^{mu-1}/(3 Gamma(mu)).
double eval_G(const FundOrder& order, const KernelPoint& p,
              const AccuracySpec& acc = {});

/// Second fundamental solution V_sigma^mu(x,t), defined for x > 0 only.
double eval_V(const FundOrder& order, const KernelPoint& p,
              const AccuracySpec& acc = {});

/// r-th spatial derivative (r in {1,2}), computed analytically through the
/// Wright derivative identity (order shift mu -> mu - r sigma/3 plus branch
/// phase factors). At x = 0 the r = 2 kernels are one-sided; the x < 0 limit
/// is returned there.
double eval_G_dx(const FundOrder& order, const KernelPoint& p, int r,
                 const AccuracySpec& acc = {});

/// Same for V (x > 0 only).
double eval_V_dx(const FundOrder& order, const KernelPoint& p, int r,
                 const AccuracySpec& acc = {});

/// Discrete check of the order-shift relation D^nu_t G_sigma^mu = G_sigma^{mu-nu}
/// at fixed x != 0: lhs is the L1 Caputo derivative (or fractional integral for
/// nu < 0) of the time samples, rhs the directly evaluated shifted kernel.
std::pair<fraccalc::TraceGrid, fraccalc::TraceGrid> order_shift_check(
    const FundOrder& order, double nu, double x, const fraccalc::TimeGrid& g,
    const AccuracySpec& acc = {});

/// Scaled profile p with d^r/dx^r Kernel(x,t) = t^{mu - r sigma/3 - 1} p(x t^{-sigma/3}).
/// Exact evaluation (series with escalating precision; saddle-point far zone).
double kernel_profile_exact(KernelKind kind, double sigma, double mu, int r,
                            double y, double abs_floor = 1e-15,
                            double rel_goal = 1e-10);

/// Leading-plus-first-correction saddle-point approximation of
/// phi(-lambda0, mu; z) in the decay sector; rel_est receives a conservative
/// relative-error estimate. Used for the far zone where the Taylor series is
/// out of reach.
std::complex<double> wright_far_zone(double lambda0, double mu,
                                     std::complex<double> z, double& rel_est);

/// Cubic-Hermite table of one profile, with certified-zero tails. This is the
/// hot-path evaluator behind the quadratures; it is consistency-checked
/// against the exact path in the tests.
class KernelProfile {
 public:
  KernelProfile(KernelKind kind, double sigma, double mu, int r);

  double profile(double y) const;
  double value(double x, double t) const;

  KernelKind kind() const { return kind_; }
  double sigma() const { return sigma_; }
  double mu_eff() const { return mu_eff_; }
  double time_exponent() const { return mu_eff_ - 1.0; }
  double support_pos() const { return ypos_; }
  double support_neg() const { return yneg_; }  // <= 0; 0 for V kernels
  double scale() const { return scale_; }       // max |profile| over the table

  /// Process-wide registry; safe under concurrent access.
  static std::shared_ptr<const KernelProfile> get(KernelKind kind, double sigma,
                                                  double mu, int r);

 private:
  KernelKind kind_;
  double sigma_, mu_, mu_eff_;
  int r_;
  double h_;
  std::vector<double> pv_, pd_;  // y >= 0 nodes: values, derivatives
  std::vector<double> nv_, nd_;  // y <= 0 nodes at y = -i h (G only)
  double ypos_ = 0.0, yneg_ = 0.0;
  double scale_ = 0.0;
};

}  // namespace tfairy::fundsol

#endif
