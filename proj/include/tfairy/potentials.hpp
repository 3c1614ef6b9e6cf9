#ifndef TFAIRY_POTENTIALS_HPP
#define TFAIRY_POTENTIALS_HPP

#include <functional>
#include <memory>
#include <vector>

#include "tfairy/common.hpp"
#include "tfairy/fraccalc.hpp"
#include "tfairy/fundsol.hpp"

namespace tfairy::potentials {

/// Kernel selector of the four layer potentials w1..w4.
enum class LayerKernelKind { G, V, Gxx, Vxx };

enum class Side { Left, Right };

/// Space interval of one bond; endpoints may be +-infinity on Cauchy bonds.
struct BondDomain {
  double a;
  double b;
  BondDomain(double a_, double b_);
  bool infinite() const;
};

/// Per-lag product-integration weights of a scalar kernel on a uniform grid:
/// near[l] multiplies rho_{n-l+1}, far[l] multiplies rho_{n-l}. The first lag
/// is refined dyadically toward s = 0 (kernels may spike far below the step);
/// refinement stops at `zero_below` (certified-zero radius, 0 disables) or
/// when the remaining mass bound scale*s^{mass_exponent+1} is negligible
/// (mass_exponent < -1 disables that test).
struct LagWeights {
  std::vector<double> near;
  std::vector<double> far;
};
LagWeights product_lag_weights(const std::function<double(double)>& kernel,
                               const fraccalc::TimeGrid& grid,
                               double zero_below, double mass_exponent,
                               double scale);

/// Product-integration convolution of one kernel against piecewise-linear
/// densities on a uniform grid: per-lag kernel moments are exact to quadrature
/// accuracy, with a dyadically refined first lag (the kernel may carry an
/// integrable endpoint singularity and an interior spike).
class LayerConvolver {
 public:
  LayerConvolver(std::shared_ptr<const fundsol::KernelProfile> profile,
                 double xrel, const fraccalc::TimeGrid& grid);

  /// Value at node n of int_0^{t_n} K(xrel, t_n - eta) rho(eta) d eta.
  double eval(const fraccalc::TraceGrid& rho, int comp, int node) const;
  std::vector<double> eval_all(const fraccalc::TraceGrid& rho, int comp) const;

  const fraccalc::TimeGrid& grid() const { return grid_; }

  /// Raw per-lag moment weights (the Volterra stepper assembles its weight
  /// matrices from these): lag l multiplies rho_{n-l+1} by near and rho_{n-l}
  /// by far.
  const std::vector<double>& lag_weight_near() const { return w_near_; }
  const std::vector<double>& lag_weight_far() const { return w_far_; }

 private:
  fraccalc::TimeGrid grid_;
  std::vector<double> w_near_, w_far_;  // per lag: weights of rho_{n-l+1}, rho_{n-l}
};

/// w1..w4 at a single point (x, t); t must be grid-aligned with the density.
double layer_potential(LayerKernelKind kind, const fraccalc::TraceGrid& density,
                       int comp, double anchor, double x, double t,
                       double alpha);

/// One-sided limit of the layer potential at the anchor: analytic jump
/// constants (1/3, -2/3, 0) plus the continuous remainder, never a naive
/// near-anchor evaluation.
double potential_trace(LayerKernelKind kind, const fraccalc::TraceGrid& density,
                       int comp, Side side, double t, double alpha);

/// w5-type potential of initial data u0 over dom, evaluated at (x, t); the
/// flag applies D^{alpha-1} in time (kernel order 1 - alpha/3), which is the
/// form whose t->0 limit recovers u0. deriv in {0,1,2} differentiates in x.
double initial_potential(const std::function<double(double)>& u0,
                         const BondDomain& dom, double x, double t,
                         double alpha, bool with_frac_derivative,
                         int deriv = 0, int panels_per_unit = 0);

/// Duhamel term w6 (and its x-derivatives) for a source f(x,t); t must be a
/// node of tgrid.
double volume_potential(const std::function<double(double, double)>& f,
                        const BondDomain& dom, double x, double t, double alpha,
                        const fraccalc::TimeGrid& tgrid, int deriv = 0,
                        int space_refine = 1);

}  // namespace tfairy::potentials

#endif
