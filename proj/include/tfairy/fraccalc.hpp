#ifndef TFAIRY_FRACCALC_HPP
#define TFAIRY_FRACCALC_HPP

#include <functional>
#include <vector>

#include "tfairy/common.hpp"

namespace tfairy::fraccalc {

/// Uniform time mesh on [0, t_end]; node 0 is t = 0.
class TimeGrid {
 public:
  TimeGrid(double t_end, int n_steps);

  double t_end() const { return t_end_; }
  int n_steps() const { return n_steps_; }
  int n_nodes() const { return n_steps_ + 1; }
  double dt() const { return t_end_ / n_steps_; }
  double node(int i) const { return t_end_ * i / n_steps_; }

  /// Index of the node nearest to t; throws when t is not grid-aligned.
  int index_of(double t, double tol_rel = 1e-9) const;

  bool operator==(const TimeGrid& o) const {
    return t_end_ == o.t_end_ && n_steps_ == o.n_steps_;
  }

 private:
  double t_end_;
  int n_steps_;
};

/// Samples of a (possibly vector-valued) function of time on a TimeGrid.
class TraceGrid {
 public:
  TraceGrid(TimeGrid grid, int dim = 1);

  static TraceGrid sample(const TimeGrid& g,
                          const std::function<double(double)>& f);

  const TimeGrid& grid() const { return grid_; }
  int dim() const { return dim_; }

  double& at(int node, int comp = 0) { return v_[idx(node, comp)]; }
  double at(int node, int comp = 0) const { return v_[idx(node, comp)]; }

  /// Linear interpolation in t (components independently).
  double interp(double t, int comp = 0) const;

  void check_finite() const;

 private:
  std::size_t idx(int node, int comp) const;
  TimeGrid grid_;
  int dim_;
  std::vector<double> v_;
};

/// L1 product-integration approximation of the Caputo derivative of order
/// alpha in (0,1). Node 0 carries 0 (empty integration interval).
TraceGrid caputo_derivative(const TraceGrid& f, double alpha);

/// Product-trapezoidal Riemann-Liouville integral J^alpha, alpha > 0, with
/// exact moments of the power kernel on each subinterval.
TraceGrid rl_integral(const TraceGrid& f, double alpha);

/// L1 Caputo derivative whose first `head` cells are re-integrated against
/// caller-supplied off-grid samples of f. Trace functions of fractional
/// problems start like t^alpha, where the piecewise-linear cell model cannot
/// be accurate at fixed node index; the sampler lets those cells be treated
/// exactly. head <= 0 picks max(8, n_steps/16).
TraceGrid caputo_derivative_refined(
    const TraceGrid& f, double alpha,
    const std::function<double(double t, int comp)>& sampler, int head = 0);

/// Which operator the a-priori bound applies to its source term. The printed
/// estimate uses a Caputo derivative of ||f||^2, which is dimensionally odd
/// inside a Gronwall bound; the fractional-integral form is the default.
enum class SourceTermForm { FractionalIntegral, CaputoDerivative };

/// Right-hand side of the energy estimate:
///   ||u0||^2 E_alpha(2 t^alpha) + Gamma(alpha) E_{alpha,alpha}(2 t^alpha) * (J^alpha ||f||^2)(t)
double apriori_rhs(double u0_norm_sq, const TraceGrid& f_norm_sq, double alpha,
                   double t,
                   SourceTermForm form = SourceTermForm::FractionalIntegral);

}  // namespace tfairy::fraccalc

#endif
