#include "tfairy/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "detail/gauss.hpp"
#include "tfairy/specfun.hpp"

namespace tfairy::potentials {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct KindInfo {
  fundsol::KernelKind kernel;
  int deriv;
};

KindInfo kind_info(LayerKernelKind k) {
  switch (k) {
    case LayerKernelKind::G:
      return {fundsol::KernelKind::G, 0};
    case LayerKernelKind::V:
      return {fundsol::KernelKind::V, 0};
    case LayerKernelKind::Gxx:
      return {fundsol::KernelKind::G, 2};
    default:
      return {fundsol::KernelKind::V, 2};
  }
}

// Kernel support window in xi for an evaluation point x: x - xi must fall in
// [t^{a/3} * yneg, t^{a/3} * ypos].
void kernel_window(const fundsol::KernelProfile& prof, double x, double t,
                   double& lo, double& hi) {
  const double s = std::pow(t, prof.sigma() / 3.0);
  lo = x - s * prof.support_pos();
  hi = x - s * prof.support_neg();
}

}  // namespace

BondDomain::BondDomain(double a_, double b_) : a(a_), b(b_) {
  if (!(a < b)) throw std::invalid_argument("BondDomain: a < b required");
}

bool BondDomain::infinite() const {
  return std::isinf(a) || std::isinf(b);
}

LagWeights product_lag_weights(const std::function<double(double)>& kernel,
                               const fraccalc::TimeGrid& grid,
                               double zero_below, double mass_exponent,
                               double scale) {
  const int n = grid.n_steps();
  const double dt = grid.dt();
  LagWeights w;
  w.near.assign(n + 1, 0.0);
  w.far.assign(n + 1, 0.0);

  const auto& rule = detail::gauss_rule(6);
  auto add_piece = [&](double sa, double sb, double lag_start, double& m0,
                       double& m1) {
    const double c = 0.5 * (sa + sb), h = 0.5 * (sb - sa);
    for (std::size_t q = 0; q < rule.node.size(); ++q) {
      const double s = c + h * rule.node[q];
      const double k = h * rule.weight[q] * kernel(s);
      m0 += k;
      m1 += k * (s - lag_start);
    }
  };

  for (int l = 1; l <= n; ++l) {
    const double sa = (l - 1) * dt, sb = l * dt;
    double m0 = 0.0, m1 = 0.0;
    if (l == 1) {
      double hi = dt;
      for (int j = 0; j < 220; ++j) {
        const double lo = hi * 0.5;
        add_piece(lo, hi, 0.0, m0, m1);
        hi = lo;
        if (hi < zero_below) break;
        if (mass_exponent > -1.0 &&
            scale * std::pow(hi, mass_exponent + 1.0) / (mass_exponent + 1.0) <
                1e-16 * (1.0 + std::fabs(m0)))
          break;
      }
    } else {
      const int splits = l <= 4 ? 4 : (l <= 16 ? 2 : 1);
      const double ww = (sb - sa) / splits;
      for (int j = 0; j < splits; ++j)
        add_piece(sa + j * ww, sa + (j + 1) * ww, sa, m0, m1);
    }
    w.far[l] = m1 / dt;
    w.near[l] = m0 - w.far[l];
  }
  return w;
}

LayerConvolver::LayerConvolver(
    std::shared_ptr<const fundsol::KernelProfile> profile, double xrel,
    const fraccalc::TimeGrid& grid)
    : grid_(grid) {
  const auto& prof = *profile;
  const double dt = grid.dt();
  const double beta = prof.time_exponent();
  const double a3 = prof.sigma() / 3.0;
  const bool xx_kind = prof.mu_eff() <= 0.0;

  // xrel == 0 is allowed: the convolver then uses the one-sided limit value
  // of the profile at the anchor (the continuous trace for value kernels).
  if (prof.kind() == fundsol::KernelKind::V && xrel < 0.0)
    throw std::domain_error("LayerConvolver: V kernel requires x >= anchor");

  if (xrel == 0.0) {
    // Constant profile at the anchor: closed-form moments on every lag; the
    // xx kernels vanish identically there.
    const int n = grid.n_steps();
    w_near_.assign(n + 1, 0.0);
    w_far_.assign(n + 1, 0.0);
    if (!xx_kind) {
      const double p0 = prof.profile(0.0);
      const double bp = beta + 1.0;
      for (int l = 1; l <= n; ++l) {
        const double sa = (l - 1) * dt, sb = l * dt;
        const double i0 = p0 * (std::pow(sb, bp) - std::pow(sa, bp)) / bp;
        const double i1 =
            p0 * (std::pow(sb, bp + 1.0) - std::pow(sa, bp + 1.0)) / (bp + 1.0);
        w_far_[l] = (i1 - sa * i0) / dt;
        w_near_[l] = i0 - w_far_[l];
      }
    }
    return;
  }

  auto kernel = [&prof, xrel, beta, a3](double s) {
    const double p = prof.profile(xrel * std::pow(s, -a3));
    if (p == 0.0) return 0.0;
    return std::pow(s, beta) * p;
  };
  const double s_zero = std::pow(
      std::fabs(xrel) / std::max(prof.support_pos(), -prof.support_neg()),
      3.0 / prof.sigma());
  LagWeights w = product_lag_weights(kernel, grid, s_zero,
                                     xx_kind ? -2.0 : beta, prof.scale());
  w_near_ = std::move(w.near);
  w_far_ = std::move(w.far);
}

double LayerConvolver::eval(const fraccalc::TraceGrid& rho, int comp,
                            int node) const {
  if (!(rho.grid() == grid_))
    throw std::invalid_argument("LayerConvolver: density grid mismatch");
  double s = 0.0;
  for (int l = 1; l <= node; ++l)
    s += w_near_[l] * rho.at(node - l + 1, comp) +
         w_far_[l] * rho.at(node - l, comp);
  return s;
}

std::vector<double> LayerConvolver::eval_all(const fraccalc::TraceGrid& rho,
                                             int comp) const {
  std::vector<double> out(grid_.n_nodes(), 0.0);
  for (int i = 1; i < grid_.n_nodes(); ++i) out[i] = eval(rho, comp, i);
  return out;
}

double layer_potential(LayerKernelKind kind, const fraccalc::TraceGrid& density,
                       int comp, double anchor, double x, double t,
                       double alpha) {
  const KindInfo ki = kind_info(kind);
  const double xrel = x - anchor;
  if ((kind == LayerKernelKind::V || kind == LayerKernelKind::Vxx) &&
      !(xrel > 0.0))
    throw std::domain_error("layer_potential: V kernels require x > anchor");
  if (ki.deriv == 2 && xrel == 0.0)
    throw std::domain_error(
        "layer_potential: second-derivative kernels are discontinuous at the "
        "anchor; use potential_trace");
  const int node = density.grid().index_of(t);
  auto prof =
      fundsol::KernelProfile::get(ki.kernel, alpha, 2.0 * alpha / 3.0, ki.deriv);
  LayerConvolver conv(prof, xrel, density.grid());
  return conv.eval(density, comp, node);
}

double potential_trace(LayerKernelKind kind, const fraccalc::TraceGrid& density,
                       int comp, Side side, double t, double alpha) {
  const int node = density.grid().index_of(t);
  switch (kind) {
    case LayerKernelKind::G:
    case LayerKernelKind::V: {
      if (kind == LayerKernelKind::V && side == Side::Left)
        throw std::domain_error("potential_trace: V has no x < anchor limit");
      // Continuous traces reduce to fractional integrals of the density.
      fraccalc::TraceGrid comp_grid(density.grid(), 1);
      for (int i = 0; i < density.grid().n_nodes(); ++i)
        comp_grid.at(i) = density.at(i, comp);
      const auto j = fraccalc::rl_integral(comp_grid, 2.0 * alpha / 3.0);
      const double c = kind == LayerKernelKind::G
                           ? 1.0 / 3.0
                           : std::sqrt(3.0) / 6.0;
      return c * j.at(node);
    }
    case LayerKernelKind::Gxx:
      // Analytic one-sided jumps; the remainder kernel vanishes identically
      // at the anchor.
      return (side == Side::Left ? 1.0 / 3.0 : -2.0 / 3.0) *
             density.at(node, comp);
    default:
      if (side == Side::Left)
        throw std::domain_error("potential_trace: Vxx has no x < anchor limit");
      return 0.0;
  }
}

namespace {

// Composite Gauss over [lo, hi] with panel width resolving the kernel's
// similarity scale t^{alpha/3}.
template <class F>
double space_quadrature(F&& f, double lo, double hi, double tscale,
                        int panels_per_unit) {
  if (!(hi > lo)) return 0.0;
  const double len = hi - lo;
  int panels = static_cast<int>(std::ceil(len / (0.5 * tscale)));
  if (panels_per_unit > 0)
    panels = std::max<int>(panels, static_cast<int>(std::ceil(len * panels_per_unit)));
  panels = std::clamp(panels, 8, 6000);
  return detail::gauss_integrate_panels(f, lo, hi, panels, 8);
}

}  // namespace

double initial_potential(const std::function<double(double)>& u0,
                         const BondDomain& dom, double x, double t,
                         double alpha, bool with_frac_derivative, int deriv,
                         int panels_per_unit) {
  if (!(t > 0.0)) throw std::domain_error("initial_potential: t > 0 required");
  const double mu = with_frac_derivative ? 1.0 - alpha / 3.0 : 2.0 * alpha / 3.0;
  auto prof = fundsol::KernelProfile::get(fundsol::KernelKind::G, alpha, mu, deriv);
  double lo, hi;
  kernel_window(*prof, x, t, lo, hi);
  lo = std::max(lo, dom.a);
  hi = std::min(hi, dom.b);
  if (!(hi > lo)) return 0.0;
  const double tp = std::pow(t, prof->time_exponent());
  const double ts = std::pow(t, prof->sigma() / 3.0);
  auto f = [&](double xi) { return prof->profile((x - xi) / ts) * u0(xi); };
  return tp * space_quadrature(f, lo, hi, ts, panels_per_unit);
}

double volume_potential(const std::function<double(double, double)>& f,
                        const BondDomain& dom, double x, double t, double alpha,
                        const fraccalc::TimeGrid& tgrid, int deriv,
                        int space_refine) {
  const int node = tgrid.index_of(t);
  if (node == 0) return 0.0;
  auto prof = fundsol::KernelProfile::get(fundsol::KernelKind::G, alpha,
                                          2.0 * alpha / 3.0, deriv);
  const double beta = prof->time_exponent();
  const double a3 = alpha / 3.0;

  // Inner space integral at elapsed time s and source time tau.
  auto inner = [&](double s, double tau) {
    const double ts = std::pow(s, a3);
    double lo, hi;
    kernel_window(*prof, x, s, lo, hi);
    lo = std::max(lo, dom.a);
    hi = std::min(hi, dom.b);
    if (!(hi > lo)) return 0.0;
    auto g = [&](double xi) { return prof->profile((x - xi) / ts) * f(xi, tau); };
    return std::pow(s, beta) *
           space_quadrature(g, lo, hi, ts, 4 * space_refine);
  };

  const double dt = tgrid.dt();
  const auto& rule = detail::gauss_rule(4);
  double total = 0.0;
  auto add_piece = [&](double sa, double sb) {
    const double c = 0.5 * (sa + sb), h = 0.5 * (sb - sa);
    for (std::size_t q = 0; q < rule.node.size(); ++q) {
      const double s = c + h * rule.node[q];
      total += h * rule.weight[q] * inner(s, t - s);
    }
  };

  for (int l = 2; l <= node; ++l) {
    const double sa = (l - 1) * dt, sb = l * dt;
    const int splits = l <= 4 ? 2 : 1;
    const double w = (sb - sa) / splits;
    for (int j = 0; j < splits; ++j) add_piece(sa + j * w, sa + (j + 1) * w);
  }
  // First lag: dyadic refinement plus a power-law closure of the remainder
  // (the integrand behaves like s^{beta + alpha/3} near s = 0).
  double hi_s = dt;
  const double gamma = beta + a3;
  for (int j = 0; j < 24; ++j) {
    const double lo_s = 0.5 * hi_s;
    add_piece(lo_s, hi_s);
    hi_s = lo_s;
  }
  total += inner(hi_s, t - hi_s) * hi_s / (gamma + 1.0);
  return total;
}

}  // namespace tfairy::potentials
