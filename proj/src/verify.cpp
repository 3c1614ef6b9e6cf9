#include "tfairy/verify.hpp"

#include <cmath>
#include <stdexcept>

namespace tfairy::verify {

namespace {

// Fornberg weights for the m-th derivative at z from nodes x[0..n-1].
std::vector<double> fd_weights(double z, const std::vector<double>& x, int m) {
  const int n = static_cast<int>(x.size());
  std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0;
  double c4 = x[0] - z;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int s = mn; s >= 1; --s)
          c[i][s] = c1 * (s * c[i - 1][s - 1] - c5 * c[i - 1][s]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int s = mn; s >= 1; --s)
        c[j][s] = (c4 * c[j][s] - s * c[j][s - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = c[i][m];
  return w;
}

// Derivative of order m at grid index i from `pts` symmetric/one-sided nodes.
double fd_apply(const Eigen::MatrixXd& u, const Eigen::VectorXd& x, int i,
                int node, int m, int i_lo, int i_hi) {
  std::vector<double> xs;
  xs.reserve(i_hi - i_lo + 1);
  for (int q = i_lo; q <= i_hi; ++q) xs.push_back(x(q));
  const auto w = fd_weights(x(i), xs, m);
  double s = 0.0;
  for (int q = i_lo; q <= i_hi; ++q) s += w[q - i_lo] * u(q, node);
  return s;
}

}  // namespace

void SolutionField::check_shapes() const {
  if (static_cast<int>(x.size()) != g.n_bonds() ||
      static_cast<int>(u.size()) != g.n_bonds())
    throw std::invalid_argument("SolutionField: per-bond containers mismatch");
  for (int j = 0; j < g.n_bonds(); ++j) {
    if (u[j].rows() != x[j].size() || u[j].cols() != tgrid.n_nodes())
      throw std::invalid_argument("SolutionField: grid/value shape mismatch");
    if (!u[j].allFinite())
      throw std::invalid_argument("SolutionField: non-finite values");
  }
}

double pde_residual(const SolutionField& field,
                    const std::vector<std::function<double(double, double)>>& f,
                    double skip_time) {
  field.check_shapes();
  const int skip_t = 3, skip_x = 3;
  const auto& tg = field.tgrid;
  if (tg.n_nodes() <= skip_t + 1)
    throw std::invalid_argument("pde_residual: time grid too coarse");
  double worst = 0.0;
  for (int j = 0; j < field.g.n_bonds(); ++j) {
    const auto& u = field.u[j];
    const auto& xs = field.x[j];
    const int nx = static_cast<int>(xs.size());
    if (nx < 2 * skip_x + 7)
      throw std::invalid_argument("pde_residual: space grid too coarse");
    for (int i = skip_x; i < nx - skip_x; ++i) {
      if (i - 3 < 0 || i + 3 >= nx) continue;
      fraccalc::TraceGrid row(tg, 1);
      for (int n = 0; n < tg.n_nodes(); ++n) row.at(n) = u(i, n);
      const auto dt = fraccalc::caputo_derivative(row, field.alpha);
      for (int n = skip_t; n < tg.n_nodes(); ++n) {
        if (tg.node(n) < skip_time) continue;
        const double uxxx = fd_apply(u, xs, i, n, 3, i - 3, i + 3);
        const double src = f.empty() ? 0.0 : f[j](xs(i), tg.node(n));
        worst = std::max(worst, std::fabs(dt.at(n) - uxxx - src));
      }
    }
  }
  return worst;
}

VertexResiduals vertex_residuals(const SolutionField& field,
                                 double skip_time) {
  field.check_shapes();
  const auto& g = field.g;
  VertexResiduals out;
  const int skip_t = 3;
  const int pts = 5;
  for (int n = skip_t; n < field.tgrid.n_nodes(); ++n) {
    if (field.tgrid.node(n) < skip_time) continue;
    // values at the vertex
    const auto uat = [&](int j) {
      return field.u[j](field.vertex_index(j), n);
    };
    for (int j = 1; j < g.n_bonds(); ++j)
      out.continuity =
          std::max(out.continuity, std::fabs(g.a(j) * uat(j) - uat(0)));

    auto deriv = [&](int j, int m) {
      const auto& xs = field.x[j];
      const int nx = static_cast<int>(xs.size());
      const int vi = field.vertex_index(j);
      const int lo = g.is_incoming(j) ? nx - pts : 0;
      const int hi = g.is_incoming(j) ? nx - 1 : pts - 1;
      return fd_apply(field.u[j], xs, vi, n, m, lo, hi);
    };
    for (int i = 0; i < g.m; ++i) {
      double s = deriv(g.k + i, 1);
      for (int q = 0; q < g.k; ++q) s -= g.B(i, q) * deriv(q, 1);
      out.derivative = std::max(out.derivative, std::fabs(s));
    }
    double flux = 0.0;
    for (int j = 0; j < g.n_bonds(); ++j)
      flux += deriv(j, 2) / g.a(j) * (g.is_incoming(j) ? 1.0 : -1.0);
    out.flux = std::max(out.flux, std::fabs(flux));
  }
  return out;
}

BoundaryResiduals boundary_residuals(const SolutionField& field,
                                     const fraccalc::TraceGrid& varphi,
                                     const fraccalc::TraceGrid& phi,
                                     double skip_time) {
  field.check_shapes();
  const auto& g = field.g;
  if (!g.finite())
    throw std::invalid_argument("boundary_residuals: IBVP field required");
  BoundaryResiduals out;
  const int skip_t = 3;
  const int pts = 5;
  for (int n = skip_t; n < field.tgrid.n_nodes(); ++n) {
    if (field.tgrid.node(n) < skip_time) continue;
    for (int j = 0; j < g.n_bonds(); ++j) {
      // Far endpoint is the non-vertex end of the bond grid.
      const int nx = static_cast<int>(field.x[j].size());
      const int bi = g.is_incoming(j) ? 0 : nx - 1;
      out.dirichlet = std::max(
          out.dirichlet, std::fabs(field.u[j](bi, n) - varphi.at(n, j)));
      if (g.is_incoming(j)) {
        const int lo = 0, hi = pts - 1;
        std::vector<double> xs;
        for (int q = lo; q <= hi; ++q) xs.push_back(field.x[j](q));
        const auto w = fd_weights(field.x[j](bi), xs, 1);
        double ux = 0.0;
        for (int q = lo; q <= hi; ++q) ux += w[q - lo] * field.u[j](q, n);
        out.neumann = std::max(out.neumann, std::fabs(ux - phi.at(n, j)));
      }
    }
  }
  return out;
}

double field_norm_sq(const SolutionField& field, int node) {
  double s = 0.0;
  for (int j = 0; j < field.g.n_bonds(); ++j) {
    const auto& xs = field.x[j];
    const auto& u = field.u[j];
    for (int i = 0; i + 1 < xs.size(); ++i)
      s += 0.5 * (xs(i + 1) - xs(i)) *
           (u(i, node) * u(i, node) + u(i + 1, node) * u(i + 1, node));
  }
  return s;
}

double energy_check(const SolutionField& field, const graph::ProblemData& data) {
  field.check_shapes();
  // ||f(.,t)||_0^2 sampled on the field grids.
  fraccalc::TraceGrid fnorm(field.tgrid, 1);
  if (!data.f_is_zero) {
    for (int n = 0; n < field.tgrid.n_nodes(); ++n) {
      double s = 0.0;
      for (int j = 0; j < field.g.n_bonds(); ++j) {
        const auto& xs = field.x[j];
        for (int i = 0; i + 1 < xs.size(); ++i) {
          const double fa = data.f[j](xs(i), field.tgrid.node(n));
          const double fb = data.f[j](xs(i + 1), field.tgrid.node(n));
          s += 0.5 * (xs(i + 1) - xs(i)) * (fa * fa + fb * fb);
        }
      }
      fnorm.at(n) = s;
    }
  }
  double u0_norm = 0.0;
  for (int j = 0; j < field.g.n_bonds(); ++j) {
    const auto& xs = field.x[j];
    for (int i = 0; i + 1 < xs.size(); ++i) {
      const double fa = data.u0[j](xs(i));
      const double fb = data.u0[j](xs(i + 1));
      u0_norm += 0.5 * (xs(i + 1) - xs(i)) * (fa * fa + fb * fb);
    }
  }
  double margin = std::numeric_limits<double>::infinity();
  for (int n = 1; n < field.tgrid.n_nodes(); ++n) {
    const double rhs = fraccalc::apriori_rhs(u0_norm, fnorm, field.alpha,
                                             field.tgrid.node(n));
    margin = std::min(margin, rhs - field_norm_sq(field, n));
  }
  return margin;
}

ConvergenceTable convergence_study(
    const std::function<ConvergenceRow(int level)>& residual_at_level,
    int levels) {
  if (levels < 3)
    throw std::invalid_argument("convergence_study: at least 3 levels");
  ConvergenceTable t;
  for (int l = 0; l < levels; ++l) t.rows.push_back(residual_at_level(l));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& r : t.rows) {
    if (!(r.residual > 0.0)) continue;
    const double lx = std::log(r.dt), ly = std::log(r.residual);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  t.fitted_order = n >= 2 ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : 0.0;
  for (std::size_t i = 1; i < t.rows.size(); ++i)
    if (t.rows[i].residual > t.rows[i - 1].residual) t.monotone = false;
  return t;
}

}  // namespace tfairy::verify
