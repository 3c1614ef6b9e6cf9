#include "tfairy/cauchy.hpp"

#include <cmath>
#include <map>
#include <tuple>

#include "tfairy/potentials.hpp"

namespace tfairy::cauchy {

namespace {

const double kS32 = std::sqrt(3.0) / 2.0;

// Outermost |x| with |u0| (or |f| at t=0) above tol, scanned on a log-ish grid.
double support_scan(const std::function<double(double)>& f, double sign,
                    double tol) {
  double r = 0.0;
  for (double x = 0.05; x <= 120.0; x *= 1.08)
    if (std::fabs(f(sign * x)) > tol) r = x;
  return r;
}

}  // namespace

double data_support_radius(const graph::StarGraph& g,
                           const graph::ProblemData& data) {
  double r = 0.5;
  for (int j = 0; j < g.n_bonds(); ++j) {
    const double sign = g.is_incoming(j) ? -1.0 : 1.0;
    r = std::max(r, support_scan(data.u0[j], sign, 1e-12));
    if (!data.f_is_zero)
      r = std::max(
          r, support_scan([&](double x) { return data.f[j](x, 0.0); }, sign,
                          1e-12));
  }
  return r + 0.5;
}

RTraces compute_R_traces(const graph::StarGraph& g,
                         const graph::ProblemData& data,
                         const fraccalc::TimeGrid& tgrid, int space_refine) {
  g.check();
  const int nb = g.n_bonds();
  const double alpha = data.alpha;
  RTraces tr{fraccalc::TraceGrid(tgrid, nb), fraccalc::TraceGrid(tgrid, nb),
             fraccalc::TraceGrid(tgrid, nb)};
  fraccalc::TraceGrid* grids[3] = {&tr.r0, &tr.rx0, &tr.rxx0};

  for (int j = 0; j < nb; ++j) {
    const double supp = support_scan(data.u0[j], g.is_incoming(j) ? -1 : 1,
                                     1e-14) +
                        1.0;
    const potentials::BondDomain dom = g.is_incoming(j)
                                           ? potentials::BondDomain(-supp, 0.0)
                                           : potentials::BondDomain(0.0, supp);
    for (int r = 0; r <= 2; ++r) {
      for (int i = 1; i < tgrid.n_nodes(); ++i) {
        double v = potentials::initial_potential(
            data.u0[j], dom, 0.0, tgrid.node(i), alpha, true, r,
            32 * space_refine);
        if (!data.f_is_zero)
          v += potentials::volume_potential(data.f[j], dom, 0.0, tgrid.node(i),
                                            alpha, tgrid, r, space_refine);
        grids[r]->at(i, j) = v;
      }
    }
    // t -> 0 limits: the unit-mass kernel acts as a delta family on u0.
    const double h = 1e-5;
    const auto& u0 = data.u0[j];
    tr.r0.at(0, j) = u0(0.0);
    tr.rx0.at(0, j) = (u0(h) - u0(-h)) / (2.0 * h);
    tr.rxx0.at(0, j) = (u0(h) - 2.0 * u0(0.0) + u0(-h)) / (h * h);
  }
  return tr;
}

Eigen::MatrixXd assemble_M(const graph::StarGraph& g) {
  g.check();
  const int k = g.k, m = g.m;
  const int n = k + 2 * m;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  auto col_phi = [&](int j) { return j; };
  auto col_psi = [&](int j) { return k + m + (j - k); };

  int row = 0;
  // Vertex continuity, bonds j = 2..k+m.
  for (int j = 1; j < k + m; ++j, ++row) {
    M(row, col_phi(0)) = 1.0;
    M(row, col_phi(j)) = -g.a(j);
    if (!g.is_incoming(j)) M(row, col_psi(j)) = -kS32 * g.a(j);
  }
  // Derivative coupling rows.
  for (int i = 0; i < m; ++i, ++row) {
    for (int q = 0; q < k; ++q) M(row, col_phi(q)) = g.B(i, q);
    M(row, col_phi(k + i)) = -1.0;
    M(row, col_psi(k + i)) = kS32;
  }
  // Flux row.
  for (int j = 0; j < k; ++j) M(row, col_phi(j)) = 1.0 / g.a(j);
  for (int j = k; j < k + m; ++j) M(row, col_phi(j)) = 2.0 / g.a(j);
  return M;
}

namespace {

fraccalc::TraceGrid assemble_h_impl(
    const graph::StarGraph& g, const RTraces& traces, double alpha,
    const std::function<double(double, int, int)>* trace_sampler) {
  const int k = g.k, m = g.m;
  const fraccalc::TimeGrid grid = traces.r0.grid();
  fraccalc::TraceGrid h(grid, k + 2 * m);

  // Continuity rows: 3 D^{2a/3}(a_j R_j(0,.) - R_1(0,.)).
  fraccalc::TraceGrid cont(grid, k + m - 1);
  for (int j = 1; j < k + m; ++j)
    for (int i = 0; i < grid.n_nodes(); ++i)
      cont.at(i, j - 1) = g.a(j) * traces.r0.at(i, j) - traces.r0.at(i, 0);
  const auto dcont =
      trace_sampler
          ? fraccalc::caputo_derivative_refined(
                cont, 2.0 * alpha / 3.0,
                [&](double t, int c) {
                  return g.a(c + 1) * (*trace_sampler)(t, c + 1, 0) -
                         (*trace_sampler)(t, 0, 0);
                })
          : fraccalc::caputo_derivative(cont, 2.0 * alpha / 3.0);

  // Derivative rows: 3 D^{a/3}(R_x^+ - B R_x^-).
  fraccalc::TraceGrid drow(grid, m);
  for (int i = 0; i < grid.n_nodes(); ++i)
    for (int r = 0; r < m; ++r) {
      double s = traces.rx0.at(i, k + r);
      for (int q = 0; q < k; ++q) s -= g.B(r, q) * traces.rx0.at(i, q);
      drow.at(i, r) = s;
    }
  const auto ddrow =
      trace_sampler
          ? fraccalc::caputo_derivative_refined(
                drow, alpha / 3.0,
                [&](double t, int r) {
                  double s = (*trace_sampler)(t, k + r, 1);
                  for (int q = 0; q < k; ++q)
                    s -= g.B(r, q) * (*trace_sampler)(t, q, 1);
                  return s;
                })
          : fraccalc::caputo_derivative(drow, alpha / 3.0);

  for (int i = 0; i < grid.n_nodes(); ++i) {
    int row = 0;
    for (int j = 0; j < k + m - 1; ++j, ++row) h.at(i, row) = 3.0 * dcont.at(i, j);
    for (int r = 0; r < m; ++r, ++row) h.at(i, row) = 3.0 * ddrow.at(i, r);
    double s = 0.0;
    for (int j = k; j < k + m; ++j) s += traces.rxx0.at(i, j) / g.a(j);
    for (int j = 0; j < k; ++j) s -= traces.rxx0.at(i, j) / g.a(j);
    h.at(i, row) = 3.0 * s;
  }
  return h;
}

}  // namespace

fraccalc::TraceGrid assemble_h(const graph::StarGraph& g, const RTraces& traces,
                               double alpha) {
  return assemble_h_impl(g, traces, alpha, nullptr);
}

fraccalc::TraceGrid assemble_h(const graph::StarGraph& g,
                               const graph::ProblemData& data,
                               const RTraces& traces,
                               const fraccalc::TimeGrid& tgrid,
                               int space_refine) {
  // Memoized off-grid trace evaluation: deriv r of R_j at the vertex.
  struct Key {
    double t;
    int bond, r;
    bool operator<(const Key& o) const {
      return std::tie(t, bond, r) < std::tie(o.t, o.bond, o.r);
    }
  };
  auto memo = std::make_shared<std::map<Key, double>>();
  const double alpha = data.alpha;
  std::function<double(double, int, int)> sampler = [&g, &data, memo, alpha,
                                                     &tgrid, space_refine](
                                                        double t, int bond,
                                                        int r) {
    const Key key{t, bond, r};
    auto it = memo->find(key);
    if (it != memo->end()) return it->second;
    const double supp =
        support_scan(data.u0[bond], g.is_incoming(bond) ? -1 : 1, 1e-14) + 1.0;
    const potentials::BondDomain dom =
        g.is_incoming(bond) ? potentials::BondDomain(-supp, 0.0)
                            : potentials::BondDomain(0.0, supp);
    double v = potentials::initial_potential(data.u0[bond], dom, 0.0, t, alpha,
                                             true, r, 32 * space_refine);
    if (!data.f_is_zero) {
      // The Duhamel term needs t on the grid; snap to the nearest node value
      // by linear interpolation of the already-computed traces is not
      // available here, so integrate on a shifted grid capped at t.
      const int steps = std::max(8, static_cast<int>(std::ceil(
                                        t / tgrid.dt())));
      fraccalc::TimeGrid sub(t, steps);
      v += potentials::volume_potential(data.f[bond], dom, 0.0, t, alpha, sub,
                                        r, space_refine);
    }
    (*memo)[key] = v;
    return v;
  };
  return assemble_h_impl(g, traces, alpha, &sampler);
}

DensitySetCauchy solve_densities(const Eigen::MatrixXd& M,
                                 const fraccalc::TraceGrid& h,
                                 const graph::StarGraph& g) {
  const int n = static_cast<int>(M.rows());
  if (h.dim() != n)
    throw std::invalid_argument("solve_densities: dimension mismatch");
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  if (!lu.isInvertible())
    throw singular_system_error("solve_densities: M is singular");
  const Eigen::MatrixXd Minv = lu.inverse();
  const double cond = M.cwiseAbs().rowwise().sum().maxCoeff() *
                      Minv.cwiseAbs().rowwise().sum().maxCoeff();
  if (cond > 1e12)
    throw singular_system_error(
        "solve_densities: condition estimate above 1e12, coupling "
        "configuration rejected");

  const fraccalc::TimeGrid grid = h.grid();
  const int k = g.k, m = g.m;
  DensitySetCauchy out{fraccalc::TraceGrid(grid, k + m),
                       fraccalc::TraceGrid(grid, m)};
  Eigen::VectorXd rhs(n), sol(n);
  for (int i = 0; i < grid.n_nodes(); ++i) {
    for (int c = 0; c < n; ++c) rhs(c) = h.at(i, c);
    sol = lu.solve(rhs);
    const double res = (M * sol - rhs).cwiseAbs().maxCoeff();
    const double scale = std::max(rhs.cwiseAbs().maxCoeff(), 1e-300);
    if (res > 1e-10 * scale)
      throw singular_system_error("solve_densities: residual above tolerance");
    for (int j = 0; j < k + m; ++j) out.phi.at(i, j) = sol(j);
    for (int j = 0; j < m; ++j) out.psi.at(i, j) = sol(k + m + j);
  }
  return out;
}

namespace {

double free_field(const graph::StarGraph& g, const graph::ProblemData& data,
                  int bond, const potentials::BondDomain& dom, double x,
                  double t, const fraccalc::TimeGrid& tgrid, int refine) {
  double v = potentials::initial_potential(data.u0[bond], dom, x, t, data.alpha,
                                           true, 0, 32 * refine);
  if (!data.f_is_zero)
    v += potentials::volume_potential(data.f[bond], dom, x, t, data.alpha,
                                      tgrid, 0, refine);
  return v;
}

}  // namespace

double eval_solution(const graph::StarGraph& g, const graph::ProblemData& data,
                     const DensitySetCauchy& densities, int bond, double x,
                     double t, int space_refine) {
  if (bond < 0 || bond >= g.n_bonds())
    throw std::out_of_range("eval_solution: bond index");
  if (g.is_incoming(bond) ? x > 0.0 : x < 0.0)
    throw std::invalid_argument("eval_solution: x outside the bond");
  const fraccalc::TimeGrid grid = densities.phi.grid();
  const int node = grid.index_of(t);
  const double alpha = data.alpha;
  const double supp =
      support_scan(data.u0[bond], g.is_incoming(bond) ? -1 : 1, 1e-14) + 1.0;
  const potentials::BondDomain dom =
      g.is_incoming(bond) ? potentials::BondDomain(-supp, 0.0)
                          : potentials::BondDomain(0.0, supp);
  double u = free_field(g, data, bond, dom, x, t, grid, space_refine);

  auto gp = fundsol::KernelProfile::get(fundsol::KernelKind::G, alpha,
                                        2.0 * alpha / 3.0, 0);
  potentials::LayerConvolver cg(gp, x, grid);
  u += cg.eval(densities.phi, bond, node);
  if (!g.is_incoming(bond)) {
    auto vp = fundsol::KernelProfile::get(fundsol::KernelKind::V, alpha,
                                          2.0 * alpha / 3.0, 0);
    potentials::LayerConvolver cv(vp, x, grid);
    u += cv.eval(densities.psi, bond - g.k, node);
  }
  return u;
}

verify::SolutionField solve_field(const graph::StarGraph& g,
                                  const graph::ProblemData& data,
                                  const verify::FieldGridSpec& spec) {
  const auto rep = graph::validate(g, data, graph::ProblemKind::Cauchy);
  if (!rep.hard_ok()) {
    std::string msg = "cauchy::solve_field: invalid problem";
    for (const auto& e : rep.errors) msg += "; " + e;
    throw std::invalid_argument(msg);
  }
  if (!rep.hypothesis_ok)
    throw hypothesis_error(
        "cauchy::solve_field: B^T B - I_k is not positive definite");

  const fraccalc::TimeGrid tgrid(spec.t_end, spec.n_steps);
  const RTraces traces = compute_R_traces(g, data, tgrid, spec.space_refine);
  const Eigen::MatrixXd M = assemble_M(g);
  const auto h = assemble_h(g, data, traces, tgrid, spec.space_refine);
  const DensitySetCauchy dens = solve_densities(M, h, g);

  const double reach =
      data_support_radius(g, data) +
      8.0 * std::pow(spec.t_end, data.alpha / 3.0);
  const double X = spec.trunc_radius > 0.0 ? spec.trunc_radius : reach;

  verify::SolutionField field;
  field.g = g;
  field.alpha = data.alpha;
  field.tgrid = tgrid;
  field.provenance = "cauchy";
  field.trunc_radius = X;
  field.x.resize(g.n_bonds());
  field.u.resize(g.n_bonds());

  auto gp = fundsol::KernelProfile::get(fundsol::KernelKind::G, data.alpha,
                                        2.0 * data.alpha / 3.0, 0);
  auto vp = fundsol::KernelProfile::get(fundsol::KernelKind::V, data.alpha,
                                        2.0 * data.alpha / 3.0, 0);

  for (int j = 0; j < g.n_bonds(); ++j) {
    const bool in = g.is_incoming(j);
    Eigen::VectorXd xs(spec.n_x + 1);
    for (int i = 0; i <= spec.n_x; ++i)
      xs(i) = in ? -X + X * i / spec.n_x : X * i / spec.n_x;
    field.x[j] = xs;
    Eigen::MatrixXd u = Eigen::MatrixXd::Zero(spec.n_x + 1, tgrid.n_nodes());

    const double supp = support_scan(data.u0[j], in ? -1 : 1, 1e-14) + 1.0;
    const potentials::BondDomain dom = in ? potentials::BondDomain(-supp, 0.0)
                                          : potentials::BondDomain(0.0, supp);
    for (int i = 0; i <= spec.n_x; ++i) {
      const double xv = xs(i);
      for (int n = 1; n < tgrid.n_nodes(); ++n)
        u(i, n) = free_field(g, data, j, dom, xv, tgrid.node(n), tgrid,
                             spec.space_refine);
      u(i, 0) = data.u0[j](xv);

      potentials::LayerConvolver cg(gp, xv, tgrid);
      const auto lg = cg.eval_all(dens.phi, j);
      for (int n = 0; n < tgrid.n_nodes(); ++n) u(i, n) += lg[n];
      if (!in) {
        potentials::LayerConvolver cv(vp, xv, tgrid);
        const auto lv = cv.eval_all(dens.psi, j - g.k);
        for (int n = 0; n < tgrid.n_nodes(); ++n) u(i, n) += lv[n];
      }
    }
    field.u[j] = std::move(u);
  }
  field.check_shapes();
  return field;
}

}  // namespace tfairy::cauchy
