#include "tfairy/ibvp.hpp"

#include <cmath>
#include <map>
#include <tuple>
#include <vector>

#include "tfairy/cauchy.hpp"
#include "tfairy/potentials.hpp"

namespace tfairy::ibvp {

namespace {

const double kS32 = std::sqrt(3.0) / 2.0;

// Column offsets in Lambda = (alpha^-, alpha^+, beta^-, gamma^-, gamma^+, rho^+).
struct Cols {
  int k, m;
  int al(int j) const { return j; }                // j in [0, k+m)
  int be(int j) const { return k + m + j; }        // j in [0, k), incoming
  int ga(int j) const { return 2 * k + m + j; }    // j in [0, k+m)
  int rho(int j) const { return 3 * k + 2 * m + (j - k); }  // j outgoing
  int n() const { return 3 * (k + m); }
};

// One memory-kernel entry: coeff * Kernel(xarg, s) at (row, col).
struct KernelEntry {
  int row, col;
  double coeff;
  double xarg;
  std::shared_ptr<const fundsol::KernelProfile> prof;
};

std::vector<KernelEntry> kernel_entries(const graph::StarGraph& g,
                                        double alpha) {
  g.check();
  if (!g.finite())
    throw std::invalid_argument("ibvp: finite bond lengths required");
  const int k = g.k, m = g.m;
  const Cols c{k, m};
  using fundsol::KernelKind;
  // D-shifted endpoint kernels: value kernels at order 0, first-derivative
  // kernels shifted by alpha/3, second-derivative kernels of the base order.
  auto G0 = fundsol::KernelProfile::get(KernelKind::G, alpha, 0.0, 0);
  auto V0 = fundsol::KernelProfile::get(KernelKind::V, alpha, 0.0, 0);
  auto Gx0 = fundsol::KernelProfile::get(KernelKind::G, alpha, alpha / 3.0, 1);
  auto Vx0 = fundsol::KernelProfile::get(KernelKind::V, alpha, alpha / 3.0, 1);
  auto Gxx = fundsol::KernelProfile::get(KernelKind::G, alpha, 2.0 * alpha / 3.0, 2);
  auto Vxx = fundsol::KernelProfile::get(KernelKind::V, alpha, 2.0 * alpha / 3.0, 2);

  std::vector<KernelEntry> e;
  int row = 0;
  // Vertex continuity, bonds j = 2..k+m (bond 0 carries the reference trace).
  const double l0 = g.length(0);
  for (int j = 1; j < k + m; ++j, ++row) {
    e.push_back({row, c.al(0), 3.0, -l0, G0});
    e.push_back({row, c.be(0), 3.0, -l0, V0});
    e.push_back({row, c.al(j), -3.0 * g.a(j), -g.length(j), G0});
    if (g.is_incoming(j))
      e.push_back({row, c.be(j), -3.0 * g.a(j), -g.length(j), V0});
  }
  // Derivative coupling rows.
  for (int i = 0; i < m; ++i, ++row) {
    for (int q = 0; q < k; ++q) {
      e.push_back({row, c.al(q), 3.0 * g.B(i, q), -g.length(q), Gx0});
      e.push_back({row, c.be(q), 3.0 * g.B(i, q), -g.length(q), Vx0});
    }
    e.push_back({row, c.al(k + i), -3.0, -g.length(k + i), Gx0});
  }
  // Flux row.
  for (int j = 0; j < k + m; ++j) {
    const double w = 3.0 / g.a(j) * (g.is_incoming(j) ? 1.0 : -1.0);
    e.push_back({row, c.al(j), w, -g.length(j), Gxx});
    if (g.is_incoming(j)) e.push_back({row, c.be(j), w, -g.length(j), Vxx});
  }
  ++row;
  // Dirichlet rows at the far endpoints.
  for (int j = 0; j < k + m; ++j, ++row) {
    e.push_back({row, c.ga(j), 3.0, g.length(j), G0});
    if (!g.is_incoming(j)) e.push_back({row, c.rho(j), 3.0, g.length(j), V0});
  }
  // Neumann rows on incoming bonds.
  for (int j = 0; j < k; ++j, ++row)
    e.push_back({row, c.ga(j), 3.0, g.length(j), Gx0});
  return e;
}

}  // namespace

Eigen::MatrixXd assemble_Q(const graph::StarGraph& g) {
  g.check();
  if (!g.finite())
    throw std::invalid_argument("assemble_Q: finite bond lengths required");
  const int k = g.k, m = g.m;
  const int n = 3 * (k + m);
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, n);
  // Upper-right block: the Cauchy coupling matrix acting on (gamma, rho).
  Q.block(0, 2 * k + m, k + 2 * m, k + 2 * m) = cauchy::assemble_M(g);
  // Lower-left block Q1 acting on (alpha^-, alpha^+, beta^-).
  const int r0 = k + 2 * m;
  for (int j = 0; j < k; ++j) {  // Dirichlet, incoming
    Q(r0 + j, j) = 1.0;
    Q(r0 + j, k + m + j) = kS32;
  }
  for (int j = 0; j < m; ++j)  // Dirichlet, outgoing
    Q(r0 + k + j, k + j) = 1.0;
  for (int j = 0; j < k; ++j) {  // Neumann, incoming
    Q(r0 + k + m + j, j) = 1.0;
    Q(r0 + k + m + j, k + m + j) = -kS32;
  }
  return Q;
}

Eigen::MatrixXd assemble_K(const graph::StarGraph& g, double alpha, double s) {
  if (!(s > 0.0)) throw std::domain_error("assemble_K: s > 0 required");
  const auto entries = kernel_entries(g, alpha);
  const int n = 3 * (g.k + g.m);
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  for (const auto& en : entries)
    K(en.row, en.col) += en.coeff * en.prof->value(en.xarg, s);
  return K;
}

FTraces compute_F_traces(const graph::StarGraph& g,
                         const graph::ProblemData& data,
                         const fraccalc::TimeGrid& tgrid, int space_refine) {
  g.check();
  const int nb = g.n_bonds();
  const double alpha = data.alpha;
  FTraces tr{fraccalc::TraceGrid(tgrid, nb), fraccalc::TraceGrid(tgrid, nb),
             fraccalc::TraceGrid(tgrid, nb), fraccalc::TraceGrid(tgrid, nb),
             fraccalc::TraceGrid(tgrid, g.k)};

  for (int j = 0; j < nb; ++j) {
    const auto dom = g.bond_domain(j);
    const double L = g.length(j);
    auto trace = [&](double x, int r, int i) {
      double v = potentials::initial_potential(data.u0[j], dom, x,
                                               tgrid.node(i), alpha, true, r,
                                               32 * space_refine);
      if (!data.f_is_zero)
        v += potentials::volume_potential(data.f[j], dom, x, tgrid.node(i),
                                          alpha, tgrid, r, space_refine);
      return v;
    };
    for (int i = 1; i < tgrid.n_nodes(); ++i) {
      tr.f0.at(i, j) = trace(0.0, 0, i);
      tr.fx0.at(i, j) = trace(0.0, 1, i);
      tr.fxx0.at(i, j) = trace(0.0, 2, i);
      tr.fL.at(i, j) = trace(L, 0, i);
      if (g.is_incoming(j)) tr.fxL.at(i, j) = trace(L, 1, i);
    }
    const double h = 1e-5;
    const auto& u0 = data.u0[j];
    tr.f0.at(0, j) = u0(0.0);
    tr.fx0.at(0, j) = (u0(h) - u0(-h)) / (2.0 * h);
    tr.fxx0.at(0, j) = (u0(h) - 2.0 * u0(0.0) + u0(-h)) / (h * h);
    tr.fL.at(0, j) = u0(L);
    if (g.is_incoming(j)) tr.fxL.at(0, j) = (u0(L + h) - u0(L - h)) / (2.0 * h);
  }
  return tr;
}

fraccalc::TraceGrid assemble_H(const graph::StarGraph& g,
                               const graph::ProblemData& data,
                               const FTraces& traces) {
  const int k = g.k, m = g.m;
  const fraccalc::TimeGrid grid = traces.f0.grid();
  if (!data.varphi || !data.phi)
    throw std::invalid_argument("assemble_H: boundary data required");
  const auto& varphi = *data.varphi;
  const auto& phi = *data.phi;
  if (!(varphi.grid() == grid) || !(phi.grid() == grid))
    throw std::invalid_argument("assemble_H: boundary data grid mismatch");

  fraccalc::TraceGrid H(grid, 3 * (k + m));
  const double a23 = 2.0 * data.alpha / 3.0, a13 = data.alpha / 3.0;

  // Off-grid trace sampler (memoized): F_j and derivatives at the vertex and
  // the far endpoints. kind: 0 F(0), 1 F_x(0), 2 F(L), 3 F_x(L).
  struct Key {
    double t;
    int bond, kind;
    bool operator<(const Key& o) const {
      return std::tie(t, bond, kind) < std::tie(o.t, o.bond, o.kind);
    }
  };
  auto memo = std::make_shared<std::map<Key, double>>();
  auto ftrace = [&g, &data, memo, &grid](double t, int bond, int kind) {
    const Key key{t, bond, kind};
    auto it = memo->find(key);
    if (it != memo->end()) return it->second;
    const auto dom = g.bond_domain(bond);
    const double x = kind >= 2 ? g.length(bond) : 0.0;
    const int r = (kind == 1 || kind == 3) ? 1 : 0;
    double v = potentials::initial_potential(data.u0[bond], dom, x, t,
                                             data.alpha, true, r, 32);
    if (!data.f_is_zero) {
      const int steps = std::max(8, static_cast<int>(std::ceil(t / grid.dt())));
      fraccalc::TimeGrid sub(t, steps);
      v += potentials::volume_potential(data.f[bond], dom, x, t, data.alpha,
                                        sub, r, 1);
    }
    (*memo)[key] = v;
    return v;
  };

  fraccalc::TraceGrid cont(grid, k + m - 1);
  for (int j = 1; j < k + m; ++j)
    for (int i = 0; i < grid.n_nodes(); ++i)
      cont.at(i, j - 1) = g.a(j) * traces.f0.at(i, j) - traces.f0.at(i, 0);
  const auto dcont = fraccalc::caputo_derivative_refined(
      cont, a23, [&](double t, int c) {
        return g.a(c + 1) * ftrace(t, c + 1, 0) - ftrace(t, 0, 0);
      });

  fraccalc::TraceGrid drow(grid, m);
  for (int i = 0; i < grid.n_nodes(); ++i)
    for (int r = 0; r < m; ++r) {
      double s = traces.fx0.at(i, k + r);
      for (int q = 0; q < k; ++q) s -= g.B(r, q) * traces.fx0.at(i, q);
      drow.at(i, r) = s;
    }
  const auto ddrow = fraccalc::caputo_derivative_refined(
      drow, a13, [&](double t, int r) {
        double s = ftrace(t, k + r, 1);
        for (int q = 0; q < k; ++q) s -= g.B(r, q) * ftrace(t, q, 1);
        return s;
      });

  // Boundary data: the presets are constant in time, so only the trace part
  // needs off-grid values (varphi/phi are interpolated linearly otherwise).
  fraccalc::TraceGrid dir(grid, k + m);
  for (int j = 0; j < k + m; ++j)
    for (int i = 0; i < grid.n_nodes(); ++i)
      dir.at(i, j) = varphi.at(i, j) - traces.fL.at(i, j);
  const auto ddir = fraccalc::caputo_derivative_refined(
      dir, a23, [&](double t, int j) {
        return varphi.interp(t, j) - ftrace(t, j, 2);
      });

  fraccalc::TraceGrid neu(grid, k);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < grid.n_nodes(); ++i)
      neu.at(i, j) = phi.at(i, j) - traces.fxL.at(i, j);
  const auto dneu = fraccalc::caputo_derivative_refined(
      neu, a13, [&](double t, int j) {
        return phi.interp(t, j) - ftrace(t, j, 3);
      });

  for (int i = 0; i < grid.n_nodes(); ++i) {
    int row = 0;
    for (int j = 0; j < k + m - 1; ++j, ++row) H.at(i, row) = 3.0 * dcont.at(i, j);
    for (int r = 0; r < m; ++r, ++row) H.at(i, row) = 3.0 * ddrow.at(i, r);
    double s = 0.0;
    for (int j = 0; j < k + m; ++j)
      s += traces.fxx0.at(i, j) / g.a(j) * (g.is_incoming(j) ? -1.0 : 1.0);
    H.at(i, row++) = 3.0 * s;
    for (int j = 0; j < k + m; ++j, ++row) H.at(i, row) = 3.0 * ddir.at(i, j);
    for (int j = 0; j < k; ++j, ++row) H.at(i, row) = 3.0 * dneu.at(i, j);
  }
  return H;
}

Eigen::MatrixXd volterra_step(const Eigen::MatrixXd& Q,
                              const std::vector<Eigen::MatrixXd>& wn,
                              const std::vector<Eigen::MatrixXd>& wf,
                              const fraccalc::TraceGrid& H) {
  const int n = static_cast<int>(Q.rows());
  const int nt = H.grid().n_steps();
  if (H.dim() != n || static_cast<int>(wn.size()) < nt + 1 ||
      static_cast<int>(wf.size()) < nt + 1)
    throw std::invalid_argument("volterra_step: dimension mismatch");

  const Eigen::MatrixXd A = Q + wn[1];
  const Eigen::FullPivLU<Eigen::MatrixXd> luQ(Q), luA(A);
  if (!luQ.isInvertible() || !luA.isInvertible())
    throw singular_system_error("volterra_step: singular step matrix");
  const double condA = A.cwiseAbs().rowwise().sum().maxCoeff() *
                       luA.inverse().cwiseAbs().rowwise().sum().maxCoeff();
  if (condA > 1e12)
    throw singular_system_error("volterra_step: condition estimate above 1e12");

  Eigen::MatrixXd lam(n, nt + 1);
  Eigen::VectorXd rhs(n);
  for (int c = 0; c < n; ++c) rhs(c) = H.at(0, c);
  lam.col(0) = luQ.solve(rhs);
  for (int i = 1; i <= nt; ++i) {
    for (int c = 0; c < n; ++c) rhs(c) = H.at(i, c);
    rhs.noalias() -= wf[1] * lam.col(i - 1);
    for (int l = 2; l <= i; ++l) {
      rhs.noalias() -= wn[l] * lam.col(i - l + 1);
      rhs.noalias() -= wf[l] * lam.col(i - l);
    }
    lam.col(i) = luA.solve(rhs);
  }
  return lam;
}

DensitySetIBVP solve_volterra(const graph::StarGraph& g, double alpha,
                              const fraccalc::TraceGrid& H) {
  const int k = g.k, m = g.m;
  const int n = 3 * (k + m);
  if (H.dim() != n) throw std::invalid_argument("solve_volterra: H dimension");
  const fraccalc::TimeGrid grid = H.grid();
  const int nt = grid.n_steps();

  const Eigen::MatrixXd Q = assemble_Q(g);
  const auto entries = kernel_entries(g, alpha);

  // Per-lag weight matrices from the scalar kernel moments.
  std::vector<Eigen::MatrixXd> wn(nt + 1, Eigen::MatrixXd::Zero(n, n));
  std::vector<Eigen::MatrixXd> wf(nt + 1, Eigen::MatrixXd::Zero(n, n));
  for (const auto& en : entries) {
    const potentials::LayerConvolver conv(en.prof, en.xarg, grid);
    const auto& mn = conv.lag_weight_near();
    const auto& mf = conv.lag_weight_far();
    for (int l = 1; l <= nt; ++l) {
      wn[l](en.row, en.col) += en.coeff * mn[l];
      wf[l](en.row, en.col) += en.coeff * mf[l];
    }
  }

  const Eigen::MatrixXd lam = volterra_step(Q, wn, wf, H);

  DensitySetIBVP out{fraccalc::TraceGrid(grid, k + m),
                     fraccalc::TraceGrid(grid, k),
                     fraccalc::TraceGrid(grid, k + m),
                     fraccalc::TraceGrid(grid, m)};
  for (int i = 0; i <= nt; ++i) {
    for (int j = 0; j < k + m; ++j) out.alpha_d.at(i, j) = lam(j, i);
    for (int j = 0; j < k; ++j) out.beta_d.at(i, j) = lam(k + m + j, i);
    for (int j = 0; j < k + m; ++j) out.gamma_d.at(i, j) = lam(2 * k + m + j, i);
    for (int j = 0; j < m; ++j) out.rho_d.at(i, j) = lam(3 * k + 2 * m + j, i);
  }
  return out;
}

namespace {

double free_field_ibvp(const graph::StarGraph& g,
                       const graph::ProblemData& data, int bond, double x,
                       double t, const fraccalc::TimeGrid& tgrid, int refine) {
  const auto dom = g.bond_domain(bond);
  double v = potentials::initial_potential(data.u0[bond], dom, x, t, data.alpha,
                                           true, 0, 32 * refine);
  if (!data.f_is_zero)
    v += potentials::volume_potential(data.f[bond], dom, x, t, data.alpha,
                                      tgrid, 0, refine);
  return v;
}

}  // namespace

double eval_solution_ibvp(const graph::StarGraph& g,
                          const graph::ProblemData& data,
                          const DensitySetIBVP& densities, int bond, double x,
                          double t, int space_refine) {
  if (bond < 0 || bond >= g.n_bonds())
    throw std::out_of_range("eval_solution_ibvp: bond index");
  const double L = g.length(bond);
  const bool in = g.is_incoming(bond);
  if (in ? (x < L || x > 0.0) : (x < 0.0 || x > L))
    throw std::invalid_argument("eval_solution_ibvp: x outside the bond");
  const fraccalc::TimeGrid grid = densities.alpha_d.grid();
  const int node = grid.index_of(t);
  const double alpha = data.alpha;
  using fundsol::KernelKind;
  const double mu = 2.0 * alpha / 3.0;

  double u = free_field_ibvp(g, data, bond, x, t, grid, space_refine);
  auto gp = fundsol::KernelProfile::get(KernelKind::G, alpha, mu, 0);
  auto vp = fundsol::KernelProfile::get(KernelKind::V, alpha, mu, 0);

  {  // endpoint layer(s), anchored at L
    potentials::LayerConvolver ca(gp, x - L, grid);
    u += ca.eval(densities.alpha_d, bond, node);
    if (in) {
      potentials::LayerConvolver cb(vp, x - L, grid);
      u += cb.eval(densities.beta_d, bond, node);
    }
  }
  {  // vertex layer(s), anchored at 0
    potentials::LayerConvolver cgm(gp, x, grid);
    u += cgm.eval(densities.gamma_d, bond, node);
    if (!in) {
      potentials::LayerConvolver cr(vp, x, grid);
      u += cr.eval(densities.rho_d, bond - g.k, node);
    }
  }
  return u;
}

verify::SolutionField solve_field(const graph::StarGraph& g,
                                  const graph::ProblemData& data,
                                  const verify::FieldGridSpec& spec) {
  const auto rep = graph::validate(g, data, graph::ProblemKind::Ibvp);
  if (!rep.hard_ok()) {
    std::string msg = "ibvp::solve_field: invalid problem";
    for (const auto& e : rep.errors) msg += "; " + e;
    throw std::invalid_argument(msg);
  }
  if (!rep.hypothesis_ok)
    throw hypothesis_error(
        "ibvp::solve_field: B^T B - I_k is not negative definite");

  const fraccalc::TimeGrid tgrid(spec.t_end, spec.n_steps);
  const FTraces traces = compute_F_traces(g, data, tgrid, spec.space_refine);
  const auto H = assemble_H(g, data, traces);
  const DensitySetIBVP dens = solve_volterra(g, data.alpha, H);

  verify::SolutionField field;
  field.g = g;
  field.alpha = data.alpha;
  field.tgrid = tgrid;
  field.provenance = "ibvp";
  field.x.resize(g.n_bonds());
  field.u.resize(g.n_bonds());

  using fundsol::KernelKind;
  const double mu = 2.0 * data.alpha / 3.0;
  auto gp = fundsol::KernelProfile::get(KernelKind::G, data.alpha, mu, 0);
  auto vp = fundsol::KernelProfile::get(KernelKind::V, data.alpha, mu, 0);

  for (int j = 0; j < g.n_bonds(); ++j) {
    const bool in = g.is_incoming(j);
    const double L = g.length(j);
    Eigen::VectorXd xs(spec.n_x + 1);
    for (int i = 0; i <= spec.n_x; ++i)
      xs(i) = in ? L + (-L) * i / spec.n_x : L * i / spec.n_x;
    field.x[j] = xs;
    Eigen::MatrixXd u = Eigen::MatrixXd::Zero(spec.n_x + 1, tgrid.n_nodes());

    for (int i = 0; i <= spec.n_x; ++i) {
      const double xv = xs(i);
      for (int n = 1; n < tgrid.n_nodes(); ++n)
        u(i, n) = free_field_ibvp(g, data, j, xv, tgrid.node(n), tgrid,
                                  spec.space_refine);
      u(i, 0) = data.u0[j](xv);

      potentials::LayerConvolver ca(gp, xv - L, tgrid);
      const auto la = ca.eval_all(dens.alpha_d, j);
      potentials::LayerConvolver cgm(gp, xv, tgrid);
      const auto lg = cgm.eval_all(dens.gamma_d, j);
      for (int n = 0; n < tgrid.n_nodes(); ++n) u(i, n) += la[n] + lg[n];
      if (in) {
        potentials::LayerConvolver cb(vp, xv - L, tgrid);
        const auto lb = cb.eval_all(dens.beta_d, j);
        for (int n = 0; n < tgrid.n_nodes(); ++n) u(i, n) += lb[n];
      } else {
        potentials::LayerConvolver cr(vp, xv, tgrid);
        const auto lr = cr.eval_all(dens.rho_d, j - g.k);
        for (int n = 0; n < tgrid.n_nodes(); ++n) u(i, n) += lr[n];
      }
    }
    field.u[j] = std::move(u);
  }
  field.check_shapes();
  return field;
}

}  // namespace tfairy::ibvp
