#include "tfairy/graph.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

namespace tfairy::graph {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double fd_deriv(const std::function<double(double)>& f, double x, double h,
                int order) {
  if (order == 0) return f(x);
  if (order == 1) return (f(x + h) - f(x - h)) / (2.0 * h);
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}
}  // namespace

double StarGraph::length(int j) const {
  if (!lengths) throw std::logic_error("StarGraph: no lengths on a Cauchy graph");
  return (*lengths)(j);
}

potentials::BondDomain StarGraph::bond_domain(int j, double trunc) const {
  if (j < 0 || j >= n_bonds()) throw std::out_of_range("StarGraph: bond index");
  if (lengths) {
    const double L = (*lengths)(j);
    return is_incoming(j) ? potentials::BondDomain(L, 0.0)
                          : potentials::BondDomain(0.0, L);
  }
  const double r = trunc > 0.0 ? trunc : kInf;
  return is_incoming(j) ? potentials::BondDomain(-r, 0.0)
                        : potentials::BondDomain(0.0, r);
}

void StarGraph::check() const {
  if (k < 1 || m < 1)
    throw std::invalid_argument("StarGraph: k >= 1 and m >= 1 required");
  if (a.size() != n_bonds())
    throw std::invalid_argument("StarGraph: a must have k+m entries");
  if (a(0) != 1.0)
    throw std::invalid_argument("StarGraph: a_1 = 1 required");
  for (int j = 0; j < n_bonds(); ++j)
    if (a(j) == 0.0)
      throw std::invalid_argument("StarGraph: a_j != 0 violated");
  if (B.rows() != m || B.cols() != k)
    throw std::invalid_argument("StarGraph: B must be m x k");
  if (lengths) {
    if (lengths->size() != n_bonds())
      throw std::invalid_argument("StarGraph: lengths must have k+m entries");
    for (int j = 0; j < n_bonds(); ++j) {
      const double L = (*lengths)(j);
      if (is_incoming(j) ? !(L < 0.0) : !(L > 0.0))
        throw std::invalid_argument(
            "StarGraph: incoming lengths are negative, outgoing positive");
    }
  }
}

Definiteness definiteness(const Eigen::MatrixXd& sym, double tol) {
  if (sym.rows() != sym.cols())
    throw std::invalid_argument("definiteness: square matrix required");
  if (!sym.isApprox(sym.transpose(), 1e-12))
    throw std::invalid_argument("definiteness: symmetric matrix required");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  const auto& ev = es.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  int pos = 0, neg = 0, zero = 0;
  for (int i = 0; i < ev.size(); ++i) {
    if (ev(i) > tol * scale)
      ++pos;
    else if (ev(i) < -tol * scale)
      ++neg;
    else
      ++zero;
  }
  if (zero > 0 && (pos == 0 || neg == 0)) return Definiteness::Semidefinite;
  if (pos > 0 && neg > 0) return Definiteness::Indefinite;
  return pos > 0 ? Definiteness::Positive : Definiteness::Negative;
}

ValidationReport validate(const StarGraph& g, const ProblemData& data,
                          ProblemKind kind, double trunc_radius,
                          double compat_tol) {
  ValidationReport rep;
  try {
    g.check();
    rep.coefficients_ok = true;
  } catch (const std::exception& e) {
    rep.errors.emplace_back(e.what());
    return rep;
  }
  if (!(data.alpha > 0.0 && data.alpha < 1.0))
    rep.errors.emplace_back("alpha in (0,1) required");
  if (static_cast<int>(data.u0.size()) != g.n_bonds())
    rep.errors.emplace_back("u0 must be given per bond");
  if (kind == ProblemKind::Ibvp) {
    if (!g.finite()) rep.errors.emplace_back("IBVP requires finite bond lengths");
    if (!data.varphi || data.varphi->dim() != g.n_bonds())
      rep.errors.emplace_back("IBVP requires varphi with k+m components");
    if (!data.phi || data.phi->dim() != g.k)
      rep.errors.emplace_back("IBVP requires phi with k components");
  } else if (g.finite()) {
    rep.errors.emplace_back("Cauchy problem requires semi-infinite bonds");
  }
  if (!rep.errors.empty()) return rep;

  const Eigen::MatrixXd bbt =
      g.B.transpose() * g.B - Eigen::MatrixXd::Identity(g.k, g.k);
  rep.coupling = definiteness(bbt);
  rep.hypothesis_ok = kind == ProblemKind::Cauchy
                          ? rep.coupling == Definiteness::Positive
                          : rep.coupling == Definiteness::Negative;
  if (!rep.hypothesis_ok)
    rep.warnings.emplace_back(
        kind == ProblemKind::Cauchy
            ? "B^T B - I_k is not positive definite (uniqueness hypothesis)"
            : "B^T B - I_k is not negative definite (uniqueness hypothesis)");

  // t = 0 compatibility of u0 with the vertex conditions.
  const double h = 1e-5;
  double res = 0.0;
  auto val_at_vertex = [&](int j, int order) {
    return fd_deriv(data.u0[j], 0.0, h, order);
  };
  for (int j = 1; j < g.n_bonds(); ++j)
    res = std::max(res, std::fabs(g.a(j) * val_at_vertex(j, 0) -
                                  val_at_vertex(0, 0)));
  for (int i = 0; i < g.m; ++i) {
    double s = val_at_vertex(g.k + i, 1);
    for (int q = 0; q < g.k; ++q) s -= g.B(i, q) * val_at_vertex(q, 1);
    res = std::max(res, std::fabs(s));
  }
  {
    double s = 0.0;
    for (int j = 0; j < g.k; ++j) s += val_at_vertex(j, 2) / g.a(j);
    for (int j = g.k; j < g.n_bonds(); ++j) s -= val_at_vertex(j, 2) / g.a(j);
    res = std::max(res, std::fabs(s));
  }
  rep.compat_residual = res;
  rep.compat_ok = res <= compat_tol;
  if (!rep.compat_ok)
    rep.warnings.emplace_back(
        "u0 does not satisfy the vertex conditions at t = 0 (residual " +
        std::to_string(res) + ")");

  // Decay of the data at the truncation radius on Cauchy geometry.
  if (kind == ProblemKind::Cauchy && trunc_radius > 0.0) {
    for (int j = 0; j < g.n_bonds(); ++j) {
      const double xr = g.is_incoming(j) ? -trunc_radius : trunc_radius;
      if (std::fabs(data.u0[j](xr)) > 1e-8 ||
          (!data.f_is_zero && std::fabs(data.f[j](xr, 0.0)) > 1e-8)) {
        rep.decay_ok = false;
        rep.warnings.emplace_back("data not decayed at the truncation radius");
        break;
      }
    }
  }
  return rep;
}

}  // namespace tfairy::graph
