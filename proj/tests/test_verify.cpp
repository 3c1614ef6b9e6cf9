#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tfairy/potentials.hpp"
#include "tfairy/verify.hpp"

using namespace tfairy;

namespace {

graph::StarGraph two_bond(double b) {
  graph::StarGraph g;
  g.k = 1;
  g.m = 1;
  g.a = Eigen::Vector2d(1.0, 1.0);
  g.B = Eigen::MatrixXd::Constant(1, 1, b);
  return g;
}

// Samples an analytic function u(x,t) onto a two-bond field.
verify::SolutionField sample_field(const graph::StarGraph& g,
                                   const std::function<double(double, double)>& u,
                                   int nx, int nt, double t_end, double ext) {
  verify::SolutionField f;
  f.g = g;
  f.alpha = 0.5;
  f.tgrid = fraccalc::TimeGrid(t_end, nt);
  f.provenance = "synthetic";
  f.x.resize(2);
  f.u.resize(2);
  for (int b = 0; b < 2; ++b) {
    Eigen::VectorXd xs(nx + 1);
    for (int i = 0; i <= nx; ++i)
      xs(i) = b == 0 ? -ext + ext * i / nx : ext * i / nx;
    Eigen::MatrixXd m(nx + 1, nt + 1);
    for (int i = 0; i <= nx; ++i)
      for (int n = 0; n <= nt; ++n) m(i, n) = u(xs(i), f.tgrid.node(n));
    f.x[b] = xs;
    f.u[b] = m;
  }
  return f;
}

}  // namespace

TEST_CASE("pde_residual of the zero field with zero source is exactly zero") {
  const auto g = two_bond(2.0);
  auto f = sample_field(g, [](double, double) { return 0.0; }, 40, 16, 0.5, 2.0);
  std::vector<std::function<double(double, double)>> zf{
      [](double, double) { return 0.0; }, [](double, double) { return 0.0; }};
  CHECK(verify::pde_residual(f, zf) == 0.0);
  CHECK(verify::field_norm_sq(f, 8) == 0.0);
}

TEST_CASE("vertex residuals on an exact pass-through configuration") {
  // Identical smooth values across the vertex with a = (1,1), B = 1:
  // all three conditions hold exactly, so the residual is stencil-level.
  auto g = two_bond(1.0);
  auto f = sample_field(
      g, [](double x, double t) { return std::sin(x + t); }, 80, 8, 0.5, 2.0);
  const auto vr = verify::vertex_residuals(f);
  CHECK(vr.continuity < 1e-12);  // shared vertex samples are identical
  CHECK(vr.derivative < 1e-6);
  CHECK(vr.flux < 1e-4);

  // Perturbing a_2 by 10% breaks continuity by O(0.1 |u|).
  f.g.a(1) = 1.1;
  const auto vr2 = verify::vertex_residuals(f);
  CHECK(vr2.continuity > 0.01);
  CHECK(vr2.continuity < 0.2);
}

TEST_CASE("boundary residuals demand a finite-bond field") {
  const auto g = two_bond(0.5);
  auto f = sample_field(g, [](double, double) { return 0.0; }, 20, 8, 0.5, 1.0);
  fraccalc::TraceGrid varphi(f.tgrid, 2), phi(f.tgrid, 1);
  CHECK_THROWS_AS((void)verify::boundary_residuals(f, varphi, phi),
                  std::invalid_argument);
  f.g.lengths = Eigen::Vector2d(-1.0, 1.0);
  const auto br = verify::boundary_residuals(f, varphi, phi);
  CHECK(br.dirichlet == 0.0);
  CHECK(br.neumann == 0.0);
}

TEST_CASE("energy check: zero data zero margin; positive data positive slack") {
  const auto g = two_bond(2.0);
  auto f = sample_field(g, [](double, double) { return 0.0; }, 30, 12, 0.5, 2.0);
  graph::ProblemData d;
  d.alpha = 0.5;
  d.u0.emplace_back([](double) { return 0.0; });
  d.u0.emplace_back([](double) { return 0.0; });
  d.f.emplace_back([](double, double) { return 0.0; });
  d.f.emplace_back([](double, double) { return 0.0; });
  CHECK(verify::energy_check(f, d) == doctest::Approx(0.0));

  // Nonzero initial data with a zero field: the margin is the bound itself,
  // positive and monotone under shrinking the horizon.
  d.u0[0] = [](double x) { return std::exp(-x * x); };
  const double m_full = verify::energy_check(f, d);
  CHECK(m_full > 0.0);
  auto f_short = sample_field(g, [](double, double) { return 0.0; }, 30, 6,
                              0.25, 2.0);
  CHECK(verify::energy_check(f_short, d) >= m_full);
}

TEST_CASE("manufactured Duhamel field satisfies the equation") {
  auto fsrc = [](double x, double) {
    const double s = x / 0.25;
    return std::exp(-0.5 * s * s);
  };
  potentials::BondDomain dom(-1.0, 1.0);
  const auto g = two_bond(2.0);

  auto build = [&](int nt, int nx) {
    fraccalc::TimeGrid tg(0.5, nt);
    verify::SolutionField fld;
    fld.g = g;
    fld.alpha = 0.5;
    fld.tgrid = tg;
    fld.provenance = "manufactured";
    fld.x.resize(2);
    fld.u.resize(2);
    for (int b = 0; b < 2; ++b) {
      Eigen::VectorXd xs(nx + 1);
      for (int i = 0; i <= nx; ++i)
        xs(i) = b == 0 ? -1.0 + static_cast<double>(i) / nx
                       : static_cast<double>(i) / nx;
      Eigen::MatrixXd u = Eigen::MatrixXd::Zero(nx + 1, tg.n_nodes());
      for (int i = 0; i <= nx; ++i)
        for (int n = 1; n < tg.n_nodes(); ++n)
          u(i, n) = potentials::volume_potential(fsrc, dom, xs(i), tg.node(n),
                                                 0.5, tg);
      fld.x[b] = xs;
      fld.u[b] = u;
    }
    return fld;
  };
  std::vector<std::function<double(double, double)>> fv{fsrc, fsrc};
  const auto coarse = build(48, 32);
  const double rc = verify::pde_residual(coarse, fv, 0.5 / 4.0);
  CHECK(rc < 5e-3);
  const auto fine = build(96, 44);
  const double rf = verify::pde_residual(fine, fv, 0.5 / 4.0);
  CHECK(rf < 0.65 * rc);
}

TEST_CASE("convergence_study fits the slope and flags monotonicity") {
  auto runner = [](int level) {
    verify::ConvergenceRow r;
    r.dt = 0.1 / (1 << level);
    r.dx = r.dt;
    r.residual = 3.0 * std::pow(r.dt, 1.5);
    return r;
  };
  const auto t = verify::convergence_study(runner, 4);
  CHECK(t.fitted_order == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(t.monotone);

  auto bumpy = [](int level) {
    verify::ConvergenceRow r;
    r.dt = 0.1 / (1 << level);
    r.residual = level == 2 ? 1.0 : 3.0 * r.dt;
    return r;
  };
  const auto t2 = verify::convergence_study(bumpy, 4);
  CHECK(!t2.monotone);
  CHECK_THROWS_AS((void)verify::convergence_study(runner, 2),
                  std::invalid_argument);
}

TEST_CASE("shape checks reject malformed fields") {
  const auto g = two_bond(2.0);
  auto f = sample_field(g, [](double, double) { return 1.0; }, 20, 8, 0.5, 1.0);
  f.u[1].resize(3, 3);
  CHECK_THROWS_AS(f.check_shapes(), std::invalid_argument);
}
