#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "tfairy/cauchy.hpp"
#include "tfairy/ibvp.hpp"

using namespace tfairy;
using fraccalc::TimeGrid;
using fraccalc::TraceGrid;

namespace {

const double kS3 = std::sqrt(3.0);

graph::StarGraph reference_ibvp_graph() {
  graph::StarGraph g;
  g.k = 1;
  g.m = 1;
  g.a = Eigen::Vector2d(1.0, 1.0);
  g.B = Eigen::MatrixXd::Constant(1, 1, 0.5);
  g.lengths = Eigen::Vector2d(-1.0, 1.0);
  return g;
}

graph::ProblemData zero_ibvp_data(const graph::StarGraph& g,
                                  const TimeGrid& tg) {
  graph::ProblemData d;
  d.alpha = 0.5;
  for (int j = 0; j < g.n_bonds(); ++j) {
    d.u0.emplace_back([](double) { return 0.0; });
    d.f.emplace_back([](double, double) { return 0.0; });
  }
  d.varphi = TraceGrid(tg, g.n_bonds());
  d.phi = TraceGrid(tg, g.k);
  return d;
}

}  // namespace

TEST_CASE("assemble_Q: block structure and determinant factorization") {
  const auto g = reference_ibvp_graph();
  const Eigen::MatrixXd Q = ibvp::assemble_Q(g);
  REQUIRE(Q.rows() == 6);

  // Upper-right block is the Cauchy coupling matrix on (gamma, rho).
  const Eigen::MatrixXd M = cauchy::assemble_M(g);
  CHECK((Q.block(0, 3, 3, 3) - M).cwiseAbs().maxCoeff() == 0.0);
  // Lower-left block Q1 on (alpha^-, alpha^+, beta^-).
  Eigen::Matrix3d q1;
  q1 << 1.0, 0.0, kS3 / 2.0,  //
      0.0, 1.0, 0.0,          //
      1.0, 0.0, -kS3 / 2.0;
  CHECK((Q.block(3, 0, 3, 3) - q1).cwiseAbs().maxCoeff() == 0.0);
  CHECK(Q.block(0, 0, 3, 3).cwiseAbs().maxCoeff() == 0.0);
  CHECK(Q.block(3, 3, 3, 3).cwiseAbs().maxCoeff() == 0.0);

  // det Q1 = (-sqrt3)^k and |det Q| = |det M| * |det Q1|.
  const double detQ1 = q1.determinant();
  CHECK(detQ1 == doctest::Approx(-kS3).epsilon(1e-14));
  const double detM = M.determinant();
  CHECK(std::fabs(Q.fullPivLu().determinant()) ==
        doctest::Approx(std::fabs(detM * detQ1)).epsilon(1e-12));
  CHECK(std::fabs(Q.fullPivLu().determinant()) > 1e-8);

  // Q is t-independent: two assemblies agree bit for bit.
  CHECK((ibvp::assemble_Q(g) - Q).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("assemble_K: placement, finiteness, decay at both ends") {
  const auto g = reference_ibvp_graph();
  const double alpha = 0.5;

  const Eigen::MatrixXd K = ibvp::assemble_K(g, alpha, 0.3);
  REQUIRE(K.rows() == 6);
  // K pairs the vertex-system rows with (alpha, beta) columns and the
  // endpoint rows with (gamma, rho) columns; the complementary blocks vanish.
  CHECK(K.block(0, 3, 3, 3).cwiseAbs().maxCoeff() == 0.0);
  CHECK(K.block(3, 0, 3, 3).cwiseAbs().maxCoeff() == 0.0);
  CHECK(K.allFinite());
  CHECK(K.block(0, 0, 3, 3).cwiseAbs().maxCoeff() > 1e-6);

  // The entries spike to O(100) at small s (the dispersive wavefront of the
  // x > 0 branch), which is exactly why the stepper integrates its first lag
  // on a refined mesh.
  CHECK(ibvp::assemble_K(g, alpha, 1e-6).cwiseAbs().maxCoeff() > 1.0);
  // Below the certified support radius (~|L|^{3/alpha} / y_sup^{3/alpha})
  // every entry vanishes; monotone vanishing below 1e-12.
  double prev = 1e300;
  for (double s : {1e-12, 3e-13, 1e-13}) {
    const double m = ibvp::assemble_K(g, alpha, s).cwiseAbs().maxCoeff();
    CHECK(m < 1e-12);
    CHECK(m <= prev);
    prev = m;
  }
  // Large s: the similarity argument tends to zero and the order-0 kernels
  // vanish there too (1/Gamma(0) = 0).
  const double late = ibvp::assemble_K(g, alpha, 1e7).cwiseAbs().maxCoeff();
  CHECK(late < 1e-3);
  const double mid = ibvp::assemble_K(g, alpha, 1.0).cwiseAbs().maxCoeff();
  CHECK(late < mid);
  CHECK_THROWS_AS((void)ibvp::assemble_K(g, alpha, 0.0), std::domain_error);
}

TEST_CASE("F traces: zero data vanish; refinement stability") {
  const auto g = reference_ibvp_graph();
  TimeGrid tg(0.5, 16);
  auto d = zero_ibvp_data(g, tg);
  const auto tr = ibvp::compute_F_traces(g, d, tg);
  for (int i = 0; i <= 16; ++i)
    for (int j = 0; j < 2; ++j) {
      CHECK(tr.f0.at(i, j) == 0.0);
      CHECK(tr.fL.at(i, j) == 0.0);
    }

  d.u0[0] = [](double x) {
    const double s = (2.0 * x + 1.0) / 0.5;  // bump inside (-1, 0)
    return std::fabs(s) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0;
  };
  const auto a = ibvp::compute_F_traces(g, d, tg, 1);
  const auto b = ibvp::compute_F_traces(g, d, tg, 2);
  double worst = 0.0;
  for (int i = 0; i <= 16; ++i)
    for (int j = 0; j < 2; ++j)
      worst = std::max({worst, std::fabs(a.f0.at(i, j) - b.f0.at(i, j)),
                        std::fabs(a.fL.at(i, j) - b.fL.at(i, j)),
                        std::fabs(a.fx0.at(i, j) - b.fx0.at(i, j))});
  CHECK(worst < 1e-5);
}

TEST_CASE("assemble_H: zero data gives zero; linear in the data") {
  const auto g = reference_ibvp_graph();
  TimeGrid tg(0.5, 64);
  {
    const auto d = zero_ibvp_data(g, tg);
    const auto tr = ibvp::compute_F_traces(g, d, tg);
    const auto H = ibvp::assemble_H(g, d, tr);
    for (int i = 0; i <= 64; ++i)
      for (int c = 0; c < 6; ++c) CHECK(H.at(i, c) == 0.0);
  }
  {
    // Scaling varphi scales the endpoint rows linearly.
    auto d = zero_ibvp_data(g, tg);
    for (int i = 0; i <= 64; ++i) {
      d.varphi->at(i, 0) = std::sin(tg.node(i));
      d.varphi->at(i, 1) = tg.node(i);
    }
    const auto tr = ibvp::compute_F_traces(g, d, tg);
    const auto h1 = ibvp::assemble_H(g, d, tr);
    for (int i = 0; i <= 64; ++i) {
      d.varphi->at(i, 0) *= 2.0;
      d.varphi->at(i, 1) *= 2.0;
    }
    const auto h2 = ibvp::assemble_H(g, d, tr);
    for (int i = 0; i <= 64; ++i)
      for (int c = 0; c < 6; ++c)
        CHECK(h2.at(i, c) == doctest::Approx(2.0 * h1.at(i, c)).epsilon(1e-13));
  }
}

TEST_CASE("volterra stepping: homogeneous system stays zero") {
  const auto g = reference_ibvp_graph();
  TimeGrid tg(0.5, 32);
  TraceGrid H(tg, 6);
  const auto dens = ibvp::solve_volterra(g, 0.5, H);
  for (int i = 0; i <= 32; ++i) {
    CHECK(dens.alpha_d.at(i, 0) == 0.0);
    CHECK(dens.gamma_d.at(i, 1) == 0.0);
    CHECK(dens.rho_d.at(i, 0) == 0.0);
  }
}

TEST_CASE("volterra stepping: manufactured scalar round trip") {
  // Q = [1], K(s) = s^{-1/2} e^{-1/s} (integrable, vanishing at 0+),
  // Lambda(t) = t. H is built by quadrature of the forward map and the
  // stepper must recover Lambda.
  auto kernel = [](double s) { return std::exp(-1.0 / s) / std::sqrt(s); };
  TimeGrid tg(1.0, 256);
  const auto w =
      potentials::product_lag_weights(kernel, tg, 1.0 / 45.0, -2.0, 1.0);
  std::vector<Eigen::MatrixXd> wn(tg.n_steps() + 1), wf(tg.n_steps() + 1);
  for (int l = 0; l <= tg.n_steps(); ++l) {
    wn[l] = Eigen::MatrixXd::Constant(1, 1, w.near[l]);
    wf[l] = Eigen::MatrixXd::Constant(1, 1, w.far[l]);
  }
  // Forward map by refined quadrature, independent of the lag weights.
  TraceGrid H(tg, 1);
  for (int i = 1; i <= tg.n_steps(); ++i) {
    const double t = tg.node(i);
    const double conv = oracles::refine_quadrature(
        [&](double s) { return kernel(std::max(s, 1e-12)) * (t - s); }, 0.0, t,
        20000);
    H.at(i) = t + conv;
  }
  const Eigen::MatrixXd lam =
      ibvp::volterra_step(Eigen::MatrixXd::Identity(1, 1), wn, wf, H);
  double worst = 0.0;
  for (int i = 0; i <= tg.n_steps(); ++i)
    worst = std::max(worst, std::fabs(lam(0, i) - tg.node(i)));
  CHECK(worst < 1e-4);
}

TEST_CASE("volterra stepping is causal") {
  const auto g = reference_ibvp_graph();
  TimeGrid tg(0.5, 32), half(0.25, 16);  // same step
  auto d = zero_ibvp_data(g, tg);
  for (int i = 0; i <= 32; ++i) {
    d.varphi->at(i, 0) = std::sin(3.0 * tg.node(i));
    d.varphi->at(i, 1) = tg.node(i) * tg.node(i);
  }
  const auto tr = ibvp::compute_F_traces(g, d, tg);
  const auto H = ibvp::assemble_H(g, d, tr);
  TraceGrid Hh(half, 6);
  for (int i = 0; i <= 16; ++i)
    for (int c = 0; c < 6; ++c) Hh.at(i, c) = H.at(i, c);
  const auto full = ibvp::solve_volterra(g, d.alpha, H);
  const auto trunc = ibvp::solve_volterra(g, d.alpha, Hh);
  for (int i = 0; i <= 16; ++i)
    for (int j = 0; j < 2; ++j) {
      CHECK(full.alpha_d.at(i, j) == trunc.alpha_d.at(i, j));
      CHECK(full.gamma_d.at(i, j) == trunc.gamma_d.at(i, j));
    }
}

TEST_CASE("eval_solution_ibvp: zero problem and domain guards") {
  const auto g = reference_ibvp_graph();
  TimeGrid tg(0.5, 16);
  const auto d = zero_ibvp_data(g, tg);
  ibvp::DensitySetIBVP dens{TraceGrid(tg, 2), TraceGrid(tg, 1),
                            TraceGrid(tg, 2), TraceGrid(tg, 1)};
  CHECK(ibvp::eval_solution_ibvp(g, d, dens, 0, -0.5, 0.25) == 0.0);
  CHECK(ibvp::eval_solution_ibvp(g, d, dens, 1, 0.5, 0.5) == 0.0);
  CHECK_THROWS_AS(
      (void)ibvp::eval_solution_ibvp(g, d, dens, 0, 0.5, 0.25),
      std::invalid_argument);
  CHECK_THROWS_AS(
      (void)ibvp::eval_solution_ibvp(g, d, dens, 1, 1.5, 0.25),
      std::invalid_argument);
}

TEST_CASE("solve_field refuses the wrong definiteness") {
  auto g = reference_ibvp_graph();
  g.B(0, 0) = 2.0;  // positive definite coupling: not IBVP-valid
  TimeGrid tg(0.25, 16);
  const auto d = zero_ibvp_data(g, tg);
  verify::FieldGridSpec spec;
  spec.t_end = 0.25;
  spec.n_steps = 16;
  spec.n_x = 40;
  CHECK_THROWS_AS((void)ibvp::solve_field(g, d, spec), hypothesis_error);
}
