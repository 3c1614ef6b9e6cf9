#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "tfairy/graph.hpp"

using namespace tfairy;
using graph::Definiteness;
using graph::ProblemKind;
using graph::StarGraph;

namespace {

StarGraph two_bond(double b) {
  StarGraph g;
  g.k = 1;
  g.m = 1;
  g.a = Eigen::Vector2d(1.0, 1.0);
  g.B = Eigen::MatrixXd::Constant(1, 1, b);
  return g;
}

graph::ProblemData zero_data(const StarGraph& g) {
  graph::ProblemData d;
  d.alpha = 0.5;
  for (int j = 0; j < g.n_bonds(); ++j) {
    d.u0.emplace_back([](double) { return 0.0; });
    d.f.emplace_back([](double, double) { return 0.0; });
  }
  return d;
}

}  // namespace

TEST_CASE("definiteness classification") {
  CHECK(graph::definiteness(Eigen::Matrix2d::Identity()) ==
        Definiteness::Positive);
  CHECK(graph::definiteness(-Eigen::Matrix2d::Identity()) ==
        Definiteness::Negative);
  Eigen::Matrix2d ind;
  ind << 1.0, 0.0, 0.0, -1.0;
  CHECK(graph::definiteness(ind) == Definiteness::Indefinite);
  Eigen::Matrix2d semi;
  semi << 1.0, 0.0, 0.0, 0.0;
  CHECK(graph::definiteness(semi) == Definiteness::Semidefinite);
  Eigen::MatrixXd asym(2, 2);
  asym << 0.0, 1.0, 0.0, 0.0;
  CHECK_THROWS_AS((void)graph::definiteness(asym), std::invalid_argument);
}

TEST_CASE("definiteness is invariant under orthogonal changes of basis") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::Matrix3d b;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) b(i, j) = u(rng);
  const Eigen::Matrix3d spd =
      b * b.transpose() + 0.5 * Eigen::Matrix3d::Identity();
  for (int trial = 0; trial < 8; ++trial) {
    Eigen::Matrix3d r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r(i, j) = u(rng);
    const Eigen::HouseholderQR<Eigen::Matrix3d> qr(r);
    const Eigen::Matrix3d q = qr.householderQ();
    const Eigen::Matrix3d rotated = q.transpose() * spd * q;
    const Eigen::Matrix3d sym = 0.5 * (rotated + rotated.transpose());
    CHECK(graph::definiteness(sym, 1e-9) == Definiteness::Positive);
  }
}

TEST_CASE("hypothesis checks per problem kind") {
  // B = 2: B^T B - I = 3 > 0, Cauchy-valid.
  {
    const auto g = two_bond(2.0);
    const auto rep = graph::validate(g, zero_data(g), ProblemKind::Cauchy);
    CHECK(rep.coefficients_ok);
    CHECK(rep.coupling == Definiteness::Positive);
    CHECK(rep.hypothesis_ok);
  }
  // B = 0.5: B^T B - I = -0.75 < 0, IBVP-valid, Cauchy-invalid.
  {
    auto g = two_bond(0.5);
    const auto rep = graph::validate(g, zero_data(g), ProblemKind::Cauchy);
    CHECK(rep.coupling == Definiteness::Negative);
    CHECK(!rep.hypothesis_ok);

    g.lengths = Eigen::Vector2d(-1.0, 1.0);
    auto data = zero_data(g);
    fraccalc::TimeGrid tg(1.0, 16);
    data.varphi = fraccalc::TraceGrid(tg, 2);
    data.phi = fraccalc::TraceGrid(tg, 1);
    const auto rep2 = graph::validate(g, data, ProblemKind::Ibvp);
    CHECK(rep2.hypothesis_ok);
  }
}

TEST_CASE("coefficient validity") {
  auto g = two_bond(2.0);
  g.a(1) = 0.0;
  CHECK_THROWS_WITH_AS(g.check(), "StarGraph: a_j != 0 violated",
                       std::invalid_argument);
  g.a(1) = 1.0;
  g.a(0) = 2.0;
  CHECK_THROWS_AS(g.check(), std::invalid_argument);
  g.a(0) = 1.0;
  g.B.resize(2, 1);  // wrong shape
  g.B << 1.0, 2.0;
  CHECK_THROWS_AS(g.check(), std::invalid_argument);
}

TEST_CASE("u0 vertex compatibility is a warning, not an error") {
  const auto g = two_bond(2.0);
  auto data = zero_data(g);
  // Constant nonzero u0 on bond 2 only: continuity violated at the vertex.
  data.u0[1] = [](double) { return 1.0; };
  const auto rep = graph::validate(g, data, ProblemKind::Cauchy);
  CHECK(rep.hard_ok());
  CHECK(!rep.compat_ok);
  CHECK(rep.compat_residual > 0.5);
  CHECK(!rep.warnings.empty());
}

TEST_CASE("data decay at the truncation radius") {
  const auto g = two_bond(2.0);
  auto data = zero_data(g);
  data.u0[0] = [](double x) { return std::exp(-x * x); };  // wide support
  const auto rep = graph::validate(g, data, ProblemKind::Cauchy, 2.0);
  CHECK(!rep.decay_ok);
  const auto rep2 = graph::validate(g, data, ProblemKind::Cauchy, 12.0);
  CHECK(rep2.decay_ok);
}

TEST_CASE("bond domains and the sign convention of lengths") {
  auto g = two_bond(0.5);
  g.lengths = Eigen::Vector2d(-1.5, 2.5);
  g.check();
  const auto d0 = g.bond_domain(0);
  CHECK(d0.a == -1.5);
  CHECK(d0.b == 0.0);
  const auto d1 = g.bond_domain(1);
  CHECK(d1.a == 0.0);
  CHECK(d1.b == 2.5);
  (*g.lengths)(0) = 1.0;  // wrong sign for an incoming bond
  CHECK_THROWS_AS(g.check(), std::invalid_argument);
}
