#ifndef TFAIRY_VERIFY_HPP
#define TFAIRY_VERIFY_HPP

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "tfairy/fraccalc.hpp"
#include "tfairy/graph.hpp"

namespace tfairy::verify {

/// Discretization request for a solver run.
struct FieldGridSpec {
  double t_end = 1.0;
  int n_steps = 256;
  int n_x = 200;              // per-bond space intervals
  double trunc_radius = 0.0;  // Cauchy bonds; 0 = choose from data support
  int space_refine = 1;
};

/// Per-bond space-time samples of a solved field plus metadata. Bond grids
/// are ordered by increasing coordinate; incoming bonds end at the vertex,
/// outgoing bonds start there.
struct SolutionField {
  graph::StarGraph g;
  double alpha = 0.5;
  fraccalc::TimeGrid tgrid{1.0, 1};
  std::vector<Eigen::VectorXd> x;  // per bond
  std::vector<Eigen::MatrixXd> u;  // per bond, (n_x+1) rows by n_nodes cols
  std::string provenance;          // "cauchy" or "ibvp"
  double trunc_radius = 0.0;

  int vertex_index(int bond) const {
    return g.is_incoming(bond) ? static_cast<int>(x[bond].size()) - 1 : 0;
  }
  void check_shapes() const;
};

struct VertexResiduals {
  double continuity = 0.0;  // max_t max_j |a_j u_j(0,t) - u_1(0,t)|
  double derivative = 0.0;  // max_t ||u_x^+(0,t) - B u_x^-(0,t)||_inf
  double flux = 0.0;        // max_t |sum_in u_xx/a - sum_out u_xx/a|
  double max() const { return std::max(continuity, std::max(derivative, flux)); }
};

struct BoundaryResiduals {
  double dirichlet = 0.0;  // max over bonds/time of |u(L,t) - varphi(t)|
  double neumann = 0.0;    // incoming bonds, |u_x(L,t) - phi(t)|
};

struct ResidualReport {
  double pde_residual_max = 0.0;
  VertexResiduals vertex;
  BoundaryResiduals boundary;
  double energy_margin = 0.0;
  double det_margin = 0.0;
  double condition_estimate = 0.0;
};

/// Max interior residual of D^alpha u - u_xxx - f, with the L1 scheme in time
/// and 4th-order central differences in x; the first 3 time nodes and 3 space
/// nodes near each end are excluded (scheme boundary layers). The solution of
/// a fractional problem behaves like t^alpha near t = 0, where the L1 scheme
/// cannot be accurate at fixed node index; skip_time widens the excluded
/// initial layer (it is reported in the run metadata).
double pde_residual(const SolutionField& field,
                    const std::vector<std::function<double(double, double)>>& f,
                    double skip_time = 0.0);

/// Residuals of the vertex conditions from one-sided stencils on the field;
/// skip_time excludes the fractional startup layer (reported in metadata).
VertexResiduals vertex_residuals(const SolutionField& field,
                                 double skip_time = 0.0);

/// Boundary-condition residuals of an IBVP field.
BoundaryResiduals boundary_residuals(const SolutionField& field,
                                     const fraccalc::TraceGrid& varphi,
                                     const fraccalc::TraceGrid& phi,
                                     double skip_time = 0.0);

/// min over t of apriori_rhs(t) - ||u(.,t)||_0^2; nonnegative within the
/// discretization slack certifies the energy estimate.
double energy_check(const SolutionField& field, const graph::ProblemData& data);

/// L2(graph) squared norm of the field at one time node (trapezoid per bond).
double field_norm_sq(const SolutionField& field, int node);

struct ConvergenceRow {
  double dt = 0.0;
  double dx = 0.0;
  double residual = 0.0;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  double fitted_order = 0.0;  // least-squares slope in log-log vs dt
  bool monotone = true;
};

/// Runs `residual_at_level` for each level and fits the empirical order.
ConvergenceTable convergence_study(
    const std::function<ConvergenceRow(int level)>& residual_at_level,
    int levels);

}  // namespace tfairy::verify

#endif
