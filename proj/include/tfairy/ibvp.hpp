#ifndef TFAIRY_IBVP_HPP
#define TFAIRY_IBVP_HPP

#include <Eigen/Dense>

#include "tfairy/fraccalc.hpp"
#include "tfairy/graph.hpp"
#include "tfairy/verify.hpp"

namespace tfairy::ibvp {

/// Endpoint and vertex densities of the finite-bond ansatz. beta lives on
/// incoming bonds only, rho on outgoing bonds only; the stacked unknown is
/// ordered (alpha^-, alpha^+, beta^-, gamma^-, gamma^+, rho^+), 3k+3m total.
struct DensitySetIBVP {
  fraccalc::TraceGrid alpha_d;  // k+m
  fraccalc::TraceGrid beta_d;   // k
  fraccalc::TraceGrid gamma_d;  // k+m
  fraccalc::TraceGrid rho_d;    // m
};

/// Free-field traces at the vertex and the far endpoints.
struct FTraces {
  fraccalc::TraceGrid f0;    // F_j(0, t), k+m
  fraccalc::TraceGrid fx0;   // d/dx F_j(0, t), k+m
  fraccalc::TraceGrid fxx0;  // d2/dx2 F_j(0, t), k+m
  fraccalc::TraceGrid fL;    // F_j(L_j, t), k+m
  fraccalc::TraceGrid fxL;   // d/dx F_j(L_j, t), incoming bonds, k
};

FTraces compute_F_traces(const graph::StarGraph& g,
                         const graph::ProblemData& data,
                         const fraccalc::TimeGrid& tgrid, int space_refine = 1);

/// Constant block matrix Q = [[0, M], [Q1, 0]] of the Volterra system, with M
/// the Cauchy coupling matrix acting on (gamma, rho) and Q1 the endpoint
/// block acting on (alpha, beta).
Eigen::MatrixXd assemble_Q(const graph::StarGraph& g);

/// Kernel matrix K(s) of the memory term at elapsed time s > 0. Entries pair
/// each density with the endpoint kernel its originating vertex/boundary
/// equation prescribes; all spatial arguments are offsets from the opposite
/// end of the bond, so every kernel is evaluated away from its anchor.
Eigen::MatrixXd assemble_K(const graph::StarGraph& g, double alpha, double s);

/// Right-hand side: Caputo-weighted free-field traces and boundary data.
fraccalc::TraceGrid assemble_H(const graph::StarGraph& g,
                               const graph::ProblemData& data,
                               const FTraces& traces);

/// Generic dense product-integration stepping of
/// Q Lambda(t) + int_0^t K(t-tau) Lambda(tau) d tau = H(t)
/// with precomputed per-lag weight matrices (lag l pairs w_near[l] with
/// Lambda_{n-l+1} and w_far[l] with Lambda_{n-l}). Columns of the result are
/// the solution nodes.
Eigen::MatrixXd volterra_step(const Eigen::MatrixXd& Q,
                              const std::vector<Eigen::MatrixXd>& w_near,
                              const std::vector<Eigen::MatrixXd>& w_far,
                              const fraccalc::TraceGrid& H);

/// Product-integration (product-trapezoidal) time stepping of the graph
/// system. Kernel moments are integrated per lag with a dyadically refined
/// first lag, so the interior kernel spike below the first step is captured.
DensitySetIBVP solve_volterra(const graph::StarGraph& g, double alpha,
                              const fraccalc::TraceGrid& H);

double eval_solution_ibvp(const graph::StarGraph& g,
                          const graph::ProblemData& data,
                          const DensitySetIBVP& densities, int bond, double x,
                          double t, int space_refine = 1);

verify::SolutionField solve_field(const graph::StarGraph& g,
                                  const graph::ProblemData& data,
                                  const verify::FieldGridSpec& spec);

}  // namespace tfairy::ibvp

#endif
