#ifndef TFAIRY_CAUCHY_HPP
#define TFAIRY_CAUCHY_HPP

#include <Eigen/Dense>

#include "tfairy/fraccalc.hpp"
#include "tfairy/graph.hpp"
#include "tfairy/verify.hpp"

namespace tfairy::cauchy {

/// Unknown boundary densities of the Cauchy ansatz: phi on every bond, psi on
/// outgoing bonds only (the V kernel lives on x > 0).
struct DensitySetCauchy {
  fraccalc::TraceGrid phi;  // k+m components
  fraccalc::TraceGrid psi;  // m components (outgoing)
};

/// Traces of the free field R_j at the vertex.
struct RTraces {
  fraccalc::TraceGrid r0;    // R_j(0, t)
  fraccalc::TraceGrid rx0;   // d/dx R_j(0, t)
  fraccalc::TraceGrid rxx0;  // d^2/dx^2 R_j(0, t)
};

/// Free-field vertex traces: the initial-data term carries the D^{alpha-1}
/// kernel (order 1 - alpha/3) so that t -> 0 recovers u0, plus the Duhamel
/// term of f over the bond's own half-line.
RTraces compute_R_traces(const graph::StarGraph& g,
                         const graph::ProblemData& data,
                         const fraccalc::TimeGrid& tgrid, int space_refine = 1);

/// Constant vertex-coupling matrix of the algebraic system M Phi = h, size
/// (k+2m)^2, unknowns ordered (phi^-, phi^+, psi^+). The psi coefficient in
/// the continuity block is -(sqrt3/2) a_j: the sign the value trace of V
/// actually produces (the flipped sign printed in the source display is
/// inconsistent with its own derivation and breaks the vertex conditions).
Eigen::MatrixXd assemble_M(const graph::StarGraph& g);

/// Right-hand side rows: 3 D^{2a/3}(a_j R_j - R_1), 3 D^{a/3}(R_x^+ - B R_x^-),
/// and the flux row 3 (sum_out - sum_in) R_xx / a_j.
fraccalc::TraceGrid assemble_h(const graph::StarGraph& g, const RTraces& traces,
                               double alpha);

/// Same rows, but the Caputo derivatives integrate their first cells against
/// freshly quadratured sub-grid trace values (the traces start like t^alpha,
/// where the plain cell model is inaccurate). Used by solve_field.
fraccalc::TraceGrid assemble_h(const graph::StarGraph& g,
                               const graph::ProblemData& data,
                               const RTraces& traces,
                               const fraccalc::TimeGrid& tgrid,
                               int space_refine = 1);

/// Node-by-node solve of M Phi = h with one pivoted factorization; refuses
/// condition estimates above 1e12.
DensitySetCauchy solve_densities(const Eigen::MatrixXd& M,
                                 const fraccalc::TraceGrid& h,
                                 const graph::StarGraph& g);

/// Solution representation (free field plus vertex layers) at a bond point.
double eval_solution(const graph::StarGraph& g, const graph::ProblemData& data,
                     const DensitySetCauchy& densities, int bond, double x,
                     double t, int space_refine = 1);

/// Full pipeline onto sampling grids.
verify::SolutionField solve_field(const graph::StarGraph& g,
                                  const graph::ProblemData& data,
                                  const verify::FieldGridSpec& spec);

/// Support radius of the data (|u0|,|f| below 1e-8 outside), used for grid
/// truncation choices.
double data_support_radius(const graph::StarGraph& g,
                           const graph::ProblemData& data);

}  // namespace tfairy::cauchy

#endif
