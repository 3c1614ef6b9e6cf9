#ifndef TFAIRY_GRAPH_HPP
#define TFAIRY_GRAPH_HPP

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tfairy/fraccalc.hpp"
#include "tfairy/potentials.hpp"

namespace tfairy::graph {

/// Star graph with k incoming bonds (coordinates in (-inf,0) or (L_j,0),
/// L_j < 0) and m outgoing bonds ((0,inf) or (0,L_j), L_j > 0), glued at the
/// vertex x = 0. Bond indices are 0-based internally; bond 0 is "bond 1" of
/// the coupling conditions.
struct StarGraph {
  int k = 1;
  int m = 1;
  Eigen::VectorXd a;       // k+m coupling coefficients, a(0) == 1
  Eigen::MatrixXd B;       // m x k derivative coupling
  std::optional<Eigen::VectorXd> lengths;  // absent: Cauchy geometry

  int n_bonds() const { return k + m; }
  bool is_incoming(int j) const { return j < k; }
  bool finite() const { return lengths.has_value(); }

  /// Signed bond endpoint away from the vertex (L_j), requires finite().
  double length(int j) const;

  /// Spatial interval of bond j; infinite side truncated at |trunc| when the
  /// graph is a Cauchy one (trunc <= 0 keeps the infinite endpoint).
  potentials::BondDomain bond_domain(int j, double trunc = 0.0) const;

  void check() const;
};

enum class ProblemKind { Cauchy, Ibvp };

/// Per-bond data of either problem. u0 and f are callables (presets or user
/// functions); varphi/phi are sampled boundary traces (IBVP only).
struct ProblemData {
  double alpha = 0.5;
  std::vector<std::function<double(double)>> u0;          // per bond
  std::vector<std::function<double(double, double)>> f;   // per bond, f(x,t)
  bool f_is_zero = true;  // enables skipping Duhamel terms
  std::optional<fraccalc::TraceGrid> varphi;  // k+m components
  std::optional<fraccalc::TraceGrid> phi;     // k components
};

enum class Definiteness { Positive, Negative, Indefinite, Semidefinite };

/// Eigenvalue-sign classification of a symmetric matrix.
Definiteness definiteness(const Eigen::MatrixXd& sym, double tol = 1e-10);

struct ValidationReport {
  bool coefficients_ok = false;
  Definiteness coupling = Definiteness::Indefinite;  // of B^T B - I_k
  bool hypothesis_ok = false;      // matches the requested problem kind
  double compat_residual = 0.0;    // vertex-condition residual of u0 at t=0
  bool compat_ok = false;          // residual within tolerance (warning-level)
  bool decay_ok = true;            // u0/f decayed at the truncation radius
  std::vector<std::string> errors;
  std::vector<std::string> warnings;

  bool hard_ok() const { return coefficients_ok && errors.empty(); }
};

/// Checks the standing hypotheses: coefficient validity, definiteness of
/// B^T B - I_k (positive for Cauchy, negative for IBVP), t=0 compatibility of
/// u0 with the vertex conditions (warning), and data decay at the truncation
/// radius for Cauchy geometry.
ValidationReport validate(const StarGraph& g, const ProblemData& data,
                          ProblemKind kind, double trunc_radius = 0.0,
                          double compat_tol = 1e-8);

}  // namespace tfairy::graph

#endif
