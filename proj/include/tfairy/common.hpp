#ifndef TFAIRY_COMMON_HPP
#define TFAIRY_COMMON_HPP

#include <stdexcept>
#include <string>

namespace tfairy {

/// Accuracy contract for series and quadrature evaluations.
struct AccuracySpec {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_terms = 400;

  void check() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || max_terms < 1)
      throw std::invalid_argument("AccuracySpec: abs_tol > 0, rel_tol > 0, max_terms >= 1 required");
  }
};

/// A series or quadrature could not certify the requested accuracy.
class convergence_error : public std::runtime_error {
 public:
  explicit convergence_error(const std::string& what) : std::runtime_error(what) {}
};

/// The working precision cannot resolve the requested tolerance (catastrophic
/// cancellation detected by the a-posteriori roundoff estimate).
class precision_error : public std::runtime_error {
 public:
  explicit precision_error(const std::string& what) : std::runtime_error(what) {}
};

/// A linear solve was refused because the matrix is numerically singular.
class singular_system_error : public std::runtime_error {
 public:
  explicit singular_system_error(const std::string& what) : std::runtime_error(what) {}
};

/// The uniqueness hypothesis of the selected problem is violated; the solver
/// refuses rather than regularizing.
class hypothesis_error : public std::runtime_error {
 public:
  explicit hypothesis_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tfairy

#endif
