#ifndef TFAIRY_DETAIL_GAUSS_HPP
#define TFAIRY_DETAIL_GAUSS_HPP

#include <vector>

namespace tfairy::detail {

/// Gauss-Legendre rule on [-1, 1], nodes computed by Newton iteration on the
/// Legendre recurrence. Rules are cached per order.
struct GaussRule {
  std::vector<double> node;
  std::vector<double> weight;
};

const GaussRule& gauss_rule(int n);

template <class F>
double gauss_integrate(F&& f, double a, double b, int n) {
  const GaussRule& r = gauss_rule(n);
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < r.node.size(); ++i)
    s += r.weight[i] * f(c + h * r.node[i]);
  return h * s;
}

/// Composite version with uniform panels.
template <class F>
double gauss_integrate_panels(F&& f, double a, double b, int panels, int n) {
  double s = 0.0;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p)
    s += gauss_integrate(f, a + p * h, a + (p + 1) * h, n);
  return s;
}

}  // namespace tfairy::detail

#endif
