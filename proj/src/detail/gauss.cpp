#include "detail/gauss.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace tfairy::detail {

namespace {

GaussRule build_rule(int n) {
  if (n < 1) throw std::invalid_argument("gauss_rule: order must be >= 1");
  GaussRule r;
  r.node.resize(n);
  r.weight.resize(n);
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      // Legendre P_n(x) and P_n'(x) by the three-term recurrence.
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    r.node[i] = -x;
    r.node[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.weight[i] = w;
    r.weight[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.node[n / 2] = 0.0;
  return r;
}

}  // namespace

const GaussRule& gauss_rule(int n) {
  static std::mutex mx;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lk(mx);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
  return it->second;
}

}  // namespace tfairy::detail
