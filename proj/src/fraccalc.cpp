#include "tfairy/fraccalc.hpp"

#include <cmath>
#include <stdexcept>

#include "tfairy/specfun.hpp"

namespace tfairy::fraccalc {

TimeGrid::TimeGrid(double t_end, int n_steps) : t_end_(t_end), n_steps_(n_steps) {
  if (!(t_end > 0.0)) throw std::invalid_argument("TimeGrid: t_end > 0 required");
  if (n_steps < 1) throw std::invalid_argument("TimeGrid: n_steps >= 1 required");
}

int TimeGrid::index_of(double t, double tol_rel) const {
  const double x = t / dt();
  const int i = static_cast<int>(std::lround(x));
  if (i < 0 || i > n_steps_ || std::fabs(x - i) > tol_rel * n_steps_)
    throw std::invalid_argument("TimeGrid: t is not aligned with the mesh");
  return i;
}

TraceGrid::TraceGrid(TimeGrid grid, int dim)
    : grid_(grid), dim_(dim), v_(static_cast<std::size_t>(grid.n_nodes()) * dim, 0.0) {
  if (dim < 1) throw std::invalid_argument("TraceGrid: dim >= 1 required");
}

TraceGrid TraceGrid::sample(const TimeGrid& g,
                            const std::function<double(double)>& f) {
  TraceGrid out(g, 1);
  for (int i = 0; i < g.n_nodes(); ++i) out.at(i) = f(g.node(i));
  return out;
}

std::size_t TraceGrid::idx(int node, int comp) const {
  if (node < 0 || node >= grid_.n_nodes() || comp < 0 || comp >= dim_)
    throw std::out_of_range("TraceGrid: index out of range");
  return static_cast<std::size_t>(node) * dim_ + comp;
}

double TraceGrid::interp(double t, int comp) const {
  const double dt = grid_.dt();
  const double x = t / dt;
  if (x < -1e-12 || x > grid_.n_steps() + 1e-9)
    throw std::invalid_argument("TraceGrid::interp: t outside grid");
  const int i0 = std::min(std::max(0, static_cast<int>(std::floor(x))),
                          grid_.n_steps() - 1);
  const double w = x - i0;
  return (1.0 - w) * at(i0, comp) + w * at(i0 + 1, comp);
}

void TraceGrid::check_finite() const {
  for (double x : v_)
    if (!std::isfinite(x))
      throw std::invalid_argument("TraceGrid: non-finite sample");
}

TraceGrid caputo_derivative(const TraceGrid& f, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("caputo_derivative: alpha in (0,1) required");
  const TimeGrid& g = f.grid();
  if (g.n_nodes() < 2)
    throw std::invalid_argument("caputo_derivative: need at least 2 nodes");
  const int n = g.n_steps();
  const double dt = g.dt();
  const double pref =
      std::pow(dt, -alpha) / specfun::gamma_fn(2.0 - alpha);

  // c[l] = l^{1-alpha} - (l-1)^{1-alpha}
  std::vector<double> c(n + 1, 0.0);
  for (int l = 1; l <= n; ++l)
    c[l] = std::pow(static_cast<double>(l), 1.0 - alpha) -
           std::pow(static_cast<double>(l - 1), 1.0 - alpha);

  TraceGrid out(g, f.dim());
  for (int comp = 0; comp < f.dim(); ++comp) {
    for (int i = 1; i <= n; ++i) {
      double s = 0.0;
      for (int j = 0; j < i; ++j)
        s += (f.at(j + 1, comp) - f.at(j, comp)) * c[i - j];
      out.at(i, comp) = pref * s;
    }
  }
  return out;
}

TraceGrid rl_integral(const TraceGrid& f, double alpha) {
  if (!(alpha > 0.0))
    throw std::invalid_argument("rl_integral: alpha > 0 required");
  const TimeGrid& g = f.grid();
  const int n = g.n_steps();
  const double dt = g.dt();
  const double rg = 1.0 / specfun::gamma_fn(alpha);

  // Exact kernel moments per lag: over tau in [(l-1)dt, l dt],
  // I0 = int tau^{alpha-1}, I1 = int tau^alpha.
  std::vector<double> w_near(n + 1, 0.0), w_far(n + 1, 0.0);
  for (int l = 1; l <= n; ++l) {
    const double a = (l - 1) * dt, b = l * dt;
    const double i0 =
        (std::pow(b, alpha) - std::pow(a, alpha)) / alpha;
    const double i1 =
        (std::pow(b, alpha + 1.0) - std::pow(a, alpha + 1.0)) / (alpha + 1.0);
    // f(t_n - tau) = f_{n-l} * (tau - a)/dt + f_{n-l+1} * (b - tau)/dt
    w_far[l] = (i1 - a * i0) / dt;   // multiplies f_{n-l}
    w_near[l] = (b * i0 - i1) / dt;  // multiplies f_{n-l+1}
  }

  TraceGrid out(g, f.dim());
  for (int comp = 0; comp < f.dim(); ++comp) {
    for (int i = 1; i <= n; ++i) {
      double s = 0.0;
      for (int l = 1; l <= i; ++l)
        s += w_near[l] * f.at(i - l + 1, comp) + w_far[l] * f.at(i - l, comp);
      out.at(i, comp) = rg * s;
    }
  }
  return out;
}

TraceGrid caputo_derivative_refined(
    const TraceGrid& f, double alpha,
    const std::function<double(double, int)>& sampler, int head) {
  TraceGrid out = caputo_derivative(f, alpha);
  const TimeGrid& g = f.grid();
  const int n = g.n_steps();
  const double dt = g.dt();
  if (head <= 0) head = std::max(8, n / 16);
  head = std::min(head, n - 1);
  if (head < 1) return out;

  // Head quadrature nodes (dyadic cell 0, split Gauss elsewhere).
  static const double gx[8] = {-0.96028985649753623, -0.79666647741362674,
                               -0.52553240991632899, -0.18343464249564980,
                               0.18343464249564980,  0.52553240991632899,
                               0.79666647741362674,  0.96028985649753623};
  static const double gw[8] = {0.10122853629037626, 0.22238103445337447,
                               0.31370664587788729, 0.36268378337836198,
                               0.36268378337836198, 0.31370664587788729,
                               0.22238103445337447, 0.10122853629037626};
  std::vector<double> sq, wq;
  auto add_panel = [&](double a, double b) {
    for (int q = 0; q < 8; ++q) {
      sq.push_back(0.5 * (a + b) + 0.5 * (b - a) * gx[q]);
      wq.push_back(0.5 * (b - a) * gw[q]);
    }
  };
  double hi = dt;
  for (int j = 0; j < 48 && hi > 1e-14 * dt; ++j) {
    add_panel(0.5 * hi, hi);
    hi *= 0.5;
  }
  for (int c = 1; c < head; ++c) {
    add_panel(c * dt, (c + 0.5) * dt);
    add_panel((c + 0.5) * dt, (c + 1) * dt);
  }

  const double gfac = specfun::gamma_fn(1.0 - alpha);
  const double b = head * dt;
  for (int comp = 0; comp < f.dim(); ++comp) {
    std::vector<double> fs(sq.size());
    for (std::size_t q = 0; q < sq.size(); ++q) fs[q] = sampler(sq[q], comp);
    const double f0 = f.at(0, comp), fb = f.at(head, comp);
    for (int i = head + 1; i <= n; ++i) {
      const double tn = g.node(i);
      // Subtract the L1 model of the head cells.
      double model = 0.0;
      for (int c = 0; c < head; ++c) {
        const double m = (std::pow(tn - c * dt, 1.0 - alpha) -
                          std::pow(tn - (c + 1) * dt, 1.0 - alpha)) /
                         (1.0 - alpha);
        model += (f.at(c + 1, comp) - f.at(c, comp)) / dt * m;
      }
      // Exact head by parts: int f' k = f(b)k(b) - f(0)k(0) - int f k'.
      double refined = fb * std::pow(tn - b, -alpha) - f0 * std::pow(tn, -alpha);
      for (std::size_t q = 0; q < sq.size(); ++q)
        refined -= fs[q] * wq[q] * alpha * std::pow(tn - sq[q], -alpha - 1.0);
      out.at(i, comp) += (refined - model) / gfac;
    }
  }
  return out;
}

double apriori_rhs(double u0_norm_sq, const TraceGrid& f_norm_sq, double alpha,
                   double t, SourceTermForm form) {
  if (u0_norm_sq < 0.0)
    throw std::invalid_argument("apriori_rhs: norms must be nonnegative");
  if (t < 0.0 || t > f_norm_sq.grid().t_end() * (1.0 + 1e-12))
    throw std::invalid_argument("apriori_rhs: t outside grid range");
  const double za = 2.0 * std::pow(t, alpha);
  const double e1 = specfun::mittag_leffler(alpha, 1.0, za);
  double out = u0_norm_sq * e1;
  const TraceGrid src = form == SourceTermForm::FractionalIntegral
                            ? rl_integral(f_norm_sq, alpha)
                            : caputo_derivative(f_norm_sq, alpha);
  const double e2 = specfun::mittag_leffler(alpha, alpha, za);
  out += specfun::gamma_fn(alpha) * e2 * src.interp(t);
  return out;
}

}  // namespace tfairy::fraccalc
