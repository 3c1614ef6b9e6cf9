#include "detail/ddreal.hpp"

#if defined(__SIZEOF_FLOAT128__)

#include <stdexcept>

namespace tfairy::detail {

namespace {

// atan(1/m) for integer m via the Taylor series in 1/m (converges like m^-2).
dd dd_atan_inv(long m) {
  const dd x = dd_div(dd(1.0Q), dd((__float128)m));
  const dd x2 = dd_mul(x, x);
  dd term = x;
  dd sum = x;
  for (int k = 1; k < 120; ++k) {
    term = dd_mul(term, x2);
    const dd c = dd_div(term, dd((__float128)(2 * k + 1)));
    sum = (k & 1) ? dd_sub(sum, c) : dd_add(sum, c);
    if (fabsq(c.hi) < 1e-75Q * fabsq(sum.hi)) break;
  }
  return sum;
}

dd compute_pi() {
  // Machin: pi/4 = 4 atan(1/5) - atan(1/239).
  dd v = dd_sub(dd_mul(dd(4.0Q), dd_atan_inv(5)), dd_atan_inv(239));
  return dd_mul(dd(4.0Q), v);
}

dd compute_ln2() {
  // ln 2 = 2 atanh(1/3) = 2 sum_k (1/3)^(2k+1) / (2k+1).
  const dd x = dd_div(dd(1.0Q), dd(3.0Q));
  const dd x2 = dd_mul(x, x);
  dd term = x;
  dd sum = x;
  for (int k = 1; k < 120; ++k) {
    term = dd_mul(term, x2);
    const dd c = dd_div(term, dd((__float128)(2 * k + 1)));
    sum = dd_add(sum, c);
    if (fabsq(c.hi) < 1e-75Q * fabsq(sum.hi)) break;
  }
  return dd_mul(dd(2.0Q), sum);
}

dd exp_taylor_small(const dd& r) {
  // |r| <= 0.5: plain Taylor, ~50 terms reach the dd target.
  dd sum(1.0Q);
  dd term(1.0Q);
  for (int k = 1; k < 60; ++k) {
    term = dd_div(dd_mul(term, r), dd((__float128)k));
    sum = dd_add(sum, term);
    if (fabsq(term.hi) < 1e-74Q) break;
  }
  return sum;
}

}  // namespace

const dd& dd_pi() {
  static const dd v = compute_pi();
  return v;
}

const dd& dd_ln2() {
  static const dd v = compute_ln2();
  return v;
}

const dd& dd_sqrt_2pi() {
  static const dd v = dd_sqrt(dd_mul(dd(2.0Q), dd_pi()));
  return v;
}

dd dd_exp(const dd& x) {
  if (x.hi > 11300.0Q) throw std::overflow_error("dd_exp: overflow");
  if (x.hi < -11400.0Q) return dd(0.0Q);
  const dd& l2 = dd_ln2();
  const long m = (long)nearbyintq(x.hi / l2.hi);
  const dd r = dd_sub(x, dd_mul(dd((__float128)m), l2));
  return dd_ldexp(exp_taylor_small(r), (int)m);
}

dd dd_log(const dd& x) {
  if (!(x.hi > 0.0Q)) throw std::domain_error("dd_log: positive argument required");
  // Quad seed, then one Newton step: l <- l + x*exp(-l) - 1.
  dd l(logq(x.hi));
  for (int it = 0; it < 2; ++it) {
    const dd el = dd_exp(dd_neg(l));
    l = dd_add(l, dd_sub(dd_mul(x, el), dd(1.0Q)));
  }
  return l;
}

dd dd_sin_pi_linear(double lambda, long n, double mu, bool& pole) {
  // x = lambda*n + mu assembled exactly in dd.
  __float128 p, e;
  two_prod((__float128)lambda, (__float128)n, p, e);
  dd x = dd_add(dd(p, e), dd((__float128)mu));
  const __float128 k = nearbyintq(x.hi);
  dd r = dd_sub(x, dd(k));
  if (r.hi == 0.0Q && r.lo == 0.0Q) {
    pole = true;
    return dd(0.0Q);
  }
  pole = false;
  const dd t = dd_mul(dd_pi(), r);
  const dd t2 = dd_mul(t, t);
  dd term = t;
  dd sum = t;
  for (int j = 1; j < 40; ++j) {
    term = dd_div(dd_mul(term, t2), dd((__float128)((2 * j) * (2 * j + 1))));
    sum = (j & 1) ? dd_sub(sum, term) : dd_add(sum, term);
    if (fabsq(term.hi) < 1e-74Q) break;
  }
  const long long ki = (long long)k;
  return (ki & 1LL) ? dd_neg(sum) : sum;
}

namespace {

// Exact Bernoulli rationals B_2 .. B_40 (numerators fit the binary128
// mantissa exactly).
struct BernFrac {
  __float128 num, den;
};
const BernFrac kBern[] = {
    {1.0Q, 6.0Q},
    {-1.0Q, 30.0Q},
    {1.0Q, 42.0Q},
    {-1.0Q, 30.0Q},
    {5.0Q, 66.0Q},
    {-691.0Q, 2730.0Q},
    {7.0Q, 6.0Q},
    {-3617.0Q, 510.0Q},
    {43867.0Q, 798.0Q},
    {-174611.0Q, 330.0Q},
    {854513.0Q, 138.0Q},
    {-236364091.0Q, 2730.0Q},
    {8553103.0Q, 6.0Q},
    {-23749461029.0Q, 870.0Q},
    {8615841276005.0Q, 14322.0Q},
    {-7709321041217.0Q, 510.0Q},
    {2577687858367.0Q, 6.0Q},
    {-26315271553053477373.0Q, 1919190.0Q},
    {2929993913841559.0Q, 6.0Q},
    {-261082718496449122051.0Q, 13530.0Q},
};

// Stirling coefficients B_{2k} / (2k (2k-1)); the series terms decay fast at
// the lifted argument, so no internal cancellation (unlike Spouge at the
// order a double-double target would need).
const std::vector<dd>& stirling_coeffs() {
  static std::once_flag flag;
  static std::vector<dd> c;
  std::call_once(flag, [] {
    c.resize(20);
    for (int k = 1; k <= 20; ++k)
      c[k - 1] = dd_div(dd(kBern[k - 1].num),
                        dd(kBern[k - 1].den * (__float128)(2 * k) *
                           (__float128)(2 * k - 1)));
  });
  return c;
}

}  // namespace

dd dd_gamma_pos(const dd& w_in) {
  // Lift to w >= 64 where the truncated Stirling tail sits below the
  // double-double target, then divide the lift product back out.
  dd w = w_in;
  dd lift(1.0Q);
  while (w.hi < 64.0Q) {
    lift = dd_mul(lift, w);
    w = dd_add(w, dd(1.0Q));
  }
  const auto& c = stirling_coeffs();
  const dd inv = dd_div(dd(1.0Q), w);
  const dd inv2 = dd_mul(inv, inv);
  dd p = inv;
  dd corr(0.0Q);
  for (int k = 0; k < 20; ++k) {
    corr = dd_add(corr, dd_mul(c[k], p));
    p = dd_mul(p, inv2);
  }
  // ln Gamma(w) = (w - 1/2) ln w - w + ln sqrt(2 pi) + corr
  dd lg = dd_mul(dd_sub(w, dd(0.5Q)), dd_log(w));
  lg = dd_sub(lg, w);
  lg = dd_add(lg, dd_log(dd_sqrt_2pi()));
  lg = dd_add(lg, corr);
  return dd_div(dd_exp(lg), lift);
}

dd dd_rgamma_linear(double lambda, long n, double mu) {
  __float128 p, e;
  two_prod((__float128)lambda, (__float128)n, p, e);
  const dd x = dd_add(dd(p, e), dd((__float128)mu));
  if (x.hi > 0.5Q) return dd_div(dd(1.0Q), dd_gamma_pos(x));
  bool pole = false;
  const dd s = dd_sin_pi_linear(lambda, n, mu, pole);
  if (pole) return dd(0.0Q);
  // 1/Gamma(x) = sin(pi x) * Gamma(1-x) / pi
  return dd_div(dd_mul(s, dd_gamma_pos(dd_sub(dd(1.0Q), x))), dd_pi());
}

}  // namespace tfairy::detail

#endif  // __SIZEOF_FLOAT128__
