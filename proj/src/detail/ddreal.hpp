#ifndef TFAIRY_DETAIL_DDREAL_HPP
#define TFAIRY_DETAIL_DDREAL_HPP

// Double-double arithmetic over __float128 (~66 significant digits).
// Used only by the deepest precision tier of the Wright series, where the
// alternating sum cancels more digits than binary128 carries. Algorithms are
// the standard error-free transformations (Dekker/Knuth) lifted to quad.

#if defined(__SIZEOF_FLOAT128__)

#include <quadmath.h>

#include <cmath>
#include <mutex>
#include <vector>

namespace tfairy::detail {

struct dd {
  __float128 hi = 0;
  __float128 lo = 0;
  dd() = default;
  dd(__float128 h) : hi(h), lo(0) {}
  dd(__float128 h, __float128 l) : hi(h), lo(l) {}
  explicit dd(double d) : hi(d), lo(0) {}
  double to_double() const { return static_cast<double>(hi + lo); }
};

inline void two_sum(__float128 a, __float128 b, __float128& s, __float128& e) {
  s = a + b;
  const __float128 bb = s - a;
  e = (a - (s - bb)) + (b - bb);
}

inline void quick_two_sum(__float128 a, __float128 b, __float128& s,
                          __float128& e) {
  s = a + b;
  e = b - (s - a);
}

inline void two_prod(__float128 a, __float128 b, __float128& p, __float128& e) {
  p = a * b;
  e = fmaq(a, b, -p);
}

inline dd dd_add(const dd& a, const dd& b) {
  __float128 s, e;
  two_sum(a.hi, b.hi, s, e);
  e += a.lo + b.lo;
  quick_two_sum(s, e, s, e);
  return {s, e};
}

inline dd dd_neg(const dd& a) { return {-a.hi, -a.lo}; }
inline dd dd_sub(const dd& a, const dd& b) { return dd_add(a, dd_neg(b)); }

inline dd dd_mul(const dd& a, const dd& b) {
  __float128 p, e;
  two_prod(a.hi, b.hi, p, e);
  e += a.hi * b.lo + a.lo * b.hi;
  quick_two_sum(p, e, p, e);
  return {p, e};
}

inline dd dd_div(const dd& a, const dd& b) {
  const __float128 q1 = a.hi / b.hi;
  dd r = dd_sub(a, dd_mul(dd(q1), b));
  const __float128 q2 = r.hi / b.hi;
  r = dd_sub(r, dd_mul(dd(q2), b));
  const __float128 q3 = r.hi / b.hi;
  __float128 s, e;
  quick_two_sum(q1, q2, s, e);
  e += q3;
  quick_two_sum(s, e, s, e);
  return {s, e};
}

inline dd operator+(const dd& a, const dd& b) { return dd_add(a, b); }
inline dd operator-(const dd& a, const dd& b) { return dd_sub(a, b); }
inline dd operator*(const dd& a, const dd& b) { return dd_mul(a, b); }
inline dd operator/(const dd& a, const dd& b) { return dd_div(a, b); }
inline dd operator-(const dd& a) { return dd_neg(a); }

inline dd dd_ldexp(const dd& a, int n) {
  return {ldexpq(a.hi, n), ldexpq(a.lo, n)};
}

inline dd dd_sqrt(const dd& a) {
  // Newton on 1/sqrt, one refinement from the quad seed.
  const __float128 s = sqrtq(a.hi);
  dd x(s);
  dd half(0.5Q);
  x = dd_add(x, dd_mul(half, dd_sub(dd_div(a, x), x)));
  x = dd_add(x, dd_mul(half, dd_sub(dd_div(a, x), x)));
  return x;
}

// pi and ln 2 computed at first use by quickly convergent rational series, so
// no hand-typed long decimal literals enter the code base.
const dd& dd_pi();
const dd& dd_ln2();
const dd& dd_sqrt_2pi();

dd dd_exp(const dd& x);
dd dd_log(const dd& x);  // x > 0

/// sin(pi * (lambda*n + mu)) with exact reduction; integer arguments give an
/// exact zero. Returns the reduced remainder through `pole`.
dd dd_sin_pi_linear(double lambda, long n, double mu, bool& pole);

/// Gamma(w) for w >= 0.5: argument lifted to w >= 64, then the Stirling
/// series with exact Bernoulli coefficients (tail below the dd target).
dd dd_gamma_pos(const dd& w);

/// 1/Gamma(lambda*n + mu); exactly zero at the poles.
dd dd_rgamma_linear(double lambda, long n, double mu);

}  // namespace tfairy::detail

#endif  // __SIZEOF_FLOAT128__
#endif
