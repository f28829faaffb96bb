// Ternary (middle-thirds) set machinery: level sets with exact integer
// indexing, the staircase function and its level-n interpolants evaluated
// through an exact base-3 digit machine, fiber sets in the (y,t) plane,
// the a.e. t-derivative, L2 distances between level-n and limit derivatives,
// and the bookkeeping quantities entering the second-variation bound.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace heis {

/// 3^n as an exact 64-bit integer; valid for 0 <= n <= 40 (3^40 < 2^64).
[[nodiscard]] inline std::uint64_t pow3_u64(int n) {
  if (n < 0 || n > 40) throw std::invalid_argument("pow3_u64: n out of [0,40]");
  std::uint64_t r = 1;
  for (int i = 0; i < n; ++i) r *= 3;
  return r;
}

namespace detail {

/// Exact ternary digit machine.  A positive double tau < 1 is exactly
/// num / 2^E with integer num; multiplying num by 3 and comparing against
/// 2^E peels off base-3 digits with no floating-point error.  E stays
/// below 120 whenever tau > 3^-41, so the 128-bit products cannot overflow.
struct TernaryWalker {
  unsigned __int128 num{0};
  unsigned __int128 den{1};

  explicit TernaryWalker(double tau) {
    int e = 0;
    double m = std::frexp(tau, &e);  // tau = m * 2^e, m in [0.5, 1)
    // m * 2^53 is an exact integer for any normal double
    auto M = static_cast<std::uint64_t>(std::ldexp(m, 53));
    num = M;
    den = static_cast<unsigned __int128>(1) << (53 - e);
  }

  /// Next base-3 digit (0, 1 or 2); afterwards num/den is the remainder.
  int next() {
    unsigned __int128 n3 = 3 * num;
    int d = (n3 >= den) + (n3 >= 2 * den);
    num = n3 - static_cast<unsigned __int128>(d) * den;
    return d;
  }

  [[nodiscard]] bool remainder_is_zero() const { return num == 0; }
  [[nodiscard]] double remainder() const {
    // num/den <= 1 and num fits in far fewer than 64 bits of precision loss;
    // a double quotient of the two 128-bit values is accurate to 1 ulp.
    return static_cast<double>(num) / static_cast<double>(den);
  }
};

constexpr int kLimitDepth = 40;          ///< digit cap for the limit staircase
constexpr int kMembershipDepth = 30;     ///< digit cap for limit-set membership
constexpr double kMembershipTol = 1e-10; ///< tolerance absorbing double drift

/// Shared staircase evaluation: walk at most `depth` digits; a digit 1 lands
/// in a gap whose plateau value is acc + 2^-level; surviving to the cap
/// finishes with the linear interpolant on the remaining cell.
inline double staircase_eval(int depth, double tau) {
  if (!(tau > 0.0)) return 0.0;
  if (tau >= 1.0) return 1.0;
  if (tau < 2.7e-20) {
    // deeper than every tracked digit: the first cell is linear with slope
    // (3/2)^depth
    return tau * std::pow(1.5, depth);
  }
  TernaryWalker w(tau);
  double acc = 0.0;
  for (int level = 1; level <= depth; ++level) {
    int d = w.next();
    if (d == 1) return acc + std::ldexp(1.0, -level);
    if (d == 2) acc += std::ldexp(1.0, -level);
  }
  return acc + std::ldexp(w.remainder(), -depth);
}

}  // namespace detail

/// Level-n set of the middle-thirds construction.  The surviving intervals
/// are [k/3^n, (k+1)/3^n] for k in J; the k-th surviving interval (rank r,
/// 0-based, left to right) has index with base-3 digits twice the binary
/// digits of r.  J is materialized for n <= 20; index(rank) works to n = 40.
struct CantorLevel {
  int n{0};
  std::vector<std::uint64_t> J;

  [[nodiscard]] std::uint64_t count() const { return std::uint64_t{1} << n; }

  /// Index k of the rank-th surviving interval, via the digit bijection.
  [[nodiscard]] std::uint64_t index(std::uint64_t rank) const {
    std::uint64_t k = 0;
    std::uint64_t p3 = 1;
    for (int i = 0; i < n; ++i) {
      if (rank & (std::uint64_t{1} << i)) k += 2 * p3;
      p3 *= 3;
    }
    return k;
  }
};

/// Build the level-n set descriptor.  0 <= n <= 40.
[[nodiscard]] inline CantorLevel cantor_level(int n) {
  if (n < 0 || n > 40) {
    throw std::invalid_argument("cantor_level: n out of [0,40]");
  }
  CantorLevel c;
  c.n = n;
  if (n <= 20) {
    c.J.resize(std::size_t{1} << n);
    for (std::size_t r = 0; r < c.J.size(); ++r) c.J[r] = c.index(r);
  }
  return c;
}

/// Limit staircase (devil's staircase), clamped to [0,1] outside the base
/// interval.  Dyadic plateau values are exact; set points are resolved to
/// 2^-40, far below double drift.
[[nodiscard]] inline double cantor_a(double tau) {
  return detail::staircase_eval(detail::kLimitDepth, tau);
}

/// Level-n interpolant a_n: agrees with the staircase on all gaps removed up
/// to level n and interpolates linearly (slope (3/2)^n) across the surviving
/// intervals.
[[nodiscard]] inline double cantor_a_level(int n, double tau) {
  if (n < 0 || n > detail::kLimitDepth) {
    throw std::invalid_argument("cantor_a_level: n out of [0,40]");
  }
  return detail::staircase_eval(n, tau);
}

/// Slope of a_n where it is defined: (3/2)^n on the level-n set, 0 in gaps.
[[nodiscard]] inline double cantor_da_level(int n, double tau);

/// Exact membership in the level-n set (boundary points included).
[[nodiscard]] inline bool cantor_in_level(int n, double tau) {
  if (tau < 0.0 || tau > 1.0) return false;
  if (tau == 0.0 || tau == 1.0) return true;
  if (tau < 2.7e-20) return true;  // inside the first cell at every level <= 40
  detail::TernaryWalker w(tau);
  for (int level = 1; level <= n; ++level) {
    int d = w.next();
    if (d == 1) {
      // exact gap left endpoint (e.g. dyadically representable multiples)
      return w.remainder_is_zero();
    }
  }
  return true;
}

/// Distance from tau to the level-n set; 0 on the set.  Endpoint arithmetic
/// is floating point, so results carry O(1e-16) rounding.
[[nodiscard]] inline double cantor_distance_to_level(int n, double tau) {
  if (tau < 0.0) return -tau;
  if (tau > 1.0) return tau - 1.0;
  if (tau < 2.7e-20) return 0.0;
  detail::TernaryWalker w(tau);
  double base = 0.0;   // left endpoint of the current containing cell
  double scale = 1.0;  // its width
  for (int level = 1; level <= n; ++level) {
    int d = w.next();
    scale /= 3.0;
    if (d == 1) {
      if (w.remainder_is_zero()) return 0.0;
      double lo = base + scale;       // gap is (base+scale, base+2*scale)
      double hi = base + 2.0 * scale;
      return std::min(tau - lo, hi - tau);
    }
    if (d == 2) base += 2.0 * scale;
  }
  return 0.0;
}

inline double cantor_da_level(int n, double tau) {
  return cantor_in_level(n, tau) ? std::pow(1.5, n) : 0.0;
}

/// One interval of the level-n fiber set C_y(n) in the t variable.
struct CyInterval {
  double t0{0.0};
  double t1{0.0};
};

/// Intervals of C_y(n) = { a_n(tau) y^2/2 + tau : tau in level-n set }.
/// Endpoint staircase values are the exact dyadics rank/2^n.  n <= 20.
[[nodiscard]] inline std::vector<CyInterval> cy_intervals(int n, double y) {
  if (n < 0 || n > 20) {
    throw std::invalid_argument("cy_intervals: n out of [0,20]");
  }
  CantorLevel c = cantor_level(n);
  double half_y2 = 0.5 * y * y;
  auto p3 = static_cast<double>(pow3_u64(n));
  std::vector<CyInterval> out(c.J.size());
  for (std::size_t r = 0; r < c.J.size(); ++r) {
    double a_lo = std::ldexp(static_cast<double>(r), -n);
    double a_hi = std::ldexp(static_cast<double>(r + 1), -n);
    auto k = static_cast<double>(c.J[r]);
    out[r] = {a_lo * half_y2 + k / p3, a_hi * half_y2 + (k + 1.0) / p3};
  }
  return out;
}

/// Measure of C_y(n): y^2/2 + (2/3)^n.
[[nodiscard]] inline double cy_measure(int n, double y) {
  return 0.5 * y * y + std::pow(2.0 / 3.0, n);
}

/// Measure of the limit fiber set C_y: y^2/2.
[[nodiscard]] inline double cy_measure_limit(double y) { return 0.5 * y * y; }

namespace detail {

/// Invert t = a(tau) y^2/2 + tau for tau; `a` must be nondecreasing, making
/// the map strictly increasing with slope >= 1.  Bisection runs to machine
/// width so membership decisions afterwards cost no extra tolerance.
inline double invert_fiber(const std::function<double(double)>& a, double y,
                           double t, double a_max) {
  double half_y2 = 0.5 * y * y;
  double lo = t - a_max * half_y2;
  double hi = t;
  if (hi < lo) std::swap(lo, hi);
  auto g = [&](double tau) { return a(tau) * half_y2 + tau; };
  if (g(lo) > t) return lo;
  if (g(hi) < t) return hi;
  for (int i = 0; i < 110 && lo < hi; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (g(mid) < t) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// a.e. t-derivative of the level-n profile function at (y,t):
/// y / (y^2/2 + (2/3)^n) on C_y(n) and 0 outside.
[[nodiscard]] inline double cantor_dt(int n, double y, double t) {
  if (n < 0 || n > detail::kLimitDepth) {
    throw std::invalid_argument("cantor_dt: n out of [0,40]");
  }
  if (y == 0.0) return 0.0;
  double tau = detail::invert_fiber(
      [n](double u) { return cantor_a_level(n, u); }, y, t, 1.0);
  // absorb inversion noise at interval boundaries
  if (cantor_distance_to_level(n, tau) > 1e-12 * (1.0 + std::abs(tau))) {
    return 0.0;
  }
  if (tau < -1e-12 || tau > 1.0 + 1e-12) return 0.0;
  return y / (0.5 * y * y + std::pow(2.0 / 3.0, n));
}

/// a.e. t-derivative of the limit profile function: 2/y on the fiber set C_y,
/// 0 outside.  Membership is resolved at digit depth 30 with a 1e-10
/// tolerance: double arithmetic cannot place points deeper than that.
[[nodiscard]] inline double cantor_dt_limit(double y, double t) {
  if (y == 0.0) return 0.0;
  double tau = detail::invert_fiber([](double u) { return cantor_a(u); }, y, t,
                                    1.0);
  if (tau < -detail::kMembershipTol || tau > 1.0 + detail::kMembershipTol) {
    return 0.0;
  }
  if (cantor_distance_to_level(detail::kMembershipDepth, tau) >
      detail::kMembershipTol) {
    return 0.0;
  }
  return 2.0 / y;
}

/// Closed form of the squared L2 distance between the level-n and limit
/// t-derivatives over [0,l] x R:  2 sqrt(2) q^{n/2} arctan(l q^{-n/2}/sqrt 2).
[[nodiscard]] inline double cantor_l2_closed(int n, double ell) {
  double qh = std::pow(2.0 / 3.0, 0.5 * n);
  return 2.0 * std::numbers::sqrt2 * qh *
         std::atan(ell / (qh * std::numbers::sqrt2));
}

/// Result of the measured-vs-closed L2 comparison.
struct L2Report {
  double measured{0.0};
  double closed{0.0};
  double rel_err{0.0};
};

namespace detail {

/// Small self-contained adaptive Simpson rule for the smooth 1D profiles
/// integrated here (the heavy 2D machinery lives elsewhere).
inline double adaptive_simpson(const std::function<double(double)>& g,
                               double a, double b, double tol, int depth,
                               double fa, double fm, double fb) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = g(lm), frm = g(rm);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double err = left + right - whole;
  if (depth <= 0 || std::abs(err) < 15.0 * tol) {
    return left + right + err / 15.0;
  }
  return adaptive_simpson(g, a, m, 0.5 * tol, depth - 1, fa, flm, fm) +
         adaptive_simpson(g, m, b, 0.5 * tol, depth - 1, fm, frm, fb);
}

inline double integrate1d_simpson(const std::function<double(double)>& g,
                                  double a, double b, double tol) {
  double m = 0.5 * (a + b);
  return adaptive_simpson(g, a, b, tol, 40, g(a), g(m), g(b));
}

}  // namespace detail

/// Squared L2 distance between level-n and limit t-derivatives on
/// [0,l] x R: the t-integral is exact through the interval measures of the
/// fiber sets (the two-term sum collapses to 2 q^n/(y^2/2+q^n)); the
/// remaining y-integral is done adaptively and compared to the closed form.
[[nodiscard]] inline L2Report cantor_l2_distance(int n, double ell) {
  double qn = std::pow(2.0 / 3.0, n);
  auto per_y = [qn](double y) { return 2.0 * qn / (0.5 * y * y + qn); };
  L2Report r;
  r.measured = detail::integrate1d_simpson(per_y, 0.0, ell, 1e-12);
  r.closed = cantor_l2_closed(n, ell);
  r.rel_err = std::abs(r.measured - r.closed) / std::abs(r.closed);
  return r;
}

/// Quantities entering the second-variation estimate at level n with
/// M = sup of the squared test function:
///  - tau_integral: int over the level-n set of a_n'/(1+a_n^2)^{3/2} dtau,
///    evaluated interval-exactly via the antiderivative v/sqrt(1+v^2) at the
///    exact dyadic endpoint values (telescopes to 1/sqrt 2);
///  - s_integral_factor: int over R of ds/(a_n' s^2/2 + 1) = sqrt(2 q^n) pi;
///  - bound: M pi q^{n/2}.
struct SvQuantities {
  double tau_integral{0.0};
  double s_integral_factor{0.0};
  double bound{0.0};
};

[[nodiscard]] inline SvQuantities cantor_sv_quantities(int n, double M) {
  if (n < 0 || n > detail::kLimitDepth) {
    throw std::invalid_argument("cantor_sv_quantities: n out of [0,40]");
  }
  auto F = [](double v) { return v / std::sqrt(1.0 + v * v); };
  SvQuantities s;
  double sum = 0.0;
  std::uint64_t count = std::uint64_t{1} << std::min(n, 20);
  if (n <= 20) {
    for (std::uint64_t r = 0; r < count; ++r) {
      double v0 = std::ldexp(static_cast<double>(r), -n);
      double v1 = std::ldexp(static_cast<double>(r + 1), -n);
      sum += F(v1) - F(v0);
    }
  } else {
    sum = F(1.0) - F(0.0);  // the telescoped value; enumeration is capped
  }
  s.tau_integral = sum;
  double qn = std::pow(2.0 / 3.0, n);
  s.s_integral_factor = std::sqrt(2.0 * qn) * std::numbers::pi;
  s.bound = M * std::numbers::pi * std::pow(2.0 / 3.0, 0.5 * n);
  return s;
}

}  // namespace heis
