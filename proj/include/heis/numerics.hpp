// Numerical workhorses shared by every higher module: seam-aware adaptive
// tensor-Gauss quadrature over rectangles, seam-aware finite differences,
// monotone bisection, RK4 characteristic flows with step-doubling error
// estimates and blow-up detection, flow-separation bounds, and a Sturm
// bisection eigensolver for the weighted Rayleigh quotient.
#pragma once

#include <heis/field.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numbers>
#include <queue>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace heis {

/// Gauss-Legendre nodes and weights on [-1,1], any order >= 1, via Newton
/// iteration on the Legendre recurrence.
[[nodiscard]] inline std::pair<std::vector<double>, std::vector<double>>
gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
  std::vector<double> x(n), w(n);
  for (int i = 0; i < n; ++i) {
    double xi = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      // evaluate P_n and P_{n-1} by the three-term recurrence
      double p0 = 1.0, p1 = xi;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * xi * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
      double step = p1 / dp;
      xi -= step;
      if (std::abs(step) < 1e-15) break;
    }
    double p0 = 1.0, p1 = xi;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * xi * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
    x[i] = xi;
    w[i] = 2.0 / ((1.0 - xi * xi) * dp * dp);
  }
  return {x, w};
}

/// Controls for the adaptive quadrature.
struct QuadratureSpec {
  int points_per_cell{8};
  int max_depth{12};
  double abs_tol{1e-10};
  double rel_tol{1e-10};
};

/// Quadrature outcome; `converged == false` flags that the error estimate
/// could not be pushed under the tolerance within max_depth (the value and
/// estimate are still the best available -- never silently trusted).
struct IntegrationResult {
  double value{0.0};
  double err_est{0.0};
  bool converged{true};
  int cells{0};
};

namespace detail {

struct QuadCell {
  Rect r;
  double value{0.0};
  double err{0.0};
  int depth{0};
  bool leaf{true};
  bool frozen{false};
};

/// True when a parabola seam passes through the open interior of the cell.
inline bool parabola_crosses(const Seam& s, const Rect& r) {
  if (s.type != Seam::Type::parabola) return false;
  // t = c y^2 + d over [y0,y1]: range of the parabola on the cell's y-span
  double ta = s.c * r.y0 * r.y0 + s.d;
  double tb = s.c * r.y1 * r.y1 + s.d;
  double lo = std::min(ta, tb), hi = std::max(ta, tb);
  if (r.y0 < 0.0 && r.y1 > 0.0) {
    lo = std::min(lo, s.d);
    hi = std::max(hi, s.d);
  }
  return hi > r.t0 && lo < r.t1;
}

/// Seam-respecting tensor Gauss value on a cell.  At each y node the t
/// integral is split exactly where a declared parabola crosses, so the rule
/// only ever samples g on smooth pieces; the y range is in turn split where a
/// parabola crosses the cell's horizontal edges, because there the inner
/// t-partition changes and the exact column integral kinks as a function of
/// y.  (Straight seams never cross a cell: the region is pre-split along
/// them.)
inline double cell_gauss(const std::function<double(double, double)>& g,
                         const Rect& r, const SeamSet& seams,
                         const std::vector<double>& x,
                         const std::vector<double>& w) {
  std::vector<double> ycuts{r.y0, r.y1};
  for (const Seam& s : seams.seams) {
    if (s.type != Seam::Type::parabola || s.c == 0.0) continue;
    for (double h : {r.t0, r.t1}) {
      double q = (h - s.d) / s.c;
      if (q < 0.0) continue;
      double ys = std::sqrt(q);
      if (ys > r.y0 && ys < r.y1) ycuts.push_back(ys);
      if (ys > 0.0 && -ys > r.y0 && -ys < r.y1) ycuts.push_back(-ys);
    }
  }
  std::sort(ycuts.begin(), ycuts.end());
  std::vector<double> tcuts;
  double sum = 0.0;
  for (std::size_t u = 0; u + 1 < ycuts.size(); ++u) {
    double cy = 0.5 * (ycuts[u] + ycuts[u + 1]);
    double hy = 0.5 * (ycuts[u + 1] - ycuts[u]);
    if (hy == 0.0) continue;
    double colsum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double yi = cy + hy * x[i];
      tcuts.clear();
      tcuts.push_back(r.t0);
      tcuts.push_back(r.t1);
      for (const Seam& s : seams.seams) {
        if (s.type != Seam::Type::parabola) continue;
        double tc = s.c * yi * yi + s.d;
        if (tc > r.t0 && tc < r.t1) tcuts.push_back(tc);
      }
      std::sort(tcuts.begin(), tcuts.end());
      double inner = 0.0;
      for (std::size_t p = 0; p + 1 < tcuts.size(); ++p) {
        double ct = 0.5 * (tcuts[p] + tcuts[p + 1]);
        double ht = 0.5 * (tcuts[p + 1] - tcuts[p]);
        double piece = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) {
          piece += w[j] * g(yi, ct + ht * x[j]);
        }
        inner += piece * ht;
      }
      colsum += w[i] * inner;
    }
    sum += colsum * hy;
  }
  return sum;
}

}  // namespace detail

/// Adaptive 2D quadrature of g over `region`.  The region is pre-split along
/// every declared straight seam, and inside each cell the t-integral is split
/// exactly where a declared parabola crosses, so Gauss rules only ever see
/// smooth pieces of g.  Refinement always attacks the worst cell first
/// (deterministic tie-breaking), so results are reproducible bit for bit.
[[nodiscard]] inline IntegrationResult integrate2d(
    const std::function<double(double, double)>& g, const Rect& region,
    const SeamSet& seams, const QuadratureSpec& spec = {}) {
  if (!(region.y1 > region.y0) || !(region.t1 > region.t0)) {
    throw std::invalid_argument("integrate2d: empty region");
  }
  auto [x8, w8] = gauss_legendre(spec.points_per_cell);
  auto [x4, w4] = gauss_legendre(std::max(2, spec.points_per_cell / 2));

  // cut lines from straight seams strictly inside the region
  std::vector<double> ycuts{region.y0, region.y1};
  std::vector<double> tcuts{region.t0, region.t1};
  for (const Seam& s : seams.seams) {
    if (s.type == Seam::Type::vertical && s.c > region.y0 && s.c < region.y1) {
      ycuts.push_back(s.c);
    }
    if (s.type == Seam::Type::horizontal && s.c > region.t0 &&
        s.c < region.t1) {
      tcuts.push_back(s.c);
    }
  }
  std::sort(ycuts.begin(), ycuts.end());
  std::sort(tcuts.begin(), tcuts.end());

  std::vector<detail::QuadCell> arena;
  auto eval_cell = [&](const Rect& r, int depth) {
    detail::QuadCell c;
    c.r = r;
    c.depth = depth;
    c.value = detail::cell_gauss(g, r, seams, x8, w8);
    c.err = std::abs(c.value - detail::cell_gauss(g, r, seams, x4, w4));
    return c;
  };

  double total = 0.0, total_err = 0.0;
  using Entry = std::pair<double, std::size_t>;  // (err, arena index)
  auto cmp = [](const Entry& a, const Entry& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second > b.second;  // older cells first on ties
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> heap(cmp);

  for (std::size_t iy = 0; iy + 1 < ycuts.size(); ++iy) {
    for (std::size_t it = 0; it + 1 < tcuts.size(); ++it) {
      Rect r{ycuts[iy], ycuts[iy + 1], tcuts[it], tcuts[it + 1]};
      arena.push_back(eval_cell(r, 0));
      total += arena.back().value;
      total_err += arena.back().err;
      heap.emplace(arena.back().err, arena.size() - 1);
    }
  }

  auto threshold = [&]() {
    return std::max(spec.abs_tol, spec.rel_tol * std::abs(total));
  };

  constexpr std::size_t kMaxCells = 400'000;
  double frozen_err = 0.0;
  while (total_err > threshold() && !heap.empty() &&
         arena.size() < kMaxCells) {
    auto [err, idx] = heap.top();
    heap.pop();
    detail::QuadCell& cell = arena[idx];
    if (!cell.leaf || cell.frozen || err != cell.err) continue;
    if (err == 0.0) break;  // nothing left that refinement can improve
    if (cell.depth >= spec.max_depth) {
      cell.frozen = true;  // its error stays in the running total
      frozen_err += cell.err;
      // once unsplittable cells alone exceed the tolerance, refining the
      // rest cannot reach convergence
      if (frozen_err > threshold()) break;
      continue;
    }
    // split point: cell center, pulled onto a crossing parabola seam in t
    Rect r = cell.r;
    double ym = 0.5 * (r.y0 + r.y1);
    double tm = 0.5 * (r.t0 + r.t1);
    for (const Seam& s : seams.seams) {
      if (detail::parabola_crosses(s, r)) {
        double tp = s.c * ym * ym + s.d;
        double margin = 1e-3 * (r.t1 - r.t0);
        tm = std::clamp(tp, r.t0 + margin, r.t1 - margin);
        break;
      }
    }
    total -= cell.value;
    total_err -= cell.err;
    cell.leaf = false;
    int d = cell.depth + 1;
    Rect quads[4] = {{r.y0, ym, r.t0, tm},
                     {ym, r.y1, r.t0, tm},
                     {r.y0, ym, tm, r.t1},
                     {ym, r.y1, tm, r.t1}};
    for (const Rect& q : quads) {
      arena.push_back(eval_cell(q, d));
      total += arena.back().value;
      total_err += arena.back().err;
      heap.emplace(arena.back().err, arena.size() - 1);
    }
  }

  IntegrationResult out;
  out.value = total;
  out.err_est = total_err;
  out.converged = total_err <= threshold();
  out.cells = static_cast<int>(arena.size());
  return out;
}

enum class FdDir { y, t };

/// Seam-aware finite difference of g at (y,t) in direction `dir` with step h.
/// A centered second-order stencil is used when it stays on one side of every
/// declared seam; otherwise the stencil flips to the clean side (one-sided,
/// still second order).  Evaluating exactly on a seam is an error.
[[nodiscard]] inline double fd_partial(
    const std::function<double(double, double)>& g, double y, double t,
    FdDir dir, double h, const SeamSet& seams = {}) {
  if (!(h > 0.0)) throw std::invalid_argument("fd_partial: step must be > 0");
  // crossing thresholds of each seam along the stencil line
  std::vector<double> thresholds;
  double pos = (dir == FdDir::t) ? t : y;
  for (const Seam& s : seams.seams) {
    if (s.side(y, t) == 0.0) {
      throw std::invalid_argument("fd_partial: point lies on a seam");
    }
    if (dir == FdDir::t) {
      if (s.type == Seam::Type::horizontal) thresholds.push_back(s.c);
      if (s.type == Seam::Type::parabola) {
        thresholds.push_back(s.c * y * y + s.d);
      }
    } else {
      if (s.type == Seam::Type::vertical) thresholds.push_back(s.c);
      if (s.type == Seam::Type::parabola && s.c != 0.0) {
        double disc = (t - s.d) / s.c;
        if (disc >= 0.0) {
          thresholds.push_back(std::sqrt(disc));
          thresholds.push_back(-std::sqrt(disc));
        }
      }
    }
  }
  auto clean = [&](double lo, double hi) {
    for (double th : thresholds) {
      if (th > lo && th < hi) return false;
    }
    return true;
  };
  auto at = [&](double u) {
    return (dir == FdDir::t) ? g(y, u) : g(u, t);
  };
  if (clean(pos - h, pos + h)) {
    return (at(pos + h) - at(pos - h)) / (2.0 * h);
  }
  if (clean(pos, pos + 2.0 * h)) {
    return (-3.0 * at(pos) + 4.0 * at(pos + h) - at(pos + 2.0 * h)) /
           (2.0 * h);
  }
  if (clean(pos - 2.0 * h, pos)) {
    return (3.0 * at(pos) - 4.0 * at(pos - h) + at(pos - 2.0 * h)) /
           (2.0 * h);
  }
  throw std::invalid_argument("fd_partial: stencil cannot avoid the seams");
}

/// Root solve g(x) = target on [lo,hi] for monotone g by bisection; the
/// returned point has bracket width <= tol.  The bracket must enclose the
/// target value.
[[nodiscard]] inline double bisect_monotone(
    const std::function<double(double)>& g, double lo, double hi,
    double target, double tol = 1e-12) {
  if (!(hi > lo)) throw std::invalid_argument("bisect_monotone: bad bracket");
  double glo = g(lo), ghi = g(hi);
  bool increasing = ghi >= glo;
  double a = increasing ? glo : ghi;
  double b = increasing ? ghi : glo;
  if (target < a || target > b) {
    throw std::invalid_argument(
        "bisect_monotone: bracket does not enclose the target");
  }
  for (int i = 0; i < 200 && (hi - lo) > tol; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    double gm = g(mid);
    bool below = increasing ? (gm < target) : (gm > target);
    if (below) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Sampled characteristic curve gamma(s) of the flow gamma' = f(s, gamma).
struct Curve1D {
  std::vector<double> s;
  std::vector<double> gamma;
  bool blowup{false};
  double err_est{0.0};
};

namespace detail {

constexpr double kBlowupBound = 1e6;

/// One RK4 pass with fixed step count; appends nothing on blow-up past the
/// sample where it is detected.
inline Curve1D rk4_flow(const ScalarField& f, double s0, double tau, double s1,
                        int steps) {
  Curve1D c;
  c.s.reserve(steps + 1);
  c.gamma.reserve(steps + 1);
  c.s.push_back(s0);
  c.gamma.push_back(tau);
  double h = (s1 - s0) / steps;
  double g = tau;
  for (int i = 0; i < steps; ++i) {
    double si = s0 + i * h;
    double k1 = f(si, g);
    double k2 = f(si + 0.5 * h, g + 0.5 * h * k1);
    double k3 = f(si + 0.5 * h, g + 0.5 * h * k2);
    double k4 = f(si + h, g + h * k3);
    double gn = g + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    // a predicted within-step excursion an order of magnitude beyond the
    // current state means the fixed-step scheme has lost the solution --
    // the hallmark of finite-time blow-up under the step
    double excursion = std::abs(h) * std::max(std::max(std::abs(k1),
                                                       std::abs(k2)),
                                              std::max(std::abs(k3),
                                                       std::abs(k4)));
    bool bad = !std::isfinite(k1) || !std::isfinite(k2) ||
               !std::isfinite(k3) || !std::isfinite(k4) ||
               !std::isfinite(gn) || std::abs(gn) > kBlowupBound ||
               excursion > 10.0 * (1.0 + std::abs(g));
    if (bad) {
      c.blowup = true;
      return c;
    }
    g = gn;
    c.s.push_back(s0 + (i + 1) * h);
    c.gamma.push_back(g);
  }
  return c;
}

}  // namespace detail

/// Flow the characteristic ODE gamma' = f(s, gamma) from (s0, tau) to s1 with
/// an RK4 fixed-step integrator.  err_est comes from step doubling; blow-up
/// (|gamma| beyond 1e6 or a non-finite stage) truncates the curve and raises
/// the flag rather than returning garbage.
[[nodiscard]] inline Curve1D ode_flow(const ScalarField& f, double s0,
                                      double tau, double s1, int steps) {
  if (steps < 1) throw std::invalid_argument("ode_flow: steps must be >= 1");
  if (s1 == s0) {
    Curve1D c;
    c.s = {s0};
    c.gamma = {tau};
    return c;
  }
  Curve1D fine = detail::rk4_flow(f, s0, tau, s1, steps);
  if (steps >= 2) {
    Curve1D coarse = detail::rk4_flow(f, s0, tau, s1, steps / 2);
    double err = 0.0;
    std::size_t common = std::min(coarse.gamma.size(),
                                  (fine.gamma.size() + 1) / 2);
    for (std::size_t i = 0; i < common; ++i) {
      std::size_t j = 2 * i;
      if (j < fine.gamma.size()) {
        err = std::max(err, std::abs(fine.gamma[j] - coarse.gamma[i]) / 15.0);
      }
    }
    fine.err_est = err;
  }
  return fine;
}

/// Separation of two characteristics against the Gronwall bound
/// |tau_a - tau_b| e^{L |s1 - s0|} for a field with |\partial_t f| <= L.
struct SeparationCheck {
  double measured{0.0};
  double bound{0.0};
  bool ok{false};
};

[[nodiscard]] inline SeparationCheck flow_separation_check(
    const ScalarField& f, double L, double tau_a, double tau_b, double s0,
    double s1, int steps) {
  Curve1D a = ode_flow(f, s0, tau_a, s1, steps);
  Curve1D b = ode_flow(f, s0, tau_b, s1, steps);
  SeparationCheck r;
  r.bound = std::abs(tau_a - tau_b) * std::exp(L * std::abs(s1 - s0));
  if (a.blowup || b.blowup) {
    r.measured = std::numeric_limits<double>::quiet_NaN();
    r.ok = false;
    return r;
  }
  r.measured = std::abs(a.gamma.back() - b.gamma.back());
  r.ok = r.measured <= r.bound * (1.0 + 1e-9) + 1e-14;
  return r;
}

/// min over Dirichlet test functions on (-R,R) of
///   int phi'^2 h dt / int phi^2 / h dt,   h(t) = A t^2/2 + B t + 1,
/// discretized with P1 finite elements (stiffness weight h integrated
/// exactly, consistent mass weight 1/h by 16-point Gauss) and solved by
/// Sturm-sequence bisection on the tridiagonal pencil.
struct RayleighProblem {
  double A{0.0};
  double B{0.0};
  double R{1.0};
  int N{100};
};

[[nodiscard]] inline double rayleigh_min(const RayleighProblem& prob) {
  if (prob.N < 2 || !(prob.R > 0.0)) {
    throw std::invalid_argument("rayleigh_min: need N >= 2 and R > 0");
  }
  if (prob.B * prob.B > 2.0 * prob.A + 1e-12) {
    throw std::invalid_argument("rayleigh_min: admissibility needs B^2 <= 2A");
  }
  int N = prob.N;
  double R = prob.R;
  auto h = [&](double t) { return 0.5 * prob.A * t * t + prob.B * t + 1.0; };
  double delta = 2.0 * R / N;
  for (int i = 0; i <= N; ++i) {
    if (!(h(-R + i * delta) > 0.0)) {
      throw std::invalid_argument(
          "rayleigh_min: weight must be positive on the grid");
    }
  }
  // element integrals
  auto Hint = [&](double a, double b) {
    return prob.A * (b * b * b - a * a * a) / 6.0 +
           prob.B * (b * b - a * a) / 2.0 + (b - a);
  };
  static const auto gauss16 = gauss_legendre(16);
  const auto& [gx, gw] = gauss16;
  std::vector<double> Ke(N), Md(N + 1, 0.0), Mo(N, 0.0), Kd(N + 1, 0.0);
  for (int i = 0; i < N; ++i) {
    double a = -R + i * delta, b = a + delta;
    Ke[i] = Hint(a, b) / (delta * delta);
    Kd[i] += Ke[i];
    Kd[i + 1] += Ke[i];
    for (std::size_t q = 0; q < gx.size(); ++q) {
      double xq = 0.5 * (a + b) + 0.5 * delta * gx[q];
      double wq = 0.5 * delta * gw[q];
      double hv = h(xq);
      double p0 = (b - xq) / delta, p1 = (xq - a) / delta;
      Md[i] += wq * p0 * p0 / hv;
      Md[i + 1] += wq * p1 * p1 / hv;
      Mo[i] += wq * p0 * p1 / hv;
    }
  }
  // interior (Dirichlet) tridiagonal pencil: indices 1..N-1
  int m = N - 1;
  std::vector<double> kd(m), ko(m - 1), md(m), mo(m - 1);
  for (int i = 0; i < m; ++i) {
    kd[i] = Kd[i + 1];
    md[i] = Md[i + 1];
    if (i + 1 < m) {
      ko[i] = -Ke[i + 1];
      mo[i] = Mo[i + 1];
    }
  }
  // Sturm count: eigenvalues of (K,M) below lambda = negative pivots of
  // LDL^T of K - lambda M
  auto count_below = [&](double lam) {
    int cnt = 0;
    double d = kd[0] - lam * md[0];
    if (d == 0.0) d = -1e-300;
    if (d < 0.0) ++cnt;
    for (int i = 1; i < m; ++i) {
      double e = ko[i - 1] - lam * mo[i - 1];
      double di = kd[i] - lam * md[i] - e * e / d;
      if (di == 0.0) di = -1e-300;
      if (di < 0.0) ++cnt;
      d = di;
    }
    return cnt;
  };
  double hi = 1.0;
  while (count_below(hi) < 1 && hi < 1e12) hi *= 2.0;
  double lo = -1.0;
  while (count_below(lo) > 0 && lo > -1e12) lo *= 2.0;
  for (int i = 0; i < 200 && (hi - lo) > 1e-14 * (1.0 + std::abs(hi)); ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (count_below(mid) >= 1) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Deterministic slot-parallel loop: fn(i) for i in [0,n), each iteration
/// writing only its own output slot.  Worker count comes from HEIS_THREADS
/// (default 1); results are identical for every worker count.
template <class F>
inline void parallel_for(int n, F&& fn) {
  int workers = 1;
  if (const char* env = std::getenv("HEIS_THREADS")) {
    workers = std::max(1, std::atoi(env));
    workers = std::min<int>(workers,
                            std::max(1u, std::thread::hardware_concurrency()));
  }
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int wkr = 0; wkr < workers; ++wkr) {
    pool.emplace_back([&, wkr] {
      for (int i = wkr; i < n; i += workers) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace heis
