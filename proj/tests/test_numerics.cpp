// Tests for the numerical workhorses: seam-aware adaptive 2D quadrature,
// seam-aware finite differences, monotone bisection, characteristic ODE
// flows with blow-up detection, flow-separation bounds, and the weighted
// Rayleigh minimization.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <heis/numerics.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace heis;

TEST_CASE("gauss-legendre nodes integrate high-degree monomials") {
  // order-8 Gauss is exact through degree 15
  auto [x, w] = gauss_legendre(8);
  REQUIRE(x.size() == 8);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double u = 0.5 * (x[i] + 1.0);  // map to [0,1]
    s += 0.5 * w[i] * std::pow(u, 15);
  }
  CHECK(s == doctest::Approx(1.0 / 16.0).epsilon(1e-13));
  // weights sum to the interval length
  double ws = 0.0;
  for (double wi : w) ws += wi;
  CHECK(ws == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("integrate2d: pinned smooth integrals") {
  Rect unit{0.0, 1.0, 0.0, 1.0};
  auto one = [](double, double) { return 1.0; };
  auto r1 = integrate2d(one, unit, {});
  CHECK(std::abs(r1.value - 1.0) <= 1e-12);
  CHECK(r1.converged);

  auto yt = [](double y, double t) { return y * t; };
  auto r2 = integrate2d(yt, unit, {});
  CHECK(std::abs(r2.value - 0.25) <= 1e-12);
}

TEST_CASE("integrate2d: straight seam handled exactly") {
  Rect box{-1.0, 1.0, -1.0, 1.0};
  auto abst = [](double, double t) { return std::abs(t); };
  SeamSet seams;
  seams.add(Seam::horizontal(0.0));
  auto r = integrate2d(abst, box, seams);
  CHECK(std::abs(r.value - 2.0) <= 1e-12);
  CHECK(r.converged);
}

TEST_CASE("integrate2d: parabola seam with a jump integrand") {
  // g jumps across t = y^2/2 + 0.1; exact integral of the indicator below
  // the parabola over [0,1]^2 is 1/6 + 0.1.  With the seam declared, the
  // rule splits each t-line exactly at the curve and nails the value.
  Rect unit{0.0, 1.0, 0.0, 1.0};
  auto g = [](double y, double t) {
    return t < 0.5 * y * y + 0.1 ? 1.0 : 0.0;
  };
  SeamSet seams;
  seams.add(Seam::parabola(0.5, 0.1));
  QuadratureSpec spec;
  spec.max_depth = 20;
  spec.abs_tol = 1e-8;
  auto r = integrate2d(g, unit, seams, spec);
  CHECK(std::abs(r.value - (1.0 / 6.0 + 0.1)) <= 1e-12);
  CHECK(r.converged);
}

TEST_CASE("integrate2d: undeclared discontinuity is flagged, not hidden") {
  // the same jump with no declared seam cannot meet a tight tolerance; the
  // result must carry converged == false rather than silently pretending
  Rect unit{0.0, 1.0, 0.0, 1.0};
  auto g = [](double y, double t) {
    return t < 0.5 * y * y + 0.1 ? 1.0 : 0.0;
  };
  QuadratureSpec spec;
  spec.max_depth = 10;
  spec.abs_tol = 1e-8;
  auto r = integrate2d(g, unit, SeamSet{}, spec);
  CHECK(!r.converged);
  CHECK(r.err_est > 0.0);
  CHECK(std::abs(r.value - (1.0 / 6.0 + 0.1)) <= 1e-2);
}

TEST_CASE("integrate2d: linearity and additivity contracts") {
  Rect box{0.0, 2.0, -1.0, 1.0};
  auto g1 = [](double y, double t) { return std::sin(y + t); };
  auto g2 = [](double y, double t) { return std::exp(0.3 * y - 0.2 * t); };
  double al = 2.5, be = -1.75;
  auto sum = [&](double y, double t) { return al * g1(y, t) + be * g2(y, t); };
  double lhs = integrate2d(sum, box, {}).value;
  double rhs = al * integrate2d(g1, box, {}).value +
               be * integrate2d(g2, box, {}).value;
  CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(rhs)));

  // additivity across a split of the region
  Rect left{0.0, 0.8, -1.0, 1.0}, right{0.8, 2.0, -1.0, 1.0};
  double parts =
      integrate2d(g1, left, {}).value + integrate2d(g1, right, {}).value;
  CHECK(std::abs(parts - integrate2d(g1, box, {}).value) <=
        1e-10 * (1.0 + std::abs(parts)));
}

TEST_CASE("fd_partial: pinned derivatives and seam avoidance") {
  auto g = [](double y, double) { return y * y; };
  CHECK(fd_partial(g, 3.0, 0.0, FdDir::y, 1e-4, {}) ==
        doctest::Approx(6.0).epsilon(1e-9));

  // piecewise ramp with a seam at t = 0: one-sided stencil stays on-branch
  auto ramp = [](double y, double t) { return t <= 0.0 ? 0.0 : 2.0 * t / y; };
  SeamSet seams;
  seams.add(Seam::horizontal(0.0));
  double h = 1e-4;
  // evaluation point hugs the seam at distance h/2: a centered stencil
  // would straddle the kink, the seam-aware one must not
  double d = fd_partial(ramp, 2.0, 0.5 * h, FdDir::t, h, seams);
  CHECK(d == doctest::Approx(1.0).epsilon(1e-9));

  // requesting the derivative on the seam itself is an error
  CHECK_THROWS_AS((void)fd_partial(ramp, 2.0, 0.0, FdDir::t, h, seams),
                  std::invalid_argument);
}

TEST_CASE("bisect_monotone: pinned roots and contracts") {
  auto id = [](double x) { return x; };
  double r = bisect_monotone(id, 0.0, 1.0, 0.5, 1e-12);
  CHECK(std::abs(r - 0.5) <= 1e-12);

  auto aff = [](double x) { return 3.0 * x; };
  CHECK(bisect_monotone(aff, 0.0, 1.0, 1.5, 1e-12) ==
        doctest::Approx(0.5).epsilon(1e-11));

  // postcondition |g(root) - target| small or bracket collapsed
  auto cub = [](double x) { return x * x * x + x; };
  double root = bisect_monotone(cub, -2.0, 2.0, 0.7, 1e-12);
  CHECK(std::abs(cub(root) - 0.7) <= 1e-12 * (1.0 + 0.7) + 1e-11);

  // a bracket that does not enclose the target is rejected
  CHECK_THROWS_AS((void)bisect_monotone(id, 0.0, 1.0, 2.0, 1e-12),
                  std::invalid_argument);
}

namespace {

ScalarField custom_field(std::function<double(double, double)> f,
                         std::function<double(double, double)> ft) {
  ScalarField F;
  F.kind = FieldKind::custom;
  F.domain = {-10.0, 10.0, -1e9, 1e9};
  F.f = std::move(f);
  F.ft = std::move(ft);
  F.fy = [](double, double) { return 0.0; };
  return F;
}

}  // namespace

TEST_CASE("ode_flow: pinned characteristic flows") {
  // f = 0: the flow is constant
  auto zero = custom_field([](double, double) { return 0.0; },
                           [](double, double) { return 0.0; });
  Curve1D c0 = ode_flow(zero, 0.0, 0.7, 1.0, 64);
  CHECK(!c0.blowup);
  for (double v : c0.gamma) CHECK(v == doctest::Approx(0.7).epsilon(1e-15));

  // f(y,t) = t: gamma' = gamma, gamma(1) = e
  auto lin = custom_field([](double, double t) { return t; },
                          [](double, double) { return 1.0; });
  Curve1D c1 = ode_flow(lin, 0.0, 1.0, 1.0, 200);
  CHECK(!c1.blowup);
  CHECK(std::abs(c1.gamma.back() - std::numbers::e) <= 1e-8);

  // f(y,t) = t^2 from tau=1: gamma(s) = 1/(1-s), so gamma(0.5) = 2
  auto quad = custom_field([](double, double t) { return t * t; },
                           [](double, double t) { return 2.0 * t; });
  Curve1D c2 = ode_flow(quad, 0.0, 1.0, 0.5, 512);
  CHECK(!c2.blowup);
  CHECK(std::abs(c2.gamma.back() - 2.0) <= 1e-6);

  // flowing the same field to s = 1 must blow up before arriving
  Curve1D c3 = ode_flow(quad, 0.0, 1.0, 1.0, 512);
  CHECK(c3.blowup);
  CHECK(c3.s.back() < 1.0);
  CHECK(std::abs(c3.gamma.back()) <= 2e6);  // truncated near the bound
}

TEST_CASE("ode_flow: backward flow and semigroup property") {
  auto field = custom_field(
      [](double y, double t) { return 0.3 * y + 0.1 + 0.2 * std::sin(y + t); },
      [](double y, double t) { return 0.2 * std::cos(y + t); });
  // semigroup: 0 -> 0.4 -> 1 equals 0 -> 1 within the step-doubling estimate
  Curve1D full = ode_flow(field, 0.0, 0.5, 1.0, 256);
  Curve1D part1 = ode_flow(field, 0.0, 0.5, 0.4, 256);
  Curve1D part2 = ode_flow(field, 0.4, part1.gamma.back(), 1.0, 256);
  double tol = 10.0 * (full.err_est + part1.err_est + part2.err_est) + 1e-14;
  CHECK(std::abs(part2.gamma.back() - full.gamma.back()) <= tol);

  // backward flow undoes forward flow
  Curve1D back = ode_flow(field, 1.0, full.gamma.back(), 0.0, 256);
  CHECK(std::abs(back.gamma.back() - 0.5) <=
        10.0 * (full.err_est + back.err_est) + 1e-12);
}

TEST_CASE("ode_flow: order preservation for Lipschitz fields") {
  auto field = custom_field(
      [](double y, double t) { return 0.3 * y + 0.2 * std::sin(y + t); },
      [](double y, double t) { return 0.2 * std::cos(y + t); });
  Curve1D lo = ode_flow(field, 0.0, 0.2, 1.5, 256);
  Curve1D hi = ode_flow(field, 0.0, 0.21, 1.5, 256);
  REQUIRE(lo.gamma.size() == hi.gamma.size());
  for (std::size_t i = 0; i < lo.gamma.size(); ++i) {
    CHECK(lo.gamma[i] < hi.gamma[i]);
  }
}

TEST_CASE("flow separation: pinned saturation cases") {
  // f = 0: separation stays exactly |tau_a - tau_b| and the bound matches
  auto zero = custom_field([](double, double) { return 0.0; },
                           [](double, double) { return 0.0; });
  auto r0 = flow_separation_check(zero, 0.0, 0.3, 0.5, 0.0, 1.0, 128);
  CHECK(r0.measured == doctest::Approx(0.2).epsilon(1e-13));
  CHECK(r0.bound == doctest::Approx(0.2).epsilon(1e-13));
  CHECK(r0.ok);

  // f(y,t) = t with L = 1 saturates the exponential bound: 0.1 e
  auto lin = custom_field([](double, double t) { return t; },
                          [](double, double) { return 1.0; });
  auto r1 = flow_separation_check(lin, 1.0, 1.0, 1.1, 0.0, 1.0, 256);
  CHECK(r1.bound == doctest::Approx(0.1 * std::numbers::e).epsilon(1e-12));
  CHECK(r1.measured == doctest::Approx(r1.bound).epsilon(1e-9));
  CHECK(r1.measured <= r1.bound * (1.0 + 1e-9));

  // random Lipschitz fields never violate the bound
  std::mt19937_64 rng(424242);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    double c0 = u(rng), c1 = 0.5 * u(rng), c2 = u(rng);
    double L = std::abs(c1 * c2);
    auto f = custom_field(
        [c0, c1, c2](double y, double t) {
          return c0 + c1 * std::sin(y + c2 * t);
        },
        [c1, c2](double y, double t) { return c1 * c2 * std::cos(y + c2 * t); });
    double ta = u(rng), tb = u(rng);
    auto r = flow_separation_check(f, L, ta, tb, 0.0, 1.0, 128);
    CHECK(r.measured <= r.bound * (1.0 + 1e-9) + 1e-14);
    CHECK(r.ok);
  }
}

TEST_CASE("rayleigh_min: pinned spectra") {
  // h = 1: Dirichlet eigenvalue (pi/2R)^2
  RayleighProblem flat{0.0, 0.0, 2.0, 2000};
  double lam = rayleigh_min(flat);
  double exact = std::pow(std::numbers::pi / 4.0, 2);
  CHECK(std::abs(lam - exact) <= 0.02 * exact);

  // (A,B) = (1,0): strictly below 2 at R=50
  RayleighProblem open2{1.0, 0.0, 50.0, 4000};
  double lam2 = rayleigh_min(open2);
  CHECK(lam2 < 2.0);
  CHECK(lam2 == doctest::Approx(0.5185).epsilon(5e-3));  // cross-checked value

  // B^2 = 2A: nonnegative spectrum
  RayleighProblem crit{0.5, 1.0, 1.9, 2000};
  double lam3 = rayleigh_min(crit);
  CHECK(lam3 >= -1e-10);
  CHECK(lam3 == doctest::Approx(0.0065).epsilon(0.1));  // cross-checked value
}

TEST_CASE("rayleigh_min: invalid problems are rejected") {
  // B^2 > 2A violates the admissibility constraint
  CHECK_THROWS_AS((void)rayleigh_min(RayleighProblem{0.1, 1.0, 1.0, 100}),
                  std::invalid_argument);
  // weight hits zero inside the interval: h = (t/2+1)^2 vanishes at t = -2
  CHECK_THROWS_AS((void)rayleigh_min(RayleighProblem{0.5, 1.0, 3.0, 6}),
                  std::invalid_argument);
}

TEST_CASE("rayleigh_min: refinement ladders are monotone") {
  // nested mesh refinement at fixed R can only lower the minimum
  double prev = 1e300;
  for (int N : {250, 500, 1000, 2000}) {
    double lam = rayleigh_min(RayleighProblem{1.0, 0.0, 10.0, N});
    CHECK(lam <= prev + 1e-12 * (1.0 + std::abs(lam)));
    prev = lam;
  }
  // growing R at fixed grid spacing extends the space by zero: monotone too
  prev = 1e300;
  for (int k : {1, 2, 4, 8}) {
    double lam = rayleigh_min(RayleighProblem{1.0, 0.0, 5.0 * k, 500 * k});
    CHECK(lam <= prev + 1e-12 * (1.0 + std::abs(lam)));
    prev = lam;
  }
}
