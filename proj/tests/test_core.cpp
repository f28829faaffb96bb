// Tests for the Heisenberg group primitives: group law, dilations,
// graph parametrization and the horizontal frame.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <heis/core.hpp>

#include <cmath>
#include <random>

using namespace heis;

namespace {

std::mt19937_64 rng_with(unsigned seed) { return std::mt19937_64{seed}; }

HPoint random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  return HPoint{u(rng), u(rng), u(rng)};
}

double dist(const HPoint& p, const HPoint& q) {
  return std::sqrt((p.x - q.x) * (p.x - q.x) + (p.y - q.y) * (p.y - q.y) +
                   (p.z - q.z) * (p.z - q.z));
}

}  // namespace

TEST_CASE("group law: pinned products") {
  // (x,y,z)*(x',y',z') = (x+x', y+y', z+z' + (x y' - x' y)/2)
  HPoint p = hgroup_mul({1, 0, 0}, {0, 1, 0});
  CHECK(p.x == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(p.y == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(p.z == doctest::Approx(0.5).epsilon(1e-15));

  // reversed order picks up the opposite sign in z
  HPoint q = hgroup_mul({0, 1, 0}, {1, 0, 0});
  CHECK(q.z == doctest::Approx(-0.5).epsilon(1e-15));

  // identity element
  HPoint e{0, 0, 0};
  HPoint r = random_point(*new std::mt19937_64(7));
  HPoint re = hgroup_mul(r, e);
  HPoint er = hgroup_mul(e, r);
  CHECK(dist(re, r) == doctest::Approx(0.0));
  CHECK(dist(er, r) == doctest::Approx(0.0));
}

TEST_CASE("group law: inverses") {
  auto rng = rng_with(101);
  for (int i = 0; i < 1000; ++i) {
    HPoint p = random_point(rng);
    HPoint ip = hgroup_inv(p);
    HPoint prod = hgroup_mul(p, ip);
    CHECK(dist(prod, {0, 0, 0}) <= 1e-12);
  }
}

TEST_CASE("group law: associativity on random triples") {
  auto rng = rng_with(2024);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    HPoint a = random_point(rng), b = random_point(rng), c = random_point(rng);
    HPoint lhs = hgroup_mul(hgroup_mul(a, b), c);
    HPoint rhs = hgroup_mul(a, hgroup_mul(b, c));
    worst = std::max(worst, dist(lhs, rhs));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("dilations: pinned values and homomorphism property") {
  HPoint p = dilate(2.0, {1, 1, 1});
  CHECK(p.x == doctest::Approx(2.0));
  CHECK(p.y == doctest::Approx(2.0));
  CHECK(p.z == doctest::Approx(4.0));

  HPoint idp = dilate(1.0, {0.3, -0.7, 0.9});
  CHECK(dist(idp, {0.3, -0.7, 0.9}) == doctest::Approx(0.0));

  // delta_lambda(p q) = delta_lambda(p) delta_lambda(q)
  auto rng = rng_with(5);
  std::uniform_real_distribution<double> lam(0.1, 4.0);
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    HPoint a = random_point(rng), b = random_point(rng);
    double l = lam(rng);
    HPoint lhs = dilate(l, hgroup_mul(a, b));
    HPoint rhs = hgroup_mul(dilate(l, a), dilate(l, b));
    worst = std::max(worst, dist(lhs, rhs));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("dilations: nonpositive factor is rejected") {
  CHECK_THROWS_AS(dilate(0.0, {1, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(dilate(-2.0, {1, 1, 1}), std::invalid_argument);
}

TEST_CASE("graph map: (0,y,t)*(f,0,0) with pinned images") {
  // graph_map(f, y, t) = (f, y, t - y f / 2)
  HPoint p = graph_map(1.0, 2.0, 3.0);
  CHECK(p.x == doctest::Approx(1.0));
  CHECK(p.y == doctest::Approx(2.0));
  CHECK(p.z == doctest::Approx(2.0));

  // f = 0 embeds the (y,t) plane as the x = 0 plane
  HPoint q = graph_map(0.0, -1.3, 0.7);
  CHECK(dist(q, {0.0, -1.3, 0.7}) == doctest::Approx(0.0));

  // consistency with the group law: (0,y,t)*(f,0,0)
  HPoint viaMul = hgroup_mul({0.0, 2.0, 3.0}, {1.0, 0.0, 0.0});
  CHECK(dist(p, viaMul) <= 1e-15);
}

TEST_CASE("graph map: injectivity in (y,t)") {
  auto rng = rng_with(999);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 500; ++i) {
    double y1 = u(rng), t1 = u(rng), y2 = u(rng), t2 = u(rng);
    if (y1 == y2 && t1 == t2) continue;
    // even with equal function values the images must differ
    HPoint p1 = graph_map(0.4, y1, t1);
    HPoint p2 = graph_map(0.4, y2, t2);
    CHECK(dist(p1, p2) > 0.0);
  }
}

TEST_CASE("horizontal frame: pinned ambient components") {
  // X = (1, 0, -y/2), Y = (0, 1, x/2) at the basepoint
  auto [X, Y] = horizontal_frame({0, 0, 0});
  CHECK(X.cx == doctest::Approx(1.0));
  CHECK(X.cy == doctest::Approx(0.0));
  CHECK(X.cz == doctest::Approx(0.0));
  CHECK(Y.cx == doctest::Approx(0.0));
  CHECK(Y.cy == doctest::Approx(1.0));
  CHECK(Y.cz == doctest::Approx(0.0));

  auto [Xp, Yp] = horizontal_frame({1, 2, 3});
  CHECK(Xp.cx == doctest::Approx(1.0));
  CHECK(Xp.cz == doctest::Approx(-1.0));
  CHECK(Yp.cy == doctest::Approx(1.0));
  CHECK(Yp.cz == doctest::Approx(0.5));
  CHECK(Xp.base.x == doctest::Approx(1.0));
  CHECK(Yp.base.z == doctest::Approx(3.0));
}

TEST_CASE("horizontal frame: commutator closes the loop in the z direction") {
  // Euler loop p -> +hX -> +hY -> -hX -> -hY; the defect divided by h^2
  // approaches [X,Y] = (0,0,1) at rate O(h).
  auto rng = rng_with(31);
  HPoint p = random_point(rng);
  auto advance = [](const HPoint& q, double h, bool useX) {
    auto [X, Y] = horizontal_frame(q);
    const HVector& v = useX ? X : Y;
    return HPoint{q.x + h * v.cx, q.y + h * v.cy, q.z + h * v.cz};
  };
  auto defect = [&](double h) {
    HPoint q = advance(p, h, true);
    q = advance(q, h, false);
    q = advance(q, -h, true);
    q = advance(q, -h, false);
    return HPoint{(q.x - p.x) / (h * h), (q.y - p.y) / (h * h),
                  (q.z - p.z) / (h * h)};
  };
  // The frame coefficients are affine in position, so the Euler loop closes
  // up to exactly h^2 in z; only roundoff (~eps/h^2) remains after rescaling.
  CHECK(dist(defect(1e-2), {0, 0, 1}) <= 1e-10);
  CHECK(dist(defect(1e-3), {0, 0, 1}) <= 1e-8);
}

TEST_CASE("eigen interop round trip") {
  HPoint p{0.25, -1.5, 3.0};
  Eigen::Vector3d v = p.vec();
  HPoint q = HPoint::from(v);
  CHECK(dist(p, q) == doctest::Approx(0.0));
}
