// Scalar fields on the (y,t) parameter plane, their discontinuity seams, and
// the smooth compactly supported test bumps used by the variation
// functionals.
#pragma once

#include <heis/profile.hpp>

#include <cmath>
#include <limits>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace heis {

/// Axis-aligned rectangle [y0,y1] x [t0,t1] in the (y,t) plane.
struct Rect {
  double y0{0.0};
  double y1{1.0};
  double t0{0.0};
  double t1{1.0};

  [[nodiscard]] double width() const { return y1 - y0; }
  [[nodiscard]] double height() const { return t1 - t0; }
  [[nodiscard]] double area() const { return width() * height(); }
  [[nodiscard]] bool contains(double y, double t) const {
    return y >= y0 && y <= y1 && t >= t0 && t <= t1;
  }
  [[nodiscard]] bool contains(const Rect& r) const {
    return r.y0 >= y0 && r.y1 <= y1 && r.t0 >= t0 && r.t1 <= t1;
  }
};

/// One seam line along which an integrand (or its derivatives) may jump:
/// a horizontal line {t = c}, a vertical line {y = c}, or a parabola
/// {t = c y^2 + d}.
struct Seam {
  enum class Type { horizontal, vertical, parabola };
  Type type{Type::horizontal};
  double c{0.0};
  double d{0.0};

  static Seam horizontal(double t) { return {Type::horizontal, t, 0.0}; }
  static Seam vertical(double y) { return {Type::vertical, y, 0.0}; }
  static Seam parabola(double c, double d) { return {Type::parabola, c, d}; }

  /// Signed evaluation: zero on the seam, sign tells the side.
  [[nodiscard]] double side(double y, double t) const {
    switch (type) {
      case Type::horizontal:
        return t - c;
      case Type::vertical:
        return y - c;
      case Type::parabola:
        return t - (c * y * y + d);
    }
    return 0.0;
  }
};

struct SeamSet {
  std::vector<Seam> seams;

  [[nodiscard]] bool empty() const { return seams.empty(); }
  void add(const Seam& s) { seams.push_back(s); }

  /// Distance from (y,t) to the nearest seam in the t direction only
  /// (the stencil direction used by seam-aware finite differences);
  /// +inf when no seam can interfere.
  [[nodiscard]] double min_abs_side(double y, double t) const {
    double m = std::numeric_limits<double>::infinity();
    for (const Seam& s : seams) m = std::min(m, std::abs(s.side(y, t)));
    return m;
  }
};

enum class FieldKind { plane, cone, cone_eps, strip, custom };

/// A scalar field f(y,t) together with the metadata the numerics need:
/// a nominal working domain, optional closed-form partials, the seams where
/// f or its partials jump, and the structural kind (several operations have
/// exact fast paths for planes and ruled strips).
struct ScalarField {
  FieldKind kind{FieldKind::custom};
  Rect domain{-2.0, 2.0, -1.0, 2.0};
  std::function<double(double, double)> f;
  std::function<double(double, double)> fy{};  ///< closed \partial_y if known
  std::function<double(double, double)> ft{};  ///< closed \partial_t if known
  /// closed form for \partial_y f + f \partial_t f when the combination is
  /// better behaved than the partials themselves (ruled strips: the partials
  /// of a staircase profile are singular, the combination is a(tau))
  std::function<double(double, double)> igrad{};
  SeamSet seams{};
  StripProfile profile{};  ///< kind == strip (and the ramped cone)
  double plane_a{0.0};     ///< kind == plane: f = a y + b
  double plane_b{0.0};
  double eps{0.0};         ///< kind == cone_eps

  [[nodiscard]] double operator()(double y, double t) const { return f(y, t); }
  [[nodiscard]] bool has_partials() const {
    return static_cast<bool>(fy) && static_cast<bool>(ft);
  }
};

/// The affine field f(y,t) = a y + b, an intrinsic plane.
[[nodiscard]] inline ScalarField plane_field(double a, double b,
                                             Rect domain = {-2.0, 2.0, -1.0,
                                                            2.0}) {
  ScalarField F;
  F.kind = FieldKind::plane;
  F.domain = domain;
  F.plane_a = a;
  F.plane_b = b;
  F.f = [a, b](double y, double) { return a * y + b; };
  F.fy = [a](double, double) { return a; };
  F.ft = [](double, double) { return 0.0; };
  return F;
}

/// Smooth compactly supported product bump
///   phi(y,t) = A b((y-cy)/ry) b((t-ct)/rt),  b(u) = exp(-1/(1-u^2)),
/// with closed-form partials.  sup phi = A e^{-2}; choosing A = e^2 gives a
/// bump with unit sup norm.
struct TestBump {
  double cy{0.0};
  double ct{0.0};
  double ry{1.0};
  double rt{1.0};
  double amplitude{1.0};

  [[nodiscard]] static double mollifier(double u) {
    double w = 1.0 - u * u;
    return w > 0.0 ? std::exp(-1.0 / w) : 0.0;
  }
  [[nodiscard]] static double mollifier_d(double u) {
    double w = 1.0 - u * u;
    if (w <= 0.0) return 0.0;
    return std::exp(-1.0 / w) * (-2.0 * u) / (w * w);
  }

  [[nodiscard]] double operator()(double y, double t) const {
    return amplitude * mollifier((y - cy) / ry) * mollifier((t - ct) / rt);
  }
  /// \partial_y phi
  [[nodiscard]] double dy(double y, double t) const {
    return amplitude * mollifier_d((y - cy) / ry) / ry *
           mollifier((t - ct) / rt);
  }
  /// \partial_t phi
  [[nodiscard]] double dt(double y, double t) const {
    return amplitude * mollifier((y - cy) / ry) *
           mollifier_d((t - ct) / rt) / rt;
  }

  [[nodiscard]] Rect support() const {
    return {cy - ry, cy + ry, ct - rt, ct + rt};
  }

  /// Amplitude that makes sup phi = 1 (and sup phi^2 = 1).
  [[nodiscard]] static double unit_amplitude() { return std::exp(2.0); }
};

}  // namespace heis
