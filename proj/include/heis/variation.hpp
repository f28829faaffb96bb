// The variational layer: intrinsic gradient along the graph direction,
// the graph area functional, and its first and second variations with
// finite-difference consistency checks.
#pragma once

#include <heis/field.hpp>
#include <heis/numerics.hpp>

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>

namespace heis {

namespace detail {

constexpr double kPartialStep = 1e-5;

inline double field_dy(const ScalarField& f, double y, double t) {
  if (f.fy) return f.fy(y, t);
  return fd_partial(f.f, y, t, FdDir::y, kPartialStep, f.seams);
}

inline double field_dt(const ScalarField& f, double y, double t) {
  if (f.ft) return f.ft(y, t);
  return fd_partial(f.f, y, t, FdDir::t, kPartialStep, f.seams);
}

/// Profiles whose slope is nowhere differentiable have no pointwise
/// \partial_t f; the variation integrands are evaluated on finite-level
/// approximants instead.
inline void require_regular(const ScalarField& f, const char* op) {
  if (f.kind == FieldKind::strip &&
      f.profile.kind == StripKind::cantor_limit) {
    throw std::invalid_argument(std::string(op) +
                                ": the limit staircase profile has a singular "
                                "t-derivative; evaluate a finite level");
  }
}

inline void require_bump_inside(const ScalarField& f, const TestBump& phi) {
  if (!f.domain.contains(phi.support())) {
    throw std::invalid_argument(
        "test bump support must lie inside the field domain");
  }
}

}  // namespace detail

/// d_y f + f d_t f at (y,t): the derivative of f along the projected
/// horizontal direction through its own graph.  Closed forms are used when
/// the field carries them; otherwise seam-aware finite differences.
[[nodiscard]] inline double intrinsic_gradient(const ScalarField& f, double y,
                                               double t) {
  if (f.igrad) return f.igrad(y, t);
  return detail::field_dy(f, y, t) + f(y, t) * detail::field_dt(f, y, t);
}

/// Area of the graph of f over E:  int_E sqrt(1 + (d_y f + f d_t f)^2).
[[nodiscard]] inline double graph_area(const ScalarField& f, const Rect& E,
                                       const QuadratureSpec& spec = {}) {
  if (!f.domain.contains(E)) {
    throw std::invalid_argument("graph_area: region must lie in the domain");
  }
  auto integrand = [&f](double y, double t) {
    double g = intrinsic_gradient(f, y, t);
    return std::sqrt(1.0 + g * g);
  };
  return integrate2d(integrand, E, f.seams, spec).value;
}

namespace detail {

inline IntegrationResult first_variation_impl(const ScalarField& f,
                                              const TestBump& phi,
                                              const QuadratureSpec& spec) {
  require_regular(f, "first_variation");
  require_bump_inside(f, phi);
  auto integrand = [&](double y, double t) {
    double g = intrinsic_gradient(f, y, t);
    double W = g / std::sqrt(1.0 + g * g);
    double gphi = phi.dy(y, t) + f(y, t) * phi.dt(y, t);
    return -W * (gphi + field_dt(f, y, t) * phi(y, t));
  };
  return integrate2d(integrand, phi.support(), f.seams, spec);
}

inline IntegrationResult second_variation_impl(const ScalarField& f,
                                               const TestBump& phi,
                                               const QuadratureSpec& spec) {
  require_regular(f, "second_variation");
  require_bump_inside(f, phi);
  auto integrand = [&](double y, double t) {
    double g = intrinsic_gradient(f, y, t);
    double one = 1.0 + g * g;
    double W = g / std::sqrt(one);
    double p = phi(y, t);
    double gphi = phi.dy(y, t) + f(y, t) * phi.dt(y, t);
    double lin = gphi + field_dt(f, y, t) * p;
    return lin * lin / (one * std::sqrt(one)) + W * 2.0 * p * phi.dt(y, t);
  };
  return integrate2d(integrand, phi.support(), f.seams, spec);
}

}  // namespace detail

/// First variation of the graph area at f in direction phi:
///   - int  [g/sqrt(1+g^2)] (d_y phi + f d_t phi + (d_t f) phi),
/// g = d_y f + f d_t f.  Vanishes for every phi exactly when f is stationary.
[[nodiscard]] inline double first_variation(const ScalarField& f,
                                            const TestBump& phi,
                                            const QuadratureSpec& spec = {}) {
  return detail::first_variation_impl(f, phi, spec).value;
}

/// Second variation of the graph area at f in direction phi:
///   int (d_y phi + f d_t phi + (d_t f) phi)^2 / (1+g^2)^{3/2}
///     + [g/sqrt(1+g^2)] d_t(phi^2).
/// Nonnegative for every phi exactly when f is stable.
[[nodiscard]] inline double second_variation(const ScalarField& f,
                                             const TestBump& phi,
                                             const QuadratureSpec& spec = {}) {
  return detail::second_variation_impl(f, phi, spec).value;
}

/// Both variations with their quadrature error estimates and identifiers.
struct VariationReport {
  double I_value{0.0};
  double II_value{0.0};
  double I_err{0.0};
  double II_err{0.0};
  std::string field_id;
  std::string bump_id;
};

[[nodiscard]] inline std::string field_id(const ScalarField& f) {
  char buf[128];
  switch (f.kind) {
    case FieldKind::plane:
      std::snprintf(buf, sizeof buf, "plane(a=%.9g,b=%.9g)", f.plane_a,
                    f.plane_b);
      return buf;
    case FieldKind::cone:
      return "cone";
    case FieldKind::cone_eps:
      std::snprintf(buf, sizeof buf, "cone_eps(eps=%.9g)", f.eps);
      return buf;
    case FieldKind::strip:
      switch (f.profile.kind) {
        case StripKind::constant:
          std::snprintf(buf, sizeof buf, "strip(constant,c=%.9g)",
                        f.profile.c);
          return buf;
        case StripKind::cone_eps:
          std::snprintf(buf, sizeof buf, "strip(ramp,eps=%.9g)",
                        f.profile.eps);
          return buf;
        case StripKind::cantor_n:
          std::snprintf(buf, sizeof buf, "strip(staircase,n=%d)",
                        f.profile.n);
          return buf;
        case StripKind::cantor_limit:
          return "strip(staircase-limit)";
        case StripKind::custom:
          return "strip(custom)";
      }
      return "strip";
    case FieldKind::custom:
      return "custom";
  }
  return "field";
}

[[nodiscard]] inline std::string bump_id(const TestBump& phi) {
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "bump(center=(%.9g,%.9g),radii=(%.9g,%.9g),A=%.9g)", phi.cy,
                phi.ct, phi.ry, phi.rt, phi.amplitude);
  return buf;
}

[[nodiscard]] inline VariationReport variation_report(
    const ScalarField& f, const TestBump& phi,
    const QuadratureSpec& spec = {}) {
  IntegrationResult I = detail::first_variation_impl(f, phi, spec);
  IntegrationResult II = detail::second_variation_impl(f, phi, spec);
  VariationReport r;
  r.I_value = I.value;
  r.II_value = II.value;
  r.I_err = I.err_est;
  r.II_err = II.err_est;
  r.field_id = field_id(f);
  r.bump_id = bump_id(phi);
  return r;
}

/// The canonical family of unit-sup test bumps for a region: centers on a
/// ny x nt grid inset by the bump radius from each edge, all with the same
/// radius.  For the default region and radius 0.3 this is the 5x4 = 20-bump
/// family used by the stationarity and stability sweeps.
[[nodiscard]] inline std::vector<TestBump> bump_family(const Rect& region,
                                                       double radius = 0.3,
                                                       int ny = 5, int nt = 4) {
  if (!(radius > 0.0) || ny < 1 || nt < 1) {
    throw std::invalid_argument("bump_family: need radius > 0 and a grid");
  }
  if (region.y1 - region.y0 < 2.0 * radius ||
      region.t1 - region.t0 < 2.0 * radius) {
    throw std::invalid_argument("bump_family: region too small for the radius");
  }
  std::vector<TestBump> fam;
  fam.reserve(static_cast<std::size_t>(ny) * nt);
  for (int i = 0; i < ny; ++i) {
    for (int j = 0; j < nt; ++j) {
      const double cy =
          ny == 1 ? 0.5 * (region.y0 + region.y1)
                  : region.y0 + radius +
                        (region.y1 - region.y0 - 2.0 * radius) * i / (ny - 1);
      const double ct =
          nt == 1 ? 0.5 * (region.t0 + region.t1)
                  : region.t0 + radius +
                        (region.t1 - region.t0 - 2.0 * radius) * j / (nt - 1);
      fam.push_back(
          TestBump{cy, ct, radius, radius, TestBump::unit_amplitude()});
    }
  }
  return fam;
}

/// Consistency of the variational formulas against difference quotients of
/// the area itself: errI compares the first variation with the centered
/// quotient of eps -> area(f + eps phi) at step h, errII the second variation
/// with the centered second quotient.  Both vanish at O(h^2).
[[nodiscard]] inline std::pair<double, double> variation_fd_check(
    const ScalarField& f, const TestBump& phi, double h,
    const QuadratureSpec& spec = {}) {
  if (!(h > 0.0)) {
    throw std::invalid_argument("variation_fd_check: step must be > 0");
  }
  detail::require_regular(f, "variation_fd_check");
  detail::require_bump_inside(f, phi);
  auto perturbed = [&](double eps) {
    ScalarField g;
    g.kind = FieldKind::custom;
    g.domain = f.domain;
    g.seams = f.seams;
    const ScalarField& base = f;
    g.f = [&base, &phi, eps](double y, double t) {
      return base(y, t) + eps * phi(y, t);
    };
    if (base.fy) {
      g.fy = [&base, &phi, eps](double y, double t) {
        return base.fy(y, t) + eps * phi.dy(y, t);
      };
    }
    if (base.ft) {
      g.ft = [&base, &phi, eps](double y, double t) {
        return base.ft(y, t) + eps * phi.dt(y, t);
      };
    }
    return g;
  };
  Rect E = phi.support();
  ScalarField fp = perturbed(h);
  ScalarField fm = perturbed(-h);
  double Ap = graph_area(fp, E, spec);
  double Am = graph_area(fm, E, spec);
  double A0 = graph_area(f, E, spec);
  double I = first_variation(f, phi, spec);
  double II = second_variation(f, phi, spec);
  double errI = std::abs(I - (Ap - Am) / (2.0 * h));
  double errII = std::abs(II - (Ap - 2.0 * A0 + Am) / (h * h));
  return {errI, errII};
}

}  // namespace heis
