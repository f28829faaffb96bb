// Ruled strips generated by a nondecreasing profile a(tau): the scalar field
// obtained by inverting the fiber map chi(s,tau) = a(tau) s^2/2 + tau, the
// (s,tau)-coordinate second variation of the area, and the rotational
// calibration field that makes these strips area-minimizing candidates.
#pragma once

#include <heis/core.hpp>
#include <heis/field.hpp>
#include <heis/numerics.hpp>

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace heis {

/// Invert tau -> a(tau) y^2/2 + tau at height t (strictly increasing with
/// slope >= 1, so the bracket [t - a_max y^2/2, t - a_min y^2/2] always
/// encloses the solution).
[[nodiscard]] inline double strip_tau(const StripProfile& prof, double y,
                                      double t) {
  double half = 0.5 * y * y;
  if (half == 0.0) return t;
  if (prof.a_max() == prof.a_min()) return t - prof.a_max() * half;
  // pad the bracket so roundoff at an edge can never break enclosure, and
  // bisect to machine width: profiles that are merely Holder continuous
  // (the staircase) amplify any slack in tau into far larger slack in a(tau)
  double pad = 1e-6 * (1.0 + std::abs(t) + half);
  double lo = t - prof.a_max() * half - pad;
  double hi = t - prof.a_min() * half + pad;
  auto g = [&](double tau) { return prof.a(tau) * half + tau; };
  return bisect_monotone(g, lo, hi, t, 0.0);
}

[[nodiscard]] inline double strip_tau(const ScalarField& f, double y,
                                      double t) {
  if (f.kind != FieldKind::strip) {
    throw std::invalid_argument("strip_tau: field is not a ruled strip");
  }
  return strip_tau(f.profile, y, t);
}

/// The scalar field of the ruled strip with profile a: f(y,t) = a(tau(y,t)) y
/// where tau solves a(tau) y^2/2 + tau = t.  Carries closed-form partials
/// when a' exists, the exact intrinsic-gradient combination a(tau), and
/// seams along the images of a's breakpoints (parabolas t = a(tau_k) y^2/2
/// + tau_k).
[[nodiscard]] inline ScalarField strip_field(const StripProfile& prof,
                                             Rect domain = {-2.0, 2.0, -1.0,
                                                            2.0}) {
  ScalarField F;
  F.kind = FieldKind::strip;
  F.domain = domain;
  F.profile = prof;
  if (prof.kind == StripKind::constant) {
    double c = prof.c;
    F.f = [c](double y, double) { return c * y; };
    F.fy = [c](double, double) { return c; };
    F.ft = [](double, double) { return 0.0; };
    F.igrad = [c](double, double) { return c; };
    return F;
  }
  F.f = [prof](double y, double t) {
    return prof.a(strip_tau(prof, y, t)) * y;
  };
  F.igrad = [prof](double y, double t) {
    return prof.a(strip_tau(prof, y, t));
  };
  bool has_da = prof.kind != StripKind::cantor_limit &&
                !(prof.kind == StripKind::custom && !prof.custom_da);
  if (has_da) {
    F.fy = [prof](double y, double t) {
      double tau = strip_tau(prof, y, t);
      double a = prof.a(tau), da = prof.da(tau);
      return a - da * a * y * y / (1.0 + da * y * y / 2.0);
    };
    F.ft = [prof](double y, double t) {
      double tau = strip_tau(prof, y, t);
      double da = prof.da(tau);
      return da * y / (1.0 + da * y * y / 2.0);
    };
  }
  for (double tk : prof.tau_kinks()) {
    double ak = prof.a(tk);
    if (ak == 0.0) {
      F.seams.add(Seam::horizontal(tk));
    } else {
      F.seams.add(Seam::parabola(ak / 2.0, tk));
    }
  }
  return F;
}

/// Positive/negative split of the strip second variation.
struct StripSvParts {
  double positive{0.0};
  double negative{0.0};
  double value{0.0};
};

/// Second variation of the area along a strip, written in the ruled
/// coordinates (s,tau) for a test function phi_tilde(s,tau):
///   int (d_s phi)^2 (a' s^2/2 + 1)/(1+a^2)^{3/2}
///     - 2 phi^2 a' / ((1+a^2)^{3/2} (a' s^2/2 + 1)).
/// The profile must have a density a' (the limit staircase does not).
[[nodiscard]] inline StripSvParts strip_second_variation_parts(
    const StripProfile& prof, const TestBump& phi,
    const QuadratureSpec& spec = {}) {
  if (prof.kind == StripKind::cantor_limit) {
    throw std::invalid_argument(
        "strip_second_variation: the limit staircase has no density; "
        "evaluate a finite level");
  }
  SeamSet seams;
  for (double tk : prof.tau_kinks()) seams.add(Seam::horizontal(tk));
  Rect E = phi.support();
  auto pos_ig = [&](double s, double tau) {
    double a = prof.a(tau), da = prof.da(tau);
    double ds = phi.dy(s, tau);
    double one = 1.0 + a * a;
    return ds * ds * (da * s * s / 2.0 + 1.0) / (one * std::sqrt(one));
  };
  auto neg_ig = [&](double s, double tau) {
    double a = prof.a(tau), da = prof.da(tau);
    double p = phi(s, tau);
    double one = 1.0 + a * a;
    return 2.0 * p * p * da /
           (one * std::sqrt(one) * (da * s * s / 2.0 + 1.0));
  };
  StripSvParts out;
  out.positive = integrate2d(pos_ig, E, seams, spec).value;
  out.negative = integrate2d(neg_ig, E, seams, spec).value;
  out.value = out.positive - out.negative;
  return out;
}

[[nodiscard]] inline double strip_second_variation(
    const StripProfile& prof, const TestBump& phi,
    const QuadratureSpec& spec = {}) {
  return strip_second_variation_parts(prof, phi, spec).value;
}

/// Same quadratic form evaluated on the pullback of a (y,t) test bump
/// through the fiber map: phi_tilde(s,tau) = phi(s, chi(s,tau)) with
/// d_s phi_tilde = (d_y phi + a(tau) s d_t phi)(s, chi(s,tau)).  Changing
/// variables back to (y,t) turns this into the graph-side second variation,
/// so the two pipelines must agree.
[[nodiscard]] inline double strip_second_variation_pullback(
    const StripProfile& prof, const TestBump& phi,
    const QuadratureSpec& spec = {}) {
  if (prof.kind == StripKind::cantor_limit) {
    throw std::invalid_argument(
        "strip_second_variation: the limit staircase has no density; "
        "evaluate a finite level");
  }
  SeamSet seams;
  for (double tk : prof.tau_kinks()) seams.add(Seam::horizontal(tk));
  Rect sup = phi.support();
  double smax = std::max(std::abs(sup.y0), std::abs(sup.y1));
  Rect E{sup.y0, sup.y1,
         sup.t0 - prof.a_max() * smax * smax / 2.0 - 1e-9, sup.t1 + 1e-9};
  auto integrand = [&](double s, double tau) {
    double a = prof.a(tau), da = prof.da(tau);
    double chi = a * s * s / 2.0 + tau;
    double p = phi(s, chi);
    double ds = phi.dy(s, chi) + a * s * phi.dt(s, chi);
    double one = 1.0 + a * a;
    double weight = da * s * s / 2.0 + 1.0;
    return (ds * ds * weight - 2.0 * p * p * da / weight) /
           (one * std::sqrt(one));
  };
  return integrate2d(integrand, E, seams, spec).value;
}

/// The horizontal unit rotation field nu = (-y/r) X + (x/r) Y, r^2 = x^2+y^2,
/// returned in ambient coordinates at p.  Undefined on the vertical axis.
[[nodiscard]] inline HVector calibration_nu(const HPoint& p) {
  double r2 = p.x * p.x + p.y * p.y;
  if (r2 == 0.0) {
    throw std::invalid_argument(
        "calibration_nu: undefined on the vertical axis");
  }
  double r = std::sqrt(r2);
  auto [X, Y] = horizontal_frame(p);
  double c1 = -p.y / r, c2 = p.x / r;
  return HVector{c1 * X.cx + c2 * Y.cx, c1 * X.cy + c2 * Y.cy,
                 c1 * X.cz + c2 * Y.cz, p};
}

/// Finite-difference horizontal divergence X(nu^1) + Y(nu^2) of the
/// calibration field at p (identically zero in closed form; the check
/// quantifies the numerical residual).
[[nodiscard]] inline double calibration_divergence(const HPoint& p,
                                                   double h = 1e-5) {
  auto nu1 = [](const HPoint& q) {
    return -q.y / std::sqrt(q.x * q.x + q.y * q.y);
  };
  auto nu2 = [](const HPoint& q) {
    return q.x / std::sqrt(q.x * q.x + q.y * q.y);
  };
  auto shift = [](const HPoint& q, const HVector& v, double step) {
    return HPoint{q.x + step * v.cx, q.y + step * v.cy, q.z + step * v.cz};
  };
  auto [X, Y] = horizontal_frame(p);
  double dX = (nu1(shift(p, X, h)) - nu1(shift(p, X, -h))) / (2.0 * h);
  double dY = (nu2(shift(p, Y, h)) - nu2(shift(p, Y, -h))) / (2.0 * h);
  return dX + dY;
}

/// Aggregate result of checking the calibration against a strip.
struct CalibrationReport {
  double max_abs_divergence{0.0};
  /// worst (X,Y)-component deviation of nu from the strip normal over the
  /// s > 0 samples
  double max_normal_deviation{0.0};
  /// worst deviation after flipping sign, over the s < 0 samples
  double max_normal_deviation_mirrored{0.0};
  /// number of samples where only the sign-flipped comparison matched
  int orientation_flips{0};
  int samples_checked{0};
};

/// At each ruled point Gamma(s,tau) = (a(tau) s, s, tau): evaluate the
/// finite-difference divergence of nu and compare nu with the graph normal
/// (-1, a)/sqrt(1+a^2) in (X,Y)-components.  For s < 0 the closed forms
/// agree only up to orientation; such samples are counted separately rather
/// than folded into the s > 0 statistic.
[[nodiscard]] inline CalibrationReport calibration_check(
    const StripProfile& prof,
    const std::vector<std::pair<double, double>>& samples, double h = 1e-5) {
  CalibrationReport rep;
  for (auto [s, tau] : samples) {
    if (s == 0.0) {
      throw std::invalid_argument(
          "calibration_check: s = 0 lies on the vertical axis");
    }
    double a = prof.a(tau);
    HPoint p{a * s, s, tau};
    rep.max_abs_divergence =
        std::max(rep.max_abs_divergence,
                 std::abs(calibration_divergence(p, h)));
    HVector nu = calibration_nu(p);
    // ambient (cx, cy) coincide with the (X,Y)-frame coefficients
    double norm = std::sqrt(1.0 + a * a);
    double gx = -1.0 / norm, gy = a / norm;
    double direct =
        std::max(std::abs(nu.cx - gx), std::abs(nu.cy - gy));
    double mirrored =
        std::max(std::abs(nu.cx + gx), std::abs(nu.cy + gy));
    if (s > 0.0) {
      rep.max_normal_deviation = std::max(rep.max_normal_deviation, direct);
    } else {
      rep.max_normal_deviation_mirrored =
          std::max(rep.max_normal_deviation_mirrored, mirrored);
      if (mirrored < direct) ++rep.orientation_flips;
    }
    ++rep.samples_checked;
  }
  return rep;
}

}  // namespace heis
