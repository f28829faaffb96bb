#pragma once

// The dilation-cone example: a piecewise field that is homogeneous under the
// parabolic dilations (y,t) -> (ry, r^2 t), its one-parameter mollification
// (a ruled strip with a linear ramp profile), L^p convergence of the
// mollified family, and the closed-form bound that keeps the negative part
// of the second variation small.

#include <heis/core.hpp>
#include <heis/field.hpp>
#include <heis/numerics.hpp>
#include <heis/profile.hpp>

#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace heis {

/// The piecewise cone field
///   f(y,t) = 0 for t <= 0;  2t/y for 0 < t <= y^2/2;  y for t > y^2/2,
/// with closed-form partials and the combination d_y f + f d_t f.  Its
/// partials jump across t = 0 and t = y^2/2, both declared as seams.
[[nodiscard]] inline ScalarField cone_field() {
  ScalarField F;
  F.kind = FieldKind::cone;
  F.f = [](double y, double t) {
    if (t <= 0.0) return 0.0;
    if (t > 0.5 * y * y) return y;
    return 2.0 * t / y;  // 0 < t <= y^2/2 forces y != 0
  };
  F.fy = [](double y, double t) {
    if (t <= 0.0) return 0.0;
    if (t > 0.5 * y * y) return 1.0;
    return -2.0 * t / (y * y);
  };
  F.ft = [](double y, double t) {
    if (t <= 0.0) return 0.0;
    if (t > 0.5 * y * y) return 0.0;
    return 2.0 / y;
  };
  F.igrad = [](double y, double t) {
    if (t <= 0.0) return 0.0;
    if (t > 0.5 * y * y) return 1.0;
    return 2.0 * t / (y * y);
  };
  F.seams.add(Seam::horizontal(0.0));
  F.seams.add(Seam::parabola(0.5, 0.0));
  return F;
}

/// Upper bound on the distance from an ambient point to the cone's graph,
/// which decomposes into three explicit pieces:
///   {x = 0, z <= 0}   (the flat region t <= 0),
///   {z = 0, xy >= 0, |x| <= |y|}   (the fan swept by 0 < t <= y^2/2),
///   {x = y, z >= 0}   (the region t > y^2/2).
/// Zero exactly on the set, and invariant in kind under the parabolic
/// dilations (x,y,z) -> (rx, ry, r^2 z), which map the graph onto itself.
[[nodiscard]] inline double cone_graph_defect(const HPoint& p) {
  const double d1 = std::hypot(p.x, std::max(p.z, 0.0));
  double fan = 0.0;
  if (p.x * p.y < 0.0) {
    fan = std::min(std::abs(p.x), std::abs(p.y));
  } else {
    fan = std::max(0.0, std::abs(p.x) - std::abs(p.y));
  }
  const double d2 = std::hypot(p.z, fan);
  const double d3 = std::hypot(p.x - p.y, std::max(-p.z, 0.0));
  return std::min(d1, std::min(d2, d3));
}

/// Mollified cone at parameter eps > 0:
///   f_eps(y,t) = 0 for t <= 0;  2yt/(y^2+2eps) for 0 < t <= (y^2+2eps)/2;
///                y above,
/// together with the ramp profile a_eps(tau) = clamp(tau/eps, 0, 1).  The
/// field is exactly the ruled strip of that profile (checked in the tests),
/// and its middle branch satisfies d_y f + f d_t f = 2t/(y^2+2eps).
[[nodiscard]] inline std::pair<ScalarField, StripProfile> cone_eps(double eps) {
  if (!(eps > 0.0)) {
    throw std::invalid_argument("cone_eps: eps must be > 0");
  }
  StripProfile prof = StripProfile::coneEps(eps);
  ScalarField F;
  F.kind = FieldKind::cone_eps;
  F.eps = eps;
  F.profile = prof;
  F.f = [eps](double y, double t) {
    if (t <= 0.0) return 0.0;
    double D = y * y + 2.0 * eps;
    if (t > 0.5 * D) return y;
    return 2.0 * y * t / D;
  };
  F.fy = [eps](double y, double t) {
    if (t <= 0.0) return 0.0;
    double D = y * y + 2.0 * eps;
    if (t > 0.5 * D) return 1.0;
    return 2.0 * t * (2.0 * eps - y * y) / (D * D);
  };
  F.ft = [eps](double y, double t) {
    if (t <= 0.0) return 0.0;
    double D = y * y + 2.0 * eps;
    if (t > 0.5 * D) return 0.0;
    return 2.0 * y / D;
  };
  F.igrad = [eps](double y, double t) {
    if (t <= 0.0) return 0.0;
    double D = y * y + 2.0 * eps;
    if (t > 0.5 * D) return 1.0;
    return 2.0 * t / D;
  };
  F.seams.add(Seam::horizontal(0.0));
  F.seams.add(Seam::parabola(0.5, eps));
  return {std::move(F), std::move(prof)};
}

/// Report for the convergence of the mollified family toward the cone:
/// L^p and sup norms of the differences of the fields and of both partials
/// along a ladder of eps values, least-squares decay rates in log-log,
/// whether the L^p norms decrease strictly along the ladder, and a sampled
/// check of the pointwise bound |d_t f_eps| <= g3 with
///   g3(y,t) = 0 for t <= 0;  2/|y| for 0 < t <= y^2/2;  sqrt(2/t) above,
/// the eps-independent envelope that makes dominated convergence work for
/// every exponent p in [1,3).
struct ConvergenceReport {
  std::vector<double> ladder;
  double p{2.0};
  std::vector<double> f_norm;
  std::vector<double> dy_norm;
  std::vector<double> dt_norm;
  std::vector<double> f_sup;
  std::vector<double> dy_sup;
  std::vector<double> dt_sup;
  double rate_f{0.0};
  double rate_dy{0.0};
  double rate_dt{0.0};
  bool monotone{false};
  bool domination_ok{false};
  int domination_samples{0};
  double max_err_est{0.0};
  bool converged{true};
};

namespace detail {

/// Dominating envelope for |d_t f_eps|, independent of eps.
[[nodiscard]] inline double cone_dt_envelope(double y, double t) {
  if (t <= 0.0) return 0.0;
  if (t <= 0.5 * y * y) return 2.0 / std::abs(y);
  return std::sqrt(2.0 / t);
}

/// Least-squares slope of log(values) against log(params).
[[nodiscard]] inline double loglog_slope(const std::vector<double>& params,
                                         const std::vector<double>& values) {
  std::size_t n = params.size();
  if (n < 2) return 0.0;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(params[i] > 0.0) || !(values[i] > 0.0)) continue;
    double lx = std::log(params[i]), ly = std::log(values[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++used;
  }
  if (used < 2) return 0.0;
  double denom = used * sxx - sx * sx;
  if (denom == 0.0) return 0.0;
  return (used * sxy - sx * sy) / denom;
}

}  // namespace detail

/// L^p distances (1 <= p < 3) between the mollified fields and the cone on a
/// bounded region, for the fields themselves and both partials, along a
/// ladder of eps values.  The quadrature splits the region at every declared
/// seam of either field plus the y = 0 line, where the pinched middle branch
/// leaves a kink in the y-direction integrand.  The exponent cap p < 3 is
/// exactly the integrability range of the envelope g3.
[[nodiscard]] inline ConvergenceReport cone_convergence(
    const std::vector<double>& eps_ladder, double p, const Rect& region,
    const QuadratureSpec& spec = {}) {
  if (eps_ladder.empty()) {
    throw std::invalid_argument("cone_convergence: empty eps ladder");
  }
  for (double e : eps_ladder) {
    if (!(e > 0.0)) {
      throw std::invalid_argument("cone_convergence: eps must be > 0");
    }
  }
  if (!(p >= 1.0) || !(p < 3.0)) {
    throw std::invalid_argument("cone_convergence: p must lie in [1,3)");
  }
  if (!(region.width() > 0.0) || !(region.height() > 0.0) ||
      !std::isfinite(region.width()) || !std::isfinite(region.height())) {
    throw std::invalid_argument("cone_convergence: region must be bounded");
  }

  ScalarField cone = cone_field();
  ConvergenceReport rep;
  rep.ladder = eps_ladder;
  rep.p = p;

  for (double eps : eps_ladder) {
    auto [feps, prof] = cone_eps(eps);
    (void)prof;
    SeamSet seams;
    seams.add(Seam::horizontal(0.0));
    seams.add(Seam::parabola(0.5, 0.0));
    seams.add(Seam::parabola(0.5, eps));
    seams.add(Seam::vertical(0.0));

    auto lp_norm = [&](auto&& diff) {
      auto ig = [&](double y, double t) {
        return std::pow(std::abs(diff(y, t)), p);
      };
      IntegrationResult r = integrate2d(ig, region, seams, spec);
      rep.max_err_est = std::max(rep.max_err_est, r.err_est);
      rep.converged = rep.converged && r.converged;
      return std::pow(std::max(r.value, 0.0), 1.0 / p);
    };
    auto df = [&](double y, double t) { return feps(y, t) - cone(y, t); };
    auto ddy = [&](double y, double t) {
      return feps.fy(y, t) - cone.fy(y, t);
    };
    auto ddt = [&](double y, double t) {
      return feps.ft(y, t) - cone.ft(y, t);
    };
    rep.f_norm.push_back(lp_norm(df));
    rep.dy_norm.push_back(lp_norm(ddy));
    rep.dt_norm.push_back(lp_norm(ddt));

    double sf = 0.0, sdy = 0.0, sdt = 0.0;
    const int grid = 201;
    for (int i = 0; i < grid; ++i) {
      double y = region.y0 + region.width() * i / (grid - 1);
      for (int j = 0; j < grid; ++j) {
        double t = region.t0 + region.height() * j / (grid - 1);
        sf = std::max(sf, std::abs(df(y, t)));
        sdy = std::max(sdy, std::abs(ddy(y, t)));
        sdt = std::max(sdt, std::abs(ddt(y, t)));
      }
    }
    rep.f_sup.push_back(sf);
    rep.dy_sup.push_back(sdy);
    rep.dt_sup.push_back(sdt);
  }

  rep.monotone = true;
  for (std::size_t i = 1; i < rep.ladder.size(); ++i) {
    rep.monotone = rep.monotone && rep.f_norm[i] < rep.f_norm[i - 1] &&
                   rep.dy_norm[i] < rep.dy_norm[i - 1] &&
                   rep.dt_norm[i] < rep.dt_norm[i - 1];
  }
  rep.rate_f = detail::loglog_slope(rep.ladder, rep.f_norm);
  rep.rate_dy = detail::loglog_slope(rep.ladder, rep.dy_norm);
  rep.rate_dt = detail::loglog_slope(rep.ladder, rep.dt_norm);

  // sampled pointwise domination |d_t f_eps| <= g3, every eps in the ladder
  const int n_samples = 1000;
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> uy(region.y0, region.y1);
  std::uniform_real_distribution<double> ut(region.t0, region.t1);
  rep.domination_ok = true;
  for (int i = 0; i < n_samples; ++i) {
    double y = uy(rng), t = ut(rng);
    double g3 = detail::cone_dt_envelope(y, t);
    for (double eps : eps_ladder) {
      auto [feps, prof] = cone_eps(eps);
      (void)prof;
      double dt = std::abs(feps.ft(y, t));
      if (dt > g3 + 1e-12 * (1.0 + g3)) rep.domination_ok = false;
    }
  }
  rep.domination_samples = n_samples;
  return rep;
}

/// The bump used by the stability estimate for the mollified cone: centered
/// at (0, 1/2) with radii (2, 0.4) and amplitude chosen so sup phi^2 = M.
[[nodiscard]] inline TestBump cone_stability_bump(double M) {
  if (M < 0.0) {
    throw std::invalid_argument("cone_stability_bump: M must be >= 0");
  }
  return TestBump{0.0, 0.5, 2.0, 0.4, std::sqrt(M) * std::exp(2.0)};
}

/// Negative part of the strip second variation for the ramp profile, against
/// the closed-form bound that controls it.
struct StabilityBound {
  double eps{0.0};
  double M{0.0};
  double neg_term{0.0};  ///< quadrature value of the negative integral
  double bound{0.0};     ///< M * pi * sqrt(eps)
  double err_est{0.0};
  bool converged{true};
};

/// For the ramp profile a_eps and the canonical bump phi with sup phi^2 = M,
/// evaluates
///   neg_term = int_{-2}^{2} int_0^{eps}
///       phi~^2 a' / ((1+a^2)^{3/2} (a' s^2/2 + 1)) dtau ds,
/// where a = tau/eps, a' = 1/eps, and phi~(s,tau) = phi(s, a s^2/2 + tau) is
/// the pullback of the bump through the fiber map.  Substituting
/// v = s/sqrt(2 eps) and w = tau/eps and bounding phi~^2 by M gives
///   neg_term <= sqrt(2 eps) M (int dv/(v^2+1)) (int_0^1 (1+w^2)^{-3/2} dw)
///             = sqrt(2 eps) M pi / sqrt(2) = M pi sqrt(eps),
/// which shrinks like sqrt(eps): the mollified cones are stable in the limit.
[[nodiscard]] inline StabilityBound cone_stability_bound(
    double eps, double M, const QuadratureSpec& spec = {}) {
  if (!(eps > 0.0)) {
    throw std::invalid_argument("cone_stability_bound: eps must be > 0");
  }
  StabilityBound out;
  out.eps = eps;
  out.M = M;
  out.bound = M * std::numbers::pi * std::sqrt(eps);
  if (M == 0.0) return out;  // phi identically zero

  TestBump phi = cone_stability_bump(M);
  auto integrand = [&](double s, double tau) {
    double a = tau / eps;
    double da = 1.0 / eps;
    double chi = a * s * s / 2.0 + tau;
    double pv = phi(s, chi);
    double one = 1.0 + a * a;
    return pv * pv * da /
           (one * std::sqrt(one) * (da * s * s / 2.0 + 1.0));
  };
  IntegrationResult r =
      integrate2d(integrand, Rect{-2.0, 2.0, 0.0, eps}, SeamSet{}, spec);
  out.neg_term = r.value;
  out.err_est = r.err_est;
  out.converged = r.converged;
  if (!r.converged) {
    throw std::runtime_error(
        "cone_stability_bound: quadrature did not converge");
  }
  return out;
}

}  // namespace heis
