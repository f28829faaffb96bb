// Characteristic parametrizations Psi(s, tau) = (s, chi(s, tau)) of a scalar
// field's graph: chi is built by flowing gamma' = f(s, gamma) from the
// normalization line s = 0 (closed forms for affine fields and ruled strips,
// RK4 otherwise).  The rest of the header is what makes such a map
// trustworthy and useful: the structural axioms (fibers do not cross, the
// flow equation holds, the fibers cover the region), the area formula that
// converts graph-side integrals to (s, tau) integrals with the Jacobian
// d_tau chi, the chain rules for pulled-back test functions, least-squares
// quadratic fits of the fibers, the pairwise constraints any fitted profile
// must satisfy to come from an injective parametrization, and the final
// plane-vs-nonplane verdict on the fitted coefficients.
#pragma once

#include <heis/field.hpp>
#include <heis/numerics.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace heis {

/// Sampled characteristic parametrization.  chi[j][i] = chi(s[i], tau[j]);
/// each row j is one characteristic, launched from (0, tau[j]).  s[i0] == 0
/// exactly, and chi(0, tau) == tau exactly (the normalization).
struct LagrangianMap {
  std::vector<double> s;
  std::vector<double> tau;
  std::vector<std::vector<double>> chi;
  ScalarField field{};
  std::size_t i0{0};       ///< index of the normalization line s = 0
  bool exact_flow{false};  ///< closed-form fibers (affine fields, ruled strips)
  double flow_err{0.0};    ///< max step-doubling estimate over fibers (RK4 path)
};

/// Flow one characteristic per tau sample across [s0, s1] (which must contain
/// 0, the normalization line).  Affine fields and ruled strips use their
/// closed-form fibers; everything else integrates the ODE with RK4 in both
/// directions from s = 0.  A fiber that blows up inside the range is an error.
[[nodiscard]] inline LagrangianMap build_parametrization(
    const ScalarField& f, double s0, double s1,
    const std::vector<double>& tau_samples, int steps) {
  if (!(s0 < s1)) {
    throw std::invalid_argument("build_parametrization: need s0 < s1");
  }
  if (s0 > 0.0 || s1 < 0.0) {
    throw std::invalid_argument(
        "build_parametrization: [s0, s1] must contain the normalization line "
        "s = 0");
  }
  if (steps < 1) {
    throw std::invalid_argument("build_parametrization: steps must be >= 1");
  }
  if (tau_samples.empty()) {
    throw std::invalid_argument("build_parametrization: no tau samples");
  }
  for (std::size_t j = 1; j < tau_samples.size(); ++j) {
    if (!(tau_samples[j] > tau_samples[j - 1])) {
      throw std::invalid_argument(
          "build_parametrization: tau samples must be strictly increasing");
    }
  }

  // split the step budget across the two halves so the spacing matches
  int nb = 0;
  int nf = steps;
  if (s1 == 0.0) {
    nb = steps;
    nf = 0;
  } else if (s0 < 0.0) {
    nb = static_cast<int>(std::llround(steps * (-s0) / (s1 - s0)));
    nb = std::clamp(nb, 1, steps - 1);
    nf = steps - nb;
  }

  LagrangianMap m;
  m.field = f;
  m.tau = tau_samples;
  m.i0 = static_cast<std::size_t>(nb);
  m.s.assign(static_cast<std::size_t>(steps) + 1, 0.0);
  for (int k = 0; k < nb; ++k) {
    m.s[static_cast<std::size_t>(k)] = s0 * static_cast<double>(nb - k) / nb;
  }
  for (int k = 1; k <= nf; ++k) {
    m.s[m.i0 + static_cast<std::size_t>(k)] = s1 * static_cast<double>(k) / nf;
  }

  const std::size_t I = m.s.size();
  const std::size_t J = m.tau.size();
  m.chi.assign(J, std::vector<double>(I, 0.0));

  const bool strip_like =
      f.kind == FieldKind::strip || f.kind == FieldKind::cone_eps;
  if (f.kind == FieldKind::plane || strip_like) {
    m.exact_flow = true;
    for (std::size_t j = 0; j < J; ++j) {
      const double tauj = m.tau[j];
      const double a = strip_like ? f.profile.a(tauj) : f.plane_a;
      const double b = strip_like ? 0.0 : f.plane_b;
      std::vector<double>& row = m.chi[j];
      for (std::size_t i = 0; i < I; ++i) {
        const double si = m.s[i];
        row[i] = 0.5 * a * si * si + b * si + tauj;
      }
    }
    return m;
  }

  std::vector<double> errs(J, 0.0);
  std::vector<unsigned char> bad(J, 0);
  parallel_for(static_cast<int>(J), [&](int jj) {
    const std::size_t j = static_cast<std::size_t>(jj);
    const double tauj = m.tau[j];
    std::vector<double>& row = m.chi[j];
    if (nb > 0) {
      Curve1D back = ode_flow(f, 0.0, tauj, s0, nb);
      if (back.blowup ||
          back.gamma.size() != static_cast<std::size_t>(nb) + 1) {
        bad[j] = 1;
        return;
      }
      for (int k = 0; k <= nb; ++k) {
        row[static_cast<std::size_t>(nb - k)] =
            back.gamma[static_cast<std::size_t>(k)];
      }
      errs[j] = std::max(errs[j], back.err_est);
    }
    if (nf > 0) {
      Curve1D fwd = ode_flow(f, 0.0, tauj, s1, nf);
      if (fwd.blowup || fwd.gamma.size() != static_cast<std::size_t>(nf) + 1) {
        bad[j] = 1;
        return;
      }
      for (int k = 0; k <= nf; ++k) {
        row[m.i0 + static_cast<std::size_t>(k)] =
            fwd.gamma[static_cast<std::size_t>(k)];
      }
      errs[j] = std::max(errs[j], fwd.err_est);
    }
    row[m.i0] = tauj;
  });
  for (std::size_t j = 0; j < J; ++j) {
    if (bad[j]) {
      std::ostringstream msg;
      msg << "build_parametrization: the characteristic through tau = "
          << m.tau[j] << " blows up inside [" << s0 << ", " << s1 << "]";
      throw std::runtime_error(msg.str());
    }
    m.flow_err = std::max(m.flow_err, errs[j]);
  }
  return m;
}

/// What check_axioms measured.  All three checks report rather than throw:
/// a violated axiom is a finding about the field, not a usage error.
struct AxiomReport {
  bool monotone{true};          ///< fibers never cross (up to float noise)
  long monotone_violations{0};  ///< grid pairs with chi decreasing in tau
  double min_tau_gap{std::numeric_limits<double>::infinity()};
  double l3_residual{0.0};  ///< max |d_s chi - f(s, chi)| over the grid
  double coverage{1.0};     ///< swept area / bounding box of the fiber family
  bool normalized{true};    ///< chi(0, tau) == tau exactly
};

/// Grid checks of the three structural axioms: tau -> chi(s, tau) is
/// nondecreasing, each fiber solves gamma' = f(s, gamma), and the family
/// sweeps its bounding region.  The flow residual uses the three-point
/// first-derivative stencil that stays second order on the (possibly
/// non-uniform at s = 0) grid, so closed-form quadratic fibers report ~0.
[[nodiscard]] inline AxiomReport check_axioms(const LagrangianMap& m) {
  const std::size_t I = m.s.size();
  const std::size_t J = m.tau.size();
  if (I < 2 || J == 0 || m.chi.size() != J) {
    throw std::invalid_argument("check_axioms: malformed map");
  }
  AxiomReport rep;
  for (std::size_t j = 0; j + 1 < J; ++j) {
    for (std::size_t i = 0; i < I; ++i) {
      const double gap = m.chi[j + 1][i] - m.chi[j][i];
      rep.min_tau_gap = std::min(rep.min_tau_gap, gap);
      if (gap < -1e-12) ++rep.monotone_violations;
    }
  }
  rep.monotone = rep.monotone_violations == 0;

  for (std::size_t j = 0; j < J; ++j) {
    for (std::size_t i = 1; i + 1 < I; ++i) {
      const double h1 = m.s[i + 1] - m.s[i];
      const double h2 = m.s[i] - m.s[i - 1];
      const double d = -m.chi[j][i - 1] * h1 / (h2 * (h1 + h2)) +
                       m.chi[j][i] * (h1 - h2) / (h1 * h2) +
                       m.chi[j][i + 1] * h2 / (h1 * (h1 + h2));
      rep.l3_residual = std::max(
          rep.l3_residual, std::abs(d - m.field(m.s[i], m.chi[j][i])));
    }
  }

  if (J >= 2) {
    double swept = 0.0;
    double tmax = -std::numeric_limits<double>::infinity();
    double tmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < I; ++i) {
      tmax = std::max(tmax, m.chi[J - 1][i]);
      tmin = std::min(tmin, m.chi[0][i]);
      if (i + 1 < I) {
        const double w0 = std::max(0.0, m.chi[J - 1][i] - m.chi[0][i]);
        const double w1 = std::max(0.0, m.chi[J - 1][i + 1] - m.chi[0][i + 1]);
        swept += 0.5 * (w0 + w1) * (m.s[i + 1] - m.s[i]);
      }
    }
    const double bbox = (m.s.back() - m.s.front()) * (tmax - tmin);
    rep.coverage = bbox > 0.0 ? swept / bbox : 1.0;
  }

  for (std::size_t j = 0; j < J; ++j) {
    if (m.chi[j][m.i0] != m.tau[j]) rep.normalized = false;
  }
  return rep;
}

namespace detail {

/// Composite Simpson on a uniformly spaced line (3/8 patch at the front when
/// the interval count is odd); trapezoid only for a single interval.
inline double simpson_line(const std::vector<double>& v, double h) {
  const std::size_t n = v.size();
  if (n < 2) return 0.0;
  if (n == 2) return 0.5 * h * (v[0] + v[1]);
  double sum = 0.0;
  std::size_t start = 0;
  if ((n - 1) % 2 == 1) {
    sum += 3.0 * h / 8.0 * (v[0] + 3.0 * v[1] + 3.0 * v[2] + v[3]);
    start = 3;
  }
  double acc = v[start] + v[n - 1];
  for (std::size_t k = start + 1; k + 1 < n; ++k) {
    acc += ((k - start) % 2 == 1 ? 4.0 : 2.0) * v[k];
  }
  return sum + h / 3.0 * acc;
}

/// tau-piece boundaries: indices of grid nodes sitting on a profile kink
/// (where the ruling slope and hence d_tau chi jumps), plus both ends.
inline std::vector<std::size_t> tau_piece_bounds(const LagrangianMap& m) {
  std::vector<std::size_t> bounds{0, m.tau.size() - 1};
  if (m.field.kind == FieldKind::strip ||
      m.field.kind == FieldKind::cone_eps) {
    for (double k : m.field.profile.tau_kinks()) {
      for (std::size_t j = 1; j + 1 < m.tau.size(); ++j) {
        if (std::abs(m.tau[j] - k) <= 1e-9 * (1.0 + std::abs(k))) {
          bounds.push_back(j);
          break;
        }
      }
    }
  }
  std::sort(bounds.begin(), bounds.end());
  bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());
  return bounds;
}

/// d_tau chi at node j of the piece [p0, p1], one-sided at the piece ends so
/// a jump across the piece boundary never contaminates the stencil.  Second
/// order throughout (exact for chi piecewise linear or quadratic in tau).
inline double dtau_chi_in_piece(const LagrangianMap& m, std::size_t j,
                                std::size_t i, std::size_t p0,
                                std::size_t p1) {
  const std::vector<double>& tau = m.tau;
  if (p1 - p0 == 1) {  // two-node piece: only a simple difference exists
    return (m.chi[p1][i] - m.chi[p0][i]) / (tau[p1] - tau[p0]);
  }
  if (j == p0) {
    const double h = tau[j + 1] - tau[j];
    return (-3.0 * m.chi[j][i] + 4.0 * m.chi[j + 1][i] - m.chi[j + 2][i]) /
           (2.0 * h);
  }
  if (j == p1) {
    const double h = tau[j] - tau[j - 1];
    return (3.0 * m.chi[j][i] - 4.0 * m.chi[j - 1][i] + m.chi[j - 2][i]) /
           (2.0 * h);
  }
  return (m.chi[j + 1][i] - m.chi[j - 1][i]) / (tau[j + 1] - tau[j - 1]);
}

}  // namespace detail

/// Both sides of the area formula and their disagreement.
struct AreaFormulaCheck {
  double lhs{0.0};  ///< integral of eta(s, chi) d_tau chi over the (s,tau) grid
  double rhs{0.0};  ///< adaptive integral of eta over the (y,t) plane
  double diff{0.0};
  double rhs_err{0.0};
  bool rhs_converged{true};
};

/// Check that the parametrization transports area correctly: integrating
/// eta(s, chi(s,tau)) weighted by the fiber Jacobian d_tau chi over the
/// parameter grid must reproduce the plain planar integral of eta.  The grid
/// side uses composite Simpson per uniform block, with the tau direction
/// split at profile kinks where the Jacobian jumps.
[[nodiscard]] inline AreaFormulaCheck area_formula_check(
    const LagrangianMap& m, const TestBump& eta,
    const QuadratureSpec& spec = {}) {
  const std::size_t I = m.s.size();
  const std::size_t J = m.tau.size();
  if (I < 2 || J < 2) {
    throw std::invalid_argument("area_formula_check: map grid too small");
  }

  // s-line integral of eta(s, chi) * d_tau chi at fixed tau, Simpson on each
  // uniform half of the s grid
  const auto s_line = [&](const std::vector<double>& vals) {
    double total = 0.0;
    if (m.i0 > 0) {
      std::vector<double> part(vals.begin(),
                               vals.begin() + static_cast<long>(m.i0) + 1);
      total += detail::simpson_line(part, (m.s[m.i0] - m.s[0]) / m.i0);
    }
    if (m.i0 + 1 < I) {
      std::vector<double> part(vals.begin() + static_cast<long>(m.i0),
                               vals.end());
      total +=
          detail::simpson_line(part, (m.s[I - 1] - m.s[m.i0]) / (I - 1 - m.i0));
    }
    return total;
  };

  AreaFormulaCheck out;
  const std::vector<std::size_t> bounds = detail::tau_piece_bounds(m);
  std::vector<double> vals(I);
  for (std::size_t p = 0; p + 1 < bounds.size(); ++p) {
    const std::size_t p0 = bounds[p];
    const std::size_t p1 = bounds[p + 1];
    std::vector<double> line(p1 - p0 + 1);
    for (std::size_t j = p0; j <= p1; ++j) {
      for (std::size_t i = 0; i < I; ++i) {
        vals[i] = eta(m.s[i], m.chi[j][i]) *
                  detail::dtau_chi_in_piece(m, j, i, p0, p1);
      }
      line[j - p0] = s_line(vals);
    }
    out.lhs +=
        detail::simpson_line(line, (m.tau[p1] - m.tau[p0]) / (p1 - p0));
  }

  IntegrationResult rr = integrate2d(
      [&eta](double y, double t) { return eta(y, t); }, eta.support(),
      SeamSet{}, spec);
  out.rhs = rr.value;
  out.rhs_err = rr.err_est;
  out.rhs_converged = rr.converged;
  out.diff = std::abs(out.lhs - out.rhs);
  return out;
}

/// Worst-case residuals of the three pullback chain rules.
struct CovResiduals {
  double r_dt{0.0};    ///< vertical derivative rule
  double r_dy{0.0};    ///< horizontal derivative rule
  double r_grad{0.0};  ///< the combination d_y + f d_t versus d_s alone
  double min_dtau_chi{std::numeric_limits<double>::infinity()};
  long nodes{0};  ///< interior grid nodes where the bump was actually active
};

/// Check the chain rules tying planar derivatives of phi to parameter-space
/// derivatives of the pullback phi~(s,tau) = phi(s, chi(s,tau)):
///   d_t phi = d_tau phi~ / d_tau chi,
///   d_y phi = d_s phi~ - (f~ / d_tau chi) d_tau phi~,
///   d_y phi + f d_t phi = d_s phi~.
/// Both sides are discretized with centered differences of matching step so
/// the identities hold to the difference-operator's own accuracy, not merely
/// to the cruder of two unrelated truncation errors.  A Jacobian at or below
/// the positivity floor anywhere on the interior grid is an error: the map
/// has degenerate fibers and no chain rule can be formed.
[[nodiscard]] inline CovResiduals change_of_variables_check(
    const LagrangianMap& m, const TestBump& phi, double dtau_floor = 1e-8) {
  const std::size_t I = m.s.size();
  const std::size_t J = m.tau.size();
  if (I < 3 || J < 3) {
    throw std::invalid_argument(
        "change_of_variables_check: need at least a 3x3 grid");
  }

  std::vector<std::vector<double>> phit(J, std::vector<double>(I));
  parallel_for(static_cast<int>(J), [&](int jj) {
    const std::size_t j = static_cast<std::size_t>(jj);
    for (std::size_t i = 0; i < I; ++i) {
      phit[j][i] = phi(m.s[i], m.chi[j][i]);
    }
  });

  const Rect sup = phi.support();
  CovResiduals out;
  for (std::size_t j = 1; j + 1 < J; ++j) {
    for (std::size_t i = 1; i + 1 < I; ++i) {
      const double dtau = m.tau[j + 1] - m.tau[j - 1];
      const double jac = (m.chi[j + 1][i] - m.chi[j - 1][i]) / dtau;
      out.min_dtau_chi = std::min(out.min_dtau_chi, jac);
      if (jac <= dtau_floor) continue;  // reported after the sweep

      // every term below vanishes when the bump misses the whole stencil
      const double c = m.chi[j][i];
      if (m.s[i + 1] < sup.y0 || m.s[i - 1] > sup.y1) continue;
      const double dt = 0.5 * dtau;
      const double reach =
          dt + std::max(std::max(std::abs(m.chi[j + 1][i] - c),
                                 std::abs(m.chi[j - 1][i] - c)),
                        std::max(std::abs(m.chi[j][i + 1] - c),
                                 std::abs(m.chi[j][i - 1] - c)));
      if (c + reach < sup.t0 || c - reach > sup.t1) continue;
      ++out.nodes;

      const double ds = 0.5 * (m.s[i + 1] - m.s[i - 1]);
      const double lhs_dt =
          (phi(m.s[i], c + dt) - phi(m.s[i], c - dt)) / (2.0 * dt);
      const double lhs_dy =
          (phi(m.s[i] + ds, c) - phi(m.s[i] - ds, c)) / (2.0 * ds);
      const double dtau_phit = (phit[j + 1][i] - phit[j - 1][i]) / dtau;
      const double ds_phit =
          (phit[j][i + 1] - phit[j][i - 1]) / (m.s[i + 1] - m.s[i - 1]);
      const double ftil = m.field(m.s[i], c);

      out.r_dt = std::max(out.r_dt, std::abs(lhs_dt - dtau_phit / jac));
      out.r_dy = std::max(
          out.r_dy, std::abs(lhs_dy - (ds_phit - ftil / jac * dtau_phit)));
      out.r_grad =
          std::max(out.r_grad, std::abs(lhs_dy + ftil * lhs_dt - ds_phit));
    }
  }
  if (out.min_dtau_chi <= dtau_floor) {
    std::ostringstream msg;
    msg << "change_of_variables_check: d_tau chi = " << out.min_dtau_chi
        << " at or below the positivity floor " << dtau_floor
        << "; the fibers degenerate and the chain rules are undefined";
    throw std::runtime_error(msg.str());
  }
  return out;
}

/// Per-fiber least-squares quadratic description of a parametrization:
/// chi(s, tau) ~= a(tau) (s - s_hat)^2 / 2 + b(tau) (s - s_hat) + c(tau).
struct QuadraticProfile {
  std::vector<double> tau;
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> c;
  std::vector<double> residual;  ///< per-fiber max |fit - chi| over s
  double max_residual{0.0};
  double s_hat{0.0};
};

/// Fit every fiber with the quadratic basis {1, (s - s_hat), (s - s_hat)^2/2}
/// by least squares (one QR factorization, reused across fibers).  The
/// residual is the sup norm of the misfit, so a genuinely non-quadratic
/// fiber cannot hide behind averaging.
[[nodiscard]] inline QuadraticProfile fit_quadratic(const LagrangianMap& m,
                                                    double s_hat) {
  const std::size_t I = m.s.size();
  const std::size_t J = m.tau.size();
  if (I < 4) {
    throw std::invalid_argument(
        "fit_quadratic: need at least 4 s-samples per fiber");
  }
  if (J == 0 || m.chi.size() != J) {
    throw std::invalid_argument("fit_quadratic: malformed map");
  }

  Eigen::MatrixXd A(static_cast<Eigen::Index>(I), 3);
  for (std::size_t i = 0; i < I; ++i) {
    const double u = m.s[i] - s_hat;
    A(static_cast<Eigen::Index>(i), 0) = 1.0;
    A(static_cast<Eigen::Index>(i), 1) = u;
    A(static_cast<Eigen::Index>(i), 2) = 0.5 * u * u;
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);

  QuadraticProfile p;
  p.s_hat = s_hat;
  p.tau = m.tau;
  p.a.resize(J);
  p.b.resize(J);
  p.c.resize(J);
  p.residual.resize(J);
  for (std::size_t j = 0; j < J; ++j) {
    const Eigen::Map<const Eigen::VectorXd> y(m.chi[j].data(),
                                              static_cast<Eigen::Index>(I));
    const Eigen::Vector3d x = qr.solve(y);
    p.c[j] = x(0);
    p.b[j] = x(1);
    p.a[j] = x(2);
    p.residual[j] = (A * x - y).lpNorm<Eigen::Infinity>();
    p.max_residual = std::max(p.max_residual, p.residual[j]);
  }
  return p;
}

/// Outcome of the pairwise and differential profile constraints.
struct ProfileConstraintsReport {
  long part1_pairs{0};
  long part1_violations{0};
  double part1_worst{0.0};  ///< most negative pairwise margin
  long part2_flags{0};
  double part2_worst{0.0};  ///< most negative differential margin
  bool pass{false};
};

/// A profile (a, b, c = tau) can only come from non-crossing quadratic fibers
/// if every pair of samples satisfies 2 (a1 - a2)(tau1 - tau2) > (b1 - b2)^2
/// -- unless the pair shares its ruling data (a and b both equal), which is
/// the plane-like degenerate case.  The differential version 2 a' > (b')^2
/// (or a' = b' = 0) is checked with centered differences.  Both parts report;
/// nothing throws, because a failing profile is a finding.
[[nodiscard]] inline ProfileConstraintsReport profile_constraints_check(
    const QuadraticProfile& p, double eq_tol = 1e-10) {
  const std::size_t n = p.tau.size();
  if (n == 0 || p.a.size() != n || p.b.size() != n) {
    throw std::invalid_argument("profile_constraints_check: malformed profile");
  }
  ProfileConstraintsReport rep;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      ++rep.part1_pairs;
      const double da = p.a[i] - p.a[j];
      const double db = p.b[i] - p.b[j];
      if (std::abs(da) <= eq_tol && std::abs(db) <= eq_tol) continue;
      const double margin = 2.0 * da * (p.tau[i] - p.tau[j]) - db * db;
      if (margin <= 0.0) {
        ++rep.part1_violations;
        rep.part1_worst = std::min(rep.part1_worst, margin);
      }
    }
  }
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const double h = p.tau[j + 1] - p.tau[j - 1];
    const double ap = (p.a[j + 1] - p.a[j - 1]) / h;
    const double bp = (p.b[j + 1] - p.b[j - 1]) / h;
    if (std::abs(ap) <= eq_tol && std::abs(bp) <= eq_tol) continue;
    const double margin = 2.0 * ap - bp * bp;
    if (margin <= 0.0) {
      ++rep.part2_flags;
      rep.part2_worst = std::min(rep.part2_worst, margin);
    }
  }
  rep.pass = rep.part1_violations == 0 && rep.part2_flags == 0;
  return rep;
}

enum class Verdict { Plane, NotPlane };

/// The verdict plus the coefficient spreads it was based on.
struct BernsteinVerdict {
  Verdict verdict{Verdict::NotPlane};
  double a_range{0.0};
  double b_range{0.0};
  double tol{0.0};
};

/// A fitted profile describes a plane exactly when both coefficient functions
/// are constant: the graph is ruled by parallel lines.  Any spread beyond the
/// tolerance in either a or b certifies a non-planar graph.
[[nodiscard]] inline BernsteinVerdict bernstein_verdict(
    const QuadraticProfile& p, double tol = 1e-4) {
  if (p.tau.empty() || p.a.empty() || p.b.empty()) {
    throw std::invalid_argument("bernstein_verdict: empty profile");
  }
  const auto [amin, amax] = std::minmax_element(p.a.begin(), p.a.end());
  const auto [bmin, bmax] = std::minmax_element(p.b.begin(), p.b.end());
  BernsteinVerdict v;
  v.a_range = *amax - *amin;
  v.b_range = *bmax - *bmin;
  v.tol = tol;
  v.verdict = (v.a_range <= tol && v.b_range <= tol) ? Verdict::Plane
                                                     : Verdict::NotPlane;
  return v;
}

/// Write a profile as CSV (tau, a, b, c, residual), full double precision,
/// byte-stable across runs.
inline void write_profile_csv(const QuadraticProfile& p, std::ostream& out) {
  out << "tau,a,b,c,residual\n";
  char buf[256];
  for (std::size_t j = 0; j < p.tau.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", p.tau[j],
                  p.a[j], p.b[j], p.c[j], p.residual[j]);
    out << buf;
  }
}

}  // namespace heis
