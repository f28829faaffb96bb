// Ruled-strip profiles: the nondecreasing slope function a(tau) that
// generates a graph through chi(s,tau) = a(tau) s^2/2 + tau.  Built-in
// kinds cover the constant profile, the mollified-corner ramp, the level-n
// staircase and the limit staircase; custom profiles supply their own
// callables together with range bounds.
#pragma once

#include <heis/cantor.hpp>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace heis {

enum class StripKind { constant, cone_eps, cantor_n, cantor_limit, custom };

struct StripProfile {
  StripKind kind{StripKind::constant};
  double c{0.0};    ///< value for kind == constant
  double eps{0.0};  ///< ramp width for kind == cone_eps
  int n{0};         ///< level for kind == cantor_n
  std::function<double(double)> custom_a{};
  std::function<double(double)> custom_da{};
  double custom_min{0.0};
  double custom_max{0.0};

  /// Profile value a(tau); nondecreasing for every built-in kind, and custom
  /// profiles are required to be nondecreasing as well (the fiber inversion
  /// relies on it).
  [[nodiscard]] double a(double tau) const {
    switch (kind) {
      case StripKind::constant:
        return c;
      case StripKind::cone_eps:
        if (tau <= 0.0) return 0.0;
        if (tau >= eps) return 1.0;
        return tau / eps;
      case StripKind::cantor_n:
        return cantor_a_level(n, tau);
      case StripKind::cantor_limit:
        return cantor_a(tau);
      case StripKind::custom:
        return custom_a(tau);
    }
    return 0.0;
  }

  /// Derivative a'(tau) where defined (a.e.): 1/eps on the ramp, (3/2)^n on
  /// the level-n set, 0 on plateaus.  The limit staircase has no usable
  /// density, so asking for it is an error.
  [[nodiscard]] double da(double tau) const {
    switch (kind) {
      case StripKind::constant:
        return 0.0;
      case StripKind::cone_eps:
        return (tau > 0.0 && tau < eps) ? 1.0 / eps : 0.0;
      case StripKind::cantor_n:
        return cantor_da_level(n, tau);
      case StripKind::cantor_limit:
        throw std::logic_error(
            "StripProfile::da: the limit staircase derivative is a singular "
            "measure, not a function");
      case StripKind::custom:
        if (!custom_da) {
          throw std::logic_error("StripProfile::da: no derivative supplied");
        }
        return custom_da(tau);
    }
    return 0.0;
  }

  [[nodiscard]] double a_min() const {
    switch (kind) {
      case StripKind::constant:
        return c;
      case StripKind::custom:
        return custom_min;
      default:
        return 0.0;
    }
  }

  [[nodiscard]] double a_max() const {
    switch (kind) {
      case StripKind::constant:
        return c;
      case StripKind::custom:
        return custom_max;
      default:
        return 1.0;
    }
  }

  /// tau values where a is only piecewise-C^1 (breakpoints of the ramp or
  /// of the level-n staircase).  Empty when a is globally C^1 or when the
  /// breakpoint set is not finite (limit staircase).
  [[nodiscard]] std::vector<double> tau_kinks() const {
    std::vector<double> out;
    if (kind == StripKind::cone_eps) {
      out = {0.0, eps};
    } else if (kind == StripKind::cantor_n) {
      CantorLevel c3 = cantor_level(n);
      auto p3 = static_cast<double>(pow3_u64(n));
      for (std::uint64_t k : c3.J) {
        out.push_back(static_cast<double>(k) / p3);
        out.push_back(static_cast<double>(k + 1) / p3);
      }
    }
    return out;
  }

  static StripProfile constant(double value) {
    StripProfile p;
    p.kind = StripKind::constant;
    p.c = value;
    return p;
  }

  static StripProfile coneEps(double eps) {
    if (!(eps > 0.0)) {
      throw std::invalid_argument("StripProfile::coneEps: eps must be > 0");
    }
    StripProfile p;
    p.kind = StripKind::cone_eps;
    p.eps = eps;
    return p;
  }

  static StripProfile cantorN(int n) {
    StripProfile p;
    p.kind = StripKind::cantor_n;
    p.n = n;
    (void)cantor_level(n);  // validates the range
    return p;
  }

  static StripProfile cantorLimit() {
    StripProfile p;
    p.kind = StripKind::cantor_limit;
    return p;
  }

  static StripProfile custom(std::function<double(double)> a,
                             std::function<double(double)> da, double amin,
                             double amax) {
    StripProfile p;
    p.kind = StripKind::custom;
    p.custom_a = std::move(a);
    p.custom_da = std::move(da);
    p.custom_min = amin;
    p.custom_max = amax;
    return p;
  }
};

}  // namespace heis
