// Heisenberg group primitives: points, the group law, dilations, the
// intrinsic-graph parametrization and the left-invariant horizontal frame.
#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <utility>

namespace heis {

/// Point of the first Heisenberg group in exponential coordinates.
/// The group product is
///   (x,y,z)*(x',y',z') = (x+x', y+y', z+z' + (x y' - x' y)/2).
struct HPoint {
  double x{0.0};
  double y{0.0};
  double z{0.0};

  [[nodiscard]] Eigen::Vector3d vec() const { return {x, y, z}; }
  static HPoint from(const Eigen::Vector3d& v) { return {v[0], v[1], v[2]}; }
};

/// Tangent vector with ambient components (coefficients of
/// \f$\partial_x,\partial_y,\partial_z\f$) attached to a basepoint.
/// Keeping the basepoint explicit allows frame fields and divergence
/// computations to stay coordinate-honest.
struct HVector {
  double cx{0.0};
  double cy{0.0};
  double cz{0.0};
  HPoint base{};

  [[nodiscard]] Eigen::Vector3d vec() const { return {cx, cy, cz}; }
};

/// Group product p*q.
[[nodiscard]] inline HPoint hgroup_mul(const HPoint& p, const HPoint& q) {
  return {p.x + q.x, p.y + q.y, p.z + q.z + 0.5 * (p.x * q.y - q.x * p.y)};
}

/// Group inverse; in exponential coordinates this is plain negation.
[[nodiscard]] inline HPoint hgroup_inv(const HPoint& p) {
  return {-p.x, -p.y, -p.z};
}

/// Anisotropic dilation delta_lambda(x,y,z) = (lambda x, lambda y, lambda^2 z).
/// Only positive factors form the dilation semigroup; anything else is a bug
/// in the caller.
[[nodiscard]] inline HPoint dilate(double lambda, const HPoint& p) {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("dilate: factor must be positive");
  }
  return {lambda * p.x, lambda * p.y, lambda * lambda * p.z};
}

/// Intrinsic graph parametrization: the point (0,y,t)*(fval,0,0),
/// i.e. (fval, y, t - y*fval/2).  Mapping the parameter plane {x=0}
/// through the group law keeps graphs compatible with left translations.
[[nodiscard]] inline HPoint graph_map(double fval, double y, double t) {
  return {fval, y, t - 0.5 * y * fval};
}

/// Left-invariant horizontal frame at p:
///   X = \partial_x - (y/2) \partial_z,   Y = \partial_y + (x/2) \partial_z.
/// Their commutator [X,Y] = \partial_z spans the missing direction.
[[nodiscard]] inline std::pair<HVector, HVector> horizontal_frame(
    const HPoint& p) {
  HVector X{1.0, 0.0, -0.5 * p.y, p};
  HVector Y{0.0, 1.0, 0.5 * p.x, p};
  return {X, Y};
}

}  // namespace heis
