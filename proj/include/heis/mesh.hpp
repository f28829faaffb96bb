// Triangle meshes of intrinsic graphs for external viewers.  Ruled strips
// are sampled in (s, tau) parameters -- the surface is exactly
// (a(tau) s, s, tau), so the mesh lies on the graph to machine precision
// even where the profile has no derivative.  General fields are sampled on a
// (y, t) grid through graph_map.  The OBJ writer is deterministic: fixed
// 9-significant-digit formatting, fixed traversal order, and a provenance
// hash of the generating configuration in the header comment.
#pragma once

#include <heis/core.hpp>
#include <heis/field.hpp>
#include <heis/profile.hpp>

#include <array>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace heis {

/// Indexed triangle mesh with a provenance tag (hash of the generating
/// config) so an OBJ file can be traced back to the run that made it.
struct Mesh {
  std::vector<HPoint> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::string provenance{};
};

namespace detail {

/// FNV-1a 64-bit hash, rendered as 16 hex digits; stable across runs and
/// platforms for the same byte sequence.
[[nodiscard]] inline std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

/// Shared grid triangulation: vertices laid out row-major (inner index
/// fastest), each cell split into two triangles with a fixed diagonal.
inline void grid_triangles(Mesh& m, int ni, int nj) {
  m.triangles.reserve(static_cast<std::size_t>(2) * (ni - 1) * (nj - 1));
  for (int j = 0; j + 1 < nj; ++j) {
    for (int i = 0; i + 1 < ni; ++i) {
      const int v00 = j * ni + i;
      const int v10 = j * ni + i + 1;
      const int v01 = (j + 1) * ni + i;
      const int v11 = (j + 1) * ni + i + 1;
      m.triangles.push_back({v00, v10, v11});
      m.triangles.push_back({v00, v11, v01});
    }
  }
}

}  // namespace detail

/// Mesh a ruled strip on an ns x ntau vertex grid over
/// [s0, s1] x [tau0, tau1]: vertex(i, j) = (a(tau_j) s_i, s_i, tau_j).
[[nodiscard]] inline Mesh mesh_strip(const StripProfile& prof, double s0,
                                     double s1, double tau0, double tau1,
                                     int ns, int ntau) {
  if (ns < 2 || ntau < 2) {
    throw std::invalid_argument("mesh_strip: need at least a 2x2 vertex grid");
  }
  if (!(s0 < s1) || !(tau0 < tau1)) {
    throw std::invalid_argument("mesh_strip: empty parameter box");
  }
  Mesh m;
  m.vertices.reserve(static_cast<std::size_t>(ns) * ntau);
  for (int j = 0; j < ntau; ++j) {
    const double tau = tau0 + (tau1 - tau0) * j / (ntau - 1);
    const double a = prof.a(tau);
    for (int i = 0; i < ns; ++i) {
      const double s = s0 + (s1 - s0) * i / (ns - 1);
      m.vertices.push_back(HPoint{a * s, s, tau});
    }
  }
  detail::grid_triangles(m, ns, ntau);
  return m;
}

/// Mesh a general field's graph on an ny x nt vertex grid over the region:
/// vertex(i, j) = graph_map(f(y_i, t_j), y_i, t_j).
[[nodiscard]] inline Mesh mesh_graph(const ScalarField& f, const Rect& region,
                                     int ny, int nt) {
  if (ny < 2 || nt < 2) {
    throw std::invalid_argument("mesh_graph: need at least a 2x2 vertex grid");
  }
  if (!(region.y0 < region.y1) || !(region.t0 < region.t1)) {
    throw std::invalid_argument("mesh_graph: empty region");
  }
  Mesh m;
  m.vertices.reserve(static_cast<std::size_t>(ny) * nt);
  for (int j = 0; j < nt; ++j) {
    const double t = region.t0 + (region.t1 - region.t0) * j / (nt - 1);
    for (int i = 0; i < ny; ++i) {
      const double y = region.y0 + (region.y1 - region.y0) * i / (ny - 1);
      m.vertices.push_back(graph_map(f(y, t), y, t));
    }
  }
  detail::grid_triangles(m, ny, nt);
  return m;
}

/// ASCII OBJ, 9 significant digits, fixed traversal order; provenance (when
/// set) goes into a leading comment.  Identical meshes serialize to
/// identical bytes.
inline void write_obj(const Mesh& m, std::ostream& out) {
  if (!m.provenance.empty()) {
    out << "# provenance " << m.provenance << "\n";
  }
  char buf[128];
  for (const HPoint& v : m.vertices) {
    std::snprintf(buf, sizeof buf, "v %.9g %.9g %.9g\n", v.x, v.y, v.z);
    out << buf;
  }
  for (const std::array<int, 3>& t : m.triangles) {
    std::snprintf(buf, sizeof buf, "f %d %d %d\n", t[0] + 1, t[1] + 1,
                  t[2] + 1);
    out << buf;
  }
}

}  // namespace heis
