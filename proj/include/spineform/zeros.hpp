#pragma once

// Zeros of a discrete 1-form, located by the winding of its face-constant
// dual field around vertex links. With face-constant interpolation all the
// topological index sits at vertices; the index at a vertex of cone angle
// Theta with field winding W (relative to the developed link) is
// (W + 2 pi - Theta) / 2 pi, and the indices sum to 2 - 2g.

#include "spineform/one_form.hpp"

namespace spineform {

struct ZeroPoint {
  int vertex = -1;
  int index = 0;
  int sign = 0;        // assigned later by the sign function f
  int anchor_face = -1;
  std::array<double, 3> bary{};  // of the vertex corner in anchor_face
};

struct ZeroFindResult {
  std::vector<ZeroPoint> zeros;
  int index_sum = 0;
  bool degenerate = false;       // some index < -1 (or positive)
  double min_face_field = 0.0;   // smallest |covector| over faces, for diagnostics
};

inline ZeroFindResult find_zeros(const TriangulatedSurface& m, const DiscreteOneForm& beta,
                                 double field_tol_rel = 1e-9) {
  ZeroFindResult out;
  std::vector<Vec2> u(m.n_faces());
  double umax = 0.0;
  for (int f = 0; f < m.n_faces(); ++f) {
    u[f] = face_covector(beta, f);
    umax = std::max(umax, u[f].norm());
  }
  if (umax == 0.0) throw MeshError("find_zeros: zero form has no isolated zeros");
  out.min_face_field = umax;
  for (int f = 0; f < m.n_faces(); ++f) out.min_face_field = std::min(out.min_face_field, u[f].norm());

  for (int v = 0; v < m.nv; ++v) {
    const auto& fan = m.star[v];
    double W = 0.0;
    bool unresolved = false;
    for (size_t k = 0; k < fan.size(); ++k) {
      auto [f, c] = fan[k];
      auto [g, cg] = fan[(k + 1) % fan.size()];
      // the next fan face shares the side arriving at v
      int side_in = (c + 2) % 3;
      if (m.faces[f].nbr[side_in] != g) throw MeshError("vertex fan is inconsistent");
      Rigid2 r = m.transition_into(f, side_in);
      Vec2 a = u[f];
      Vec2 b = r.rotate(u[g]);  // covectors rotate like vectors under rigid motions
      if (a.norm() < field_tol_rel * umax || b.norm() < field_tol_rel * umax) {
        unresolved = true;
        break;
      }
      double delta = std::atan2(a.x() * b.y() - a.y() * b.x(), a.dot(b));
      if (std::abs(delta) > 0.98 * M_PI) unresolved = true;
      W += delta;
    }
    if (unresolved) {
      out.degenerate = true;
      ZeroPoint z;
      z.vertex = v;
      z.index = 0;
      out.zeros.push_back(z);
      continue;
    }
    int index = static_cast<int>(std::lround((W + 2.0 * M_PI - m.cone_angle[v]) / (2.0 * M_PI)));
    if (index != 0) {
      ZeroPoint z;
      z.vertex = v;
      z.index = index;
      z.anchor_face = m.star[v].front().first;
      z.bary[m.star[v].front().second] = 1.0;
      out.zeros.push_back(z);
      out.index_sum += index;
      if (index < -1 || index > 0) out.degenerate = true;
    }
  }
  return out;
}

}  // namespace spineform
