#pragma once

// Metric data on a triangulated surface: cotan edge weights and vertex areas
// for a reference metric given by edge lengths (chart lengths by default, or
// an override representing another metric in the conformal-class role).
// Intrinsic Delaunay edge flips make the weights nonnegative.

#include "spineform/mesh.hpp"

namespace spineform {

struct MetricWeights {
  std::vector<double> edge_w;      // cotan weights
  std::vector<double> vertex_area;
  // metric layout of each face: corner positions from the metric lengths
  std::vector<std::array<Vec2, 3>> layout;
  std::vector<double> face_area;
};

inline std::array<Vec2, 3> layout_from_lengths(double l01, double l12, double l20, int face_id) {
  if (!(l01 + l12 > l20 && l12 + l20 > l01 && l20 + l01 > l12))
    throw MeshError("face " + std::to_string(face_id) + " violates the strict triangle inequality");
  double x = (l01 * l01 + l20 * l20 - l12 * l12) / (2.0 * l01);
  double y2 = l20 * l20 - x * x;
  return {Vec2(0, 0), Vec2(l01, 0), Vec2(x, std::sqrt(std::max(0.0, y2)))};
}

inline MetricWeights compute_weights(const TriangulatedSurface& m,
                                     const std::vector<double>* edge_len_override = nullptr) {
  auto len = [&](int e) {
    return edge_len_override ? (*edge_len_override)[e] : m.edges[e].len;
  };
  MetricWeights w;
  w.edge_w.assign(m.n_edges(), 0.0);
  w.vertex_area.assign(m.nv, 0.0);
  w.layout.resize(m.n_faces());
  w.face_area.resize(m.n_faces());
  for (int f = 0; f < m.n_faces(); ++f) {
    const auto& F = m.faces[f];
    if (!edge_len_override) {
      w.layout[f] = F.p;
    } else {
      w.layout[f] = layout_from_lengths(len(F.e[0]), len(F.e[1]), len(F.e[2]), f);
    }
    const auto& P = w.layout[f];
    Vec2 u = P[1] - P[0], v = P[2] - P[0];
    double area = 0.5 * (u.x() * v.y() - u.y() * v.x());
    w.face_area[f] = area;
    for (int c = 0; c < 3; ++c) w.vertex_area[F.v[c]] += area / 3.0;
    // the corner opposite side s is corner s+2
    for (int s = 0; s < 3; ++s) {
      int c = (s + 2) % 3;
      Vec2 e1 = P[(c + 1) % 3] - P[c];
      Vec2 e2 = P[(c + 2) % 3] - P[c];
      double cross = e1.x() * e2.y() - e1.y() * e2.x();
      double cot = e1.dot(e2) / std::abs(cross);
      w.edge_w[F.e[s]] += 0.5 * cot;
    }
  }
  return w;
}

namespace detail {
inline GluedTriangles to_soup(const TriangulatedSurface& m) {
  GluedTriangles g;
  g.tris.resize(m.n_faces());
  g.adj.resize(m.n_faces());
  for (int f = 0; f < m.n_faces(); ++f) {
    g.tris[f].p = m.faces[f].p;
    for (int s = 0; s < 3; ++s) g.adj[f][s] = {m.faces[f].nbr[s], m.faces[f].nbrside[s]};
  }
  return g;
}
}  // namespace detail

// Flips edges whose cotan weight is below -tol until none remain (or the
// budget runs out). Face charts of flipped pairs are re-laid-out in the
// developed quad, so chart alignment survives where it existed.
inline TriangulatedSurface intrinsic_delaunay(const TriangulatedSurface& m, double tol = 1e-9,
                                              int max_flips = -1) {
  GluedTriangles g = detail::to_soup(m);
  if (max_flips < 0) max_flips = 10 * static_cast<int>(g.tris.size());

  auto cot_weight = [&](int f, int s) {
    // cotangent at the corner opposite side s, from the chart
    const auto& P = g.tris[f].p;
    int c = (s + 2) % 3;
    Vec2 e1 = P[(c + 1) % 3] - P[c];
    Vec2 e2 = P[(c + 2) % 3] - P[c];
    double cross = e1.x() * e2.y() - e1.y() * e2.x();
    return e1.dot(e2) / std::abs(cross);
  };

  int flips = 0;
  bool changed = true;
  while (changed && flips < max_flips) {
    changed = false;
    for (int f = 0; f < static_cast<int>(g.tris.size()) && flips < max_flips; ++f) {
      for (int s = 0; s < 3; ++s) {
        auto [h, t] = g.adj[f][s];
        if (h == f) continue;  // self-glued edge: skip
        double wsum = 0.5 * (cot_weight(f, s) + cot_weight(h, t));
        if (wsum >= -tol) continue;
        // develop h across the shared side into f's chart
        // shared side: f corners (s, s+1) = h corners (t+1, t)
        std::array<Vec2, 3>& Pf = g.tris[f].p;
        std::array<Vec2, 3>& Ph = g.tris[h].p;
        Vec2 a_f = Pf[s], b_f = Pf[(s + 1) % 3];
        Vec2 a_h = Ph[(t + 1) % 3], b_h = Ph[t];
        Vec2 u = b_f - a_f, v = b_h - a_h;
        double nu = u.norm(), nv = v.norm();
        double cc = u.dot(v) / (nu * nv);
        double ss = (u.x() * v.y() - u.y() * v.x()) / (nu * nv);
        Rigid2 r;
        r.c = cc;
        r.s = -ss;
        r.t = a_f - r.rotate(a_h);
        Vec2 A = Pf[s], B = Pf[(s + 1) % 3], C = Pf[(s + 2) % 3];
        Vec2 D = r.apply(Ph[(t + 2) % 3]);
        // old: f=(A,B,C) with side s = A->B; h has D opposite. new: (A,D,C), (D,B,C)
        auto fadj = g.adj[f];
        auto hadj = g.adj[h];
        // neighbors of the quad: f sides s+1 (B->C), s+2 (C->A); h sides t+1 (A->D), t+2 (D->B)
        auto nb_BC = fadj[(s + 1) % 3], nb_CA = fadj[(s + 2) % 3];
        auto nb_AD = hadj[(t + 1) % 3], nb_DB = hadj[(t + 2) % 3];
        // a quad glued to itself along an outer side cannot be rewired in place
        if (nb_BC.first == f || nb_BC.first == h || nb_CA.first == f || nb_CA.first == h ||
            nb_AD.first == f || nb_AD.first == h || nb_DB.first == f || nb_DB.first == h)
          continue;
        g.tris[f].p = {A, D, C};
        g.tris[h].p = {D, B, C};
        // f sides: 0 A->D, 1 D->C (new diagonal), 2 C->A
        // h sides: 0 D->B, 1 B->C, 2 C->D (new diagonal)
        g.adj[f][0] = nb_AD;
        g.adj[nb_AD.first][nb_AD.second] = {f, 0};
        g.adj[f][1] = {h, 2};
        g.adj[h][2] = {f, 1};
        g.adj[f][2] = nb_CA;
        g.adj[nb_CA.first][nb_CA.second] = {f, 2};
        g.adj[h][0] = nb_DB;
        g.adj[nb_DB.first][nb_DB.second] = {h, 0};
        g.adj[h][1] = nb_BC;
        g.adj[nb_BC.first][nb_BC.second] = {h, 1};
        ++flips;
        changed = true;
        break;  // face data changed; restart this face
      }
    }
  }
  return finalize(g);
}

}  // namespace spineform
