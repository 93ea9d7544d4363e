#pragma once

// Discrete 1-forms: one real per oriented edge (the integral of the form
// along the edge), with the standard face-constant interpretation.

#include <Eigen/Dense>

#include "spineform/metric.hpp"

namespace spineform {

struct DiscreteOneForm {
  const TriangulatedSurface* mesh = nullptr;
  Eigen::VectorXd values;  // per edge, oriented v0 -> v1

  DiscreteOneForm() = default;
  explicit DiscreteOneForm(const TriangulatedSurface& m)
      : mesh(&m), values(Eigen::VectorXd::Zero(m.n_edges())) {}

  double on_side(int f, int s) const {
    const auto& F = mesh->faces[f];
    return F.esign[s] * values[F.e[s]];
  }

  double triangle_sum(int f) const { return on_side(f, 0) + on_side(f, 1) + on_side(f, 2); }

  double closedness_residual() const {
    double r = 0.0;
    for (int f = 0; f < mesh->n_faces(); ++f) r = std::max(r, std::abs(triangle_sum(f)));
    return r;
  }

  double max_abs() const { return values.size() ? values.cwiseAbs().maxCoeff() : 0.0; }
};

inline DiscreteOneForm operator+(DiscreteOneForm a, const DiscreteOneForm& b) {
  a.values += b.values;
  return a;
}
inline DiscreteOneForm operator-(DiscreteOneForm a, const DiscreteOneForm& b) {
  a.values -= b.values;
  return a;
}
inline DiscreteOneForm operator*(DiscreteOneForm a, double c) {
  a.values *= c;
  return a;
}
inline DiscreteOneForm operator-(DiscreteOneForm a) {
  a.values *= -1.0;
  return a;
}

// Face-constant covector (a, b) meaning a dx + b dy in the given per-face
// frame, recovered from two edge integrals. Exact for closed forms.
inline Vec2 face_covector_in(const std::array<Vec2, 3>& P, double side0, double side1) {
  Vec2 e0 = P[1] - P[0], e1 = P[2] - P[1];
  Eigen::Matrix2d M;
  M << e0.x(), e0.y(), e1.x(), e1.y();
  return M.partialPivLu().solve(Eigen::Vector2d(side0, side1));
}

inline Vec2 face_covector(const DiscreteOneForm& a, int f) {
  return face_covector_in(a.mesh->faces[f].p, a.on_side(f, 0), a.on_side(f, 1));
}

// Integral of a ^ b over face f: (a01 b12 - a12 b01)/2, orientation of the face.
inline double wedge_face_integral(const DiscreteOneForm& a, const DiscreteOneForm& b, int f) {
  return 0.5 * (a.on_side(f, 0) * b.on_side(f, 1) - a.on_side(f, 1) * b.on_side(f, 0));
}

// Density of a ^ b against the face area form.
inline double wedge_face_density(const DiscreteOneForm& a, const DiscreteOneForm& b, int f) {
  return wedge_face_integral(a, b, f) / a.mesh->faces[f].area;
}

// The simplicial cup pairing: integral of a ^ b over the surface.
// Antisymmetric; depends only on the cohomology classes of closed forms.
inline double cup_pairing(const DiscreteOneForm& a, const DiscreteOneForm& b) {
  double s = 0.0;
  for (int f = 0; f < a.mesh->n_faces(); ++f) s += wedge_face_integral(a, b, f);
  return s;
}

// Weighted divergence at each vertex (edges oriented out of the vertex count
// positively).
inline Eigen::VectorXd divergence(const MetricWeights& w, const DiscreteOneForm& a) {
  Eigen::VectorXd div = Eigen::VectorXd::Zero(a.mesh->nv);
  for (int e = 0; e < a.mesh->n_edges(); ++e) {
    const auto& E = a.mesh->edges[e];
    div[E.v0] += w.edge_w[e] * a.values[e];
    div[E.v1] -= w.edge_w[e] * a.values[e];
  }
  return div;
}

inline double divergence_residual(const MetricWeights& w, const DiscreteOneForm& a) {
  Eigen::VectorXd d = divergence(w, a);
  return d.size() ? d.cwiseAbs().maxCoeff() : 0.0;
}

// d of a vertex function, as a discrete 1-form.
inline DiscreteOneForm d0(const TriangulatedSurface& m, const Eigen::VectorXd& fn) {
  DiscreteOneForm out(m);
  for (int e = 0; e < m.n_edges(); ++e)
    out.values[e] = fn[m.edges[e].v1] - fn[m.edges[e].v0];
  return out;
}

// Chart-displacement form of a translation-structure mesh: the edge integral
// of dx (axis 0) or dy (axis 1) in the aligned face charts. Exactly closed
// when all transitions are translations.
inline DiscreteOneForm translation_form(const TriangulatedSurface& m, int axis) {
  DiscreteOneForm out(m);
  for (int e = 0; e < m.n_edges(); ++e) {
    Vec2 d = m.edge_vec_in_face(e, 0);
    out.values[e] = axis == 0 ? d.x() : d.y();
  }
  return out;
}

}  // namespace spineform
