#pragma once

// Harmonic 1-forms for the cotan weights: Hodge projection of the dual
// cocycles, period-targeted representatives, and the 1-form Hodge star.

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "spineform/homology.hpp"

namespace spineform {

class LaplaceSolver {
 public:
  LaplaceSolver(const TriangulatedSurface& m, const MetricWeights& w) : mesh_(&m) {
    const int n = m.nv;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(4 * m.n_edges() + n);
    for (int e = 0; e < m.n_edges(); ++e) {
      int a = m.edges[e].v0, b = m.edges[e].v1;
      double we = w.edge_w[e];
      if (a == 0 || b == 0) continue;  // vertex 0 pinned
      trip.emplace_back(a, a, we);
      trip.emplace_back(b, b, we);
      trip.emplace_back(a, b, -we);
      trip.emplace_back(b, a, -we);
    }
    // pinned row/col: identity; also accumulate diagonal mass for pinned nbrs
    trip.emplace_back(0, 0, 1.0);
    for (int e = 0; e < m.n_edges(); ++e) {
      int a = m.edges[e].v0, b = m.edges[e].v1;
      if (a == 0 && b != 0) trip.emplace_back(b, b, w.edge_w[e]);
      if (b == 0 && a != 0) trip.emplace_back(a, a, w.edge_w[e]);
    }
    Eigen::SparseMatrix<double> L(n, n);
    L.setFromTriplets(trip.begin(), trip.end());
    solver_.compute(L);
    if (solver_.info() != Eigen::Success)
      throw MeshError("Laplace factorization failed (disconnected or degenerate mesh)");
  }

  // solve L phi = rhs with phi[0] = 0; rhs must have zero total sum
  Eigen::VectorXd solve(Eigen::VectorXd rhs) const {
    rhs[0] = 0.0;
    Eigen::VectorXd phi = solver_.solve(rhs);
    if (solver_.info() != Eigen::Success) throw MeshError("Laplace solve failed");
    return phi;
  }

 private:
  const TriangulatedSurface* mesh_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_;
};

struct HarmonicSpace {
  std::vector<DiscreteOneForm> basis;  // 2g closed + co-closed forms
  Eigen::MatrixXd period_matrix;       // (loop j, basis i)
};

// Hodge-projects each dual cocycle: h_i = z_i - d phi_i with L phi_i = -div z_i.
inline HarmonicSpace harmonic_space(const TriangulatedSurface& m, const MetricWeights& w,
                                    const HomologyBasis& basis) {
  LaplaceSolver solver(m, w);
  HarmonicSpace hs;
  const int n = static_cast<int>(basis.cocycles.size());
  hs.period_matrix.resize(n, n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd rhs = -divergence(w, basis.cocycles[i]);
    Eigen::VectorXd phi = solver.solve(rhs);
    DiscreteOneForm h = basis.cocycles[i] - d0(m, phi);
    for (int j = 0; j < n; ++j) hs.period_matrix(j, i) = period(h, basis.loops[j]);
    hs.basis.push_back(std::move(h));
  }
  return hs;
}

struct HarmonicResult {
  DiscreteOneForm form;
  double closedness = 0.0;
  double divergence = 0.0;
  bool degenerate_zero_warning = false;  // set by the zero finder downstream
};

// The harmonic 1-form whose periods over the homology basis equal `target`.
inline HarmonicResult harmonic_representative(const TriangulatedSurface& m,
                                              const MetricWeights& w, const HomologyBasis& basis,
                                              const HarmonicSpace& hs,
                                              const Eigen::VectorXd& target) {
  const int n = static_cast<int>(hs.basis.size());
  if (target.size() != n) throw MeshError("period target size != 2g");
  HarmonicResult out;
  out.form = DiscreteOneForm(m);
  if (n == 0) {
    if (target.size() != 0) throw MeshError("sphere has no periods");
    return out;
  }
  Eigen::VectorXd c = hs.period_matrix.partialPivLu().solve(target);
  for (int i = 0; i < n; ++i) out.form.values += c[i] * hs.basis[i].values;
  out.closedness = out.form.closedness_residual();
  out.divergence = divergence_residual(w, out.form);
  return out;
}

// Discrete Hodge star on 1-forms: per-face rotation by -90 degrees in the
// metric layout (star dx = -dy, star dy = dx), transferred back to edges by
// averaging the two incident faces' contributions.
inline DiscreteOneForm hodge_star(const TriangulatedSurface& m, const MetricWeights& w,
                                  const DiscreteOneForm& beta) {
  DiscreteOneForm out(m);
  for (int e = 0; e < m.n_edges(); ++e) {
    double acc = 0.0;
    for (int k = 0; k < 2; ++k) {
      int f = m.edges[e].f[k], s = m.edges[e].side[k];
      const auto& P = w.layout[f];
      Vec2 u = face_covector_in(P, beta.on_side(f, 0), beta.on_side(f, 1));
      Vec2 star_u(u.y(), -u.x());  // *(a dx + b dy) = b dx - a dy (rotation by -90)
      Vec2 ev = P[(s + 1) % 3] - P[s];
      double side_integral = star_u.dot(ev);
      acc += 0.5 * m.faces[f].esign[s] * side_integral;
    }
    out.values[e] = acc;
  }
  return out;
}

}  // namespace spineform
