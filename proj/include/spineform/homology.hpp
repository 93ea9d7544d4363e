#pragma once

// Tree-cotree homology generators and their dual closed 1-forms.
//
// The 2g leftover edges (in neither the primal spanning tree nor the dual
// cotree) close up into loops through the tree. For each leftover edge there
// is a closed integer cocycle vanishing on the tree and on the other leftover
// edges, with period delta_ij over loop j; these are the dual basis and feed
// both the harmonic solver and the intersection pairing.

#include <deque>

#include "spineform/one_form.hpp"

namespace spineform {

struct HomologyLoop {
  std::vector<int> edge;  // edge ids
  std::vector<int> sign;  // traversal sign per edge
};

struct HomologyBasis {
  std::vector<HomologyLoop> loops;          // 2g loops
  std::vector<DiscreteOneForm> cocycles;    // dual basis: period(z_i, loop_j) = delta_ij
  Eigen::MatrixXd intersection;             // from the cup pairing of the cocycles
};

inline double period(const DiscreteOneForm& a, const HomologyLoop& loop) {
  double s = 0.0;
  for (size_t i = 0; i < loop.edge.size(); ++i) s += loop.sign[i] * a.values[loop.edge[i]];
  return s;
}

inline Eigen::VectorXd periods(const DiscreteOneForm& a, const HomologyBasis& basis) {
  Eigen::VectorXd p(basis.loops.size());
  for (size_t i = 0; i < basis.loops.size(); ++i) p[i] = period(a, basis.loops[i]);
  return p;
}

inline HomologyBasis homology_basis(const TriangulatedSurface& m) {
  const int nv = m.nv, ne = m.n_edges(), nf = m.n_faces();

  // primal spanning tree (BFS from vertex 0, edge order deterministic)
  std::vector<int> parent_edge(nv, -1), parent_vert(nv, -1), depth(nv, 0);
  std::vector<char> in_tree(ne, 0), vseen(nv, 0);
  {
    std::vector<std::vector<int>> vedges(nv);
    for (int e = 0; e < ne; ++e) {
      vedges[m.edges[e].v0].push_back(e);
      vedges[m.edges[e].v1].push_back(e);
    }
    std::deque<int> q{0};
    vseen[0] = 1;
    while (!q.empty()) {
      int v = q.front();
      q.pop_front();
      for (int e : vedges[v]) {
        int w = m.edges[e].v0 == v ? m.edges[e].v1 : m.edges[e].v0;
        if (vseen[w]) continue;
        vseen[w] = 1;
        in_tree[e] = 1;
        parent_edge[w] = e;
        parent_vert[w] = v;
        depth[w] = depth[v] + 1;
        q.push_back(w);
      }
    }
    for (int v = 0; v < nv; ++v)
      if (!vseen[v]) throw MeshError("mesh is disconnected");
  }

  // dual spanning tree over edges not in the primal tree (BFS from face 0)
  std::vector<char> in_cotree(ne, 0), fseen(nf, 0);
  std::vector<int> dual_parent_edge(nf, -1), dual_order;
  {
    std::deque<int> q{0};
    fseen[0] = 1;
    dual_order.push_back(0);
    while (!q.empty()) {
      int f = q.front();
      q.pop_front();
      for (int s = 0; s < 3; ++s) {
        int e = m.faces[f].e[s];
        if (in_tree[e]) continue;
        int g = m.faces[f].nbr[s];
        if (fseen[g]) continue;
        fseen[g] = 1;
        in_cotree[e] = 1;
        dual_parent_edge[g] = e;
        dual_order.push_back(g);
        q.push_back(g);
      }
    }
  }

  std::vector<int> leftover;
  for (int e = 0; e < ne; ++e)
    if (!in_tree[e] && !in_cotree[e]) leftover.push_back(e);
  if (static_cast<int>(leftover.size()) != 2 * m.genus)
    throw MeshError("tree-cotree leftover count != 2g");

  HomologyBasis basis;

  auto tree_path_to_root = [&](int v) {
    // returns (edges, signs) walking v -> root
    std::vector<std::pair<int, int>> path;
    while (parent_edge[v] != -1) {
      int e = parent_edge[v];
      int sign = (m.edges[e].v1 == v) ? -1 : +1;  // traverse e from v toward parent
      path.emplace_back(e, sign);
      v = parent_vert[v];
    }
    return path;
  };

  for (int e0 : leftover) {
    HomologyLoop loop;
    int a = m.edges[e0].v0, b = m.edges[e0].v1;
    // loop: root -> a, edge a->b, b -> root
    auto pa = tree_path_to_root(a);
    auto pb = tree_path_to_root(b);
    for (auto it = pa.rbegin(); it != pa.rend(); ++it) {
      loop.edge.push_back(it->first);
      loop.sign.push_back(-it->second);
    }
    loop.edge.push_back(e0);
    loop.sign.push_back(+1);
    for (auto& [e, s] : pb) {
      loop.edge.push_back(e);
      loop.sign.push_back(s);
    }
    basis.loops.push_back(std::move(loop));
  }

  // dual cocycles: zero on tree, delta on leftover, propagated over the
  // cotree so every triangle sum vanishes (process dual-tree leaves first)
  for (size_t i = 0; i < leftover.size(); ++i) {
    DiscreteOneForm z(m);
    z.values[leftover[i]] = 1.0;
    for (auto it = dual_order.rbegin(); it != dual_order.rend(); ++it) {
      int f = *it;
      int e = dual_parent_edge[f];
      if (e < 0) continue;
      // set z on e so the triangle sum of f vanishes
      const auto& F = m.faces[f];
      int s_of_e = -1;
      double rest = 0.0;
      for (int s = 0; s < 3; ++s) {
        if (F.e[s] == e) s_of_e = s;
        else rest += F.esign[s] * z.values[F.e[s]];
      }
      z.values[e] = -rest / F.esign[s_of_e];
    }
    if (z.closedness_residual() > 1e-9)
      throw MeshError("dual cocycle propagation failed to close");
    basis.cocycles.push_back(std::move(z));
  }

  const int n = static_cast<int>(basis.loops.size());
  basis.intersection.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      basis.intersection(i, j) = cup_pairing(basis.cocycles[i], basis.cocycles[j]);
  if (n > 0 && std::abs(basis.intersection.determinant()) < 0.5)
    throw MeshError("homology intersection matrix is degenerate");
  return basis;
}

}  // namespace spineform
