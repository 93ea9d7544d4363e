#pragma once

// Regular level multicurves of the circle map integrating an integral closed
// 1-form, their homology classes, and Euler characteristics of the
// complementary pieces (cut-complex counting).

#include <map>
#include <set>

#include "spineform/tracing.hpp"

namespace spineform {

struct LevelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Integrates beta over a spanning tree from vertex 0; for integral forms the
// loop discrepancies are integers.
inline Eigen::VectorXd integrate_potential(const TriangulatedSurface& m,
                                           const DiscreteOneForm& beta) {
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(m.nv);
  std::vector<char> seen(m.nv, 0);
  std::vector<std::vector<std::pair<int, int>>> vedges(m.nv);  // (edge, +-1 oriented out)
  for (int e = 0; e < m.n_edges(); ++e) {
    vedges[m.edges[e].v0].emplace_back(e, +1);
    vedges[m.edges[e].v1].emplace_back(e, -1);
  }
  std::deque<int> q{0};
  seen[0] = 1;
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (auto [e, s] : vedges[v]) {
      int w = s > 0 ? m.edges[e].v1 : m.edges[e].v0;
      if (seen[w]) continue;
      seen[w] = 1;
      theta[w] = theta[v] + s * beta.values[e];
      q.push_back(w);
    }
  }
  return theta;
}

inline double max_integrality_defect(const TriangulatedSurface& m, const DiscreteOneForm& beta,
                                     const Eigen::VectorXd& theta) {
  double worst = 0.0;
  for (int e = 0; e < m.n_edges(); ++e) {
    double d = theta[m.edges[e].v1] - theta[m.edges[e].v0] - beta.values[e];
    worst = std::max(worst, std::abs(d - std::lround(d)));
  }
  return worst;
}

namespace detail {
// lift values of the three corners of face f, anchored at corner 0
inline std::array<double, 3> face_lift(const TriangulatedSurface& m, const DiscreteOneForm& beta,
                                       const Eigen::VectorXd& theta, int f) {
  const auto& F = m.faces[f];
  double t0 = theta[F.v[0]];
  return {t0, t0 + beta.on_side(f, 0), t0 + beta.on_side(f, 0) + beta.on_side(f, 1)};
}
}  // namespace detail

struct LevelMulticurve {
  struct Crossing {
    int edge;
    double u;            // parameter along the edge (v0 -> v1)
    double lifted_level;  // in the edge's lift (theta[v0] + u * beta)
  };
  struct Segment {
    int face;
    int ca, cb;         // crossing indices
    double face_level;  // level in the face lift (anchored at corner 0)
  };
  std::vector<Crossing> crossings;
  std::vector<Segment> segs;
  std::vector<std::vector<int>> curves;      // chained segment indices, closed
  std::vector<Eigen::VectorXd> curve_class;  // integrals of the dual cocycles
  double level = 0.0;
};

// Level set of the circle map at a regular value `level`.
inline LevelMulticurve regular_level_multicurve(const TriangulatedSurface& m,
                                                const DiscreteOneForm& beta,
                                                const HomologyBasis& basis, double level,
                                                double vertex_tol = 1e-7) {
  Eigen::VectorXd theta = integrate_potential(m, beta);
  if (max_integrality_defect(m, beta, theta) > 1e-8)
    throw LevelError("regular_level_multicurve: form does not have integral periods");
  for (int v = 0; v < m.nv; ++v) {
    double d = theta[v] - level;
    if (std::abs(d - std::lround(d)) < vertex_tol)
      throw LevelError("regular_level_multicurve: level passes through a vertex value; "
                       "suggest a nearby regular value");
  }

  LevelMulticurve out;
  out.level = level;

  std::vector<std::vector<int>> edge_cross(m.n_edges());
  for (int e = 0; e < m.n_edges(); ++e) {
    double a = theta[m.edges[e].v0];
    double b = a + beta.values[e];
    double lo = std::min(a, b), hi = std::max(a, b);
    for (long k = std::lround(std::floor(lo - level)) - 1;
         static_cast<double>(k) + level <= hi + 1.0; ++k) {
      double L = level + static_cast<double>(k);
      if (L <= lo || L >= hi) continue;
      LevelMulticurve::Crossing c;
      c.edge = e;
      c.u = (L - a) / (b - a);
      c.lifted_level = L;
      edge_cross[e].push_back(static_cast<int>(out.crossings.size()));
      out.crossings.push_back(c);
    }
  }

  for (int f = 0; f < m.n_faces(); ++f) {
    const auto& F = m.faces[f];
    auto lift = detail::face_lift(m, beta, theta, f);
    std::vector<std::pair<double, int>> here;  // (face-level, crossing idx)
    for (int s = 0; s < 3; ++s) {
      int e = F.e[s];
      // edge lift anchor theta[v0(e)]; corner s sits at u=0 or u=1 of the edge
      double corner_on_edge =
          (F.esign[s] > 0) ? theta[m.edges[e].v0] : theta[m.edges[e].v0] + beta.values[e];
      double shift = lift[s] - corner_on_edge;
      double kshift = std::lround(shift);
      if (std::abs(shift - kshift) > 1e-8)
        throw LevelError("non-integer lift shift (form not integral?)");
      for (int ci : edge_cross[e]) here.emplace_back(out.crossings[ci].lifted_level + kshift, ci);
    }
    std::sort(here.begin(), here.end());
    if (here.size() % 2 != 0) throw LevelError("odd crossing count in a face");
    for (size_t i = 0; i + 1 < here.size(); i += 2) {
      if (std::abs(here[i].first - here[i + 1].first) > 1e-7)
        throw LevelError("unpaired level crossing in a face");
      out.segs.push_back({f, here[i].second, here[i + 1].second, here[i].first});
    }
  }

  std::vector<std::vector<int>> at_crossing(out.crossings.size());
  for (size_t i = 0; i < out.segs.size(); ++i) {
    at_crossing[out.segs[i].ca].push_back(static_cast<int>(i));
    at_crossing[out.segs[i].cb].push_back(static_cast<int>(i));
  }
  for (const auto& v : at_crossing)
    if (v.size() != 2) throw LevelError("level curve fails to close (bad crossing valence)");
  std::vector<char> used(out.segs.size(), 0);
  for (size_t s0 = 0; s0 < out.segs.size(); ++s0) {
    if (used[s0]) continue;
    std::vector<int> curve;
    int s = static_cast<int>(s0);
    int enter = out.segs[s0].ca;
    while (!used[s]) {
      used[s] = 1;
      curve.push_back(s);
      int exit = (out.segs[s].ca == enter) ? out.segs[s].cb : out.segs[s].ca;
      const auto& two = at_crossing[exit];
      int nxt = (two[0] == s) ? two[1] : two[0];
      enter = exit;
      s = nxt;
    }
    out.curves.push_back(std::move(curve));
  }

  auto crossing_point = [&](int f, int ci) {
    const auto& C = out.crossings[ci];
    const auto& F = m.faces[f];
    for (int s = 0; s < 3; ++s)
      if (F.e[s] == C.edge) {
        double t = F.esign[s] > 0 ? C.u : 1.0 - C.u;
        return Vec2(F.p[s] + t * (F.p[(s + 1) % 3] - F.p[s]));
      }
    throw LevelError("crossing edge not on face");
  };
  for (const auto& curve : out.curves) {
    Eigen::VectorXd cls = Eigen::VectorXd::Zero(basis.cocycles.size());
    int enter = -1;
    // orient along the chain: enter through the previous segment's exit
    enter = out.segs[curve.front()].ca;
    for (int si : curve) {
      const auto& sg = out.segs[si];
      int a = enter, b = (sg.ca == enter) ? sg.cb : sg.ca;
      Vec2 pa = crossing_point(sg.face, a), pb = crossing_point(sg.face, b);
      for (int j = 0; j < static_cast<int>(basis.cocycles.size()); ++j) {
        Vec2 u = face_covector(basis.cocycles[j], sg.face);
        cls[j] += u.dot(pb - pa);
      }
      enter = b;
    }
    out.curve_class.push_back(cls);
  }
  return out;
}

// A level in (lo, hi) maximizing distance from all vertex values mod 1.
inline double find_regular_level(const TriangulatedSurface& m, const DiscreteOneForm& beta,
                                 double lo, double hi, int samples = 64) {
  Eigen::VectorXd theta = integrate_potential(m, beta);
  double best = 0.5 * (lo + hi), bestd = -1.0;
  for (int k = 1; k < samples; ++k) {
    double L = lo + (hi - lo) * k / samples;
    double dmin = std::numeric_limits<double>::infinity();
    for (int v = 0; v < m.nv; ++v) {
      double d = theta[v] - L;
      dmin = std::min(dmin, std::abs(d - std::lround(d)));
    }
    if (dmin > bestd) {
      bestd = dmin;
      best = L;
    }
  }
  return best;
}

// Critical values of the circle map: theta at the zeros, reduced mod 1.
inline std::vector<double> singular_levels(const TriangulatedSurface& m,
                                           const DiscreteOneForm& beta,
                                           const std::vector<ZeroPoint>& zeros) {
  Eigen::VectorXd theta = integrate_potential(m, beta);
  std::vector<double> vals;
  for (const auto& z : zeros) {
    double t = theta[z.vertex];
    t -= std::floor(t);
    vals.push_back(t);
  }
  std::sort(vals.begin(), vals.end());
  return vals;
}

struct ComplementPiece {
  int chi = 0;
  int boundary_curves = 0;
  int cells = 0;
};

// Cuts the surface along the union of the given multicurve systems (all built
// from the same form) and reports Euler characteristic and boundary count per
// piece. A pair of pants is chi == -1 with 3 boundary curves.
inline std::vector<ComplementPiece> complement_pieces(
    const TriangulatedSurface& m, const DiscreteOneForm& beta,
    const std::vector<const LevelMulticurve*>& systems) {
  Eigen::VectorXd theta = integrate_potential(m, beta);

  struct GSeg {
    int face;
    double face_level;
    int curve;  // global curve id
  };
  struct GCross {
    int edge;
    double u;
  };
  std::vector<GSeg> segs;
  std::vector<GCross> crossings;
  std::vector<std::vector<int>> cross_segs;  // per crossing: incident segments
  int curve_base = 0;
  for (const auto* sys : systems) {
    int coff = static_cast<int>(crossings.size());
    for (const auto& c : sys->crossings) {
      crossings.push_back({c.edge, c.u});
      cross_segs.emplace_back();
    }
    std::vector<int> seg_curve(sys->segs.size(), -1);
    for (size_t k = 0; k < sys->curves.size(); ++k)
      for (int si : sys->curves[k]) seg_curve[si] = curve_base + static_cast<int>(k);
    for (size_t i = 0; i < sys->segs.size(); ++i) {
      const auto& s = sys->segs[i];
      int gid = static_cast<int>(segs.size());
      segs.push_back({s.face, s.face_level, seg_curve[i]});
      cross_segs[s.ca + coff].push_back(gid);
      cross_segs[s.cb + coff].push_back(gid);
    }
    curve_base += static_cast<int>(sys->curves.size());
  }

  // cells per face, ordered by face level
  std::vector<std::vector<int>> face_segs(m.n_faces());
  for (size_t i = 0; i < segs.size(); ++i) face_segs[segs[i].face].push_back(static_cast<int>(i));
  for (auto& v : face_segs)
    std::sort(v.begin(), v.end(),
              [&](int a, int b) { return segs[a].face_level < segs[b].face_level; });
  std::vector<int> cell_offset(m.n_faces() + 1, 0);
  for (int f = 0; f < m.n_faces(); ++f)
    cell_offset[f + 1] = cell_offset[f] + static_cast<int>(face_segs[f].size()) + 1;
  const int n_cells = cell_offset[m.n_faces()];

  auto cell_of_level = [&](int f, double L) {
    int k = 0;
    for (int si : face_segs[f])
      if (segs[si].face_level < L) ++k;
    return cell_offset[f] + k;
  };
  // rank of a segment among its face's segments
  auto seg_rank = [&](int si) {
    const auto& v = face_segs[segs[si].face];
    return static_cast<int>(std::find(v.begin(), v.end(), si) - v.begin());
  };

  // lift of a point on edge e at parameter u, expressed in face f's lift
  auto edge_point_level = [&](int f, int e, double u) {
    const auto& F = m.faces[f];
    auto lift = detail::face_lift(m, beta, theta, f);
    for (int s = 0; s < 3; ++s)
      if (F.e[s] == e) {
        double t = F.esign[s] > 0 ? u : 1.0 - u;
        return lift[s] + t * beta.on_side(f, s);
      }
    throw LevelError("edge not on face");
  };

  detail::UnionFind uf(n_cells);
  std::vector<std::vector<int>> edge_cross(m.n_edges());
  for (size_t c = 0; c < crossings.size(); ++c)
    edge_cross[crossings[c].edge].push_back(static_cast<int>(c));
  for (auto& v : edge_cross)
    std::sort(v.begin(), v.end(), [&](int a, int b) { return crossings[a].u < crossings[b].u; });

  int n_subedges = 0;
  for (int e = 0; e < m.n_edges(); ++e) {
    const auto& cr = edge_cross[e];
    int f0 = m.edges[e].f[0], f1 = m.edges[e].f[1];
    for (size_t j = 0; j <= cr.size(); ++j) {
      double ulo = (j == 0) ? 0.0 : crossings[cr[j - 1]].u;
      double uhi = (j == cr.size()) ? 1.0 : crossings[cr[j]].u;
      double umid = 0.5 * (ulo + uhi);
      int c0 = cell_of_level(f0, edge_point_level(f0, e, umid));
      int c1 = cell_of_level(f1, edge_point_level(f1, e, umid));
      uf.unite(c0, c1);
      ++n_subedges;
    }
  }

  // tallies
  std::map<int, ComplementPiece> agg;
  std::map<int, int> V, E;
  auto reg = [&](int cell) { return uf.find(cell); };

  for (int c = 0; c < n_cells; ++c) agg[reg(c)].cells += 1;

  // edges: one per sub-interval (its two flanking cells are united)
  for (int e = 0; e < m.n_edges(); ++e) {
    const auto& cr = edge_cross[e];
    int f0 = m.edges[e].f[0];
    for (size_t j = 0; j <= cr.size(); ++j) {
      double ulo = (j == 0) ? 0.0 : crossings[cr[j - 1]].u;
      double uhi = (j == cr.size()) ? 1.0 : crossings[cr[j]].u;
      double umid = 0.5 * (ulo + uhi);
      E[reg(cell_of_level(f0, edge_point_level(f0, e, umid)))] += 1;
    }
  }
  // segment sides: one boundary edge per side
  for (size_t si = 0; si < segs.size(); ++si) {
    int f = segs[si].face;
    int r = seg_rank(static_cast<int>(si));
    E[reg(cell_offset[f] + r)] += 1;      // below
    E[reg(cell_offset[f] + r + 1)] += 1;  // above
  }
  // original vertices
  for (int v = 0; v < m.nv; ++v) {
    auto [f, c] = m.star[v].front();
    auto lift = detail::face_lift(m, beta, theta, f);
    V[reg(cell_of_level(f, lift[c]))] += 1;
  }
  // crossing points: one copy per curve side
  for (size_t ci = 0; ci < crossings.size(); ++ci) {
    int si = cross_segs[ci].front();
    int f = segs[si].face;
    int r = seg_rank(si);
    V[reg(cell_offset[f] + r)] += 1;
    V[reg(cell_offset[f] + r + 1)] += 1;
  }
  // boundary curve sides
  std::map<int, std::set<std::pair<int, int>>> sides;
  for (size_t si = 0; si < segs.size(); ++si) {
    int f = segs[si].face;
    int r = seg_rank(static_cast<int>(si));
    sides[reg(cell_offset[f] + r)].insert({segs[si].curve, 0});
    sides[reg(cell_offset[f] + r + 1)].insert({segs[si].curve, 1});
  }

  std::vector<ComplementPiece> out;
  for (auto& [root, p] : agg) {
    p.chi = V[root] - E[root] + p.cells;
    p.boundary_curves = static_cast<int>(sides[root].size());
    out.push_back(p);
  }
  return out;
}

}  // namespace spineform
