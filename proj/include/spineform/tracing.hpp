#pragma once

// Kernel-foliation machinery on the surface: exact segment-by-segment
// tracing of straight trajectories (constant direction under parallel
// transport) and of face fields, closed transversals, transverse paths
// between zeros, Poincare-dual bump forms, and the strip cover of the
// complement of the zero neighborhoods.

#include <functional>
#include <queue>

#include "spineform/cocycle.hpp"

namespace spineform {

struct TraceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PathSegment {
  int face = -1;
  Vec2 a, b;  // endpoints in the face chart
};

struct SurfacePath {
  std::vector<PathSegment> segs;
  bool closed = false;
  double length() const {
    double L = 0.0;
    for (const auto& s : segs) L += (s.b - s.a).norm();
    return L;
  }
};

// min over segments (subsampled `per_seg` times) of beta(unit tangent)
inline double transversality_margin(const SurfacePath& path, const DiscreteOneForm& beta,
                                    int per_seg = 1) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : path.segs) {
    Vec2 d = s.b - s.a;
    double n = d.norm();
    if (n < 1e-15) continue;
    Vec2 u = face_covector(beta, s.face);
    for (int k = 0; k < per_seg; ++k) m = std::min(m, u.dot(d) / n);
  }
  return m;
}

// Graph distance from a set of vertices, propagated over edge lengths.
inline std::vector<double> distance_to_vertices(const TriangulatedSurface& m,
                                                const std::vector<int>& sources) {
  std::vector<std::vector<std::pair<int, double>>> adj(m.nv);
  for (const auto& e : m.edges) {
    adj[e.v0].emplace_back(e.v1, e.len);
    adj[e.v1].emplace_back(e.v0, e.len);
  }
  std::vector<double> dist(m.nv, std::numeric_limits<double>::infinity());
  std::priority_queue<std::pair<double, int>, std::vector<std::pair<double, int>>, std::greater<>>
      pq;
  for (int s : sources) {
    dist[s] = 0.0;
    pq.emplace(0.0, s);
  }
  while (!pq.empty()) {
    auto [d, v] = pq.top();
    pq.pop();
    if (d > dist[v]) continue;
    for (auto [w, l] : adj[v])
      if (d + l < dist[w]) {
        dist[w] = d + l;
        pq.emplace(dist[w], w);
      }
  }
  return dist;
}

inline std::vector<double> face_distance(const TriangulatedSurface& m,
                                         const std::vector<double>& vdist) {
  std::vector<double> fd(m.n_faces());
  for (int f = 0; f < m.n_faces(); ++f)
    fd[f] = std::min({vdist[m.faces[f].v[0]], vdist[m.faces[f].v[1]], vdist[m.faces[f].v[2]]});
  return fd;
}

namespace detail {

// first exit of the ray X + t d from the chart triangle P, ignoring side `skip`
struct RayExit {
  int side = -1;
  double t = std::numeric_limits<double>::infinity();
  Vec2 point;
};

inline RayExit ray_exit(const std::array<Vec2, 3>& P, const Vec2& X, const Vec2& d, int skip) {
  RayExit best;
  for (int s = 0; s < 3; ++s) {
    if (s == skip) continue;
    Vec2 A = P[s], B = P[(s + 1) % 3];
    Vec2 e = B - A;
    double denom = d.x() * e.y() - d.y() * e.x();
    if (std::abs(denom) < 1e-300) continue;
    double t = ((A.x() - X.x()) * e.y() - (A.y() - X.y()) * e.x()) / denom;
    double u = ((A.x() - X.x()) * d.y() - (A.y() - X.y()) * d.x()) / denom;
    if (t > 1e-12 && u >= -1e-9 && u <= 1.0 + 1e-9 && t < best.t) {
      best.t = t;
      best.side = s;
      best.point = X + t * d;
    }
  }
  return best;
}

}  // namespace detail

struct TraceOptions {
  double max_len = 100.0;
  double close_tol = 1e-7;        // exact-closure window
  double jog_window = 0.0;        // >0 enables recurrence closing with a jog
  double stop_radius = -1.0;      // stop when entering a face this close to a zero
  const std::vector<double>* face_dist = nullptr;  // distances used by stop_radius
};

enum class TraceStop { MaxLen, Closed, NearZero };

struct TraceResult {
  SurfacePath path;
  TraceStop stop = TraceStop::MaxLen;
  std::vector<std::tuple<int, int, double>> crossings;  // (face, side, sign) before each hop
};

// Traces from a point in the given direction. `field` null means constant
// direction (parallel transport across edges: straight-line trajectories of
// the flat structure); otherwise the per-face direction is field(face).
inline TraceResult trace_from(const TriangulatedSurface& m, int face, Vec2 start, Vec2 dir,
                              const TraceOptions& opt,
                              const std::function<Vec2(int)>* field = nullptr) {
  TraceResult res;
  double traveled = 0.0;
  int f = face;
  Vec2 X = start;
  Vec2 d = field ? (*field)(f) : dir;
  int incoming = -1;
  const int start_face = face;
  const Vec2 start_pt = start;
  bool left_start = false;

  while (traveled < opt.max_len) {
    if (d.norm() < 1e-14) throw TraceError("trace_from: direction field vanished");
    Vec2 dn = d.normalized();
    // closure check within the start face
    if (f == start_face && (left_start || incoming >= 0)) {
      Vec2 w = start_pt - X;
      double along = w.dot(dn);
      double across = std::abs(w.x() * dn.y() - w.y() * dn.x());
      detail::RayExit ex = detail::ray_exit(m.faces[f].p, X, dn, incoming);
      if (along > 1e-12 && along <= ex.t + 1e-12) {
        if (across < opt.close_tol) {
          res.path.segs.push_back({f, X, start_pt});
          res.path.closed = true;
          res.stop = TraceStop::Closed;
          return res;
        }
        if (opt.jog_window > 0.0 && across < opt.jog_window) {
          // close with a short in-face jog to the start point
          res.path.segs.push_back({f, X, start_pt});
          res.path.closed = true;
          res.stop = TraceStop::Closed;
          return res;
        }
      }
    }
    detail::RayExit ex = detail::ray_exit(m.faces[f].p, X, dn, incoming);
    if (ex.side < 0) throw TraceError("trace_from: ray failed to exit a face");
    double step = std::min(ex.t, opt.max_len - traveled);
    if (step < ex.t) {
      res.path.segs.push_back({f, X, X + step * dn});
      res.stop = TraceStop::MaxLen;
      return res;
    }
    res.path.segs.push_back({f, X, ex.point});
    traveled += ex.t;
    // hop to the neighbor
    int g = m.faces[f].nbr[ex.side];
    int gs = m.faces[f].nbrside[ex.side];
    Vec2 ev = m.faces[f].p[(ex.side + 1) % 3] - m.faces[f].p[ex.side];
    double cross = ev.x() * dn.y() - ev.y() * dn.x();
    res.crossings.emplace_back(f, ex.side, cross >= 0 ? +1.0 : -1.0);
    Rigid2 r = m.transition_into(g, gs);  // maps f's chart into g's
    X = r.apply(ex.point);
    d = field ? (*field)(g) : r.rotate(dn);
    f = g;
    incoming = gs;
    left_start = left_start || f != start_face;
    if (opt.stop_radius >= 0.0 && opt.face_dist && (*opt.face_dist)[f] <= opt.stop_radius) {
      res.stop = TraceStop::NearZero;
      return res;
    }
  }
  res.stop = TraceStop::MaxLen;
  return res;
}

// Leaf of ker(beta) through a point: the face-constant dual field rotated by
// +90 degrees. Stops on closing up, at max_len, or near a zero.
inline TraceResult trace_leaf(const TriangulatedSurface& m, const DiscreteOneForm& beta, int face,
                              Vec2 start, double max_len, double stop_radius = -1.0,
                              const std::vector<double>* face_dist = nullptr) {
  if (face_dist && stop_radius >= 0.0 && (*face_dist)[face] <= stop_radius)
    throw TraceError("trace_leaf: start lies inside a zero neighborhood");
  std::function<Vec2(int)> field = [&m, &beta](int f) {
    Vec2 u = face_covector(beta, f);
    return Vec2(-u.y(), u.x()).normalized();  // ker direction: beta(rot90 u) = 0
  };
  TraceOptions opt;
  opt.max_len = max_len;
  opt.stop_radius = stop_radius;
  opt.face_dist = face_dist;
  opt.close_tol = 1e-7 * m.mean_edge_len;
  return trace_from(m, face, start, Vec2(1, 0), opt, &field);
}

// Candidate trace directions: the form's metric dual, the mesh's dominant
// edge-direction classes (side-parallel directions of a glued polygon are
// completely periodic), and a compass fan as backup.
inline std::vector<Vec2> direction_candidates(const TriangulatedSurface& m,
                                              const DiscreteOneForm& beta, int face) {
  std::vector<Vec2> out;
  out.push_back(face_covector(beta, face).normalized());
  // histogram edge directions mod pi
  const int bins = 72;
  std::vector<int> hist(bins, 0);
  std::vector<Vec2> rep(bins, Vec2::Zero());
  for (int e = 0; e < m.n_edges(); ++e) {
    Vec2 d = m.edge_vec_in_face(e, 0).normalized();
    double a = std::atan2(d.y(), d.x());
    if (a < 0) a += M_PI;
    if (a >= M_PI) a -= M_PI;
    int b = std::min(bins - 1, static_cast<int>(a / M_PI * bins));
    ++hist[b];
    rep[b] = d;
  }
  std::vector<int> order(bins);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return hist[a] > hist[b]; });
  for (int k = 0; k < bins && k < 12; ++k) {
    if (hist[order[k]] == 0) break;
    out.push_back(rep[order[k]]);
    out.push_back(-rep[order[k]]);
  }
  for (int k = 0; k < 16; ++k) {
    double a = 2.0 * M_PI * k / 16.0;
    out.emplace_back(std::cos(a), std::sin(a));
  }
  return out;
}

// An embedded closed transversal through the given point. Straight
// trajectories close exactly in periodic directions; otherwise a
// first-return jog inside the start face closes the curve. Short closures
// are preferred (long quasi-minimal orbits produce unusably dense strips).
inline SurfacePath closed_transversal(const TriangulatedSurface& m, const DiscreteOneForm& beta,
                                      int face, Vec2 start, double max_len = -1.0) {
  double diameter = std::sqrt(m.total_area) * 2.0 + 10.0 * m.mean_edge_len;
  if (max_len < 0.0) max_len = 400.0 * m.mean_edge_len + 20.0;
  double bscale = 0.0;
  for (int f = 0; f < m.n_faces(); ++f) bscale = std::max(bscale, face_covector(beta, f).norm());

  std::vector<Vec2> candidates = direction_candidates(m, beta, face);

  SurfacePath best;
  double best_margin = -std::numeric_limits<double>::infinity();
  double best_len = std::numeric_limits<double>::infinity();
  // two phases: short exact closures first, then jogged recurrence closures
  for (int phase = 0; phase < 2 && !best.closed; ++phase) {
    for (const Vec2& d : candidates) {
      if (face_covector(beta, face).dot(d) <= 0.15 * bscale) continue;
      TraceOptions opt;
      opt.max_len = phase == 0 ? std::min(max_len, 4.0 * diameter) : max_len;
      opt.close_tol = 1e-7 * m.mean_edge_len;
      opt.jog_window = phase == 0 ? 0.0 : 0.35 * m.mean_edge_len;
      TraceResult tr;
      try {
        tr = trace_from(m, face, start, d, opt);
      } catch (const TraceError&) {
        continue;
      }
      if (tr.stop != TraceStop::Closed) continue;
      double mg = transversality_margin(tr.path, beta);
      if (mg <= 0.0) continue;
      double len = tr.path.length();
      bool better = !best.closed || (len < 0.75 * best_len) ||
                    (len < 1.25 * best_len && mg > best_margin);
      if (better) {
        best_margin = mg;
        best_len = len;
        best = std::move(tr.path);
      }
      if (best_margin > 0.5 * bscale && best_len < 2.5 * diameter) break;
    }
  }
  if (!best.closed || best_margin <= 0.0)
    throw TraceError("closed_transversal: no closed positive-margin curve found (budget "
                     "exhausted; discretization may be too coarse)");
  return best;
}

// Embedded transverse path from a negative zero to a positive zero along mesh
// edges, maximizing the minimal edge margin beta(e)/|e| (binary search over
// the margin with BFS feasibility).
inline SurfacePath transverse_path(const TriangulatedSurface& m, const DiscreteOneForm& beta,
                                   int from_vertex, int to_vertex) {
  if (from_vertex == to_vertex) throw TraceError("transverse_path: endpoints coincide");
  struct Arc {
    int to, edge;
    double margin;
  };
  std::vector<std::vector<Arc>> adj(m.nv);
  double max_margin = 0.0;
  for (int e = 0; e < m.n_edges(); ++e) {
    const auto& E = m.edges[e];
    double mg = beta.values[e] / E.len;
    adj[E.v0].push_back({E.v1, e, mg});
    adj[E.v1].push_back({E.v0, e, -mg});
    max_margin = std::max(max_margin, std::abs(mg));
  }
  auto reachable = [&](double thresh, std::vector<int>* parent_edge) {
    std::vector<char> seen(m.nv, 0);
    std::deque<int> q{from_vertex};
    seen[from_vertex] = 1;
    if (parent_edge) parent_edge->assign(m.nv, -1);
    while (!q.empty()) {
      int v = q.front();
      q.pop_front();
      if (v == to_vertex) return true;
      for (const Arc& a : adj[v]) {
        if (seen[a.to] || a.margin < thresh) continue;
        seen[a.to] = 1;
        if (parent_edge) (*parent_edge)[a.to] = a.edge;
        q.push_back(a.to);
      }
    }
    return false;
  };
  if (!reachable(0.0, nullptr))
    throw TraceError("transverse_path: no positively transverse edge path exists");
  double lo = 0.0, hi = max_margin;
  for (int it = 0; it < 40; ++it) {
    double mid = 0.5 * (lo + hi);
    if (reachable(mid, nullptr)) lo = mid;
    else hi = mid;
  }
  if (lo <= 0.0)
    throw TraceError("transverse_path: best path has nonpositive interior margin");
  std::vector<int> parent_edge;
  if (!reachable(lo * 0.999, &parent_edge))
    throw TraceError("transverse_path: margin search failed");
  // walk back to_vertex -> from_vertex
  std::vector<int> edges;
  int v = to_vertex;
  while (v != from_vertex) {
    int e = parent_edge[v];
    if (e < 0) throw TraceError("transverse_path: broken parent chain");
    edges.push_back(e);
    v = (m.edges[e].v0 == v) ? m.edges[e].v1 : m.edges[e].v0;
  }
  std::reverse(edges.begin(), edges.end());
  SurfacePath path;
  int cur = from_vertex;
  for (int e : edges) {
    const auto& E = m.edges[e];
    int f = E.f[0], s = E.side[0];
    Vec2 A = m.faces[f].p[s], B = m.faces[f].p[(s + 1) % 3];
    bool forward = (E.v0 == cur);
    path.segs.push_back({f, forward ? A : B, forward ? B : A});
    cur = forward ? E.v1 : E.v0;
  }
  return path;
}

}  // namespace spineform
