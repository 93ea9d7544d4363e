#pragma once

// Closed oriented triangulated surfaces with per-face 2D charts.
//
// Meshes are assembled from "glued triangle soup": faces with chart corner
// coordinates plus an explicit half-edge pairing. Vertices are derived by
// union-find over the pairing, so glued polygon models (where distinct edges
// can share the same vertex pair) are handled exactly.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace spineform {

struct MeshError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Vec2 = Eigen::Vector2d;

// Orientation-preserving rigid motion x -> R x + t.
struct Rigid2 {
  double c = 1.0, s = 0.0;
  Vec2 t = Vec2::Zero();
  Vec2 apply(const Vec2& p) const { return Vec2(c * p.x() - s * p.y(), s * p.x() + c * p.y()) + t; }
  Vec2 rotate(const Vec2& v) const { return Vec2(c * v.x() - s * v.y(), s * v.x() + c * v.y()); }
};

struct GluedTriangles {
  struct Tri {
    std::array<Vec2, 3> p;  // chart corners, ccw
  };
  std::vector<Tri> tris;
  // adj[f][s] = (g, t): side s of face f (corners s -> s+1) is glued to side t
  // of face g, traversed oppositely.
  std::vector<std::array<std::pair<int, int>, 3>> adj;

  void check_paired() const {
    for (size_t f = 0; f < tris.size(); ++f)
      for (int s = 0; s < 3; ++s) {
        auto [g, t] = adj[f][s];
        if (g < 0 || g >= static_cast<int>(tris.size()) || adj[g][t] != std::make_pair((int)f, s))
          throw MeshError("half-edge pairing is not an involution (surface not closed)");
      }
  }
};

// Midpoint 4-split; children keep the parent's chart.
inline GluedTriangles subdivide(const GluedTriangles& in) {
  GluedTriangles out;
  const int nf = static_cast<int>(in.tris.size());
  out.tris.resize(4 * nf);
  out.adj.resize(4 * nf);
  // children 0,1,2 at the corners, child 3 the central (inverted) triangle
  auto child = [](int f, int k) { return 4 * f + k; };
  for (int f = 0; f < nf; ++f) {
    const auto& P = in.tris[f].p;
    std::array<Vec2, 3> m{(P[0] + P[1]) / 2, (P[1] + P[2]) / 2, (P[2] + P[0]) / 2};
    out.tris[child(f, 0)].p = {P[0], m[0], m[2]};
    out.tris[child(f, 1)].p = {P[1], m[1], m[0]};
    out.tris[child(f, 2)].p = {P[2], m[2], m[1]};
    out.tris[child(f, 3)].p = {m[0], m[1], m[2]};
    // interior pairings with the central child
    out.adj[child(f, 0)][1] = {child(f, 3), 2};  // m0-m2
    out.adj[child(f, 3)][2] = {child(f, 0), 1};
    out.adj[child(f, 1)][1] = {child(f, 3), 0};  // m1-m0
    out.adj[child(f, 3)][0] = {child(f, 1), 1};
    out.adj[child(f, 2)][1] = {child(f, 3), 1};  // m2-m1
    out.adj[child(f, 3)][1] = {child(f, 2), 1};
  }
  // parent side s of f: halves are (child s, side 0) then (child s+1, side 2).
  // A partner side t of g runs oppositely, so the first half of (f,s) glues to
  // the second half of (g,t).
  for (int f = 0; f < nf; ++f)
    for (int s = 0; s < 3; ++s) {
      auto [g, t] = in.adj[f][s];
      int f_first = child(f, s), f_second = child(f, (s + 1) % 3);
      int g_first = child(g, t), g_second = child(g, (t + 1) % 3);
      out.adj[f_first][0] = {g_second, 2};
      out.adj[g_second][2] = {f_first, 0};
      out.adj[f_second][2] = {g_first, 0};
      out.adj[g_first][0] = {f_second, 2};
    }
  return out;
}

struct TriangulatedSurface {
  struct Face {
    std::array<int, 3> v;       // vertex ids, ccw
    std::array<int, 3> e;       // edge ids; side i joins corners i, i+1
    std::array<int, 3> esign;   // +1 when side i agrees with the edge orientation
    std::array<Vec2, 3> p;      // chart corner positions
    std::array<int, 3> nbr;     // neighbor face across side i
    std::array<int, 3> nbrside; // matching side index in the neighbor
    double area = 0.0;
    std::array<double, 3> angle{};  // corner angles
  };
  struct Edge {
    int v0 = -1, v1 = -1;            // orientation v0 -> v1
    std::array<int, 2> f{-1, -1};    // [0] traverses v0->v1, [1] the reverse
    std::array<int, 2> side{-1, -1};
    double len = 0.0;
  };

  int nv = 0;
  std::vector<Face> faces;
  std::vector<Edge> edges;
  std::vector<double> cone_angle;                     // per vertex
  std::vector<std::vector<std::pair<int, int>>> star; // per vertex: ccw (face, corner) fan
  int genus = 0;
  double total_area = 0.0;
  double mean_edge_len = 0.0;

  int n_faces() const { return static_cast<int>(faces.size()); }
  int n_edges() const { return static_cast<int>(edges.size()); }

  Vec2 edge_vec_in_face(int e, int fslot) const {
    const Edge& ed = edges[e];
    int f = ed.f[fslot], s = ed.side[fslot];
    Vec2 d = faces[f].p[(s + 1) % 3] - faces[f].p[s];
    return fslot == 0 ? d : Vec2(-d);  // report in the edge's v0->v1 orientation
  }

  // Rigid motion taking the chart of the face across edge e into face f's chart.
  Rigid2 transition_into(int f, int side) const {
    const Face& F = faces[f];
    int g = F.nbr[side], t = F.nbrside[side];
    const Face& G = faces[g];
    // shared edge endpoints: F corners (side, side+1) = G corners (t+1, t)
    Vec2 a_f = F.p[side], b_f = F.p[(side + 1) % 3];
    Vec2 a_g = G.p[(t + 1) % 3], b_g = G.p[t];
    Vec2 u = b_f - a_f, w = b_g - a_g;
    double nu = u.norm(), nw = w.norm();
    double c = (u.dot(w)) / (nu * nw);
    double s = (u.x() * w.y() - u.y() * w.x()) / (nu * nw);
    // rotation mapping w to u is the inverse rotation
    Rigid2 r;
    r.c = c;
    r.s = -s;
    // snap numerically exact alignments (translation gluings)
    if (std::abs(r.s) < 1e-14 && std::abs(r.c - 1.0) < 1e-14) { r.c = 1.0; r.s = 0.0; }
    r.t = a_f - r.rotate(a_g);
    return r;
  }

  Vec2 face_centroid(int f) const { return (faces[f].p[0] + faces[f].p[1] + faces[f].p[2]) / 3.0; }

  int corner_of(int f, int v) const {
    for (int i = 0; i < 3; ++i)
      if (faces[f].v[i] == v) return i;
    return -1;
  }
};

namespace detail {
struct UnionFind {
  std::vector<int> p;
  explicit UnionFind(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int a) {
    while (p[a] != a) a = p[a] = p[p[a]];
    return a;
  }
  void unite(int a, int b) { p[find(a)] = find(b); }
};
}  // namespace detail

inline TriangulatedSurface finalize(const GluedTriangles& g) {
  g.check_paired();
  const int nf = static_cast<int>(g.tris.size());
  TriangulatedSurface m;
  m.faces.resize(nf);

  // identify corners across glued sides
  detail::UnionFind uf(3 * nf);
  auto cid = [](int f, int c) { return 3 * f + c; };
  for (int f = 0; f < nf; ++f)
    for (int s = 0; s < 3; ++s) {
      auto [h, t] = g.adj[f][s];
      uf.unite(cid(f, s), cid(h, (t + 1) % 3));
      uf.unite(cid(f, (s + 1) % 3), cid(h, t));
    }
  std::map<int, int> root_to_vid;
  for (int f = 0; f < nf; ++f)
    for (int c = 0; c < 3; ++c) {
      int r = uf.find(cid(f, c));
      auto it = root_to_vid.find(r);
      int vid = (it == root_to_vid.end()) ? (root_to_vid[r] = static_cast<int>(root_to_vid.size()))
                                          : it->second;
      m.faces[f].v[c] = vid;
    }
  m.nv = static_cast<int>(root_to_vid.size());

  // geometry per face
  for (int f = 0; f < nf; ++f) {
    auto& F = m.faces[f];
    F.p = g.tris[f].p;
    Vec2 u = F.p[1] - F.p[0], w = F.p[2] - F.p[0];
    F.area = 0.5 * (u.x() * w.y() - u.y() * w.x());
    if (!(F.area > 0.0)) throw MeshError("face " + std::to_string(f) + " is not positively oriented");
    for (int c = 0; c < 3; ++c) {
      Vec2 e1 = F.p[(c + 1) % 3] - F.p[c];
      Vec2 e2 = F.p[(c + 2) % 3] - F.p[c];
      F.angle[c] = std::atan2(std::abs(e1.x() * e2.y() - e1.y() * e2.x()), e1.dot(e2));
    }
    m.total_area += F.area;
  }

  // edges: one per half-edge pair
  std::vector<std::array<bool, 3>> seen(nf, {false, false, false});
  for (int f = 0; f < nf; ++f)
    for (int s = 0; s < 3; ++s) {
      if (seen[f][s]) continue;
      auto [h, t] = g.adj[f][s];
      seen[f][s] = seen[h][t] = true;
      TriangulatedSurface::Edge e;
      e.v0 = m.faces[f].v[s];
      e.v1 = m.faces[f].v[(s + 1) % 3];
      e.f = {f, h};
      e.side = {s, t};
      double lf = (g.tris[f].p[(s + 1) % 3] - g.tris[f].p[s]).norm();
      double lh = (g.tris[h].p[(t + 1) % 3] - g.tris[h].p[t]).norm();
      if (std::abs(lf - lh) > 1e-9 * std::max(1.0, lf))
        throw MeshError("glued side lengths disagree across an edge");
      e.len = lf;
      int eid = static_cast<int>(m.edges.size());
      m.edges.push_back(e);
      m.faces[f].e[s] = eid;
      m.faces[f].esign[s] = +1;
      m.faces[h].e[t] = eid;
      m.faces[h].esign[t] = -1;
      m.faces[f].nbr[s] = h;
      m.faces[f].nbrside[s] = t;
      m.faces[h].nbr[t] = f;
      m.faces[h].nbrside[t] = s;
    }
  for (const auto& e : m.edges) m.mean_edge_len += e.len;
  m.mean_edge_len /= static_cast<double>(m.edges.size());

  int chi = m.nv - m.n_edges() + m.n_faces();
  if (chi % 2 != 0) throw MeshError("odd Euler characteristic");
  m.genus = (2 - chi) / 2;
  if (m.genus < 0) throw MeshError("negative genus");

  // ordered vertex stars and cone angles
  m.star.assign(m.nv, {});
  m.cone_angle.assign(m.nv, 0.0);
  std::vector<char> corner_done(3 * nf, 0);
  for (int f0 = 0; f0 < nf; ++f0)
    for (int c0 = 0; c0 < 3; ++c0) {
      if (corner_done[3 * f0 + c0]) continue;
      int v = m.faces[f0].v[c0];
      std::vector<std::pair<int, int>> fan;
      int f = f0, c = c0;
      do {
        corner_done[3 * f + c] = 1;
        fan.emplace_back(f, c);
        m.cone_angle[v] += m.faces[f].angle[c];
        int side_in = (c + 2) % 3;  // side arriving at v
        int gf = m.faces[f].nbr[side_in];
        int gt = m.faces[f].nbrside[side_in];
        f = gf;
        c = gt;  // v sits at corner t of the neighbor
        if (m.faces[f].v[c] != v) throw MeshError("vertex star walk lost its vertex");
      } while (!(f == f0 && c == c0));
      if (!m.star[v].empty()) throw MeshError("vertex link is not a single cycle");
      m.star[v] = std::move(fan);
    }
  return m;
}

// -------------------------------------------------------------------------
// Builders

// Flat square torus: n x n unit-cell grid (side length 1), each cell split
// along the (+1,+1) diagonal; 2 n^2 faces. Requires n >= 3 so vertex pairs
// identify edges uniquely.
inline TriangulatedSurface make_square_torus(int n) {
  if (n < 3) throw MeshError("make_square_torus: n >= 3 required");
  GluedTriangles g;
  const double h = 1.0 / n;
  auto fid = [&](int i, int j, int k) { return 2 * (i * n + j) + k; };
  g.tris.resize(2 * n * n);
  g.adj.resize(2 * n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double x = i * h, y = j * h;
      // lower: (x,y) (x+h,y) (x+h,y+h); upper: (x,y) (x+h,y+h) (x,y+h)
      g.tris[fid(i, j, 0)].p = {Vec2(x, y), Vec2(x + h, y), Vec2(x + h, y + h)};
      g.tris[fid(i, j, 1)].p = {Vec2(x, y), Vec2(x + h, y + h), Vec2(x, y + h)};
      int ip = (i + 1) % n, im = (i + n - 1) % n, jp = (j + 1) % n, jm = (j + n - 1) % n;
      // lower sides: 0 bottom, 1 right, 2 diagonal
      g.adj[fid(i, j, 0)][0] = {fid(i, jm, 1), 1};
      g.adj[fid(i, j, 0)][1] = {fid(ip, j, 1), 2};
      g.adj[fid(i, j, 0)][2] = {fid(i, j, 1), 0};
      // upper sides: 0 diagonal, 1 top, 2 left
      g.adj[fid(i, j, 1)][0] = {fid(i, j, 0), 2};
      g.adj[fid(i, j, 1)][1] = {fid(i, jp, 0), 0};
      g.adj[fid(i, j, 1)][2] = {fid(im, j, 0), 1};
    }
  return finalize(g);
}

// A polygon with translation side-pairings, triangulated by a centroid fan
// and midpoint-subdivided `refine` times. Pairing (a, b) glues side a to side
// b; the sides must be parallel, equal length, oppositely traversed.
struct PolygonGluing {
  std::vector<Vec2> corners;                  // ccw
  std::vector<std::pair<int, int>> pairings;  // side i = corner i -> corner i+1
  int refine = 0;
};

inline TriangulatedSurface make_polygon_surface(const PolygonGluing& pg) {
  const int k = static_cast<int>(pg.corners.size());
  if (k < 3) throw MeshError("polygon needs at least 3 corners");
  std::vector<int> partner(k, -1);
  for (auto [a, b] : pg.pairings) {
    if (a < 0 || b < 0 || a >= k || b >= k || partner[a] != -1 || partner[b] != -1)
      throw MeshError("invalid side pairing");
    partner[a] = b;
    partner[b] = a;
    Vec2 da = pg.corners[(a + 1) % k] - pg.corners[a];
    Vec2 db = pg.corners[(b + 1) % k] - pg.corners[b];
    if ((da + db).norm() > 1e-9 * da.norm())
      throw MeshError("paired sides are not opposite translates");
  }
  for (int s = 0; s < k; ++s)
    if (partner[s] < 0) throw MeshError("unpaired polygon side " + std::to_string(s));

  Vec2 c = Vec2::Zero();
  for (const auto& p : pg.corners) c += p;
  c /= static_cast<double>(k);

  GluedTriangles g;
  g.tris.resize(k);
  g.adj.resize(k);
  for (int i = 0; i < k; ++i) {
    g.tris[i].p = {c, pg.corners[i], pg.corners[(i + 1) % k]};
    // side 0: spoke to corner i; side 1: boundary side i; side 2: spoke back
    g.adj[i][0] = {(i + k - 1) % k, 2};
    g.adj[i][2] = {(i + 1) % k, 0};
    g.adj[i][1] = {partner[i], 1};
  }
  GluedTriangles cur = std::move(g);
  for (int r = 0; r < pg.refine; ++r) cur = subdivide(cur);
  return finalize(cur);
}

inline PolygonGluing regular_ngon_opposite(int sides, int refine, double circumradius = 1.0) {
  if (sides % 2 != 0) throw MeshError("opposite-side gluing needs an even polygon");
  PolygonGluing pg;
  pg.refine = refine;
  for (int i = 0; i < sides; ++i) {
    double a = 2.0 * M_PI * (i + 0.5) / sides;  // flat bottom/top
    pg.corners.emplace_back(circumradius * std::cos(a), circumradius * std::sin(a));
  }
  for (int i = 0; i < sides / 2; ++i) pg.pairings.emplace_back(i, i + sides / 2);
  return pg;
}

// genus 2, one cone point of angle 6 pi (a degenerate-zero model)
inline TriangulatedSurface make_octagon_surface(int refine) {
  return make_polygon_surface(regular_ngon_opposite(8, refine));
}
// genus 2, two cone points of angle 4 pi (nondegenerate zeros)
inline TriangulatedSurface make_decagon_surface(int refine) {
  return make_polygon_surface(regular_ngon_opposite(10, refine));
}

// -------------------------------------------------------------------------
// Parsers

// OFF-style text: header "OFF", counts line, vertex xyz lines, face lines
// "3 a b c". Faces are laid out intrinsically from the 3D edge lengths.
inline TriangulatedSurface load_off(std::istream& in) {
  std::string tok;
  int lineno = 0;
  auto next_data_line = [&](std::string& line) {
    while (std::getline(in, line)) {
      ++lineno;
      auto h = line.find('#');
      if (h != std::string::npos) line = line.substr(0, h);
      if (line.find_first_not_of(" \t\r\n") != std::string::npos) return true;
    }
    return false;
  };
  std::string line;
  if (!next_data_line(line)) throw MeshError("OFF parse error at line 1: empty file");
  {
    std::istringstream ls(line);
    ls >> tok;
    if (tok != "OFF") throw MeshError("OFF parse error at line " + std::to_string(lineno) +
                                      ": expected OFF header");
  }
  if (!next_data_line(line))
    throw MeshError("OFF parse error at line " + std::to_string(lineno) + ": missing counts");
  int nv = 0, nf = 0, ne = 0;
  {
    std::istringstream ls(line);
    if (!(ls >> nv >> nf >> ne))
      throw MeshError("OFF parse error at line " + std::to_string(lineno) + ": bad counts line");
  }
  std::vector<Eigen::Vector3d> pos(nv);
  for (int i = 0; i < nv; ++i) {
    if (!next_data_line(line))
      throw MeshError("OFF parse error at line " + std::to_string(lineno) + ": missing vertex");
    std::istringstream ls(line);
    if (!(ls >> pos[i].x() >> pos[i].y() >> pos[i].z()))
      throw MeshError("OFF parse error at line " + std::to_string(lineno) + ": bad vertex line");
  }
  std::vector<std::array<int, 3>> fcs(nf);
  for (int i = 0; i < nf; ++i) {
    if (!next_data_line(line))
      throw MeshError("OFF parse error at line " + std::to_string(lineno) + ": missing face");
    std::istringstream ls(line);
    int cnt;
    if (!(ls >> cnt >> fcs[i][0] >> fcs[i][1] >> fcs[i][2]) || cnt != 3)
      throw MeshError("OFF parse error at line " + std::to_string(lineno) +
                      ": only triangle faces are supported");
  }

  GluedTriangles g;
  g.tris.resize(nf);
  g.adj.resize(nf);
  // pair half-edges by vertex keys
  std::map<std::pair<int, int>, std::pair<int, int>> open;
  for (int f = 0; f < nf; ++f) {
    auto [a, b, cc] = fcs[f];
    double lab = (pos[a] - pos[b]).norm(), lbc = (pos[b] - pos[cc]).norm(),
           lca = (pos[cc] - pos[a]).norm();
    if (lab + lbc <= lca || lbc + lca <= lab || lca + lab <= lbc)
      throw MeshError("face " + std::to_string(f) + " violates the strict triangle inequality");
    double x = (lab * lab + lca * lca - lbc * lbc) / (2.0 * lab);
    double y2 = lca * lca - x * x;
    g.tris[f].p = {Vec2(0, 0), Vec2(lab, 0), Vec2(x, std::sqrt(std::max(0.0, y2)))};
    std::array<int, 3> vv{a, b, cc};
    for (int s = 0; s < 3; ++s) {
      int u = vv[s], w = vv[(s + 1) % 3];
      auto it = open.find({w, u});
      if (it != open.end()) {
        auto [h, t] = it->second;
        g.adj[f][s] = {h, t};
        g.adj[h][t] = {f, s};
        open.erase(it);
      } else if (open.count({u, w})) {
        throw MeshError("OFF mesh is not consistently oriented at edge (" + std::to_string(u) +
                        "," + std::to_string(w) + ")");
      } else {
        open[{u, w}] = {f, s};
      }
    }
  }
  if (!open.empty()) throw MeshError("OFF mesh has boundary; closed surfaces only");
  return finalize(g);
}

inline TriangulatedSurface load_off_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file: " + path);
  return load_off(in);
}

// Polygon-gluing text format:
//   polygon <k>
//   <x> <y>          (k corner lines, ccw)
//   pair <a> <b>     (k/2 lines)
//   refine <m>       (optional)
inline PolygonGluing load_polygon_gluing(std::istream& in) {
  PolygonGluing pg;
  std::string line, tok;
  int lineno = 0, want_corners = -1;
  while (std::getline(in, line)) {
    ++lineno;
    auto h = line.find('#');
    if (h != std::string::npos) line = line.substr(0, h);
    std::istringstream ls(line);
    if (!(ls >> tok)) continue;
    if (tok == "polygon") {
      if (!(ls >> want_corners) || want_corners < 3)
        throw MeshError("polygon parse error at line " + std::to_string(lineno));
    } else if (tok == "pair") {
      int a, b;
      if (!(ls >> a >> b)) throw MeshError("polygon parse error at line " + std::to_string(lineno));
      pg.pairings.emplace_back(a, b);
    } else if (tok == "refine") {
      if (!(ls >> pg.refine)) throw MeshError("polygon parse error at line " + std::to_string(lineno));
    } else {
      std::istringstream ls2(line);
      double x, y;
      if (!(ls2 >> x >> y))
        throw MeshError("polygon parse error at line " + std::to_string(lineno) + ": '" + line + "'");
      pg.corners.emplace_back(x, y);
    }
  }
  if (want_corners != static_cast<int>(pg.corners.size()))
    throw MeshError("polygon corner count mismatch");
  return pg;
}

inline TriangulatedSurface load_polygon_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open polygon file: " + path);
  return make_polygon_surface(load_polygon_gluing(in));
}

}  // namespace spineform
