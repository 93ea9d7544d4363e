#pragma once

// Poincare-dual bump forms of closed transversals, and the greedy strip
// cover of the complement of the zero neighborhoods.
//
// A bump is built from the signed transverse offset u of the strip: every
// vertex near the curve gets the value of a monotone ramp PhiInt(u), and the
// edge values are the differences. The ramp saturates to 0/1 inside the
// assigned zone, so triangle sums telescope to zero exactly, loop periods
// count strip crossings (intersection numbers), and the per-face covector is
// a nonnegative multiple of the strip conormal, which makes the pairing with
// the traced form nonnegative wherever the trace had positive margin.

#include "spineform/cutoffs.hpp"
#include "spineform/tracing.hpp"

namespace spineform {

struct BumpForm {
  DiscreteOneForm form;
  SurfacePath core;
  double width = 0.0;
  std::vector<char> support_face;  // faces carrying a nonzero value
};

// The crossing cocycle of a closed traced path: value on edge e is the sum of
// crossing signs det[path direction, edge direction]. Exactly closed, with
// periods equal to intersection numbers against the path; used as an
// independent period oracle for the potential-based bumps.
inline DiscreteOneForm crossing_cocycle(const TriangulatedSurface& m, const TraceResult& tr) {
  DiscreteOneForm z(m);
  for (auto [f, side, sgn] : tr.crossings) {
    // sgn was recorded as sign(ev x d); det[d, ev] is its negative
    int e = m.faces[f].e[side];
    z.values[e] += m.faces[f].esign[side] * (-sgn);
  }
  return z;
}

// Builds the offset-potential bump around a closed traced transversal. The
// curve may develop as several parallel strands; each strand keeps its own
// transported line and zone, and every edge takes its ramp difference from
// the nearest strand, so triangle sums telescope strand by strand.
inline BumpForm pd_bump(const TriangulatedSurface& m, const DiscreteOneForm& beta,
                        const TraceResult& trace, double width) {
  if (!trace.path.closed) throw TraceError("pd_bump: curve is not closed");
  BumpForm bump;
  bump.width = width;
  bump.core = trace.path;
  bump.form = DiscreteOneForm(m);
  bump.support_face.assign(m.n_faces(), 0);

  struct Line {
    Vec2 p, d;
  };
  auto offset_of = [](const Line& L, const Vec2& x) {
    Vec2 w2 = x - L.p;
    return L.d.x() * w2.y() - L.d.y() * w2.x();
  };

  // strand records: one per visit, skipping re-visits on the same line
  struct Record {
    int face;
    Line line;
  };
  std::vector<Record> recs;
  std::vector<std::vector<int>> recs_at(m.n_faces());
  for (const auto& seg : trace.path.segs) {
    Vec2 d = seg.b - seg.a;
    double n = d.norm();
    if (n < 1e-12 * m.mean_edge_len) continue;
    Line L{seg.a, d / n};
    bool dup = false;
    for (int ri : recs_at[seg.face]) {
      double off = std::abs(offset_of(recs[ri].line, seg.a));
      if (off < 0.3 * width) {
        dup = true;  // same strand continuing or closing up
        break;
      }
      if (off < 1.6 * width)
        throw TraceError("pd_bump: strip self-overlap (reduce width)");
    }
    if (!dup) {
      recs_at[seg.face].push_back(static_cast<int>(recs.size()));
      recs.push_back({seg.face, L});
    }
  }
  if (recs.empty()) throw TraceError("pd_bump: empty trace");

  double max_edge = 0.0;
  for (const auto& e : m.edges) max_edge = std::max(max_edge, e.len);
  double half = width / 2.0;
  StepUp ramp{-half, half};
  double reach = half + 1.3 * max_edge;

  // per record: transported line on every face of its zone (faces whose
  // corners come within `reach` of the line). A zone that meets itself with a
  // different transported line has wrapped around the surface: the strip is
  // too wide for this region.
  struct ZoneEntry {
    int rec;
    Line line;
  };
  std::vector<double> face_diam(m.n_faces(), 0.0);
  for (int f = 0; f < m.n_faces(); ++f)
    for (int s = 0; s < 3; ++s)
      face_diam[f] = std::max(face_diam[f], m.edges[m.faces[f].e[s]].len);

  std::vector<std::vector<ZoneEntry>> zone(m.n_faces());
  for (size_t ri = 0; ri < recs.size(); ++ri) {
    std::map<int, Line> zl;
    std::deque<int> q{recs[ri].face};
    zl[recs[ri].face] = recs[ri].line;
    while (!q.empty()) {
      int f = q.front();
      q.pop_front();
      Line L = zl[f];
      for (int s = 0; s < 3; ++s) {
        int g = m.faces[f].nbr[s];
        Rigid2 r = m.transition_into(g, m.faces[f].nbrside[s]);
        Line Lg{r.apply(L.p), r.rotate(L.d)};
        Vec2 c = m.face_centroid(g);
        double relevant = half + 0.6 * face_diam[g];
        auto it = zl.find(g);
        if (it != zl.end()) {
          double o_new = std::abs(offset_of(Lg, c));
          double o_old = std::abs(offset_of(it->second, c));
          double mism = std::abs(offset_of(Lg, c) - offset_of(it->second, c)) +
                        (Lg.d - it->second.d).norm() * (1.0 + o_new);
          if (mism <= 1e-6 * (1.0 + o_new)) continue;  // same branch
          // the zone met itself around a loop: fatal only when both branches
          // can contribute non-saturated values to this face
          if (o_new < relevant && o_old < relevant)
            throw TraceError("pd_bump: strip zone wraps around the surface (reduce width)");
          if (o_new < o_old) {
            it->second = Lg;
            q.push_back(g);
          }
          continue;
        }
        double dmin = std::numeric_limits<double>::infinity();
        for (int cc = 0; cc < 3; ++cc)
          dmin = std::min(dmin, std::abs(offset_of(Lg, m.faces[g].p[cc])));
        if (dmin > reach) continue;
        zl[g] = Lg;
        q.push_back(g);
      }
    }
    for (auto& [f, L] : zl) zone[f].push_back({static_cast<int>(ri), L});
  }
  // distinct strands whose supports meet would shadow each other
  for (int f = 0; f < m.n_faces(); ++f) {
    Vec2 c = m.face_centroid(f);
    double relevant = half + 0.6 * face_diam[f];
    for (size_t i = 0; i < zone[f].size(); ++i)
      for (size_t j = i + 1; j < zone[f].size(); ++j) {
        double oi = offset_of(zone[f][i].line, c), oj = offset_of(zone[f][j].line, c);
        double gap = std::abs(oi - oj);
        if (gap > 0.05 * half && std::abs(oi) < relevant && std::abs(oj) < relevant)
          throw TraceError("pd_bump: strip self-overlap between strands (reduce width)");
      }
  }

  // edge values from the nearest strand's ramp difference
  for (int e = 0; e < m.n_edges(); ++e) {
    const auto& E = m.edges[e];
    int f0 = E.f[0], s0 = E.side[0];
    Vec2 a = m.faces[f0].p[s0];
    Vec2 b = m.faces[f0].p[(s0 + 1) % 3];
    Vec2 mid = 0.5 * (a + b);
    const Line* best = nullptr;
    double bestd = std::numeric_limits<double>::infinity();
    for (const auto& ze : zone[f0]) {
      double d = std::abs(offset_of(ze.line, mid));
      if (d < bestd) {
        bestd = d;
        best = &ze.line;
      }
    }
    if (!best || bestd > half + 1.5 * m.mean_edge_len) continue;
    // edge runs v0 -> v1; side 0 of slot-0 face traverses it forwards
    double val = ramp(offset_of(*best, b)) - ramp(offset_of(*best, a));
    if (val != 0.0) {
      bump.form.values[e] = val;
      bump.support_face[E.f[0]] = 1;
      bump.support_face[E.f[1]] = 1;
    }
  }

  if (bump.form.closedness_residual() > 1e-12)
    throw TraceError("pd_bump: bump failed to close (zone too small for the width)");
  double bscale = 0.0;
  for (int f = 0; f < m.n_faces(); ++f)
    bscale = std::max(bscale, face_covector(beta, f).norm());
  double pscale = std::max(1.0, bump.form.max_abs() / m.mean_edge_len);
  for (int f = 0; f < m.n_faces(); ++f)
    if (wedge_face_density(beta, bump.form, f) < -1e-10 * bscale * pscale)
      throw TraceError("pd_bump: pairing with the form dips negative on face " +
                       std::to_string(f));
  return bump;
}

// convenience: trace then bump
inline BumpForm pd_bump(const TriangulatedSurface& m, const DiscreteOneForm& beta, int face,
                        Vec2 start, Vec2 dir, double width, double max_len = -1.0) {
  if (max_len < 0.0) max_len = 400.0 * m.mean_edge_len + 20.0;
  TraceOptions opt;
  opt.max_len = max_len;
  opt.close_tol = 1e-7 * m.mean_edge_len;
  opt.jog_window = 0.35 * m.mean_edge_len;
  TraceResult tr = trace_from(m, face, start, dir.normalized(), opt);
  if (tr.stop != TraceStop::Closed) throw TraceError("pd_bump: transversal did not close");
  return pd_bump(m, beta, tr, width);
}

struct CoverOptions {
  double strip_width = -1.0;  // default: 3 mean edge lengths
  int lines_per_strip = 5;    // kept for configuration compatibility
  int budget = -1;            // default: max(4g, 32)
  double density_floor_rel = 0.02;  // coverage threshold relative to |beta|^2
  double clearance_factor = 0.8;    // strips stay this fraction inside the B-clearance
};

struct StripCover {
  std::vector<BumpForm> bumps;
  DiscreteOneForm total;            // sum of the bump forms
  std::vector<double> density;      // wedge density of beta with total, per face
  std::vector<char> target_face;    // faces required to be covered
  double min_covered_density = 0.0; // over target faces
};

// Greedy cover: for every face outside the sqrt(R0)-neighborhood of the
// zeros whose accumulated wedge density is below the floor, trace a closed
// transversal through its centroid and add its bump, until covered.
inline StripCover cover_complement_of_B(const TriangulatedSurface& m, const DiscreteOneForm& beta,
                                        double R0, const std::vector<ZeroPoint>& zeros,
                                        CoverOptions opt = {}) {
  if (opt.strip_width < 0.0) opt.strip_width = 2.0 * m.mean_edge_len;
  if (opt.budget < 0) opt.budget = std::max(4 * m.genus, 32);

  std::vector<int> zverts;
  for (const auto& z : zeros) zverts.push_back(z.vertex);
  std::vector<double> fdist(m.n_faces(), std::numeric_limits<double>::infinity());
  if (!zverts.empty()) fdist = face_distance(m, distance_to_vertices(m, zverts));

  double bscale = 0.0;
  for (int f = 0; f < m.n_faces(); ++f) bscale = std::max(bscale, face_covector(beta, f).norm());
  double floor = opt.density_floor_rel * bscale * bscale;

  StripCover cover;
  cover.total = DiscreteOneForm(m);
  cover.density.assign(m.n_faces(), 0.0);
  cover.target_face.assign(m.n_faces(), 0);
  double r0 = std::sqrt(std::max(0.0, R0));
  for (int f = 0; f < m.n_faces(); ++f) cover.target_face[f] = fdist[f] > r0 ? 1 : 0;

  for (int pass = 0; pass < 2; ++pass) {
    for (int f = 0; f < m.n_faces(); ++f) {
      if (!cover.target_face[f] || cover.density[f] >= floor) continue;
      if (static_cast<int>(cover.bumps.size()) >= opt.budget) break;
      double width = opt.strip_width;
      if (std::isfinite(fdist[f])) width = std::min(width, opt.clearance_factor * fdist[f]);
      BumpForm bump;
      bool got = false;
      try {
        SurfacePath t = closed_transversal(m, beta, f, m.face_centroid(f));
        Vec2 d0 = (t.segs.front().b - t.segs.front().a).normalized();
        // wide strips can wrap coarse regions: retry narrower before skipping
        for (int attempt = 0; attempt < 3 && !got; ++attempt, width *= 0.5) {
          try {
            bump = pd_bump(m, beta, t.segs.front().face, t.segs.front().a, d0, width);
            got = true;
          } catch (const TraceError&) {
          }
        }
      } catch (const TraceError&) {
      }
      if (!got) continue;  // another pass may cover this face from a neighbor's strip
      cover.total = cover.total + bump.form;
      cover.bumps.push_back(std::move(bump));
      for (int g = 0; g < m.n_faces(); ++g)
        cover.density[g] = wedge_face_density(beta, cover.total, g);
    }
  }
  cover.min_covered_density = std::numeric_limits<double>::infinity();
  bool any_target = false;
  for (int f = 0; f < m.n_faces(); ++f)
    if (cover.target_face[f]) {
      any_target = true;
      cover.min_covered_density = std::min(cover.min_covered_density, cover.density[f]);
    }
  if (!any_target) {
    cover.min_covered_density = 0.0;
    return cover;  // vacuously valid (R0 exceeds the surface)
  }
  if (cover.min_covered_density < floor) {
    std::string msg = "cover_complement_of_B: cover incomplete; uncovered faces:";
    int listed = 0;
    for (int g = 0; g < m.n_faces(); ++g)
      if (cover.target_face[g] && cover.density[g] < floor && listed++ < 12)
        msg += " " + std::to_string(g);
    throw TraceError(msg);
  }
  return cover;
}

}  // namespace spineform
