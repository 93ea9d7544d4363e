#pragma once

// Machine-precision reproduction of the Fubini-Study computation on the
// standard genus-1 trisection: chart primitives, the coordinate change
// between adjacent charts, the cocycle differences, and transversality of
// the three resulting linear foliations on the central torus.

#include "spineform/charts.hpp"
#include "spineform/form_field.hpp"

namespace spineform {

// chart lam (1-based, cyclic mod 3) holds polar coordinates
// (r_lam, th_lam, r_{lam+1}, th_{lam+1})
inline const Chart& fs_chart(int lam) {
  static const std::array<Chart, 3> charts{Chart{"fs1", {"ra", "tha", "rb", "thb"}},
                                           Chart{"fs2", {"ra", "tha", "rb", "thb"}},
                                           Chart{"fs3", {"ra", "tha", "rb", "thb"}}};
  return charts[(lam - 1 + 3) % 3];
}

struct FsChartPoint {
  int lam = 1;                    // chart index, 1..3
  double ra = 0, tha = 0, rb = 0, thb = 0;

  void check() const {
    if (ra < 0 || rb < 0) throw std::invalid_argument("fs chart point needs r >= 0");
  }
};

inline double fs_phi(double x, double y) { return 1.0 / (1.0 + x * x + y * y); }

// the chart primitive phi(r_a, r_b) (2 r_a^2 d th_a + 2 r_b^2 d th_b)
inline FormValue fs_primitive(const FsChartPoint& p) {
  p.check();
  const Chart& ch = fs_chart(p.lam);
  FormValue f(ch, 1);
  double phi = fs_phi(p.ra, p.rb);
  f[ch.axis("tha")] = phi * 2.0 * p.ra * p.ra;
  f[ch.axis("thb")] = phi * 2.0 * p.rb * p.rb;
  return f;
}

// analytic exterior derivative of the primitive (the chart form of the
// ambient Kaehler 2-form)
inline FormValue fs_primitive_d(const FsChartPoint& p) {
  const Chart& ch = fs_chart(p.lam);
  double phi = fs_phi(p.ra, p.rb);
  double dphi_da = -2.0 * p.ra * phi * phi;
  double dphi_db = -2.0 * p.rb * phi * phi;
  double ga = phi * 2.0 * p.ra * p.ra;  // coefficient of d th_a
  double gb = phi * 2.0 * p.rb * p.rb;
  double dga_da = dphi_da * 2.0 * p.ra * p.ra + phi * 4.0 * p.ra;
  double dga_db = dphi_db * 2.0 * p.ra * p.ra;
  double dgb_da = dphi_da * 2.0 * p.rb * p.rb;
  double dgb_db = dphi_db * 2.0 * p.rb * p.rb + phi * 4.0 * p.rb;
  (void)ga;
  (void)gb;
  FormValue out(ch, 2);
  int ra = ch.axis("ra"), tha = ch.axis("tha"), rb = ch.axis("rb"), thb = ch.axis("thb");
  out.add_term(std::array<int, 2>{ra, tha}, dga_da);
  out.add_term(std::array<int, 2>{rb, tha}, dga_db);
  out.add_term(std::array<int, 2>{ra, thb}, dgb_da);
  out.add_term(std::array<int, 2>{rb, thb}, dgb_db);
  return out;
}

// the chart change from chart lam to chart lam-1: s_lam = r_lam / r_{lam+1},
// psi_lam = th_lam - th_{lam+1}, s_{lam-1} = 1 / r_{lam+1},
// psi_{lam-1} = -th_{lam+1}
inline FsChartPoint fs_chart_change(const FsChartPoint& p) {
  if (p.rb <= 0.0)
    throw std::invalid_argument("fs_chart_change undefined where the shared radius vanishes");
  FsChartPoint q;
  q.lam = (p.lam - 2 + 3) % 3 + 1;  // lam - 1, cyclic 1..3
  q.ra = 1.0 / p.rb;                // s_{lam-1}
  q.tha = -p.thb;                   // psi_{lam-1}
  q.rb = p.ra / p.rb;               // s_lam
  q.thb = p.tha - p.thb;            // psi_lam
  return q;
}

// pullback of a 1-form on chart lam-1 through the chart change, expressed in
// chart lam covectors
inline FormValue fs_pullback_to(const FsChartPoint& p, const FormValue& on_prev) {
  const Chart& src = fs_chart((p.lam - 2 + 3) % 3 + 1);
  const Chart& dst = fs_chart(p.lam);
  if (!same_chart(on_prev.chart(), src))
    throw std::invalid_argument("fs_pullback_to: form not on the previous chart");
  double rb2 = p.rb * p.rb;
  // d s_{lam-1} = -(1/rb^2) d rb ; d psi_{lam-1} = -d thb
  // d s_lam = (1/rb) d ra - (ra/rb^2) d rb ; d psi_lam = d tha - d thb
  FormValue d_sa(dst, 1), d_pa(dst, 1), d_sb(dst, 1), d_pb(dst, 1);
  d_sa[dst.axis("rb")] = -1.0 / rb2;
  d_pa[dst.axis("thb")] = -1.0;
  d_sb[dst.axis("ra")] = 1.0 / p.rb;
  d_sb[dst.axis("rb")] = -p.ra / rb2;
  d_pb[dst.axis("tha")] = 1.0;
  d_pb[dst.axis("thb")] = -1.0;
  std::array<FormValue, 4> rows{d_sa, d_pa, d_sb, d_pb};
  return apply_covector_map(on_prev, dst, rows);
}

// alpha_lam - (pullback of alpha_{lam-1}). Differences of primitives of one
// global 2-form are closed; in homogeneous terms this one equals
// d^C log(|z_{lam+1}|^2 / |z_{lam-1}|^2) = 2 d th_{lam+1}, exactly, on the
// whole chart overlap.
inline FormValue fs_cocycle_difference(const FsChartPoint& p) {
  FormValue here = fs_primitive(p);
  FsChartPoint q = fs_chart_change(p);
  FormValue prev = fs_primitive(q);
  return here - fs_pullback_to(p, prev);
}

inline FormValue fs_expected_difference(const FsChartPoint& p) {
  const Chart& ch = fs_chart(p.lam);
  FormValue f(ch, 1);
  f[ch.axis("thb")] = 2.0;
  return f;
}

// the three cocycle entries on the central torus and their pairwise wedges
struct FsTransversality {
  std::array<std::array<double, 2>, 3> entries;  // coefficients on (dth1, dth2)
  std::array<double, 3> wedge;                   // b1^b2, b2^b3, b3^b1 vs dth1^dth2
  bool pairwise_transverse = false;
};

inline FsTransversality fs_transversality() {
  FsTransversality out;
  out.entries = {std::array<double, 2>{2.0, 0.0}, {0.0, 2.0}, {-2.0, -2.0}};
  for (int k = 0; k < 3; ++k) {
    auto a = out.entries[k];
    auto b = out.entries[(k + 1) % 3];
    out.wedge[k] = a[0] * b[1] - a[1] * b[0];
  }
  out.pairwise_transverse = out.wedge[0] > 0 && out.wedge[1] > 0 && out.wedge[2] > 0;
  return out;
}

}  // namespace spineform
