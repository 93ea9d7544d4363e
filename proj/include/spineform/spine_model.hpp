#pragma once

// The 4D forms over the collar, zero-tube, and transverse-annulus charts:
// extended cocycle forms, the starting 2-form and its primitives, the tube
// perturbation, the handlebody 1-forms assembled from the strip covers, and
// the boundary primitives. Sector frames use coordinates (t, s, x, y) with
// t = phi_lambda, s = phi_{lambda-1}; the positive orientation is
// dt ^ ds ^ dx ^ dy.

#include "spineform/bump.hpp"
#include "spineform/charts.hpp"
#include "spineform/cutoffs.hpp"
#include "spineform/form_field.hpp"

namespace spineform {

struct SpineError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline const Chart& collar_chart() {
  static const Chart c{"collar", {"t", "s", "x", "y"}};
  return c;
}
inline const Chart& annulus_chart4() {
  static const Chart c{"annulus4", {"t", "s", "u", "th"}};
  return c;
}
inline const Chart& annulus_chart3() {
  static const Chart c{"annulus3", {"s", "u", "th"}};
  return c;
}

// The affine coordinates cutting out the three sectors: phi_1 = p2,
// phi_2 = -p1-p2, phi_3 = p1 (index 0-based in code).
inline std::array<double, 3> phi_coords(double p1, double p2) {
  return {p2, -p1 - p2, p1};
}
// H_lambda = { phi_{lambda-1} >= 0, phi_lambda = 0 }
inline bool on_handlebody(int lam0, double p1, double p2, double tol = 1e-12) {
  auto phi = phi_coords(p1, p2);
  return std::abs(phi[lam0]) <= tol && phi[(lam0 + 2) % 3] >= -tol;
}

struct ConstantBudget {
  double epsilon = 0.0;
  double delta = 0.0;
  double C = 1.0;
  double R0 = 0.0, R1 = 0.0, R2 = 0.0;

  void validate() const {
    if (!(epsilon > 0.0 && delta > 0.0 && C > 0.0))
      throw SpineError("budget: epsilon, delta, C must be positive");
    if (!(0.0 < R0 && R0 < R1 && R1 < R2)) throw SpineError("budget: need 0 < R0 < R1 < R2");
    if (!(8.0 * epsilon < 1.0)) throw SpineError("budget: collar 8*epsilon exceeds unit depth");
  }
};

// Pointwise surface data feeding the 4D forms. Covectors are expressed in
// the sample's 2D frame (a face chart or a zero-tube Morse chart).
struct SurfaceSample {
  std::array<Vec2, 3> b{};   // beta_1, beta_2, beta_3
  std::array<Vec2, 3> pq{};  // per-sector q-strip sums
  std::array<Vec2, 3> pp{};  // per-sector annulus-feet strips
  double f = 0.0;            // sign blend value
  Vec2 df = Vec2::Zero();
  Vec2 mu_b = Vec2::Zero();  // tube 1-form
  double dmu_b = 0.0;        // against dx ^ dy
  double R = std::numeric_limits<double>::infinity();  // squared tube radius
  // bookkeeping
  int face = -1;       // mesh samples
  int chart = -1;      // zero-chart samples
  double x = 0.0, y = 0.0;
};

struct ZeroChartData {
  int vertex = -1;
  int zero_index = -1;   // position in triple.zero_set
  double scale = 1.0;    // field gradient calibrated from the mesh
  int sign = 0;          // f value at the zero
};

struct SpineAssembly {
  const TriangulatedSurface* mesh = nullptr;
  CocycleTriple triple;
  SignAssignment signs;
  double R0 = 0.0, R1 = 0.0, R2 = 0.0;
  std::array<StripCover, 3> covers;  // q-strips per sector
  std::array<BumpForm, 3> feet;      // annulus feet per sector
  std::vector<ZeroChartData> charts;
  std::vector<double> fdist;  // mesh distance to the zero set
  double beta_scale = 1.0;    // max face covector norm over the triple
};

namespace detail {
// quadratic conjugate potentials of the Morse-model forms: P = d(h* eta(R))
// pairs nonnegatively with the matching beta
inline double conj_potential(int mu, double x, double y) {
  switch (mu) {
    case 0: return x * y;                          // beta_1 = x dx - y dy
    case 1: return 0.5 * (y * y - x * x);          // beta_2 = x dy + y dx
    default: return 0.5 * (x * x - y * y) - x * y; // beta_3 = -beta_1 - beta_2
  }
}
inline Vec2 conj_gradient(int mu, double x, double y) {
  switch (mu) {
    case 0: return Vec2(y, x);
    case 1: return Vec2(-x, y);
    default: return Vec2(x - y, -x - y);
  }
}
}  // namespace detail

inline SpineAssembly build_spine_assembly(const TriangulatedSurface& m, CocycleTriple triple,
                                          const SignAssignment& signs, double R0, double R1,
                                          double R2, CoverOptions cover_opt = {}) {
  if (!(0.0 < R0 && R0 < R1 && R1 < R2)) throw SpineError("need 0 < R0 < R1 < R2");
  SpineAssembly a;
  a.mesh = &m;
  a.triple = std::move(triple);
  a.signs = signs;
  a.R0 = R0;
  a.R1 = R1;
  a.R2 = R2;

  std::vector<int> zv;
  for (const auto& z : a.triple.zero_set) zv.push_back(z.vertex);
  if (!zv.empty())
    a.fdist = face_distance(m, distance_to_vertices(m, zv));
  else
    a.fdist.assign(m.n_faces(), std::numeric_limits<double>::infinity());

  for (int mu = 0; mu < 3; ++mu) {
    a.beta_scale = std::max(a.beta_scale, a.triple.beta[mu].max_abs() / m.mean_edge_len);
    a.covers[mu] = cover_complement_of_B(m, a.triple.beta[mu], R0, a.triple.zero_set, cover_opt);
    // one annulus foot per sector: a transversal strip through the face
    // farthest from the zero set, width capped by the sqrt(R2) clearance
    int far_face = 0;
    for (int f = 0; f < m.n_faces(); ++f)
      if (a.fdist[f] > a.fdist[far_face]) far_face = f;
    SurfacePath t = closed_transversal(m, a.triple.beta[mu], far_face, m.face_centroid(far_face));
    Vec2 d0 = (t.segs.front().b - t.segs.front().a).normalized();
    double clearance = std::max(a.fdist[far_face] - std::sqrt(R2), m.mean_edge_len);
    double width = std::min(2.0 * m.mean_edge_len, 0.8 * clearance);
    bool got = false;
    for (int attempt = 0; attempt < 3 && !got; ++attempt, width *= 0.5) {
      try {
        a.feet[mu] =
            pd_bump(m, a.triple.beta[mu], t.segs.front().face, t.segs.front().a, d0, width);
        got = true;
      } catch (const TraceError&) {
        if (attempt == 2) throw;
      }
    }
  }

  // zero charts: calibrate the field gradient from the star
  for (size_t i = 0; i < a.triple.zero_set.size(); ++i) {
    const auto& z = a.triple.zero_set[i];
    ZeroChartData cd;
    cd.vertex = z.vertex;
    cd.zero_index = static_cast<int>(i);
    cd.sign = i < a.signs.value.size() ? a.signs.value[i] : 0;
    double acc = 0.0;
    int cnt = 0;
    for (auto [f, c] : m.star[z.vertex]) {
      Vec2 u = face_covector(a.triple.beta[0], f);
      double d = (m.face_centroid(f) - m.faces[f].p[c]).norm();
      if (d > 0.0) {
        acc += u.norm() / d;
        ++cnt;
      }
    }
    cd.scale = cnt ? acc / cnt : 1.0;
    a.charts.push_back(cd);
  }
  if (std::sqrt(R2) > 0.45 * m.mean_edge_len * std::sqrt(static_cast<double>(m.n_faces())))
    throw SpineError("R2 tube radius is too large for this mesh");
  return a;
}

// --------------------------------------------------------------------------
// surface samples

inline SurfaceSample mesh_sample(const SpineAssembly& a, int f) {
  SurfaceSample s;
  s.face = f;
  for (int mu = 0; mu < 3; ++mu) {
    s.b[mu] = face_covector(a.triple.beta[mu], f);
    s.pq[mu] = face_covector(a.covers[mu].total, f);
    s.pp[mu] = face_covector(a.feet[mu].form, f);
  }
  return s;
}

// Morse-chart sample at chart coordinates (x, y), R = x^2 + y^2 <= R2.
inline SurfaceSample chart_sample(const SpineAssembly& a, int chart_id, double x, double y) {
  const ZeroChartData& cd = a.charts[chart_id];
  double R = x * x + y * y;
  double c = cd.scale;
  SurfaceSample s;
  s.chart = chart_id;
  s.x = x;
  s.y = y;
  s.R = R;
  s.b[0] = c * Vec2(x, -y);
  s.b[1] = c * Vec2(y, x);
  s.b[2] = -s.b[0] - s.b[1];
  RadialCutoff blend(a.R1, a.R2);
  double sigma = static_cast<double>(cd.sign);
  s.f = sigma * blend(R);
  s.df = sigma * blend.deriv(R) * 2.0 * Vec2(x, y);
  RadialCutoff phiB(a.R1, a.R2);
  double g = s.f * phiB(R);  // f * phi_B as one radial profile
  double gp = sigma * (blend.deriv(R) * phiB(R) + blend(R) * phiB.deriv(R));
  s.mu_b = g * Vec2(-y, x);
  s.dmu_b = 2.0 * g + 2.0 * R * gp;
  ChartStripRamp eta(a.R0);
  for (int mu = 0; mu < 3; ++mu) {
    double h = detail::conj_potential(mu, x, y);
    Vec2 dh = detail::conj_gradient(mu, x, y);
    s.pq[mu] = c * (eta(R) * dh + h * eta.deriv(R) * 2.0 * Vec2(x, y));
    s.pp[mu] = Vec2::Zero();  // annulus feet avoid the tubes
  }
  return s;
}

// --------------------------------------------------------------------------
// collar forms at a point (t, s) in sector frame lam (0-based)

struct CollarProfiles {
  CollarPhi Phi;
  PsiQ psi_q;
  AnnulusPhi2 phi2;
  double invC, delta;
  explicit CollarProfiles(const ConstantBudget& b)
      : Phi(b.epsilon), psi_q(b.epsilon), phi2(b.epsilon, b.delta), invC(1.0 / b.C),
        delta(b.delta) {}
};

namespace detail {
inline FormValue cov2(const Vec2& u) {
  FormValue f(collar_chart(), 1);
  f[2] = u.x();
  f[3] = u.y();
  return f;
}
// value and differential of phi_j (0-based) in the sector-lam frame
inline std::pair<double, FormValue> phi_in_frame(int lam, int j, double t, double s) {
  FormValue d(collar_chart(), 1);
  if (j == lam) {
    d[0] = 1.0;
    return {t, d};
  }
  if (j == (lam + 2) % 3) {
    d[1] = 1.0;
    return {s, d};
  }
  d[0] = -1.0;
  d[1] = -1.0;
  return {-t - s, d};
}
}  // namespace detail

class CollarForms {
 public:
  CollarForms(const SurfaceSample& sample, const CollarProfiles& prof, int lam, double t, double s)
      : s_(sample), p_(prof), lam_(lam), t_(t), sc_(s) {}

  // beta_mu + d(phi_{mu-1} f), closed by construction
  FormValue beta_tilde(int mu) const {
    auto [phi, dphi] = detail::phi_in_frame(lam_, (mu + 2) % 3, t_, sc_);
    FormValue out = detail::cov2(s_.b[mu]);
    out += s_.f * dphi;
    out += phi * detail::cov2(s_.df);
    return out;
  }

  // the case-0 presentation dt ^ bt_lam - ds ^ bt_{lam+1}
  FormValue omega0() const {
    return wedge(dt(), beta_tilde(lam_)) - wedge(ds(), beta_tilde((lam_ + 1) % 3));
  }

  // extended primitive (t+2) bt_lam + Phi(s) bt_{lam+1}
  FormValue mu_sigma_ext() const {
    return (t_ + 2.0) * beta_tilde(lam_) + p_.Phi(sc_) * beta_tilde((lam_ + 1) % 3);
  }
  FormValue d_mu_sigma_ext() const {
    return wedge(dt(), beta_tilde(lam_)) +
           p_.Phi.deriv(sc_) * wedge(ds(), beta_tilde((lam_ + 1) % 3));
  }

  // the unextended primitive (t+2) bt_lam - (s-1) bt_{lam+1}, valid near the
  // surface; equal to mu_sigma_ext for s <= 2 eps
  FormValue mu_sigma_collar(int mu) const {
    int l = mu;
    return (detail::phi_in_frame(lam_, l, t_, sc_).first + 2.0) * beta_tilde(l) -
           (detail::phi_in_frame(lam_, (l + 2) % 3, t_, sc_).first - 1.0) *
               beta_tilde((l + 1) % 3);
  }

  FormValue mu_q() const { return -p_.psi_q(sc_) * detail::cov2(s_.pq[lam_]); }
  FormValue d_mu_q() const {
    return -p_.psi_q.deriv(sc_) * wedge(ds(), detail::cov2(s_.pq[lam_]));
  }
  FormValue mu_p() const { return p_.phi2(sc_) * detail::cov2(s_.pp[lam_]); }
  FormValue d_mu_p() const {
    return p_.phi2.deriv(sc_) * wedge(ds(), detail::cov2(s_.pp[lam_]));
  }
  FormValue mu_H() const { return mu_q() + mu_p(); }
  FormValue d_mu_H() const { return d_mu_q() + d_mu_p(); }

  FormValue mu_B() const { return detail::cov2(s_.mu_b); }
  FormValue d_mu_B() const {
    FormValue out(collar_chart(), 2);
    out.add_term(std::array<int, 2>{2, 3}, s_.dmu_b);
    return out;
  }

  FormValue alpha() const {
    return mu_sigma_ext() + p_.invC * mu_H() + p_.delta * mu_B();
  }
  FormValue d_alpha() const {
    return d_mu_sigma_ext() + p_.invC * d_mu_H() + p_.delta * d_mu_B();
  }

  FormValue dt() const { return FormValue::covector(collar_chart(), 0); }
  FormValue ds() const { return FormValue::covector(collar_chart(), 1); }
  FormValue zeta() const { return dt() - ds(); }  // coorients the smoothed boundary

 private:
  const SurfaceSample& s_;
  const CollarProfiles& p_;
  int lam_;
  double t_, sc_;
};

// --------------------------------------------------------------------------
// transverse-annulus chart forms: beta_tilde = d theta, mu_p = phi2 phi1 du

struct AnnulusForms {
  const CollarProfiles& p;
  double t, s, u;

  FormValue dt() const { return FormValue::covector(annulus_chart4(), 0); }
  FormValue ds() const { return FormValue::covector(annulus_chart4(), 1); }
  FormValue du() const { return FormValue::covector(annulus_chart4(), 2); }
  FormValue dth() const { return FormValue::covector(annulus_chart4(), 3); }

  AnnulusPhi1 phi1() const { return AnnulusPhi1(p.delta); }

  FormValue beta_tilde() const { return dth(); }
  FormValue mu_p() const { return p.phi2(s) * phi1()(u) * du(); }
  FormValue d_mu_p() const {
    return p.phi2.deriv(s) * phi1()(u) * wedge(ds(), du()) +
           p.phi2(s) * phi1().deriv(u) * wedge(du(), du());  // second term is zero
  }
  FormValue alpha() const { return (t + 2.0) * dth() + p.invC * mu_p(); }
  FormValue d_alpha() const { return wedge(dt(), dth()) + p.invC * d_mu_p(); }
};

}  // namespace spineform
