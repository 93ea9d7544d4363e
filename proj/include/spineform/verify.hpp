#pragma once

// The inequality suite over the collar, tube, and annulus grids: squares of
// the extended 2-forms, the two contact pairings, and the boundary
// primitive, each reduced against the chart orientation and reported as
// per-region minima with verdicts. Also the feasibility search for
// (epsilon, delta, C) and the family sweep.

#include "spineform/spine_model.hpp"

namespace spineform {

struct InfeasibleBudget : std::runtime_error {
  ConstantBudget best;
  explicit InfeasibleBudget(const std::string& msg, ConstantBudget b)
      : std::runtime_error(msg), best(b) {}
};

struct GridSpec {
  int s_per_case = 9;
  int t_samples = 9;
  int polar_radii = 5;
  int polar_angles = 5;
  int annulus_su = 5;
  int annulus_theta = 4;
  double strict_tol = 1e-8;   // scaled by the local form size
  double nonneg_tol = 1e-10;
};

struct SamplePoint {
  int lambda = 0;          // 1-based in reports
  std::string region;      // case0..case4, annulus
  std::string zone;        // mesh, tube-core, tube-annulus, tube-center
  double t = 0, s = 0, x = 0, y = 0;
  double q_symp = 0;       // d alpha ^ d alpha
  double q_pos = 0;        // dt ^ alpha ^ d alpha
  double q_neg = 0;        // -dt ^ (alpha - 3 bt) ^ d alpha
  double q_hat = 0;        // zeta ^ alpha_hat ^ d alpha_hat (both pieces)
  double w0sq = 0;         // omega_0 ^ omega_0 (case-0 presentation)
};

struct RegionMin {
  std::string quantity;
  int lambda = 0;
  std::string region, zone;
  double min = std::numeric_limits<double>::infinity();
  SamplePoint arg;
  bool pass = false;
};

struct VerificationReport {
  ConstantBudget budget;
  GridSpec grid;
  std::vector<RegionMin> mins;
  bool pass = false;
  double w0_zero_locus_max = 0.0;  // max |w0sq| at the tube centers
  bool w0_nonneg = true;
  bool w0_zero_only_at_B = true;
  double local_scale = 1.0;
  std::vector<SamplePoint>* sink = nullptr;  // optional CSV sample sink
};

namespace detail {

inline void fold_min(std::map<std::string, RegionMin>& mins, const std::string& quantity,
                     const SamplePoint& pt, double value) {
  std::string key = quantity + "|" + std::to_string(pt.lambda) + "|" + pt.region + "|" + pt.zone;
  auto& rm = mins[key];
  if (rm.quantity.empty()) {
    rm.quantity = quantity;
    rm.lambda = pt.lambda;
    rm.region = pt.region;
    rm.zone = pt.zone;
  }
  if (value < rm.min) {
    rm.min = value;
    rm.arg = pt;
  }
}

inline std::vector<double> midpoints(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * (i + 0.5) / n;
  return v;
}

}  // namespace detail

// Evaluates the four 4-form pairings at one collar point; q_hat carries the
// H_lambda-side boundary piece; the H_{lambda-1}-side piece of sector lam+1
// is evaluated on the same grid pass (hat_prev).
struct CollarQuantities {
  double q_symp, q_pos, q_neg, q_hat, hat_prev, w0sq;
};

inline CollarQuantities collar_quantities(const SurfaceSample& sample,
                                          const CollarProfiles& prof, int lam, double t,
                                          double s) {
  CollarForms F(sample, prof, lam, t, s);
  FormValue alpha = F.alpha();
  FormValue dalpha = F.d_alpha();
  FormValue bt = F.beta_tilde(lam);
  FormValue ada = wedge(alpha, dalpha);
  CollarQuantities q{};
  q.q_symp = top_coefficient(wedge(dalpha, dalpha));
  q.q_pos = top_coefficient(wedge(F.dt(), ada));
  q.q_neg = -top_coefficient(wedge(F.dt(), wedge(alpha - 3.0 * bt, dalpha)));
  q.q_hat = top_coefficient(wedge(F.zeta(), ada));
  // boundary piece of the NEXT sector over this handlebody:
  // zeta_{lam+1} = -2 dt - ds in this frame, applied to alpha - 3 bt
  FormValue zprev = -2.0 * F.dt() - F.ds();
  q.hat_prev = top_coefficient(wedge(zprev, wedge(alpha - 3.0 * bt, dalpha)));
  q.w0sq = top_coefficient(wedge(F.omega0(), F.omega0()));
  return q;
}

inline VerificationReport inequality_suite(const SpineAssembly& a, const ConstantBudget& budget,
                                           GridSpec grid = {},
                                           std::vector<SamplePoint>* sink = nullptr,
                                           bool early_exit = false) {
  budget.validate();
  if (budget.R0 != a.R0 || budget.R1 != a.R1 || budget.R2 != a.R2)
    throw SpineError("budget radii differ from the assembly's strip-cover radii");
  CollarProfiles prof(budget);
  const double eps = budget.epsilon;

  VerificationReport rep;
  rep.budget = budget;
  rep.grid = grid;
  rep.local_scale = std::max(1.0, a.beta_scale * a.beta_scale);
  const double strict = grid.strict_tol * rep.local_scale;
  const double nonneg = -grid.nonneg_tol * rep.local_scale;

  // surface samples: mesh faces outside the tubes, plus tube polar grids
  struct TaggedSample {
    SurfaceSample s;
    std::string zone;
  };
  std::vector<TaggedSample> samples;
  double r2 = std::sqrt(a.R2);
  for (int f = 0; f < a.mesh->n_faces(); ++f) {
    if (a.fdist[f] <= r2) continue;  // modeled by the tube charts
    samples.push_back({mesh_sample(a, f), "mesh"});
  }
  for (size_t c = 0; c < a.charts.size(); ++c) {
    samples.push_back({chart_sample(a, static_cast<int>(c), 0.0, 0.0), "tube-center"});
    for (int i = 0; i < grid.polar_radii; ++i)
      for (int j = 0; j < grid.polar_angles; ++j) {
        double r = r2 * (i + 1.0) / grid.polar_radii;
        double ang = 2.0 * M_PI * (j + 0.5) / grid.polar_angles;
        auto s = chart_sample(a, static_cast<int>(c), r * std::cos(ang), r * std::sin(ang));
        samples.push_back({std::move(s), r * r <= a.R0 ? "tube-core" : "tube-annulus"});
      }
  }

  const std::array<std::pair<double, double>, 5> case_iv{
      std::pair{0.0, eps}, {eps, 2 * eps}, {2 * eps, 3 * eps}, {3 * eps, 4 * eps},
      {4 * eps, 5 * eps}};
  auto tvals = detail::midpoints(-eps, eps, grid.t_samples);

  std::map<std::string, RegionMin> mins;
  rep.w0_zero_locus_max = 0.0;

  for (int lam = 0; lam < 3; ++lam) {
    for (int ci = 0; ci < 5; ++ci) {
      auto svals = detail::midpoints(case_iv[ci].first, case_iv[ci].second, grid.s_per_case);
      std::string region = "case" + std::to_string(ci);
      for (const auto& ts : samples)
        for (double s : svals)
          for (double t : tvals) {
            CollarQuantities q = collar_quantities(ts.s, prof, lam, t, s);
            SamplePoint pt;
            pt.lambda = lam + 1;
            pt.region = region;
            pt.zone = ts.zone;
            pt.t = t;
            pt.s = s;
            pt.x = ts.s.face >= 0 ? static_cast<double>(ts.s.face) : ts.s.x;
            pt.y = ts.s.face >= 0 ? 0.0 : ts.s.y;
            pt.q_symp = q.q_symp;
            pt.q_pos = q.q_pos;
            pt.q_neg = q.q_neg;
            pt.q_hat = q.q_hat;
            pt.w0sq = q.w0sq;
            detail::fold_min(mins, "symplectic", pt, q.q_symp);
            detail::fold_min(mins, "contact+", pt, q.q_pos);
            detail::fold_min(mins, "contact-", pt, q.q_neg);
            // zeta coorients the smoothed boundary only on the corner chart;
            // deeper along the faces the coorientation is dt (contact+/-)
            if (ci == 0) {
              detail::fold_min(mins, "boundary", pt, q.q_hat);
              SamplePoint hp = pt;
              hp.lambda = (lam + 1) % 3 + 1;  // the sector whose boundary this is
              detail::fold_min(mins, "boundary", hp, q.hat_prev);
            }
            if (ci == 0) {
              // omega_0 positivity and its zero locus (the tube centers)
              if (q.w0sq < nonneg) rep.w0_nonneg = false;
              if (ts.zone == "tube-center")
                rep.w0_zero_locus_max = std::max(rep.w0_zero_locus_max, std::abs(q.w0sq));
              else if (q.w0sq <= strict)
                rep.w0_zero_only_at_B = false;
            }
            if (sink) sink->push_back(pt);
            double worst = std::min({q.q_symp, q.q_pos, q.q_neg});
            if (ci == 0) worst = std::min({worst, q.q_hat, q.hat_prev});
            if (early_exit && worst <= strict) {
              rep.pass = false;
              for (auto& [k, rm] : mins) rep.mins.push_back(rm);
              return rep;
            }
          }
    }
    // annulus region (deep handlebody core of the transverse annuli)
    {
      auto svals = detail::midpoints(1.0 - budget.delta / 2, 1.0 + budget.delta / 2,
                                     grid.annulus_su);
      auto uvals = detail::midpoints(-budget.delta / 2, budget.delta / 2, grid.annulus_su);
      for (double t : tvals)
        for (double s : svals)
          for (double u : uvals) {
            AnnulusForms F{prof, t, s, u};
            FormValue alpha = F.alpha();
            FormValue dalpha = F.d_alpha();
            FormValue ada = wedge(alpha, dalpha);
            SamplePoint pt;
            pt.lambda = lam + 1;
            pt.region = "annulus";
            pt.zone = "chart";
            pt.t = t;
            pt.s = s;
            pt.x = u;
            pt.q_symp = top_coefficient(wedge(dalpha, dalpha));
            pt.q_pos = top_coefficient(wedge(F.dt(), ada));
            pt.q_neg =
                -top_coefficient(wedge(F.dt(), wedge(alpha - 3.0 * F.beta_tilde(), dalpha)));
            pt.q_hat = top_coefficient(wedge(F.dt() - F.ds(), ada));
            detail::fold_min(mins, "symplectic", pt, pt.q_symp);
            detail::fold_min(mins, "contact+", pt, pt.q_pos);
            detail::fold_min(mins, "contact-", pt, pt.q_neg);
            detail::fold_min(mins, "boundary", pt, pt.q_hat);
            if (sink) sink->push_back(pt);
          }
    }
  }

  rep.pass = rep.w0_nonneg;
  for (auto& [k, rm] : mins) {
    rm.pass = rm.min > strict;
    rep.pass = rep.pass && rm.pass;
    rep.mins.push_back(rm);
  }
  rep.pass = rep.pass && rep.w0_zero_locus_max <= 1e-12 * rep.local_scale;
  rep.sink = sink;
  return rep;
}

// --------------------------------------------------------------------------
// the two contact forms on the deep annulus core

struct ContactPmReport {
  double min_plus = std::numeric_limits<double>::infinity();   // expect > 0
  double max_minus = -std::numeric_limits<double>::infinity(); // expect < 0
  bool pass = false;
};

inline ContactPmReport contact_pm_check(const ConstantBudget& budget, int n = 12) {
  CollarProfiles prof(budget);
  AnnulusPhi1 phi1(budget.delta);
  ContactPmReport rep;
  auto svals = detail::midpoints(1.0 - budget.delta / 2, 1.0 + budget.delta / 2, n);
  auto uvals = detail::midpoints(-budget.delta / 2, budget.delta / 2, n);
  const Chart& ch = annulus_chart3();
  FormValue ds = FormValue::covector(ch, 0), du = FormValue::covector(ch, 1),
            dth = FormValue::covector(ch, 2);
  for (double s : svals)
    for (double u : uvals) {
      FormValue mu_p = prof.phi2(s) * phi1(u) * du;
      FormValue dmu_p = prof.phi2.deriv(s) * phi1(u) * wedge(ds, du);
      FormValue ap = budget.C * dth + mu_p;
      FormValue am = -budget.C * dth + mu_p;
      // d alpha_pm = d mu_p, and mu_p ^ d mu_p vanishes identically
      double plus = top_coefficient(wedge(ap, dmu_p));
      double minus = top_coefficient(wedge(am, dmu_p));
      rep.min_plus = std::min(rep.min_plus, plus);
      rep.max_minus = std::max(rep.max_minus, minus);
    }
  rep.pass = rep.min_plus > 0.0 && rep.max_minus < 0.0;
  return rep;
}

// --------------------------------------------------------------------------
// the transverse-annulus 2-form: support and sign regions on a full grid

struct MuPLemmaReport {
  bool support_ok = true;       // mu_p supported in the chart profile support
  bool positive_in_core = true; // pairing > 0 on the inner tube
  bool positive_support_ok = true;
  bool negative_support_ok = true;
  bool pass = false;
};

inline MuPLemmaReport mu_p_lemma_check(const ConstantBudget& budget, int n = 50) {
  CollarProfiles prof(budget);
  AnnulusPhi1 phi1(budget.delta);
  MuPLemmaReport rep;
  const double eps = budget.epsilon, del = budget.delta;
  auto svals = detail::midpoints(0.0, 1.0 + 2.0 * del, n);
  auto uvals = detail::midpoints(-del, del, n);
  auto thvals = detail::midpoints(0.0, 2.0 * M_PI, n);
  for (double s : svals)
    for (double u : uvals)
      for (double th : thvals) {
        (void)th;  // the chart forms are rotation-invariant along the core
        double g = prof.phi2.deriv(s) * phi1(u);  // bt ^ d mu_p against ds^du^dth
        double mu_val = prof.phi2(s) * phi1(u);
        bool in_support = (s > eps && s < 1.0 + del) && (u > -del && u < del);
        if (!in_support && std::abs(mu_val) > 1e-14) rep.support_ok = false;
        if (g > 1e-14) {
          // positive support must lie in the deep band around the core circle
          if (!(s > 1.0 - del && s < 1.0 + del)) rep.positive_support_ok = false;
        }
        if (g < -1e-14) {
          // negative support must lie in the collar band [eps, 2 eps]
          if (!(s > eps && s < 2.0 * eps)) rep.negative_support_ok = false;
        }
        bool in_core = (s > 1.0 - del / 2 && s < 1.0 + del / 2) && (u > -del / 2 && u < del / 2);
        if (in_core && !(g > 0.0)) rep.positive_in_core = false;
      }
  rep.pass =
      rep.support_ok && rep.positive_in_core && rep.positive_support_ok && rep.negative_support_ok;
  return rep;
}

// --------------------------------------------------------------------------
// feasibility search over (epsilon, delta, C), radii held fixed

struct SearchBox {
  std::vector<double> epsilons;  // descending recommended
  std::vector<double> deltas;
  std::vector<double> Cs;  // ascending (sweep is over 1/C conceptually)
};

struct SearchResult {
  ConstantBudget budget;
  VerificationReport report;
  double margin = 0.0;  // smallest relative slack over the searched axes
};

inline SearchResult constant_search(const SpineAssembly& a, SearchBox box, double R0, double R1,
                                    double R2, GridSpec grid = {}) {
  ConstantBudget best{};
  double best_violation = std::numeric_limits<double>::infinity();
  auto run = [&](double eps, double del, double C, bool early) {
    ConstantBudget b;
    b.epsilon = eps;
    b.delta = del;
    b.C = C;
    b.R0 = R0;
    b.R1 = R1;
    b.R2 = R2;
    VerificationReport rep = inequality_suite(a, b, grid, nullptr, early);
    return std::pair<ConstantBudget, VerificationReport>(b, std::move(rep));
  };
  for (double eps : box.epsilons)
    for (double del : box.deltas)
      for (double C : box.Cs) {
        auto [b, rep] = run(eps, del, C, true);
        if (rep.pass) {
          // feasibility margins by bisecting each axis toward failure; the
          // probes run on a reduced grid (the margin is diagnostic)
          GridSpec probe_grid = grid;
          probe_grid.s_per_case = std::min(grid.s_per_case, 5);
          probe_grid.t_samples = std::min(grid.t_samples, 5);
          auto margin_of = [&](auto mutate) {
            double lo = 0.0, hi = 1.0;  // relative step toward the failure side
            for (int it = 0; it < 6; ++it) {
              double mid = 0.5 * (lo + hi);
              ConstantBudget bb = b;
              mutate(bb, mid);
              bool ok = false;
              try {
                ok = inequality_suite(a, bb, probe_grid, nullptr, true).pass;
              } catch (const SpineError&) {
                ok = false;
              }
              (ok ? lo : hi) = mid;
            }
            return lo;
          };
          SearchResult res;
          res.budget = b;
          res.report = run(eps, del, C, false).second;
          double m_eps = margin_of([](ConstantBudget& bb, double r) { bb.epsilon *= 1.0 + r; });
          double m_del = margin_of([](ConstantBudget& bb, double r) { bb.delta *= 1.0 + 9.0 * r; });
          double m_C = margin_of([](ConstantBudget& bb, double r) { bb.C /= 1.0 + 9.0 * r; });
          res.margin = std::min({m_eps, m_del, m_C});
          return res;
        }
        // track the least-violating budget for diagnostics
        double viol = 0.0;
        for (const auto& rm : rep.mins) viol = std::max(viol, -std::min(0.0, rm.min));
        if (viol < best_violation) {
          best_violation = viol;
          best = b;
        }
      }
  throw InfeasibleBudget("constant_search: no feasible (epsilon, delta, C) in the box", best);
}

// --------------------------------------------------------------------------
// family sweep: one budget across all members

struct FamilyReport {
  std::vector<VerificationReport> members;
  bool uniform = false;      // single budget verifies every member
  bool isoperiodic = false;  // from the cocycle-level check
  double period_drift = 0.0;
};

inline FamilyReport family_sweep(const std::vector<const SpineAssembly*>& members,
                                 const ConstantBudget& budget, const HomologyBasis& basis,
                                 const std::vector<const MetricWeights*>& weights,
                                 GridSpec grid = {}) {
  if (members.empty()) throw SpineError("family_sweep: empty family");
  FamilyReport rep;
  const TriangulatedSurface& m = *members.front()->mesh;
  std::vector<std::pair<const MetricWeights*, const DiscreteOneForm*>> fam;
  for (size_t i = 0; i < members.size(); ++i) {
    if (members[i]->mesh != &m) throw SpineError("family_sweep: members on different meshes");
    fam.emplace_back(weights[i], &members[i]->triple.beta[0]);
  }
  auto iso = isoperiodic_check(m, basis, fam);
  rep.isoperiodic = iso.isoperiodic;
  rep.period_drift = iso.max_drift;
  rep.uniform = true;
  for (const auto* a : members) {
    rep.members.push_back(inequality_suite(*a, budget, grid));
    rep.uniform = rep.uniform && rep.members.back().pass;
  }
  return rep;
}

}  // namespace spineform
