#pragma once

// Glue from a run configuration to the verification pipeline: mesh loading,
// the harmonic form, the cocycle triple, the spine assembly, and the budget
// search. Shared by the command-line tool and the acceptance suite.

#include "spineform/cocycle.hpp"
#include "spineform/config.hpp"
#include "spineform/level_sets.hpp"
#include "spineform/verify.hpp"

namespace spineform {

inline TriangulatedSurface load_mesh_spec(const std::string& spec) {
  auto starts = [&](const char* p) { return spec.rfind(p, 0) == 0; };
  if (starts("torus:")) return make_square_torus(std::stoi(spec.substr(6)));
  if (starts("octagon:")) return make_octagon_surface(std::stoi(spec.substr(8)));
  if (starts("decagon:")) return make_decagon_surface(std::stoi(spec.substr(8)));
  if (spec.size() > 4 && spec.substr(spec.size() - 4) == ".off") return load_off_file(spec);
  if (spec.size() > 5 && spec.substr(spec.size() - 5) == ".poly") return load_polygon_file(spec);
  throw ConfigError("unrecognized mesh spec: " + spec +
                    " (use torus:N, octagon:R, decagon:R, *.off, *.poly)");
}

struct SurfaceData {
  TriangulatedSurface mesh;
  MetricWeights weights;
  HomologyBasis basis;
  HarmonicSpace hspace;
  DiscreteOneForm beta;
  HarmonicResult harmonic;  // residuals when beta came from the solver
  bool from_solver = false;
};

inline std::vector<double> load_edge_lengths(const TriangulatedSurface& m,
                                             const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open edge-length override: " + path);
  std::vector<double> len(m.n_edges());
  for (int e = 0; e < m.n_edges(); ++e) len[e] = m.edges[e].len;
  int id;
  double l;
  while (in >> id >> l) {
    if (id < 0 || id >= m.n_edges()) throw ConfigError("edge-length override: bad edge id");
    if (l <= 0) throw ConfigError("edge-length override: nonpositive length");
    len[id] = l;
  }
  return len;
}

inline SurfaceData prepare_surface(const RunConfig& cfg) {
  SurfaceData d;
  d.mesh = load_mesh_spec(cfg.mesh);
  d.mesh = intrinsic_delaunay(d.mesh);
  if (!cfg.edge_lengths.empty()) {
    auto len = load_edge_lengths(d.mesh, cfg.edge_lengths);
    d.weights = compute_weights(d.mesh, &len);
  } else {
    d.weights = compute_weights(d.mesh);
  }
  d.basis = homology_basis(d.mesh);
  d.hspace = harmonic_space(d.mesh, d.weights, d.basis);

  if (cfg.form == "dx") {
    d.beta = translation_form(d.mesh, 0);
  } else if (cfg.form == "dy") {
    d.beta = translation_form(d.mesh, 1);
  } else if (!cfg.form_file.empty()) {
    std::ifstream in(cfg.form_file);
    if (!in) throw ConfigError("cannot open form file: " + cfg.form_file);
    d.beta = DiscreteOneForm(d.mesh);
    for (int e = 0; e < d.mesh.n_edges(); ++e)
      if (!(in >> d.beta.values[e])) throw ConfigError("form file too short");
  } else {
    if (static_cast<int>(cfg.periods.size()) != 2 * d.mesh.genus)
      throw ConfigError("periods: expected " + std::to_string(2 * d.mesh.genus) + " values");
    Eigen::VectorXd target(cfg.periods.size());
    for (size_t i = 0; i < cfg.periods.size(); ++i) target[i] = cfg.periods[i];
    d.harmonic = harmonic_representative(d.mesh, d.weights, d.basis, d.hspace, target);
    d.beta = d.harmonic.form;
    d.from_solver = true;
  }
  return d;
}

struct VerifyRun {
  CocycleTriple triple;
  SignAssignment signs;
  TripleReport triple_report;
  SpineAssembly assembly;
  bool searched = false;
  ConstantBudget budget;
  double margin = 0.0;
  VerificationReport report;
  ContactPmReport contact;
  MuPLemmaReport mup;
  std::vector<SamplePoint> samples;
};

inline std::vector<double> log_sweep(double lo, double hi, int n) {
  std::vector<double> v;
  if (n <= 1 || lo == hi) {
    v.push_back(hi);
    return v;
  }
  for (int i = 0; i < n; ++i) v.push_back(lo * std::pow(hi / lo, double(i) / (n - 1)));
  return v;
}

// Family members for the family command: either tiny conformal vertex
// scalings of the metric (isoperiodic; the smooth star is conformally
// invariant so the rotated form's periods stay put) or a period-scaling
// control family.
struct FamilyData {
  std::vector<MetricWeights> weights;
  std::vector<DiscreteOneForm> betas;
};

inline FamilyData build_family_data(const RunConfig& cfg, const SurfaceData& d) {
  FamilyData fam;
  for (int k = 0; k < cfg.family_size; ++k) {
    if (cfg.family_kind == "scaling") {
      fam.weights.push_back(d.weights);
      fam.betas.push_back(d.beta * (1.0 + 0.1 * k));
    } else {
      std::vector<double> len(d.mesh.n_edges());
      for (int e = 0; e < d.mesh.n_edges(); ++e) {
        int a = d.mesh.edges[e].v0, b = d.mesh.edges[e].v1;
        double ua = 1e-6 * k * std::sin(2.0 * M_PI * a / d.mesh.nv);
        double ub = 1e-6 * k * std::sin(2.0 * M_PI * b / d.mesh.nv);
        len[e] = std::exp(0.5 * (ua + ub)) * d.mesh.edges[e].len;
      }
      fam.weights.push_back(compute_weights(d.mesh, &len));
      if (d.from_solver) {
        Eigen::VectorXd target(cfg.periods.size());
        for (size_t i = 0; i < cfg.periods.size(); ++i) target[i] = cfg.periods[i];
        auto hs = harmonic_space(d.mesh, fam.weights.back(), d.basis);
        fam.betas.push_back(
            harmonic_representative(d.mesh, fam.weights.back(), d.basis, hs, target).form);
      } else {
        fam.betas.push_back(d.beta);
      }
    }
  }
  return fam;
}

// The full spine verification for one surface. Collects samples for CSV
// export; throws InfeasibleBudget when a search finds nothing.
inline VerifyRun run_verify(const RunConfig& cfg, SurfaceData& d, bool collect_samples = true) {
  VerifyRun run;
  run.triple = make_triple(d.mesh, d.weights, d.beta, &d.basis, &d.hspace);
  if (cfg.flip_beta2) {
    run.triple.beta[1] = -run.triple.beta[1];
    run.triple.beta[2] = -run.triple.beta[0] - run.triple.beta[1];
  }
  run.triple_report = validate_triple(run.triple);
  run.signs = assign_signs(d.mesh, run.triple.zero_set, cfg.seed);

  CoverOptions copt;
  copt.budget = cfg.cover_budget;
  copt.lines_per_strip = cfg.lines_per_strip;
  run.assembly =
      build_spine_assembly(d.mesh, run.triple, run.signs, cfg.r0, cfg.r1, cfg.r2, copt);

  GridSpec grid;
  grid.s_per_case = cfg.grid_s;
  grid.t_samples = cfg.grid_t;
  grid.polar_radii = cfg.grid_polar;
  grid.polar_angles = cfg.grid_polar;

  bool pinned = cfg.eps_pin > 0 && cfg.delta_pin > 0 && cfg.c_pin > 0;
  if (pinned) {
    run.budget.epsilon = cfg.eps_pin;
    run.budget.delta = cfg.delta_pin;
    run.budget.C = cfg.c_pin;
    run.budget.R0 = cfg.r0;
    run.budget.R1 = cfg.r1;
    run.budget.R2 = cfg.r2;
  } else {
    SearchBox box;
    // prefer small epsilon, small delta, large C first: sweep descending in
    // eps/delta and ascending in C would bias toward fragile corners; walk
    // from the conservative end instead
    box.epsilons = log_sweep(cfg.eps_min, cfg.eps_max, cfg.eps_steps);
    std::reverse(box.epsilons.begin(), box.epsilons.end());  // large -> small
    box.deltas = log_sweep(cfg.delta_min, cfg.delta_max, cfg.delta_steps);
    box.Cs = log_sweep(cfg.c_min, cfg.c_max, cfg.c_steps);
    SearchResult res = constant_search(run.assembly, box, cfg.r0, cfg.r1, cfg.r2, grid);
    run.searched = true;
    run.budget = res.budget;
    run.margin = res.margin;
  }
  run.report =
      inequality_suite(run.assembly, run.budget, grid, collect_samples ? &run.samples : nullptr);
  run.contact = contact_pm_check(run.budget);
  run.mup = mu_p_lemma_check(run.budget);
  return run;
}

}  // namespace spineform
