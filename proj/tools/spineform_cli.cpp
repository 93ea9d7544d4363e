// Command-line driver: harmonic data extraction, spine verification, the
// chart-cocycle demo, foliation exports, and family sweeps.
//
// Exit codes: 0 pass, 2 verification failure (report still written),
// 3 infeasible budget search (report still written), 4 input error.

#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "spineform/fs_demo.hpp"
#include "spineform/report_json.hpp"

namespace fs = std::filesystem;
using namespace spineform;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitVerifyFail = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitInput = 4;

fs::path ensure_outdir(const RunConfig& cfg) {
  fs::path dir(cfg.outdir);
  fs::create_directories(dir);
  return dir;
}

int cmd_harmonic(const RunConfig& cfg) {
  SurfaceData d = prepare_surface(cfg);
  fs::path dir = ensure_outdir(cfg);
  auto zr = find_zeros(d.mesh, d.beta);

  ordered_json beta;
  beta["config"] = json_config(cfg);
  beta["edges"] = json_one_form(d.beta);
  beta["closedness"] = d.beta.closedness_residual();
  beta["divergence"] = divergence_residual(d.weights, d.beta);
  write_json_file(dir / "beta.json", beta);

  ordered_json zeros = ordered_json::array();
  for (const auto& z : zr.zeros)
    zeros.push_back({{"vertex", z.vertex},
                     {"face", z.anchor_face},
                     {"index", z.index},
                     {"cone_angle", d.mesh.cone_angle[z.vertex]}});
  write_json_file(dir / "zeros.json",
                  ordered_json{{"zeros", zeros},
                               {"count", zr.zeros.size()},
                               {"index_sum", zr.index_sum},
                               {"degenerate_warning", zr.degenerate}});

  Eigen::VectorXd per = periods(d.beta, d.basis);
  ordered_json pj = ordered_json::array();
  for (int i = 0; i < per.size(); ++i) pj.push_back(per[i]);
  write_json_file(dir / "periods.json", ordered_json{{"periods", pj}});

  ordered_json val;
  val["euler"] = d.mesh.nv - d.mesh.n_edges() + d.mesh.n_faces();
  val["genus"] = d.mesh.genus;
  val["closedness"] = d.beta.closedness_residual();
  val["divergence"] = divergence_residual(d.weights, d.beta);
  val["zero_count"] = zr.zeros.size();
  val["index_sum"] = zr.index_sum;
  val["degenerate_warning"] = zr.degenerate;
  write_json_file(dir / "validation.json", val);
  std::cout << "harmonic: genus " << d.mesh.genus << ", " << zr.zeros.size() << " zeros, outputs in "
            << dir.string() << "\n";
  return kExitPass;
}

int cmd_verify_spine(const RunConfig& cfg) {
  SurfaceData d = prepare_surface(cfg);
  fs::path dir = ensure_outdir(cfg);
  try {
    VerifyRun run = run_verify(cfg, d);
    write_json_file(dir / "report.json", json_report(run, cfg));
    {
      std::ofstream csv(dir / "samples.csv");
      write_samples_csv(csv, run.samples);
    }
    write_json_file(dir / "triple.json", json_triple(run.triple, run.signs));
    bool pass =
        run.report.pass && run.contact.pass && run.mup.pass && run.triple_report.pass;
    std::cout << "verify-spine: " << (pass ? "PASS" : "FAIL") << ", report in " << dir.string()
              << "\n";
    return pass ? kExitPass : kExitVerifyFail;
  } catch (const InfeasibleBudget& ex) {
    ordered_json j;
    j["config"] = json_config(cfg);
    j["infeasible"] = true;
    j["message"] = ex.what();
    j["best_budget"] = json_budget(ex.best);
    write_json_file(dir / "report.json", j);
    std::cout << "verify-spine: INFEASIBLE, report in " << dir.string() << "\n";
    return kExitInfeasible;
  }
}

int cmd_fs_demo() {
  auto tr = fs_transversality();
  std::cout << "chart cocycle entries on the central torus (coefficients on d th1, d th2):\n";
  for (int k = 0; k < 3; ++k)
    std::cout << "  beta_" << k + 1 << " = (" << tr.entries[k][0] << ", " << tr.entries[k][1]
              << ")\n";
  std::cout << "pairwise wedge densities vs d th1 ^ d th2: " << tr.wedge[0] << " " << tr.wedge[1]
            << " " << tr.wedge[2] << "\n";

  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> ur(0.1, 2.5), uth(0.0, 2 * M_PI);
  double worst = 0.0;
  for (int lam = 1; lam <= 3; ++lam)
    for (int i = 0; i < 200; ++i) {
      FsChartPoint p{lam, ur(rng), uth(rng), ur(rng), uth(rng)};
      worst = std::max(worst, (fs_cocycle_difference(p) - fs_expected_difference(p)).max_abs());
    }
  double sumres = 0.0;
  for (int j = 0; j < 2; ++j)
    sumres = std::max(sumres, std::abs(tr.entries[0][j] + tr.entries[1][j] + tr.entries[2][j]));
  std::cout << "cocycle-difference residual over 600 overlap points: " << worst << "\n";
  std::cout << "sum-to-zero residual: " << sumres << "\n";
  bool ok = worst <= 1e-10 && sumres <= 1e-10 && tr.pairwise_transverse;
  std::cout << (ok ? "fs-demo: PASS\n" : "fs-demo: FAIL\n");
  return ok ? kExitPass : kExitVerifyFail;
}

int cmd_foliate(const RunConfig& cfg) {
  SurfaceData d = prepare_surface(cfg);
  fs::path dir = ensure_outdir(cfg);
  auto zr = find_zeros(d.mesh, d.beta);
  std::vector<int> zv;
  for (const auto& z : zr.zeros) zv.push_back(z.vertex);
  std::vector<double> fdist(d.mesh.n_faces(), std::numeric_limits<double>::infinity());
  if (!zv.empty()) fdist = face_distance(d.mesh, distance_to_vertices(d.mesh, zv));

  int start = 0;
  for (int f = 0; f < d.mesh.n_faces(); ++f)
    if (fdist[f] > fdist[start]) start = f;
  double budget = cfg.trace_len > 0 ? cfg.trace_len : 60.0 * d.mesh.mean_edge_len + 10.0;
  auto leaf = trace_leaf(d.mesh, d.beta, start, d.mesh.face_centroid(start), budget,
                         std::sqrt(cfg.r0), &fdist);
  auto transversal = closed_transversal(d.mesh, d.beta, start, d.mesh.face_centroid(start));

  ordered_json paths;
  paths["config"] = json_config(cfg);
  paths["leaf"] = json_path(d.mesh, leaf.path);
  paths["leaf_stop"] = leaf.stop == TraceStop::Closed     ? "closed"
                       : leaf.stop == TraceStop::NearZero ? "near-zero"
                                                          : "max-length";
  paths["transversal"] = json_path(d.mesh, transversal);
  paths["transversal_margin"] = transversality_margin(transversal, d.beta);
  write_json_file(dir / "paths.json", paths);

  // level multicurves: either the requested level or one per regular band
  ordered_json curves = ordered_json::array();
  Eigen::VectorXd theta = integrate_potential(d.mesh, d.beta);
  if (max_integrality_defect(d.mesh, d.beta, theta) <= 1e-8) {
    std::vector<double> levels;
    if (cfg.level >= 0.0) {
      levels.push_back(cfg.level);
    } else {
      auto sing = singular_levels(d.mesh, d.beta, zr.zeros);
      std::vector<double> svals = sing;
      svals.push_back(sing.empty() ? 1.0 : sing.front() + 1.0);
      if (sing.empty()) svals.insert(svals.begin(), 0.0);
      for (size_t i = 0; i + 1 < svals.size(); ++i)
        if (svals[i + 1] - svals[i] > 1e-6)
          levels.push_back(find_regular_level(d.mesh, d.beta, svals[i], svals[i + 1]));
    }
    for (double L : levels) {
      auto mc = regular_level_multicurve(d.mesh, d.beta, d.basis, L);
      ordered_json entry;
      entry["level"] = L;
      entry["components"] = mc.curves.size();
      ordered_json classes = ordered_json::array();
      for (const auto& cls : mc.curve_class) {
        ordered_json c = ordered_json::array();
        for (int j = 0; j < cls.size(); ++j) c.push_back(std::lround(cls[j]));
        classes.push_back(c);
      }
      entry["classes"] = classes;
      curves.push_back(entry);
    }
  }
  write_json_file(dir / "multicurves.json", ordered_json{{"levels", curves}});
  std::cout << "foliate: outputs in " << dir.string() << "\n";
  return kExitPass;
}

int cmd_family(const RunConfig& cfg) {
  SurfaceData d = prepare_surface(cfg);
  fs::path dir = ensure_outdir(cfg);
  const int n = cfg.family_size;

  FamilyData fd = build_family_data(cfg, d);
  std::vector<MetricWeights>& weights = fd.weights;
  std::vector<DiscreteOneForm>& betas = fd.betas;

  // assemble and verify every member under the budget found for member 0
  std::vector<SpineAssembly> assemblies;
  CoverOptions copt;
  copt.budget = cfg.cover_budget;
  copt.lines_per_strip = cfg.lines_per_strip;
  for (int k = 0; k < n; ++k) {
    auto triple = make_triple(d.mesh, weights[k], betas[k], &d.basis);
    auto signs = assign_signs(d.mesh, triple.zero_set, cfg.seed);
    assemblies.push_back(
        build_spine_assembly(d.mesh, std::move(triple), signs, cfg.r0, cfg.r1, cfg.r2, copt));
  }
  GridSpec grid;
  grid.s_per_case = cfg.grid_s;
  grid.t_samples = cfg.grid_t;
  grid.polar_radii = cfg.grid_polar;
  grid.polar_angles = cfg.grid_polar;

  ConstantBudget budget;
  if (cfg.eps_pin > 0 && cfg.delta_pin > 0 && cfg.c_pin > 0) {
    budget = {cfg.eps_pin, cfg.delta_pin, cfg.c_pin, cfg.r0, cfg.r1, cfg.r2};
  } else {
    SearchBox box;
    box.epsilons = log_sweep(cfg.eps_min, cfg.eps_max, cfg.eps_steps);
    std::reverse(box.epsilons.begin(), box.epsilons.end());
    box.deltas = log_sweep(cfg.delta_min, cfg.delta_max, cfg.delta_steps);
    box.Cs = log_sweep(cfg.c_min, cfg.c_max, cfg.c_steps);
    budget = constant_search(assemblies[0], box, cfg.r0, cfg.r1, cfg.r2, grid).budget;
  }
  std::vector<const SpineAssembly*> aptr;
  std::vector<const MetricWeights*> wptr;
  for (int k = 0; k < n; ++k) {
    aptr.push_back(&assemblies[k]);
    wptr.push_back(&weights[k]);
  }
  auto rep = family_sweep(aptr, budget, d.basis, wptr, grid);

  ordered_json j;
  j["config"] = json_config(cfg);
  j["budget"] = json_budget(budget);
  j["isoperiodic"] = rep.isoperiodic;
  j["period_drift"] = rep.period_drift;
  j["uniform"] = rep.uniform;
  ordered_json members = ordered_json::array();
  for (const auto& mrep : rep.members) {
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& rm : mrep.mins) worst = std::min(worst, rm.min);
    members.push_back({{"pass", mrep.pass}, {"worst_min", worst}});
  }
  j["members"] = members;
  write_json_file(dir / "family_report.json", j);
  std::cout << "family: " << (rep.uniform ? "uniform PASS" : "FAIL") << ", isoperiodic="
            << (rep.isoperiodic ? "yes" : "no") << ", report in " << dir.string() << "\n";
  return rep.uniform ? kExitPass : kExitVerifyFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical verification of spine symplectic data"};
  app.require_subcommand(1);
  std::string config_path;

  auto* harmonic = app.add_subcommand("harmonic", "harmonic 1-form, zeros, periods");
  harmonic->add_option("--config", config_path)->required();
  auto* verify = app.add_subcommand("verify-spine", "full positivity suite with budget search");
  verify->add_option("--config", config_path)->required();
  auto* fsdemo = app.add_subcommand("fs-demo", "chart cocycle table on the standard torus");
  auto* foliate = app.add_subcommand("foliate", "leaf/transversal/multicurve export");
  foliate->add_option("--config", config_path)->required();
  auto* family = app.add_subcommand("family", "verify a family under one budget");
  family->add_option("--config", config_path)->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (fsdemo->parsed()) return cmd_fs_demo();
    RunConfig cfg = load_config(config_path);
    if (harmonic->parsed()) return cmd_harmonic(cfg);
    if (verify->parsed()) return cmd_verify_spine(cfg);
    if (foliate->parsed()) return cmd_foliate(cfg);
    if (family->parsed()) return cmd_family(cfg);
  } catch (const ConfigError& ex) {
    std::cerr << "input error: " << ex.what() << "\n";
    return kExitInput;
  } catch (const MeshError& ex) {
    std::cerr << "input error: " << ex.what() << "\n";
    return kExitInput;
  } catch (const CocycleError& ex) {
    std::cerr << "verification error: " << ex.what() << "\n";
    return kExitVerifyFail;
  } catch (const LevelError& ex) {
    std::cerr << "input error: " << ex.what() << "\n";
    return kExitInput;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitVerifyFail;
  }
  return kExitInput;
}
