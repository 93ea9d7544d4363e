#pragma once

// JSON and CSV serialization of reports, triples, zeros, and paths. Ordered
// keys and fixed float handling keep reports byte-identical across runs of
// the same configuration.

#include <filesystem>
#include <iomanip>

#include "json.hpp"
#include "spineform/pipeline.hpp"

namespace spineform {

using ordered_json = nlohmann::ordered_json;

inline ordered_json json_config(const RunConfig& cfg) {
  ordered_json j;
  for (const auto& [k, v] : cfg.raw) j["raw"][k] = v;
  j["resolved"]["mesh"] = cfg.mesh;
  j["resolved"]["r0"] = cfg.r0;
  j["resolved"]["r1"] = cfg.r1;
  j["resolved"]["r2"] = cfg.r2;
  j["resolved"]["grid_s"] = cfg.grid_s;
  j["resolved"]["grid_t"] = cfg.grid_t;
  j["resolved"]["grid_polar"] = cfg.grid_polar;
  j["resolved"]["seed"] = cfg.seed;
  j["resolved"]["cover_budget"] = cfg.cover_budget;
  j["resolved"]["lines_per_strip"] = cfg.lines_per_strip;
  j["resolved"]["flip_beta2"] = cfg.flip_beta2;
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(cfg.hash()));
  j["config_hash"] = buf;
  return j;
}

inline ordered_json json_budget(const ConstantBudget& b) {
  return ordered_json{{"epsilon", b.epsilon}, {"delta", b.delta}, {"C", b.C},
                      {"R0", b.R0},           {"R1", b.R1},       {"R2", b.R2}};
}

inline ordered_json json_report(const VerifyRun& run, const RunConfig& cfg) {
  ordered_json j;
  j["config"] = json_config(cfg);
  j["budget"] = json_budget(run.budget);
  j["searched"] = run.searched;
  if (run.searched) j["feasibility_margin"] = run.margin;
  j["grid"] = {{"s_per_case", run.report.grid.s_per_case},
               {"t_samples", run.report.grid.t_samples},
               {"polar_radii", run.report.grid.polar_radii},
               {"polar_angles", run.report.grid.polar_angles},
               {"strict_tol", run.report.grid.strict_tol},
               {"nonneg_tol", run.report.grid.nonneg_tol}};
  j["triple"] = {{"max_closedness", run.triple_report.max_closedness},
                 {"sum_residual", run.triple_report.sum_residual},
                 {"min_wedge_density", run.triple_report.min_wedge_density},
                 {"zero_set_consistent", run.triple_report.zero_set_consistent},
                 {"pass", run.triple_report.pass}};
  j["omega0"] = {{"nonneg", run.report.w0_nonneg},
                 {"zero_locus_max", run.report.w0_zero_locus_max},
                 {"zero_only_at_B", run.report.w0_zero_only_at_B}};
  ordered_json mins = ordered_json::array();
  for (const auto& rm : run.report.mins) {
    mins.push_back({{"quantity", rm.quantity},
                    {"lambda", rm.lambda},
                    {"region", rm.region},
                    {"zone", rm.zone},
                    {"min", rm.min},
                    {"pass", rm.pass},
                    {"argmin", {{"t", rm.arg.t}, {"s", rm.arg.s}, {"x", rm.arg.x}, {"y", rm.arg.y}}}});
  }
  j["region_minima"] = mins;
  j["contact_pm"] = {{"min_plus", run.contact.min_plus},
                     {"max_minus", run.contact.max_minus},
                     {"pass", run.contact.pass}};
  j["annulus_lemma"] = {{"support_ok", run.mup.support_ok},
                        {"positive_in_core", run.mup.positive_in_core},
                        {"positive_support_ok", run.mup.positive_support_ok},
                        {"negative_support_ok", run.mup.negative_support_ok},
                        {"pass", run.mup.pass}};
  j["pass"] = run.report.pass && run.contact.pass && run.mup.pass && run.triple_report.pass;
  return j;
}

inline void write_samples_csv(std::ostream& out, const std::vector<SamplePoint>& samples) {
  out << "lambda,region,zone,t,s,x,y,symplectic,contact_plus,contact_minus,boundary,w0sq\n";
  out << std::setprecision(17);
  for (const auto& p : samples)
    out << p.lambda << ',' << p.region << ',' << p.zone << ',' << p.t << ',' << p.s << ',' << p.x
        << ',' << p.y << ',' << p.q_symp << ',' << p.q_pos << ',' << p.q_neg << ',' << p.q_hat
        << ',' << p.w0sq << '\n';
}

inline ordered_json json_one_form(const DiscreteOneForm& f) {
  ordered_json vals = ordered_json::array();
  for (int e = 0; e < f.mesh->n_edges(); ++e) vals.push_back(f.values[e]);
  return vals;
}

inline ordered_json json_triple(const CocycleTriple& t, const SignAssignment& signs) {
  ordered_json j;
  j["beta1"] = json_one_form(t.beta[0]);
  j["beta2"] = json_one_form(t.beta[1]);
  j["beta3"] = json_one_form(t.beta[2]);
  ordered_json zeros = ordered_json::array();
  for (size_t i = 0; i < t.zero_set.size(); ++i) {
    const auto& z = t.zero_set[i];
    zeros.push_back({{"vertex", z.vertex},
                     {"face", z.anchor_face},
                     {"bary", z.bary},
                     {"index", z.index},
                     {"sign", i < signs.value.size() ? signs.value[i] : 0}});
  }
  j["zeros"] = zeros;
  ordered_json pairing = ordered_json::array();
  for (auto [q, p] : signs.pairing) pairing.push_back({{"negative", q}, {"positive", p}});
  j["pairing"] = pairing;
  return j;
}

inline ordered_json json_path(const TriangulatedSurface& m, const SurfacePath& path) {
  ordered_json samples = ordered_json::array();
  for (const auto& seg : path.segs) {
    const auto& F = m.faces[seg.face];
    // barycentric coordinates of the segment start in its face
    Eigen::Matrix2d M;
    M << (F.p[1] - F.p[0]).x(), (F.p[2] - F.p[0]).x(), (F.p[1] - F.p[0]).y(),
        (F.p[2] - F.p[0]).y();
    Eigen::Vector2d ab = M.partialPivLu().solve((seg.a - F.p[0]).eval());
    samples.push_back(
        {{"face", seg.face}, {"bary", {1.0 - ab[0] - ab[1], ab[0], ab[1]}}});
  }
  return ordered_json{{"closed", path.closed}, {"length", path.length()}, {"samples", samples}};
}

inline void write_json_file(const std::filesystem::path& p, const ordered_json& j) {
  std::ofstream out(p);
  if (!out) throw ConfigError("cannot write output file: " + p.string());
  out << j.dump(1, ' ') << '\n';
}

}  // namespace spineform
