#pragma once

// The central-surface cocycle: beta_1 = beta, beta_2 = -(star beta),
// beta_3 = -beta_1 - beta_2, its common zero set with a balanced sign
// assignment, validation, and isoperiodic family checks.

#include <queue>
#include <random>

#include "spineform/harmonic.hpp"
#include "spineform/zeros.hpp"

namespace spineform {

struct CocycleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CocycleTriple {
  const TriangulatedSurface* mesh = nullptr;
  std::array<DiscreteOneForm, 3> beta;
  std::vector<ZeroPoint> zero_set;
};

struct SignAssignment {
  std::vector<int> value;                    // per zero, +1 or -1
  std::vector<std::pair<int, int>> pairing;  // (negative zero idx, positive zero idx)
};

struct TripleReport {
  double max_closedness = 0.0;
  double sum_residual = 0.0;
  std::array<double, 3> min_wedge_density{};  // beta1^beta2, beta2^beta3, beta3^beta1
  double min_density_off_zero = 0.0;          // over faces not touching a zero vertex
  bool zero_set_consistent = true;
  bool pass = false;
};

// Builds the triple from a harmonic form with nondegenerate zeros. The star
// convention makes beta1 ^ beta2 = |beta1|^2 dvol pointwise-nonnegative.
// When the edge transfer of the rotated form is not exactly closed (any
// surface whose harmonic forms are not facewise parallel), beta2 is the
// harmonic representative carrying the rotated form's periods.
inline CocycleTriple make_triple(const TriangulatedSurface& m, const MetricWeights& w,
                                 const DiscreteOneForm& beta,
                                 const HomologyBasis* basis = nullptr,
                                 const HarmonicSpace* hspace = nullptr) {
  ZeroFindResult zr = find_zeros(m, beta);
  if (zr.degenerate) {
    std::string msg = "make_triple: degenerate zeros at vertices";
    for (const auto& z : zr.zeros)
      if (z.index != -1) msg += " " + std::to_string(z.vertex);
    throw CocycleError(msg);
  }
  CocycleTriple t;
  t.mesh = &m;
  t.beta[0] = beta;
  t.beta[1] = -hodge_star(m, w, beta);
  if (t.beta[1].closedness_residual() > 1e-10 * std::max(1.0, t.beta[1].max_abs())) {
    HomologyBasis local_basis;
    HarmonicSpace local_space;
    if (!basis) {
      local_basis = homology_basis(m);
      basis = &local_basis;
    }
    if (!hspace) {
      local_space = harmonic_space(m, w, *basis);
      hspace = &local_space;
    }
    t.beta[1] =
        harmonic_representative(m, w, *basis, *hspace, periods(t.beta[1], *basis)).form;
  }
  t.beta[2] = -t.beta[0] - t.beta[1];
  t.zero_set = zr.zeros;
  return t;
}

inline TripleReport validate_triple(const CocycleTriple& t, double wedge_tol = 1e-10,
                                    double closed_tol = 1e-10) {
  const TriangulatedSurface& m = *t.mesh;
  TripleReport r;
  for (const auto& b : t.beta) r.max_closedness = std::max(r.max_closedness, b.closedness_residual());
  DiscreteOneForm sum = t.beta[0] + t.beta[1] + t.beta[2];
  r.sum_residual = sum.max_abs();

  std::vector<char> zero_face(m.n_faces(), 0);
  for (const auto& z : t.zero_set)
    for (auto [f, c] : m.star[z.vertex]) zero_face[f] = 1;

  double scale = 0.0;
  for (const auto& b : t.beta) scale = std::max(scale, b.max_abs());
  double density_floor = 1e-7 * scale * scale;

  r.min_density_off_zero = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    double mn = std::numeric_limits<double>::infinity();
    for (int f = 0; f < m.n_faces(); ++f) {
      double d = wedge_face_density(t.beta[k], t.beta[(k + 1) % 3], f);
      mn = std::min(mn, d);
      if (!zero_face[f]) r.min_density_off_zero = std::min(r.min_density_off_zero, d);
      if (d <= density_floor && !zero_face[f]) r.zero_set_consistent = false;
    }
    r.min_wedge_density[k] = mn;
  }
  r.pass = r.max_closedness <= closed_tol && r.sum_residual <= 1e-12 &&
           *std::min_element(r.min_wedge_density.begin(), r.min_wedge_density.end()) >= -wedge_tol &&
           r.zero_set_consistent;
  return r;
}

namespace detail {
// graph distance between vertices over edge lengths
inline std::vector<double> dijkstra(const TriangulatedSurface& m, int src) {
  std::vector<std::vector<std::pair<int, double>>> adj(m.nv);
  for (const auto& e : m.edges) {
    adj[e.v0].emplace_back(e.v1, e.len);
    adj[e.v1].emplace_back(e.v0, e.len);
  }
  std::vector<double> dist(m.nv, std::numeric_limits<double>::infinity());
  std::priority_queue<std::pair<double, int>, std::vector<std::pair<double, int>>, std::greater<>>
      pq;
  dist[src] = 0.0;
  pq.emplace(0.0, src);
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
}  // namespace detail

// Balanced +-1 values on the zeros and a greedy nearest-neighbor matching of
// negatives to positives; deterministic for a fixed seed.
inline SignAssignment assign_signs(const TriangulatedSurface& m,
                                   const std::vector<ZeroPoint>& zeros, uint64_t seed) {
  const int n = static_cast<int>(zeros.size());
  if (n % 2 != 0) throw CocycleError("assign_signs: odd zero count (upstream bug)");
  SignAssignment sa;
  sa.value.assign(n, 0);
  if (n == 0) return sa;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  for (int i = 0; i < n; ++i) sa.value[order[i]] = (i < n / 2) ? +1 : -1;

  std::vector<int> pos, neg;
  for (int i = 0; i < n; ++i) (sa.value[i] > 0 ? pos : neg).push_back(i);
  std::vector<char> used(pos.size(), 0);
  for (int qi : neg) {
    auto dist = detail::dijkstra(m, zeros[qi].vertex);
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < pos.size(); ++j) {
      if (used[j]) continue;
      double d = dist[zeros[pos[j]].vertex];
      if (d < bd - 1e-15 || (std::abs(d - bd) <= 1e-15 && (best < 0 || pos[j] < pos[best]))) {
        bd = d;
        best = static_cast<int>(j);
      }
    }
    used[best] = 1;
    sa.pairing.emplace_back(qi, pos[best]);
  }
  return sa;
}

struct IsoperiodicReport {
  std::vector<Eigen::VectorXd> periods_beta1;
  std::vector<Eigen::VectorXd> periods_beta2;
  bool isoperiodic = false;
  double max_drift = 0.0;
};

// Periods of beta and -(star beta) per family member; isoperiodic iff all
// period vectors agree within tol.
inline IsoperiodicReport isoperiodic_check(
    const TriangulatedSurface& m, const HomologyBasis& basis,
    const std::vector<std::pair<const MetricWeights*, const DiscreteOneForm*>>& family,
    double tol = 1e-8) {
  IsoperiodicReport rep;
  for (auto& [w, b] : family) {
    if (b->mesh != &m) throw CocycleError("isoperiodic_check: family member on a different mesh");
    rep.periods_beta1.push_back(periods(*b, basis));
    DiscreteOneForm b2 = -hodge_star(m, *w, *b);
    rep.periods_beta2.push_back(periods(b2, basis));
  }
  for (size_t i = 1; i < family.size(); ++i) {
    rep.max_drift = std::max(rep.max_drift,
                             (rep.periods_beta1[i] - rep.periods_beta1[0]).cwiseAbs().maxCoeff());
    rep.max_drift = std::max(rep.max_drift,
                             (rep.periods_beta2[i] - rep.periods_beta2[0]).cwiseAbs().maxCoeff());
  }
  rep.isoperiodic = rep.max_drift <= tol;
  return rep;
}

}  // namespace spineform
