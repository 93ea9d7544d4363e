#include <random>

#include "doctest.h"
#include "spineform/cocycle.hpp"
#include "spineform/harmonic.hpp"
#include "spineform/homology.hpp"
#include "spineform/mesh.hpp"
#include "spineform/metric.hpp"
#include "spineform/zeros.hpp"

using namespace spineform;

namespace {

// x- and y-displacement forms of a translation-structure mesh (all face
// charts in one developed frame up to translation)
DiscreteOneForm displacement_form(const TriangulatedSurface& m, int axis) {
  DiscreteOneForm out(m);
  for (int e = 0; e < m.n_edges(); ++e) {
    Vec2 d = m.edge_vec_in_face(e, 0);
    out.values[e] = axis == 0 ? d.x() : d.y();
  }
  return out;
}

}  // namespace

TEST_CASE("square torus mesh satisfies the Euler formula and is genus 1") {
  auto m = make_square_torus(8);
  CHECK(m.nv == 64);
  CHECK(m.n_faces() == 128);
  CHECK(m.nv - m.n_edges() + m.n_faces() == 0);
  CHECK(m.genus == 1);
  for (const auto& f : m.faces) CHECK(f.area > 0.0);
  CHECK(m.total_area == doctest::Approx(1.0));
  for (double a : m.cone_angle) CHECK(a == doctest::Approx(2 * M_PI));
}

TEST_CASE("octagon surface: genus 2, one cone point of angle 6 pi") {
  auto m = make_octagon_surface(2);
  CHECK(m.genus == 2);
  CHECK(m.nv - m.n_edges() + m.n_faces() == -2);
  int cones = 0;
  for (double a : m.cone_angle) {
    if (std::abs(a - 6 * M_PI) < 1e-9) ++cones;
    else CHECK(a == doctest::Approx(2 * M_PI));
  }
  CHECK(cones == 1);
}

TEST_CASE("decagon surface: genus 2, two cone points of angle 4 pi") {
  auto m = make_decagon_surface(2);
  CHECK(m.genus == 2);
  int cones = 0;
  for (double a : m.cone_angle) {
    if (std::abs(a - 4 * M_PI) < 1e-9) ++cones;
    else CHECK(a == doctest::Approx(2 * M_PI));
  }
  CHECK(cones == 2);
}

TEST_CASE("sphere (OFF octahedron) has genus 0 and an empty homology basis") {
  const char* off =
      "OFF\n6 8 12\n"
      "1 0 0\n-1 0 0\n0 1 0\n0 -1 0\n0 0 1\n0 0 -1\n"
      "3 0 2 4\n3 2 1 4\n3 1 3 4\n3 3 0 4\n3 2 0 5\n3 1 2 5\n3 3 1 5\n3 0 3 5\n";
  std::istringstream in(off);
  auto m = load_off(in);
  CHECK(m.genus == 0);
  auto basis = homology_basis(m);
  CHECK(basis.loops.empty());
}

TEST_CASE("malformed OFF input reports the line number") {
  std::istringstream in("OFF\n3 1 0\n0 0 0\n1 0 0\nnot a number\n3 0 1 2\n");
  CHECK_THROWS_WITH_AS((void)load_off(in), doctest::Contains("line 5"), MeshError);
}

TEST_CASE("polygon gluing text round-trips through the torus") {
  std::istringstream in(
      "# unit square torus\npolygon 4\n0 0\n1 0\n1 1\n0 1\npair 0 2\npair 1 3\nrefine 3\n");
  auto pg = load_polygon_gluing(in);
  auto m = make_polygon_surface(pg);
  CHECK(m.genus == 1);
  CHECK(m.total_area == doctest::Approx(1.0));
}

TEST_CASE("cotan weights and Delaunay preprocessing") {
  auto m = make_square_torus(6);
  auto w = compute_weights(m);
  for (double we : w.edge_w) CHECK(we >= -1e-12);
  double va = 0.0;
  for (double a : w.vertex_area) va += a;
  CHECK(va == doctest::Approx(1.0));

  // a skewed flat torus triangulated against the short diagonal has negative
  // weights; Delaunay flips cure them
  GluedTriangles g;
  int n = 4;
  double shear = 0.45;
  auto fid = [&](int i, int j, int k) { return 2 * (i * n + j) + k; };
  g.tris.resize(2 * n * n);
  g.adj.resize(2 * n * n);
  double h = 1.0 / n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Vec2 o(i * h + shear * j * h, j * h);
      Vec2 ex(h, 0), ey(shear * h, h);
      // split along the LONG diagonal (o to o+ex+ey) to force flips
      g.tris[fid(i, j, 0)].p = {o, o + ex, o + ex + ey};
      g.tris[fid(i, j, 1)].p = {o, o + ex + ey, o + ey};
      int ip = (i + 1) % n, im = (i + n - 1) % n, jp = (j + 1) % n, jm = (j + n - 1) % n;
      g.adj[fid(i, j, 0)][0] = {fid(i, jm, 1), 1};   // bottom <-> top of below
      g.adj[fid(i, j, 0)][1] = {fid(ip, j, 1), 2};   // right <-> left of right cell
      g.adj[fid(i, j, 0)][2] = {fid(i, j, 1), 0};    // diagonal
      g.adj[fid(i, j, 1)][0] = {fid(i, j, 0), 2};    // diagonal
      g.adj[fid(i, j, 1)][1] = {fid(i, jp, 0), 0};   // top
      g.adj[fid(i, j, 1)][2] = {fid(im, j, 0), 1};   // left
    }
  auto skew = finalize(g);
  auto w0 = compute_weights(skew);
  double wmin0 = *std::min_element(w0.edge_w.begin(), w0.edge_w.end());
  CHECK(wmin0 < -1e-3);
  auto fixed = intrinsic_delaunay(skew);
  auto w1 = compute_weights(fixed);
  double wmin1 = *std::min_element(w1.edge_w.begin(), w1.edge_w.end());
  CHECK(wmin1 >= -1e-9);
  CHECK(fixed.genus == 1);
  CHECK(fixed.total_area == doctest::Approx(skew.total_area));
}

TEST_CASE("homology basis: torus and genus 2") {
  auto torus = make_square_torus(6);
  auto tb = homology_basis(torus);
  CHECK(tb.loops.size() == 2);
  CHECK(std::abs(tb.intersection(0, 1)) == doctest::Approx(1.0));
  CHECK(tb.intersection(0, 0) == doctest::Approx(0.0));

  auto dec = make_decagon_surface(2);
  auto db = homology_basis(dec);
  CHECK(db.loops.size() == 4);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(db.intersection);
  CHECK(lu.rank() == 4);
}

TEST_CASE("dual cocycles are closed with unit periods") {
  auto m = make_decagon_surface(2);
  auto basis = homology_basis(m);
  for (size_t i = 0; i < basis.cocycles.size(); ++i) {
    CHECK(basis.cocycles[i].closedness_residual() < 1e-12);
    for (size_t j = 0; j < basis.loops.size(); ++j)
      CHECK(period(basis.cocycles[i], basis.loops[j]) ==
            doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
  }
}

TEST_CASE("harmonic representative on the flat torus recovers constant forms") {
  auto m = make_square_torus(16);
  auto w = compute_weights(m);
  auto basis = homology_basis(m);
  auto hs = harmonic_space(m, w, basis);
  CHECK(hs.basis.size() == 2);

  DiscreteOneForm dx = displacement_form(m, 0);
  auto r = harmonic_representative(m, w, basis, hs, periods(dx, basis));
  CHECK(r.closedness < 1e-10);
  CHECK(r.divergence < 1e-10);
  CHECK((r.form.values - dx.values).cwiseAbs().maxCoeff() < 1e-10);

  // zero periods give the zero form
  auto z = harmonic_representative(m, w, basis, hs, Eigen::VectorXd::Zero(2));
  CHECK(z.form.max_abs() < 1e-12);

  // periods are invariant under adding an exact form
  std::mt19937_64 rng(5);
  Eigen::VectorXd fn(m.nv);
  for (int i = 0; i < m.nv; ++i) fn[i] = std::uniform_real_distribution<double>(-1, 1)(rng);
  DiscreteOneForm exact = d0(m, fn);
  CHECK(periods(exact, basis).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((periods(dx + exact, basis) - periods(dx, basis)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("harmonic space has dimension 2g on the genus-2 decagon") {
  auto m = make_decagon_surface(2);
  auto w = compute_weights(m);
  auto basis = homology_basis(m);
  auto hs = harmonic_space(m, w, basis);
  CHECK(hs.basis.size() == 4);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(hs.period_matrix);
  CHECK(lu.rank() == 4);
  for (const auto& h : hs.basis) {
    CHECK(h.closedness_residual() < 1e-9);
    CHECK(divergence_residual(w, h) < 1e-9);
  }
}

TEST_CASE("translation forms are exactly harmonic on the decagon") {
  auto m = make_decagon_surface(2);
  auto w = compute_weights(m);
  DiscreteOneForm dx = displacement_form(m, 0);
  DiscreteOneForm dy = displacement_form(m, 1);
  CHECK(dx.closedness_residual() < 1e-12);
  CHECK(divergence_residual(w, dx) < 1e-10);
  CHECK(divergence_residual(w, dy) < 1e-10);
}

TEST_CASE("hodge star convention and star-squared") {
  auto m = make_square_torus(12);
  auto w = compute_weights(m);
  DiscreteOneForm dx = displacement_form(m, 0);
  DiscreteOneForm dy = displacement_form(m, 1);
  DiscreteOneForm star_dx = hodge_star(m, w, dx);
  CHECK((star_dx.values + dy.values).cwiseAbs().maxCoeff() < 1e-12);  // *dth1 = -dth2
  DiscreteOneForm ss = hodge_star(m, w, star_dx);
  CHECK((ss.values + dx.values).cwiseAbs().maxCoeff() < 1e-12);  // ** = -1 on constants
}

TEST_CASE("zeros: flat torus has none, decagon translation form has 2 of index -1") {
  auto torus = make_square_torus(8);
  auto zt = find_zeros(torus, displacement_form(torus, 0));
  CHECK(zt.zeros.empty());
  CHECK(zt.index_sum == 0);

  auto dec = make_decagon_surface(2);
  auto zd = find_zeros(dec, displacement_form(dec, 0));
  CHECK(zd.zeros.size() == 2);
  CHECK(zd.index_sum == -2);
  CHECK_FALSE(zd.degenerate);
  for (const auto& z : zd.zeros) {
    CHECK(z.index == -1);
    CHECK(dec.cone_angle[z.vertex] == doctest::Approx(4 * M_PI));
  }

  auto oct = make_octagon_surface(2);
  auto zo = find_zeros(oct, displacement_form(oct, 0));
  CHECK(zo.degenerate);
  CHECK(zo.index_sum == -2);  // one index -2 zero
}

TEST_CASE("cup pairing: antisymmetry, class invariance, torus normalization") {
  auto m = make_square_torus(10);
  DiscreteOneForm dx = displacement_form(m, 0);
  DiscreteOneForm dy = displacement_form(m, 1);
  CHECK(cup_pairing(dx, dx) == doctest::Approx(0.0));
  CHECK(cup_pairing(dx, dy) == doctest::Approx(1.0));
  CHECK(cup_pairing(dy, dx) == doctest::Approx(-1.0));
  std::mt19937_64 rng(17);
  Eigen::VectorXd fn(m.nv);
  for (int i = 0; i < m.nv; ++i) fn[i] = std::uniform_real_distribution<double>(-1, 1)(rng);
  DiscreteOneForm pert = dx + d0(m, fn);
  CHECK(cup_pairing(pert, dy) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("make_triple and validate_triple on torus and decagon") {
  auto torus = make_square_torus(8);
  auto wt = compute_weights(torus);
  auto t = make_triple(torus, wt, displacement_form(torus, 0));
  CHECK((t.beta[0] + t.beta[1] + t.beta[2]).max_abs() == 0.0);
  auto rep = validate_triple(t);
  CHECK(rep.pass);
  CHECK(rep.min_wedge_density[0] == doctest::Approx(1.0));
  CHECK(rep.min_wedge_density[1] == doctest::Approx(1.0));
  CHECK(rep.min_wedge_density[2] == doctest::Approx(1.0));

  // flipping the star convention turns every density negative
  CocycleTriple bad = t;
  bad.beta[1] = -bad.beta[1];
  bad.beta[2] = -bad.beta[0] - bad.beta[1];
  auto brep = validate_triple(bad);
  CHECK_FALSE(brep.pass);
  CHECK(brep.min_wedge_density[0] < 0.0);

  auto dec = make_decagon_surface(2);
  auto wd = compute_weights(dec);
  auto td = make_triple(dec, wd, displacement_form(dec, 0));
  CHECK(td.zero_set.size() == 2);
  auto drep = validate_triple(td);
  CHECK(drep.pass);
  CHECK(cup_pairing(td.beta[0], td.beta[1]) > 0.0);

  // degenerate zeros are refused
  auto oct = make_octagon_surface(2);
  auto wo = compute_weights(oct);
  CHECK_THROWS_AS((void)make_triple(oct, wo, displacement_form(oct, 0)), CocycleError);
}

TEST_CASE("pairwise wedge densities agree for a sum-zero triple") {
  auto dec = make_decagon_surface(2);
  auto wd = compute_weights(dec);
  auto t = make_triple(dec, wd, displacement_form(dec, 0));
  for (int f = 0; f < dec.n_faces(); ++f) {
    double d01 = wedge_face_density(t.beta[0], t.beta[1], f);
    double d12 = wedge_face_density(t.beta[1], t.beta[2], f);
    double d20 = wedge_face_density(t.beta[2], t.beta[0], f);
    CHECK(std::abs(d01 - d12) < 1e-12);
    CHECK(std::abs(d12 - d20) < 1e-12);
  }
}

TEST_CASE("assign_signs balances and matches") {
  auto dec = make_decagon_surface(2);
  auto wd = compute_weights(dec);
  auto t = make_triple(dec, wd, displacement_form(dec, 0));
  auto sa = assign_signs(dec, t.zero_set, 42);
  CHECK(sa.value.size() == 2);
  CHECK(sa.value[0] + sa.value[1] == 0);
  CHECK(sa.pairing.size() == 1);
  CHECK(sa.value[sa.pairing[0].first] == -1);
  CHECK(sa.value[sa.pairing[0].second] == +1);
  // deterministic under the same seed
  auto sa2 = assign_signs(dec, t.zero_set, 42);
  CHECK(sa.value == sa2.value);
  // empty zero set is fine
  auto empty = assign_signs(dec, {}, 1);
  CHECK(empty.value.empty());
  // odd count raises
  std::vector<ZeroPoint> odd(3);
  CHECK_THROWS_AS((void)assign_signs(dec, odd, 1), CocycleError);
}

TEST_CASE("isoperiodic check flags scaling families and accepts constant ones") {
  auto m = make_square_torus(8);
  auto w = compute_weights(m);
  DiscreteOneForm dx = displacement_form(m, 0);
  DiscreteOneForm scaled = dx * 1.25;
  auto basis = homology_basis(m);
  std::vector<std::pair<const MetricWeights*, const DiscreteOneForm*>> const_family{
      {&w, &dx}, {&w, &dx}, {&w, &dx}};
  CHECK(isoperiodic_check(m, basis, const_family).isoperiodic);
  std::vector<std::pair<const MetricWeights*, const DiscreteOneForm*>> scale_family{{&w, &dx},
                                                                                    {&w, &scaled}};
  CHECK_FALSE(isoperiodic_check(m, basis, scale_family).isoperiodic);
}
