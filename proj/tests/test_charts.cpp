#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "spineform/charts.hpp"
#include "spineform/cutoffs.hpp"
#include "spineform/form_field.hpp"

using namespace spineform;

namespace {
const Chart kCollar{"collar", {"t", "s", "x", "y"}};
const Chart kAnn3{"annulus3", {"s", "u", "th"}};
}  // namespace

TEST_CASE("basis wedge and antisymmetry") {
  FormValue dx = FormValue::covector(kCollar, "x");
  FormValue dy = FormValue::covector(kCollar, "y");
  FormValue dxdy = wedge(dx, dy);
  std::array<int, 2> xy{kCollar.axis("x"), kCollar.axis("y")};
  CHECK(dxdy.coefficient(xy) == doctest::Approx(1.0));
  CHECK(wedge(dx, dx).max_abs() == 0.0);
  // one transposition flips the sign
  FormValue dydx = wedge(dy, dx);
  CHECK(dydx.coefficient(xy) == doctest::Approx(-1.0));
}

TEST_CASE("fubini-study cocycle entries wedge with coefficient 4") {
  const Chart torus{"torus", {"th1", "th2"}};
  FormValue b1 = FormValue::covector(torus, 0) * 2.0;
  FormValue b2 = FormValue::covector(torus, 1) * 2.0;
  FormValue w = wedge(b1, b2);
  CHECK(top_coefficient(w) == doctest::Approx(4.0));
}

TEST_CASE("graded anticommutativity, associativity, bilinearity on random forms") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    int j = static_cast<int>(rng() % 3);
    int k = static_cast<int>(rng() % 3);
    int l = static_cast<int>(rng() % 2);
    FormValue a = testing::random_form(rng, kCollar, j);
    FormValue b = testing::random_form(rng, kCollar, k);
    FormValue c = testing::random_form(rng, kCollar, l);
    double sign = ((j * k) % 2 == 0) ? 1.0 : -1.0;
    CHECK((wedge(a, b) - sign * wedge(b, a)).max_abs() < 1e-12);
    CHECK((wedge(wedge(a, b), c) - wedge(a, wedge(b, c))).max_abs() < 1e-12);
    FormValue a2 = testing::random_form(rng, kCollar, j);
    CHECK((wedge(a + a2, b) - (wedge(a, b) + wedge(a2, b))).max_abs() < 1e-12);
    CHECK((wedge(3.5 * a, b) - 3.5 * wedge(a, b)).max_abs() < 1e-12);
  }
}

TEST_CASE("wedge agrees with brute-force permutation-sign oracle") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    int j = static_cast<int>(rng() % 3);
    int k = static_cast<int>(rng() % 3);
    FormValue a = testing::random_form(rng, kCollar, j);
    FormValue b = testing::random_form(rng, kCollar, k);
    CHECK((wedge(a, b) - testing::wedge_bruteforce(a, b)).max_abs() < 1e-12);
  }
  // 3d charts run through the same machinery
  for (int trial = 0; trial < 100; ++trial) {
    int j = static_cast<int>(rng() % 2 + 1);
    FormValue a = testing::random_form(rng, kAnn3, j);
    FormValue b = testing::random_form(rng, kAnn3, 1);
    CHECK((wedge(a, b) - testing::wedge_bruteforce(a, b)).max_abs() < 1e-12);
  }
}

TEST_CASE("wedge past top degree is the zero value") {
  std::mt19937_64 rng(3);
  FormValue a = testing::random_form(rng, kCollar, 3);
  FormValue b = testing::random_form(rng, kCollar, 2);
  CHECK(wedge(a, b).max_abs() == 0.0);
  FormValue c = testing::random_form(rng, kAnn3, 2);
  FormValue d = testing::random_form(rng, kAnn3, 2);
  CHECK(wedge(c, d).max_abs() == 0.0);
}

TEST_CASE("chart mismatch raises") {
  FormValue a = FormValue::covector(kCollar, 0);
  FormValue b = FormValue::covector(kAnn3, 0);
  CHECK_THROWS_AS((void)wedge(a, b), std::invalid_argument);
}

TEST_CASE("orientation sign") {
  FormValue dt = FormValue::covector(kCollar, "t");
  FormValue ds = FormValue::covector(kCollar, "s");
  FormValue dx = FormValue::covector(kCollar, "x");
  FormValue dy = FormValue::covector(kCollar, "y");
  CHECK(orientation_sign(wedge(dt, ds, dx, dy)) == 1);
  CHECK(orientation_sign(wedge(ds, dt, dx, dy)) == -1);
  CHECK(orientation_sign(FormValue::zero(kCollar, 4)) == 0);
  CHECK_THROWS_AS((void)orientation_sign(dx), std::invalid_argument);
}

TEST_CASE("finite-difference oracle on closed-form fields") {
  FormField constant;
  constant.chart = &kCollar;
  constant.degree = 1;
  constant.evaluate = [](std::span<const double>) {
    FormValue f(kCollar, 1);
    f[2] = 1.5;  // 1.5 dx
    return f;
  };
  std::array<double, 4> p{0.1, 0.2, 0.3, 0.4};
  CHECK(exterior_derivative_fd(constant, p).max_abs() < 1e-9);

  // x dy - y dx has derivative 2 dx^dy
  FormField rot;
  rot.chart = &kCollar;
  rot.degree = 1;
  rot.evaluate = [](std::span<const double> q) {
    FormValue f(kCollar, 1);
    f[2] = -q[3];
    f[3] = q[2];
    return f;
  };
  FormValue d = exterior_derivative_fd(rot, p);
  std::array<int, 2> xy{2, 3};
  CHECK(d.coefficient(xy) == doctest::Approx(2.0).epsilon(1e-8));

  // boundary guard
  FormField bounded = rot;
  bounded.domain = {{0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}};
  std::array<double, 4> edge{0.0, 0.2, 0.3, 0.4};
  CHECK_THROWS_AS((void)exterior_derivative_fd(bounded, edge), std::invalid_argument);
}

TEST_CASE("fd oracle converges at second order on a smooth field") {
  FormField f;
  f.chart = &kCollar;
  f.degree = 1;
  f.evaluate = [](std::span<const double> q) {
    FormValue v(kCollar, 1);
    v[0] = std::sin(q[1] * q[2]);
    v[2] = q[0] * q[0] * q[3];
    v[3] = std::cos(q[0]) * q[1];
    return v;
  };
  f.derivative = [](std::span<const double> q) {
    FormValue v(kCollar, 2);
    // d(sin(s x) dt) = x cos(sx) ds^dt + s cos(sx) dx^dt
    v.add_term(std::array<int, 2>{1, 0}, q[2] * std::cos(q[1] * q[2]));
    v.add_term(std::array<int, 2>{2, 0}, q[1] * std::cos(q[1] * q[2]));
    // d(t^2 y dx) = 2 t y dt^dx + t^2 dy^dx
    v.add_term(std::array<int, 2>{0, 2}, 2.0 * q[0] * q[3]);
    v.add_term(std::array<int, 2>{3, 2}, q[0] * q[0]);
    // d(cos(t) s dy) = -sin(t) s dt^dy + cos(t) ds^dy
    v.add_term(std::array<int, 2>{0, 3}, -std::sin(q[0]) * q[1]);
    v.add_term(std::array<int, 2>{1, 3}, std::cos(q[0]));
    return v;
  };
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  for (int i = 0; i < 100; ++i) {
    std::array<double, 4> p{u(rng), u(rng), u(rng), u(rng)};
    FdCheck c = check_derivative_fd(f, p, 1e-4);
    CHECK(c.err_h < 1e-7);
    // halving h shrinks the truncation error by about 4 (rounding floor aside)
    CHECK(c.err_h2 < std::max(c.err_h, 1e-11));
  }
}

TEST_CASE("cutoff profiles satisfy their support and monotonicity constraints") {
  double eps = 0.01, delta = 0.1;
  CollarPhi phi(eps);
  CHECK(phi(0.0) == doctest::Approx(1.0));
  CHECK(phi(2 * eps) == doctest::Approx(1.0 - 2 * eps));
  CHECK(phi(3 * eps) == doctest::Approx(0.0));
  CHECK(phi(3.5 * eps) == doctest::Approx(0.0));
  CHECK(phi(4 * eps) == doctest::Approx(0.0));
  for (double s = 0.0; s <= 2 * eps; s += eps / 7) CHECK(phi(s) == doctest::Approx(1.0 - s));
  for (double s = 2.02 * eps; s < 2.98 * eps; s += eps / 50) CHECK(phi.deriv(s) < 0.0);
  for (double s = 3 * eps; s <= 4 * eps; s += eps / 10) {
    CHECK(phi(s) <= 0.0);
    CHECK(phi.deriv(s) <= phi(s) + 1e-15);
  }

  PsiQ psi(eps);
  CHECK(psi(2 * eps) == 0.0);
  CHECK(psi(5 * eps) == 1.0);
  for (double s = 3.02 * eps; s < 4.98 * eps; s += eps / 50) CHECK(psi.deriv(s) > 0.0);

  AnnulusPhi2 phi2(eps, delta);
  CHECK(phi2(eps / 2) == 0.0);
  CHECK(phi2(0.5) == doctest::Approx(-1.0));
  CHECK(phi2(1 + 1.5 * delta) == 0.0);
  for (double s = 1 - delta / 2; s <= 1 + delta / 2; s += delta / 20) CHECK(phi2.deriv(s) > 0.0);
  for (double s = 1.02 * eps; s < 1.98 * eps; s += eps / 50) CHECK(phi2.deriv(s) < 0.0);

  AnnulusPhi1 phi1(delta);
  for (double u = -delta / 2; u <= delta / 2; u += delta / 20)
    CHECK(phi1(u) == doctest::Approx(1.0));
  CHECK(phi1(-delta) == 0.0);
  CHECK(phi1(delta) == 0.0);

  RadialCutoff phiB(0.04, 0.09);
  CHECK(phiB(0.02) == 1.0);
  CHECK(phiB(0.1) == 0.0);
}
