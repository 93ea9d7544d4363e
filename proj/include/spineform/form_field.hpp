#pragma once

// Pointwise form fields over a chart, with analytic derivatives supplied by
// each constructor, plus a central-difference exterior-derivative oracle used
// to cross-check them.

#include <functional>
#include <limits>
#include <optional>

#include "spineform/charts.hpp"

namespace spineform {

struct FormField {
  const Chart* chart = nullptr;
  int degree = 0;
  std::function<FormValue(std::span<const double>)> evaluate;
  std::function<FormValue(std::span<const double>)> derivative;  // analytic d
  // optional axis-aligned domain box (lo, hi per axis); empty = unbounded
  std::vector<std::pair<double, double>> domain;

  bool in_domain(std::span<const double> p, double pad = 0.0) const {
    if (domain.empty()) return true;
    for (size_t i = 0; i < domain.size(); ++i)
      if (p[i] < domain[i].first + pad || p[i] > domain[i].second - pad) return false;
    return true;
  }
};

// Central-difference approximation of d(field) at an interior point.
// d(sum a_I dx_I) = sum_i (d a_I / d x_i) dx_i ^ dx_I, each partial taken by
// the O(h^2) centered stencil.
inline FormValue exterior_derivative_fd(const FormField& field, std::span<const double> p,
                                        double h = 1e-5) {
  if (h <= 0.0) throw std::invalid_argument("exterior_derivative_fd: h must be positive");
  if (!field.in_domain(p, h))
    throw std::invalid_argument("exterior_derivative_fd: point too close to chart boundary");
  const Chart& ch = *field.chart;
  const int n = ch.dim();
  FormValue out(ch, std::min(field.degree + 1, n));
  if (field.degree + 1 > n) return out;  // top-degree fields have d = 0
  std::vector<double> q(p.begin(), p.end());
  const auto& ss = detail::subsets(n, field.degree);
  for (int i = 0; i < n; ++i) {
    q[i] = p[i] + h;
    FormValue fp = field.evaluate(q);
    q[i] = p[i] - h;
    FormValue fm = field.evaluate(q);
    q[i] = p[i];
    FormValue df = (fp - fm) * (1.0 / (2.0 * h));
    for (int t = 0; t < df.terms(); ++t) {
      if (df[t] == 0.0) continue;
      std::array<int, 4> idx{};
      idx[0] = i;
      for (int u = 0; u < field.degree; ++u) idx[u + 1] = ss.sets[t][u];
      out.add_term(std::span<const int>(idx.data(), field.degree + 1), df[t]);
    }
  }
  return out;
}

// Max coefficient difference between the analytic derivative and the
// finite-difference oracle at a point, with a Richardson check at h/2.
struct FdCheck {
  double err_h;
  double err_h2;
  double scale;  // max |analytic| coefficient, for relative thresholds
};

inline FdCheck check_derivative_fd(const FormField& field, std::span<const double> p,
                                   double h = 1e-5) {
  FormValue analytic = field.derivative(p);
  FdCheck c{};
  c.err_h = (exterior_derivative_fd(field, p, h) - analytic).max_abs();
  c.err_h2 = (exterior_derivative_fd(field, p, h / 2) - analytic).max_abs();
  c.scale = std::max(1.0, analytic.max_abs());
  return c;
}

}  // namespace spineform
