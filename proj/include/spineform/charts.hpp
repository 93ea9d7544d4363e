#pragma once

// Exact exterior algebra over low-dimensional coordinate charts (dim 2..4).
// Coefficients are stored densely per degree; all products are computed
// exactly up to floating-point rounding.

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace spineform {

struct Chart {
  std::string id;
  std::vector<std::string> axes;  // covector names, index order fixed

  int dim() const { return static_cast<int>(axes.size()); }

  int axis(std::string_view name) const {
    for (int i = 0; i < dim(); ++i)
      if (axes[i] == name) return i;
    throw std::invalid_argument("chart '" + id + "' has no axis named '" + std::string(name) + "'");
  }
};

inline bool same_chart(const Chart& a, const Chart& b) {
  return &a == &b || (a.id == b.id && a.axes == b.axes);
}

namespace detail {

inline constexpr int binom4[5][5] = {
    {1, 0, 0, 0, 0}, {1, 1, 0, 0, 0}, {1, 2, 1, 0, 0}, {1, 3, 3, 1, 0}, {1, 4, 6, 4, 1}};

// Strictly increasing index subsets of {0..n-1}, size k, lexicographic order.
struct SubsetTable {
  int count = 0;
  std::array<std::array<int8_t, 4>, 6> sets{};  // unused slots = -1
};

inline const SubsetTable& subsets(int n, int k) {
  static const auto tables = [] {
    std::array<std::array<SubsetTable, 5>, 5> t{};
    for (int n = 0; n <= 4; ++n)
      for (int k = 0; k <= n; ++k) {
        SubsetTable& st = t[n][k];
        for (auto& s : st.sets) s.fill(-1);
        std::array<int8_t, 4> cur{};
        // iterative enumeration in lexicographic order
        std::vector<int> idx(k);
        for (int i = 0; i < k; ++i) idx[i] = i;
        while (true) {
          cur.fill(-1);
          for (int i = 0; i < k; ++i) cur[i] = static_cast<int8_t>(idx[i]);
          st.sets[st.count++] = cur;
          int pos = k - 1;
          while (pos >= 0 && idx[pos] == n - k + pos) --pos;
          if (pos < 0) break;
          ++idx[pos];
          for (int i = pos + 1; i < k; ++i) idx[i] = idx[i - 1] + 1;
        }
        if (k == 0) st.count = 1;  // the empty subset
        else if (st.count != binom4[n][k]) st.count = binom4[n][k];
      }
    return t;
  }();
  return tables[n][k];
}

inline int subset_index(int n, int k, std::span<const int8_t> sorted) {
  const SubsetTable& st = subsets(n, k);
  for (int i = 0; i < st.count; ++i) {
    bool eq = true;
    for (int j = 0; j < k; ++j)
      if (st.sets[i][j] != sorted[j]) { eq = false; break; }
    if (eq) return i;
  }
  return -1;
}

}  // namespace detail

// A single exterior-algebra element of fixed degree over a chart.
class FormValue {
 public:
  FormValue() = default;
  FormValue(const Chart& chart, int degree) : chart_(&chart), degree_(degree) {
    if (degree < 0 || degree > chart.dim())
      throw std::invalid_argument("form degree out of range for chart " + chart.id);
    coeff_.fill(0.0);
  }

  static FormValue zero(const Chart& chart, int degree) { return FormValue(chart, degree); }

  static FormValue scalar(const Chart& chart, double v) {
    FormValue f(chart, 0);
    f.coeff_[0] = v;
    return f;
  }

  // basis covector d(axes[axis])
  static FormValue covector(const Chart& chart, int axis) {
    FormValue f(chart, 1);
    f.coeff_.at(static_cast<size_t>(axis)) = 1.0;
    return f;
  }

  static FormValue covector(const Chart& chart, std::string_view name) {
    return covector(chart, chart.axis(name));
  }

  // degree-1 value with the given coefficients (one per axis)
  static FormValue one_form(const Chart& chart, std::span<const double> c) {
    if (static_cast<int>(c.size()) != chart.dim())
      throw std::invalid_argument("coefficient count != chart dimension");
    FormValue f(chart, 1);
    for (int i = 0; i < chart.dim(); ++i) f.coeff_[i] = c[i];
    return f;
  }

  const Chart& chart() const { return *chart_; }
  int degree() const { return degree_; }
  int terms() const { return detail::binom4[chart_->dim()][degree_]; }

  double operator[](int i) const { return coeff_[i]; }
  double& operator[](int i) { return coeff_[i]; }

  // Adds c * dx_{idx[0]} ^ ... ^ dx_{idx[k-1]}; repeated indices contribute zero.
  void add_term(std::span<const int> idx, double c) {
    if (static_cast<int>(idx.size()) != degree_)
      throw std::invalid_argument("term arity != degree");
    std::array<int8_t, 4> s{};
    int k = degree_;
    int sign = 1;
    for (int i = 0; i < k; ++i) s[i] = static_cast<int8_t>(idx[i]);
    // insertion sort, counting swaps
    for (int i = 1; i < k; ++i)
      for (int j = i; j > 0 && s[j - 1] > s[j]; --j) {
        std::swap(s[j - 1], s[j]);
        sign = -sign;
      }
    for (int i = 0; i + 1 < k; ++i)
      if (s[i] == s[i + 1]) return;
    int pos = detail::subset_index(chart_->dim(), k, std::span<const int8_t>(s.data(), k));
    coeff_[pos] += sign * c;
  }

  double coefficient(std::span<const int> idx) const {
    std::array<int8_t, 4> s{};
    int k = degree_;
    int sign = 1;
    for (int i = 0; i < k; ++i) s[i] = static_cast<int8_t>(idx[i]);
    for (int i = 1; i < k; ++i)
      for (int j = i; j > 0 && s[j - 1] > s[j]; --j) {
        std::swap(s[j - 1], s[j]);
        sign = -sign;
      }
    for (int i = 0; i + 1 < k; ++i)
      if (s[i] == s[i + 1]) return 0.0;
    int pos = detail::subset_index(chart_->dim(), k, std::span<const int8_t>(s.data(), k));
    return sign * coeff_[pos];
  }

  FormValue& operator+=(const FormValue& o) {
    require_compatible(o);
    for (int i = 0; i < terms(); ++i) coeff_[i] += o.coeff_[i];
    return *this;
  }
  FormValue& operator-=(const FormValue& o) {
    require_compatible(o);
    for (int i = 0; i < terms(); ++i) coeff_[i] -= o.coeff_[i];
    return *this;
  }
  FormValue& operator*=(double c) {
    for (int i = 0; i < terms(); ++i) coeff_[i] *= c;
    return *this;
  }

  friend FormValue operator+(FormValue a, const FormValue& b) { return a += b; }
  friend FormValue operator-(FormValue a, const FormValue& b) { return a -= b; }
  friend FormValue operator*(FormValue a, double c) { return a *= c; }
  friend FormValue operator*(double c, FormValue a) { return a *= c; }
  friend FormValue operator-(FormValue a) { return a *= -1.0; }

  double max_abs() const {
    double m = 0.0;
    for (int i = 0; i < terms(); ++i) m = std::max(m, std::abs(coeff_[i]));
    return m;
  }

 private:
  void require_compatible(const FormValue& o) const {
    if (!chart_ || !o.chart_ || !same_chart(*chart_, *o.chart_) || degree_ != o.degree_)
      throw std::invalid_argument("incompatible forms (chart or degree mismatch)");
  }

  const Chart* chart_ = nullptr;
  int degree_ = 0;
  std::array<double, 6> coeff_{};
};

// Graded wedge product. Degrees summing past the chart dimension give the
// zero top-degree value.
inline FormValue wedge(const FormValue& a, const FormValue& b) {
  if (!same_chart(a.chart(), b.chart()))
    throw std::invalid_argument("wedge: incompatible coordinate frames '" + a.chart().id +
                                "' vs '" + b.chart().id + "'");
  const Chart& ch = a.chart();
  const int n = ch.dim();
  const int dsum = a.degree() + b.degree();
  if (dsum > n) return FormValue::zero(ch, n);  // identically zero past top degree
  FormValue out(ch, dsum);
  const auto& sa = detail::subsets(n, a.degree());
  const auto& sb = detail::subsets(n, b.degree());
  for (int i = 0; i < sa.count; ++i) {
    if (a[i] == 0.0) continue;
    for (int j = 0; j < sb.count; ++j) {
      if (b[j] == 0.0) continue;
      std::array<int, 4> merged{};
      int m = 0;
      for (int t = 0; t < a.degree(); ++t) merged[m++] = sa.sets[i][t];
      for (int t = 0; t < b.degree(); ++t) merged[m++] = sb.sets[j][t];
      out.add_term(std::span<const int>(merged.data(), m), a[i] * b[j]);
    }
  }
  return out;
}

inline FormValue wedge(const FormValue& a, const FormValue& b, const FormValue& c) {
  return wedge(wedge(a, b), c);
}
inline FormValue wedge(const FormValue& a, const FormValue& b, const FormValue& c,
                       const FormValue& d) {
  return wedge(wedge(wedge(a, b), c), d);
}

// Sign of a top-degree value against the chart's declared positive
// orientation (the wedge of the axes in listed order).
inline int orientation_sign(const FormValue& top) {
  if (top.degree() != top.chart().dim())
    throw std::invalid_argument("orientation_sign: value is not top-degree");
  double c = top[0];
  return (c > 0.0) - (c < 0.0);
}

inline double top_coefficient(const FormValue& top) {
  if (top.degree() != top.chart().dim())
    throw std::invalid_argument("top_coefficient: value is not top-degree");
  return top[0];
}

// Substitutes each source covector by a degree-1 value in the target chart
// and extends multiplicatively; this is the pullback along the linear map
// whose covector images are `rows`.
inline FormValue apply_covector_map(const FormValue& f, const Chart& target,
                                    std::span<const FormValue> rows) {
  const int n = f.chart().dim();
  if (static_cast<int>(rows.size()) != n)
    throw std::invalid_argument("apply_covector_map: need one image per source covector");
  FormValue out(target, f.degree());
  const auto& ss = detail::subsets(n, f.degree());
  for (int i = 0; i < ss.count; ++i) {
    if (f[i] == 0.0) continue;
    FormValue term = FormValue::scalar(target, f[i]);
    for (int t = 0; t < f.degree(); ++t) term = wedge(term, rows[ss.sets[i][t]]);
    out += term;
  }
  return out;
}

}  // namespace spineform
