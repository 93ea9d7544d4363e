#pragma once

// Test-only oracles, kept independent of the library's algebra paths.

#include <array>
#include <random>
#include <vector>

#include "spineform/charts.hpp"

namespace spineform::testing {

// Permutation sign of idx (no repeats), 0 if any repeat.
inline int perm_sign(std::vector<int> idx) {
  int sign = 1;
  for (size_t i = 0; i < idx.size(); ++i)
    for (size_t j = i + 1; j < idx.size(); ++j) {
      if (idx[i] == idx[j]) return 0;
      if (idx[i] > idx[j]) {
        std::swap(idx[i], idx[j]);
        sign = -sign;
      }
    }
  return sign;
}

// Fully antisymmetric tensor representation of a form: coefficient on an
// arbitrary ordered index tuple.
inline double tensor_coeff(const FormValue& f, const std::vector<int>& idx) {
  return f.coefficient(std::span<const int>(idx.data(), idx.size()));
}

// Brute-force wedge: for each strictly increasing target subset S of size
// j+k, sum over all ways to pick which slots of S come from `a`, with the
// shuffle sign computed from scratch.
inline FormValue wedge_bruteforce(const FormValue& a, const FormValue& b) {
  const Chart& ch = a.chart();
  int n = ch.dim();
  int j = a.degree(), k = b.degree();
  if (j + k > n) return FormValue::zero(ch, n);
  FormValue out(ch, j + k);
  const auto& st = detail::subsets(n, j + k);
  for (int t = 0; t < st.count; ++t) {
    std::vector<int> s(j + k);
    for (int i = 0; i < j + k; ++i) s[i] = st.sets[t][i];
    // choose positions for a's indices
    std::vector<int> choose(j + k, 0);
    for (int i = 0; i < j; ++i) choose[i] = 1;
    std::sort(choose.begin(), choose.end());
    double total = 0.0;
    do {
      std::vector<int> ia, ib, perm;
      for (int i = 0; i < j + k; ++i) (choose[i] ? ia : ib).push_back(s[i]);
      perm = ia;
      perm.insert(perm.end(), ib.begin(), ib.end());
      // sign of the shuffle taking (ia,ib) concatenation to sorted s
      total += perm_sign(perm) * tensor_coeff(a, ia) * tensor_coeff(b, ib);
    } while (std::next_permutation(choose.begin(), choose.end()));
    std::array<int, 4> si{};
    for (int i = 0; i < j + k; ++i) si[i] = s[i];
    out.add_term(std::span<const int>(si.data(), j + k), total);
  }
  return out;
}

inline FormValue random_form(std::mt19937_64& rng, const Chart& ch, int degree) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  FormValue f(ch, degree);
  for (int i = 0; i < f.terms(); ++i) f[i] = u(rng);
  return f;
}

}  // namespace spineform::testing
