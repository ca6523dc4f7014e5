#pragma once

#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "hermex/summation.hpp"

namespace hermex {

/// Multi-index alpha in N^n with parabolic/Hermite degree |alpha|.
struct MultiIndex {
  std::vector<int> entries;

  int dim() const { return static_cast<int>(entries.size()); }
  int degree() const { return std::accumulate(entries.begin(), entries.end(), 0); }

  bool operator==(const MultiIndex& other) const { return entries == other.entries; }
};

/// Number of alpha in N^n with |alpha| = k, i.e. C(k+n-1, n-1).
inline std::uint64_t multi_index_count(int n, int k) {
  if (n < 1 || k < 0) throw std::invalid_argument("multi_index_count: need n >= 1, k >= 0");
  std::uint64_t c = 1;
  for (int i = 1; i <= n - 1; ++i) {
    c = c * static_cast<std::uint64_t>(k + i) / static_cast<std::uint64_t>(i);
  }
  return c;
}

/// Number of alpha with |alpha| <= K, i.e. C(K+n, n).
inline std::uint64_t multi_index_count_upto(int n, int K) {
  if (n < 1 || K < 0) throw std::invalid_argument("multi_index_count_upto: need n >= 1, K >= 0");
  std::uint64_t c = 1;
  for (int i = 1; i <= n; ++i) {
    c = c * static_cast<std::uint64_t>(K + i) / static_cast<std::uint64_t>(i);
  }
  return c;
}

/// First composition of k into n parts in graded-lex order: (k, 0, ..., 0).
inline void first_composition(int k, std::span<int> c) {
  if (c.empty()) throw std::invalid_argument("first_composition: empty index");
  c[0] = k;
  for (std::size_t j = 1; j < c.size(); ++j) c[j] = 0;
}

/// Advance c to the next composition of the same degree in graded-lex order
/// ((2,0,0) -> (1,1,0) -> (1,0,1) -> (0,2,0) -> ...). Returns false after the
/// last one, (0, ..., 0, k).
inline bool next_composition(std::span<int> c) {
  const int n = static_cast<int>(c.size());
  int j = -1;
  for (int i = n - 2; i >= 0; --i) {
    if (c[i] > 0) {
      j = i;
      break;
    }
  }
  if (j < 0) return false;
  int rest = 1;
  for (int i = j + 1; i < n; ++i) {
    rest += c[i];
    c[i] = 0;
  }
  c[j] -= 1;
  c[j + 1] = rest;
  return true;
}

/// All alpha with |alpha| = k in graded-lex order. Size C(k+n-1, n-1).
inline std::vector<MultiIndex> multi_indices(int n, int k) {
  if (n < 1 || k < 0) throw std::invalid_argument("multi_indices: need n >= 1, k >= 0");
  std::vector<MultiIndex> out;
  out.reserve(multi_index_count(n, k));
  MultiIndex alpha;
  alpha.entries.assign(n, 0);
  first_composition(k, alpha.entries);
  do {
    out.push_back(alpha);
  } while (next_composition(alpha.entries));
  return out;
}

/// All alpha with |alpha| <= K, degree-major, graded-lex within each degree.
/// This is the canonical ordering for moment tables.
inline std::vector<MultiIndex> multi_indices_upto(int n, int K) {
  std::vector<MultiIndex> out;
  out.reserve(multi_index_count_upto(n, K));
  for (int k = 0; k <= K; ++k) {
    auto level = multi_indices(n, k);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

/// Sum over |alpha| = k of prod_j w[j][alpha_j], with compensated
/// accumulation in graded-lex order. Each w[j] must have size > k.
inline double sum_degree_products(const std::vector<std::vector<double>>& w, int k) {
  const int n = static_cast<int>(w.size());
  if (n < 1) throw std::invalid_argument("sum_degree_products: empty table");
  for (const auto& wj : w) {
    if (static_cast<int>(wj.size()) <= k)
      throw std::invalid_argument("sum_degree_products: table shorter than degree");
  }
  NeumaierSum acc;
  std::vector<int> alpha(n);
  first_composition(k, alpha);
  do {
    double p = w[0][alpha[0]];
    for (int j = 1; j < n; ++j) p *= w[j][alpha[j]];
    acc.add(p);
  } while (next_composition(alpha));
  return acc.value();
}

}  // namespace hermex
