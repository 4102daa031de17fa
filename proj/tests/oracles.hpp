#pragma once

// Brute-force reference computations. They share no code with the library's
// clustering or metric routines.

#include <array>
#include <cstddef>
#include <limits>
#include <vector>

namespace rfme::oracle {

using Vec4 = std::array<double, 4>;

/// Minimum WCSS over every assignment of the points to k labels (k^n
/// enumeration, each cluster scored against its own mean).
inline double optimal_wcss(const std::vector<Vec4>& pts, int k) {
  const std::size_t n = pts.size();
  std::vector<int> label(n, 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    double total = 0.0;
    for (int c = 0; c < k; ++c) {
      Vec4 sum{};
      int count = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (label[i] != c) continue;
        for (int f = 0; f < 4; ++f) sum[f] += pts[i][f];
        ++count;
      }
      if (count == 0) continue;
      for (std::size_t i = 0; i < n; ++i) {
        if (label[i] != c) continue;
        for (int f = 0; f < 4; ++f) {
          const double d = pts[i][f] - sum[f] / count;
          total += d * d;
        }
      }
    }
    if (total < best) best = total;
    std::size_t pos = 0;
    while (pos < n && ++label[pos] == k) label[pos++] = 0;
    if (pos == n) break;
  }
  return best;
}

/// Double loop over points and coordinates.
inline double naive_wcss(const std::vector<Vec4>& pts, const std::vector<Vec4>& centroids,
                         const std::vector<int>& assignment) {
  double total = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (int f = 0; f < 4; ++f) {
      const double d = pts[i][f] - centroids[static_cast<std::size_t>(assignment[i])][f];
      total += d * d;
    }
  }
  return total;
}

/// Rand-index style agreement computed over every pair of items, then
/// chance-corrected with the pair totals (O(n^2)).
inline double pairwise_ari(const std::vector<int>& a, const std::vector<int>& b) {
  const std::size_t n = a.size();
  double both = 0, same_a = 0, same_b = 0, pairs = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool sa = a[i] == a[j];
      const bool sb = b[i] == b[j];
      both += sa && sb;
      same_a += sa;
      same_b += sb;
      pairs += 1;
    }
  }
  const double expected = same_a * same_b / pairs;
  const double max_index = (same_a + same_b) / 2;
  if (max_index == expected) return 1.0;
  return (both - expected) / (max_index - expected);
}

}  // namespace rfme::oracle
