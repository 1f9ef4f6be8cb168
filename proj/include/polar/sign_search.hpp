#pragma once

// Exhaustive optimization of the quadratic form eps^T K eps over sign vectors
// eps in {-1,+1}^n, shared by the Bang certificate search and the sign choice
// in the averaging construction.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "polar/errors.hpp"
#include "polar/linalg.hpp"

namespace polar {

using Signs = std::vector<int>;

inline Signs all_plus(std::size_t n) { return Signs(n, 1); }

/// eps^T K eps.
inline double sign_quadratic(const SymmetricMatrix& k, const Signs& eps) {
  const std::size_t n = k.size();
  double q = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += k(i, j) * eps[j];
    q += eps[i] * row;
  }
  return q;
}

/// Lexicographic order on sign vectors with +1 ranked before -1.
inline bool sign_lex_less(const Signs& a, const Signs& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return a[i] > b[i];
  return false;
}

enum class Extremum { kMax, kMin };

inline constexpr std::size_t kExhaustiveSignLimit = 20;

/// Visits all 2^(n-1) sign vectors with eps_0 = +1 in Gray-code order (eps and
/// -eps give the same value) and returns the extremizer of eps^T K eps. Values
/// within a relative 1e-12 are treated as tied; ties go to the
/// lexicographically smallest vector (+1 before -1).
inline Signs extremize_signs(const SymmetricMatrix& k, Extremum which) {
  const std::size_t n = k.size();
  if (n > kExhaustiveSignLimit + 1)
    throw UnsupportedDimension("exhaustive sign search is limited to n <= 21");
  if (n == 0) return {};

  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) scale += std::abs(k(i, j));
  const double tie = 1e-12 * std::max(scale, 1e-300);

  Signs eps = all_plus(n);
  Vector u = k * std::vector<double>(eps.begin(), eps.end());  // u = K eps
  double value = sign_quadratic(k, eps);

  Signs best = eps;
  double best_value = value;

  const std::uint64_t count = std::uint64_t{1} << (n - 1);
  for (std::uint64_t step = 1; step < count; ++step) {
    // Gray code: flip the bit at the position of the lowest set bit of step,
    // offset by one so eps_0 stays fixed.
    std::size_t bit = 0;
    while (((step >> bit) & 1u) == 0) ++bit;
    const std::size_t j = bit + 1;

    const double ej = eps[j];
    value -= 4.0 * ej * (u[j] - k(j, j) * ej);
    for (std::size_t i = 0; i < n; ++i) u[i] -= 2.0 * ej * k(i, j);
    eps[j] = -eps[j];

    if ((step & 1023u) == 0) value = sign_quadratic(k, eps);

    const bool better = which == Extremum::kMax ? value > best_value + tie : value < best_value - tie;
    const bool tied = std::abs(value - best_value) <= tie;
    if (better) {
      best = eps;
      best_value = value;
    } else if (tied && sign_lex_less(eps, best)) {
      best = eps;
    }
  }
  return best;
}

}  // namespace polar
