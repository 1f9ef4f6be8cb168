#pragma once

// Sign vectors satisfying Bang's lemma: for a unit-diagonal Gram matrix H and
// positive weights r there are signs eps with
//
//   eps_j r_j sum_k h_jk r_k eps_k >= r_j^2   for every j.
//
// Any local maximizer of Q(eps) = sum_jk eps_j r_j h_jk r_k eps_k under single
// sign flips satisfies it, so the search is a maximization of Q.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>

#include "polar/errors.hpp"
#include "polar/linalg.hpp"
#include "polar/sign_search.hpp"

namespace polar {

inline constexpr double kCertificateTolerance = 1e-10;

struct SignVector {
  Signs signs;
  /// lhs - rhs of the Bang inequality per coordinate.
  Vector slack;
};

class BangInstance {
 public:
  static constexpr double kDiagonalTolerance = 1e-9;

  /// Rejects H without unit diagonal (within 1e-9), H that is not PSD, and
  /// non-positive weights. The stored diagonal is set to exactly 1.
  BangInstance(SymmetricMatrix h, Vector r) : h_(std::move(h)), r_(std::move(r)) {
    const std::size_t n = h_.size();
    if (n == 0) throw InvalidInput("empty Bang instance");
    if (r_.size() != n) throw InvalidInput("weight vector has wrong dimension");
    for (std::size_t j = 0; j < n; ++j) {
      if (!(r_[j] > 0.0) || !std::isfinite(r_[j]))
        throw InvalidInput("weight " + std::to_string(j + 1) + " is not positive");
      if (std::abs(h_(j, j) - 1.0) > kDiagonalTolerance)
        throw InvalidInput("diagonal entry " + std::to_string(j + 1) + " is not 1");
      h_.set(j, j, 1.0);
    }
    const SpectralDecomposition spec = eigen_sym(h_);
    if (spec.smallest() < -kDiagonalTolerance * std::max(1.0, spec.largest()))
      throw InvalidInput("Bang matrix is not positive semidefinite");
  }

  static BangInstance unit_weights(SymmetricMatrix h) {
    const std::size_t n = h.size();
    return BangInstance(std::move(h), Vector(n, 1.0));
  }

  std::size_t size() const { return h_.size(); }
  const SymmetricMatrix& h() const { return h_; }
  const Vector& r() const { return r_; }

  /// K = R H R, so that Q(eps) = eps^T K eps.
  SymmetricMatrix weighted() const {
    const std::size_t n = size();
    SymmetricMatrix k(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) k.set(i, j, r_[i] * h_(i, j) * r_[j]);
    return k;
  }

 private:
  SymmetricMatrix h_;
  Vector r_;
};

/// eps_j r_j sum_k h_jk r_k eps_k - r_j^2 for each j.
inline Vector verify_bang(const BangInstance& inst, const Signs& eps) {
  const std::size_t n = inst.size();
  if (eps.size() != n) throw InvalidInput("sign vector has wrong dimension");
  Vector slack(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += inst.h()(j, k) * inst.r()[k] * eps[k];
    slack[j] = eps[j] * inst.r()[j] * s - inst.r()[j] * inst.r()[j];
  }
  return slack;
}

inline double bang_quadratic(const BangInstance& inst, const Signs& eps) {
  return sign_quadratic(inst.weighted(), eps);
}

/// Steepest-ascent flipping from eps: repeatedly flip the coordinate
/// with the most negative slack (lowest index on ties). Each flip raises Q by
/// -4 * slack_j, so the walk visits no sign vector twice.
inline Signs bang_local_search(const BangInstance& inst, Signs eps, std::size_t* flips = nullptr) {
  const std::size_t n = inst.size();
  const std::uint64_t cap =
      n >= 63 ? std::numeric_limits<std::uint64_t>::max() : (std::uint64_t{1} << n);
  std::uint64_t count = 0;
  for (;;) {
    const Vector slack = verify_bang(inst, eps);
    std::size_t worst = n;
    double worst_value = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double threshold = -1e-13 * inst.r()[j] * inst.r()[j];
      if (slack[j] < threshold && (worst == n || slack[j] < worst_value)) {
        worst = j;
        worst_value = slack[j];
      }
    }
    if (worst == n) break;
    if (count == cap) throw CertificateFailed("Bang local search exceeded 2^n flips");
    eps[worst] = -eps[worst];
    ++count;
  }
  if (flips != nullptr) *flips = static_cast<std::size_t>(count);
  return eps;
}

/// Local search started from (+1,...,+1).
inline Signs bang_local_search(const BangInstance& inst, std::size_t* flips = nullptr) {
  return bang_local_search(inst, all_plus(inst.size()), flips);
}

/// Global maximizer of Q; lexicographically smallest (+1 first) among ties.
/// Near-ties within rounding are polished by the local search, which leaves an
/// exact maximizer untouched.
inline Signs bang_exhaustive(const BangInstance& inst) {
  return bang_local_search(inst, extremize_signs(inst.weighted(), Extremum::kMax));
}

/// Exhaustive search for n <= 20, local search beyond. The returned slack is
/// recomputed independently of the search.
inline SignVector bang_signs(const BangInstance& inst) {
  Signs eps = inst.size() <= kExhaustiveSignLimit ? bang_exhaustive(inst) : bang_local_search(inst);
  Vector slack = verify_bang(inst, eps);
  for (std::size_t j = 0; j < slack.size(); ++j)
    if (slack[j] < -kCertificateTolerance)
      throw CertificateFailed("Bang certificate violated at row " + std::to_string(j + 1) +
                              " (slack " + std::to_string(slack[j]) + ")");
  return {std::move(eps), std::move(slack)};
}

}  // namespace polar
