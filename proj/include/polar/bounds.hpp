#pragma once

// Lower bounds on sup_{|y|=1} prod_j |<x_j, y>| for n unit vectors in R^n,
// each with the unit vector that attains it where the argument is
// constructive.
//
// All constructions work with S = (X X^T)^{1/2}, whose rows are unit vectors
// and which satisfies X = S U^T for an orthogonal U. A vector y built for S is
// mapped to U y, so that X (U y) = S y and the witness can be checked against
// the original rows.
//
// Normalization note: every bound here carries the factor n^{-n/2}. Some
// printed statements of the harmonic-mean and largest-eigenvalue bounds show
// n^{+n/2}, which would exceed 1; the derivations end in n^{-n/2}.

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "polar/bang.hpp"
#include "polar/errors.hpp"
#include "polar/linalg.hpp"
#include "polar/optimizer.hpp"
#include "polar/random.hpp"
#include "polar/sign_search.hpp"

namespace polar {

/// A bound kept in both linear and log form; the log form does not underflow.
struct Bound {
  double value = 0.0;
  double log_value = -std::numeric_limits<double>::infinity();

  static Bound from_log(double log_value) { return {std::exp(log_value), log_value}; }
  static Bound zero() { return {}; }
};

enum class Construction { kAveraging, kBangGram, kBangDiagonal };

inline std::string to_string(Construction c) {
  switch (c) {
    case Construction::kAveraging:
      return "thm1-averaging";
    case Construction::kBangGram:
      return "thm2-bang";
    case Construction::kBangDiagonal:
      return "thm3-bang";
  }
  return "unknown";
}

inline std::optional<Construction> construction_from_string(const std::string& s) {
  for (Construction c : {Construction::kAveraging, Construction::kBangGram, Construction::kBangDiagonal})
    if (to_string(c) == s) return c;
  return std::nullopt;
}

struct Witness {
  Construction construction = Construction::kAveraging;
  /// Unit vector in the coordinates of the original configuration.
  Vector y;
  /// product_at(config, y).
  double achieved = 0.0;
  /// The same vector before the rotation, in the frame of S, and
  /// prod_j |(S y_sym)_j|.
  Vector y_symmetric;
  double achieved_symmetric = 0.0;
  /// Sign vector used by the construction.
  Signs signs;
};

/// Everything the constructions share: G, its spectrum, S and the rotation U.
struct Symmetrization {
  Configuration config;
  SymmetricMatrix gram;
  SpectralDecomposition spectrum;
  SymmetricMatrix root;
  Matrix rotation;

  explicit Symmetrization(const Configuration& c)
      : config(c),
        gram(polar::gram(c)),
        spectrum(eigen_sym(gram)),
        root(sym_sqrt(spectrum)),
        rotation(polar_rotation(c, spectrum)) {}

  std::size_t dimension() const { return config.dimension(); }
  bool singular() const { return is_singular(spectrum); }
};

/// S = (X X^T)^{1/2}.
inline SymmetricMatrix symmetrize(const Configuration& config) { return sym_sqrt(gram(config)); }

inline double log_threshold(std::size_t n) {
  const double nn = static_cast<double>(n);
  return -0.5 * nn * std::log(nn);
}

namespace detail {

/// prod_j |(S y)_j| for unit y.
inline double symmetric_product(const SymmetricMatrix& s, std::span<const double> y) {
  const Vector sy = s * y;
  double p = 1.0;
  for (double v : sy) p *= std::abs(v);
  return p;
}

inline Witness make_witness(const Symmetrization& sym, Construction c, Vector y_sym, Signs signs) {
  Witness w;
  w.construction = c;
  w.y_symmetric = normalized(y_sym);
  w.achieved_symmetric = symmetric_product(sym.root, w.y_symmetric);
  w.y = normalized(sym.rotation * w.y_symmetric);
  w.achieved = product_at(sym.config, w.y);
  w.signs = std::move(signs);
  return w;
}

}  // namespace detail

/// (lambda_1 / n)^{n/2}; 0 when the Gram matrix is singular.
inline Bound marcus_bound(const SpectralDecomposition& spec) {
  if (is_singular(spec)) return Bound::zero();
  const double n = static_cast<double>(spec.size());
  return Bound::from_log(0.5 * n * std::log(spec.smallest() / n));
}

/// (HM(lambda) / n)^{n/2}, HM the harmonic mean of the Gram eigenvalues.
inline Bound harmonic_bound(const SpectralDecomposition& spec) {
  if (is_singular(spec)) throw SingularGram("harmonic bound needs a nonsingular Gram matrix");
  const double n = static_cast<double>(spec.size());
  double inv_sum = 0.0;
  for (double l : spec.values) inv_sum += 1.0 / l;
  return Bound::from_log(0.5 * n * std::log(n / inv_sum) + log_threshold(spec.size()));
}

struct BoundWithWitness {
  Bound bound;
  Witness witness;
};

inline Signs averaging_signs_greedy(const SymmetricMatrix& k, Signs eps) {
  const std::size_t n = k.size();
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t j = 0; j < n; ++j) {
      double off = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        if (i != j) off += k(j, i) * eps[i];
      // Flipping eps_j changes eps^T K eps by -4 eps_j off.
      if (eps[j] * off > 1e-14 * k(j, j)) {
        eps[j] = -eps[j];
        improved = true;
      }
    }
  }
  return eps;
}

/// Column-length bound (V_1...V_n)^{-1} n^{-n/2} with V_k the column lengths of
/// S^{-1}. Witness y = S^{-1} c(eps) / |S^{-1} c(eps)| with c_j = 1/V_j, for
/// signs making |S^{-1} c(eps)|^2 <= sum_k c_k^2 V_k^2 = n; averaging over all
/// sign patterns shows such signs exist.
inline BoundWithWitness thm1_bound_and_witness(const Symmetrization& sym) {
  const std::size_t n = sym.dimension();
  const SymmetricMatrix inv_root = sym_inv_sqrt(sym.spectrum);
  const Vector lengths = column_lengths(inv_root);

  double log_lengths = 0.0;
  for (double v : lengths) log_lengths += std::log(v);
  const Bound bound = Bound::from_log(-log_lengths + log_threshold(n));

  // |S^{-1} c(eps)|^2 = eps^T K eps with K = C S^{-2} C.
  SymmetricMatrix k(n);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = p; q < n; ++q) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += inv_root(i, p) * inv_root(i, q);
      k.set(p, q, s / (lengths[p] * lengths[q]));
    }
  const double budget = static_cast<double>(n) * (1.0 + 1e-12);

  Signs eps;
  if (n <= kExhaustiveSignLimit) {
    eps = extremize_signs(k, Extremum::kMin);
  } else {
    eps = averaging_signs_greedy(k, all_plus(n));
    Rng rng = make_rng(n, 0xA7);
    std::bernoulli_distribution coin;
    for (int attempt = 0; sign_quadratic(k, eps) > budget; ++attempt) {
      if (attempt == 64) throw CertificateFailed("no sign vector met the averaging inequality");
      Signs start(n);
      for (int& e : start) e = coin(rng) ? 1 : -1;
      eps = averaging_signs_greedy(k, std::move(start));
    }
  }
  if (sign_quadratic(k, eps) > budget)
    throw CertificateFailed("averaging sign choice violates |S^-1 c(eps)|^2 <= n");

  Vector c(n);
  for (std::size_t j = 0; j < n; ++j) c[j] = eps[j] / lengths[j];
  return {bound, detail::make_witness(sym, Construction::kAveraging, inv_root * c, std::move(eps))};
}

inline BoundWithWitness thm1_bound_and_witness(const Configuration& config) {
  return thm1_bound_and_witness(Symmetrization(config));
}

/// (n lambda_n)^{-n/2}. Witness y = S eps / |S eps| with eps a Bang sign
/// vector for (G, r = 1).
inline BoundWithWitness thm2_bound_and_witness(const Symmetrization& sym) {
  const std::size_t n = sym.dimension();
  const double nn = static_cast<double>(n);
  const Bound bound = Bound::from_log(-0.5 * nn * std::log(nn * sym.spectrum.largest()));
  SignVector eps = bang_signs(BangInstance::unit_weights(sym.gram));
  const Vector y = sym.root * std::vector<double>(eps.signs.begin(), eps.signs.end());
  return {bound, detail::make_witness(sym, Construction::kBangGram, y, std::move(eps.signs))};
}

inline BoundWithWitness thm2_bound_and_witness(const Configuration& config) {
  return thm2_bound_and_witness(Symmetrization(config));
}

inline constexpr double kDegenerateDiagonal = 1e-12;

/// B = A^{-1/2} S A^{-1/2} with weights r_j = a_j^{1/2}, A = diag(S).
inline BangInstance diagonal_bang_instance(const Symmetrization& sym) {
  const std::size_t n = sym.dimension();
  const Vector a = sym.root.diagonal();
  SymmetricMatrix b(n);
  Vector r(n);
  for (std::size_t p = 0; p < n; ++p) {
    if (!(a[p] > kDegenerateDiagonal))
      throw DegenerateDiagonal("diagonal entry " + std::to_string(p + 1) + " of S vanishes");
    r[p] = std::sqrt(a[p]);
    for (std::size_t q = p; q < n; ++q) b.set(p, q, sym.root(p, q) / std::sqrt(a[p] * a[q]));
  }
  return BangInstance(std::move(b), std::move(r));
}

/// (a_1...a_n) n^{-n/2} with a_j the diagonal of S. With A = diag(a),
/// B = A^{-1/2} S A^{-1/2} has unit diagonal; a Bang sign vector eps for
/// (B, r_j = a_j^{1/2}) gives |(S eps)_j| >= a_j, so y = eps / sqrt(n).
inline BoundWithWitness thm3_bound_and_witness(const Symmetrization& sym) {
  const std::size_t n = sym.dimension();
  const Vector a = sym.root.diagonal();
  double log_a = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (!(a[j] > kDegenerateDiagonal))
      throw DegenerateDiagonal("diagonal entry " + std::to_string(j + 1) + " of S vanishes");
    log_a += std::log(a[j]);
  }
  const Bound bound = Bound::from_log(log_a + log_threshold(n));
  SignVector eps = bang_signs(diagonal_bang_instance(sym));
  const Vector y(eps.signs.begin(), eps.signs.end());
  return {bound, detail::make_witness(sym, Construction::kBangDiagonal, y, std::move(eps.signs))};
}

inline BoundWithWitness thm3_bound_and_witness(const Configuration& config) {
  return thm3_bound_and_witness(Symmetrization(config));
}

struct BoundReport {
  std::size_t n = 0;
  Vector eigenvalues;
  Vector a_diag;
  std::optional<Vector> v_lengths;
  Bound marcus;
  std::optional<Bound> harmonic;
  std::optional<Bound> thm1;
  std::optional<Bound> thm2;
  std::optional<Bound> thm3;
  std::vector<Witness> witnesses;
  Bound threshold;
  std::optional<double> sup_estimate;
  /// Why a field is absent, keyed by field name.
  std::map<std::string, std::string> absent;

  const Witness* witness(Construction c) const {
    for (const Witness& w : witnesses)
      if (w.construction == c) return &w;
    return nullptr;
  }

  /// Names of the constructive bounds (thm1/thm2/thm3) attaining the largest
  /// value, compared in log form.
  std::vector<std::string> winners() const {
    std::vector<std::pair<std::string, double>> present;
    if (thm1) present.emplace_back("thm1", thm1->log_value);
    if (thm2) present.emplace_back("thm2", thm2->log_value);
    if (thm3) present.emplace_back("thm3", thm3->log_value);
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& [name, v] : present) best = std::max(best, v);
    std::vector<std::string> out;
    for (const auto& [name, v] : present)
      if (v == best) out.push_back(name);
    return out;
  }
};

struct ReportOptions {
  bool with_sup = false;
  OptimizerSettings optimizer;
};

/// Computes every bound and witness; failures of individual constructions
/// become absent fields with a reason. With `with_sup` the optimizer is run,
/// seeded additionally at the witnesses.
inline BoundReport full_report(const Configuration& config, const ReportOptions& options = {}) {
  const Symmetrization sym(config);
  const std::size_t n = config.dimension();

  BoundReport r;
  r.n = n;
  r.eigenvalues = sym.spectrum.values;
  r.a_diag = sym.root.diagonal();
  r.threshold = Bound::from_log(log_threshold(n));
  r.marcus = marcus_bound(sym.spectrum);

  try {
    r.v_lengths = column_lengths(sym_inv_sqrt(sym.spectrum));
  } catch (const SingularGram& e) {
    r.absent["v_lengths"] = e.what();
  }
  try {
    r.harmonic = harmonic_bound(sym.spectrum);
  } catch (const SingularGram& e) {
    r.absent["harmonic"] = e.what();
  }
  try {
    BoundWithWitness t = thm1_bound_and_witness(sym);
    r.thm1 = t.bound;
    r.witnesses.push_back(std::move(t.witness));
  } catch (const Error& e) {
    r.absent["thm1"] = e.what();
  }
  try {
    BoundWithWitness t = thm2_bound_and_witness(sym);
    r.thm2 = t.bound;
    r.witnesses.push_back(std::move(t.witness));
  } catch (const Error& e) {
    r.absent["thm2"] = e.what();
  }
  try {
    BoundWithWitness t = thm3_bound_and_witness(sym);
    r.thm3 = t.bound;
    r.witnesses.push_back(std::move(t.witness));
  } catch (const DegenerateDiagonal& e) {
    r.thm3 = Bound::zero();
    r.absent["thm3_witness"] = e.what();
  } catch (const Error& e) {
    r.absent["thm3"] = e.what();
  }

  if (options.with_sup) {
    OptimizerSettings settings = options.optimizer;
    for (const Witness& w : r.witnesses) settings.extra_starts.push_back(w.y);
    r.sup_estimate = sup_product(config, settings).best_value;
  }
  return r;
}

}  // namespace polar
