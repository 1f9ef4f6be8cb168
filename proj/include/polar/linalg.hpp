#pragma once

// Dense linear algebra for small symmetric problems: the Gram matrix of a
// configuration of unit vectors, its spectral decomposition, and the square
// root / inverse square root built on top of it.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "polar/errors.hpp"

namespace polar {

using Vector = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

/// Returns a / ||a||. The caller guarantees a is nonzero.
inline Vector normalized(std::span<const double> a) {
  const double len = norm(a);
  Vector out(a.begin(), a.end());
  for (double& v : out) v /= len;
  return out;
}

/// Square dense matrix, row-major.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}
  Matrix(std::size_t n, std::vector<double> data) : n_(n), data_(std::move(data)) {
    if (data_.size() != n * n) throw InvalidInput("matrix data has wrong size");
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t size() const { return n_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  std::span<const double> row(std::size_t i) const { return {data_.data() + i * n_, n_}; }
  std::span<double> row(std::size_t i) { return {data_.data() + i * n_, n_}; }

  Vector column(std::size_t j) const {
    Vector c(n_);
    for (std::size_t i = 0; i < n_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  Matrix transposed() const {
    Matrix t(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Vector operator*(std::span<const double> v) const {
    assert(v.size() == n_);
    Vector out(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = dot(row(i), v);
    return out;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    assert(a.n_ == b.n_);
    const std::size_t n = a.n_;
    Matrix c(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        const double aik = a(i, k);
        if (aik == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  const std::vector<double>& data() const { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// Largest absolute entry of a - b.
inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  assert(a.size() == b.size());
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i)
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

/// Symmetric matrix stored as its packed upper triangle, so (j,k) and (k,j)
/// are the same storage cell.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(std::size_t n) : n_(n), packed_(n * (n + 1) / 2, 0.0) {}

  static SymmetricMatrix identity(std::size_t n) {
    SymmetricMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, 1.0);
    return m;
  }

  /// Builds from a dense matrix, averaging (i,j) and (j,i).
  static SymmetricMatrix from_dense(const Matrix& a) {
    SymmetricMatrix m(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = i; j < a.size(); ++j) m.set(i, j, 0.5 * (a(i, j) + a(j, i)));
    return m;
  }

  std::size_t size() const { return n_; }

  double operator()(std::size_t j, std::size_t k) const { return packed_[index(j, k)]; }
  void set(std::size_t j, std::size_t k, double v) { packed_[index(j, k)] = v; }

  Matrix dense() const {
    Matrix d(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) d(i, j) = (*this)(i, j);
    return d;
  }

  Vector operator*(std::span<const double> v) const {
    assert(v.size() == n_);
    Vector out(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n_; ++j) s += (*this)(i, j) * v[j];
      out[i] = s;
    }
    return out;
  }

  Vector diagonal() const {
    Vector d(n_);
    for (std::size_t i = 0; i < n_; ++i) d[i] = (*this)(i, i);
    return d;
  }

  double trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) s += (*this)(i, j) * (*this)(i, j);
    return std::sqrt(s);
  }

  friend bool operator==(const SymmetricMatrix&, const SymmetricMatrix&) = default;

 private:
  std::size_t index(std::size_t j, std::size_t k) const {
    assert(j < n_ && k < n_);
    if (j > k) std::swap(j, k);
    return j * n_ - j * (j + 1) / 2 + k;
  }

  std::size_t n_ = 0;
  std::vector<double> packed_;
};

/// n unit vectors in R^n, stored as the rows of an n x n matrix.
class Configuration {
 public:
  /// Rows within 1e-6 of unit length are renormalized; anything further off
  /// is rejected.
  static constexpr double kRenormalizeTolerance = 1e-6;

  explicit Configuration(Matrix rows) : rows_(std::move(rows)) {
    const std::size_t n = rows_.size();
    if (n == 0) throw InvalidInput("configuration needs n >= 1");
    for (std::size_t j = 0; j < n; ++j) {
      const double len = norm(rows_.row(j));
      if (!std::isfinite(len) || std::abs(len - 1.0) > kRenormalizeTolerance)
        throw InvalidInput("row " + std::to_string(j + 1) + " has norm " + std::to_string(len) +
                           ", expected 1");
      // Rows already unit to rounding are kept bit-for-bit, so that written
      // instances read back unchanged.
      if (std::abs(len - 1.0) > 4.0 * std::numeric_limits<double>::epsilon())
        for (double& v : rows_.row(j)) v /= len;
    }
  }

  explicit Configuration(const std::vector<Vector>& rows) : Configuration(pack(rows)) {}

  static Configuration orthonormal(std::size_t n) { return Configuration(Matrix::identity(n)); }

  std::size_t dimension() const { return rows_.size(); }
  std::span<const double> row(std::size_t j) const { return rows_.row(j); }
  const Matrix& matrix() const { return rows_; }

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  static Matrix pack(const std::vector<Vector>& rows) {
    const std::size_t n = rows.size();
    Matrix m(n);
    for (std::size_t j = 0; j < n; ++j) {
      if (rows[j].size() != n)
        throw InvalidInput("row " + std::to_string(j + 1) + " has " + std::to_string(rows[j].size()) +
                           " coordinates, expected " + std::to_string(n));
      std::copy(rows[j].begin(), rows[j].end(), m.row(j).begin());
    }
    return m;
  }

  Matrix rows_;
};

/// Eigenvalues in ascending order; column k of `vectors` pairs with value k.
struct SpectralDecomposition {
  Vector values;
  Matrix vectors;

  std::size_t size() const { return values.size(); }
  double smallest() const { return values.front(); }
  double largest() const { return values.back(); }

  /// Q * diag(f(lambda)) * Q^T, assembled symmetrically.
  template <typename F>
  SymmetricMatrix apply(F&& f) const {
    const std::size_t n = size();
    Vector fl(n);
    for (std::size_t k = 0; k < n; ++k) fl[k] = f(values[k]);
    SymmetricMatrix out(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += vectors(i, k) * fl[k] * vectors(j, k);
        out.set(i, j, s);
      }
    return out;
  }
};

/// G[j][k] = <x_j, x_k>.
inline SymmetricMatrix gram(const Configuration& config) {
  const std::size_t n = config.dimension();
  SymmetricMatrix g(n);
  for (std::size_t j = 0; j < n; ++j) {
    g.set(j, j, 1.0);
    for (std::size_t k = j + 1; k < n; ++k) g.set(j, k, dot(config.row(j), config.row(k)));
  }
  return g;
}

namespace detail {

inline double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace detail

/// Cyclic Jacobi eigendecomposition. Rotations below a per-sweep threshold are
/// skipped during the first sweeps; iteration stops once the off-diagonal
/// Frobenius norm drops below 1e-12 * ||A||_F.
inline SpectralDecomposition eigen_sym(const SymmetricMatrix& input) {
  constexpr int kMaxSweeps = 100;
  constexpr double kRelativeTolerance = 1e-12;

  const std::size_t n = input.size();
  Matrix a = input.dense();
  Matrix v = Matrix::identity(n);
  const double scale = input.frobenius_norm();

  bool converged = false;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    const double off = detail::off_diagonal_norm(a);
    if (off <= kRelativeTolerance * scale) {
      converged = true;
      break;
    }
    const double threshold = sweep < 3 ? 0.2 * off / static_cast<double>(n * n) : 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= threshold || apq == 0.0) continue;

        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (!converged) {
    if (detail::off_diagonal_norm(a) > kRelativeTolerance * scale)
      throw NoConvergence("Jacobi eigensolver did not converge in 100 sweeps");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

  SpectralDecomposition out{Vector(n), Matrix(n)};
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    out.values[k] = a(src, src);
    // Sign convention: first non-negligible coordinate positive.
    double sign = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(v(i, src)) > 1e-12) {
        sign = v(i, src) < 0.0 ? -1.0 : 1.0;
        break;
      }
    }
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = sign * v(i, src);
  }
  return out;
}

inline constexpr double kPsdTolerance = 1e-10;

/// Relative rank tolerance: lambda_1 <= 1e-10 * n * lambda_n counts as singular.
inline double rank_tolerance(const SpectralDecomposition& spec) {
  return 1e-10 * static_cast<double>(spec.size()) * spec.largest();
}

inline bool is_singular(const SpectralDecomposition& spec) {
  return spec.smallest() <= rank_tolerance(spec);
}

inline SymmetricMatrix sym_sqrt(const SpectralDecomposition& spec) {
  if (spec.smallest() < -kPsdTolerance)
    throw NotPSD("matrix has eigenvalue " + std::to_string(spec.smallest()));
  return spec.apply([](double l) { return std::sqrt(std::max(l, 0.0)); });
}

inline SymmetricMatrix sym_sqrt(const SymmetricMatrix& a) { return sym_sqrt(eigen_sym(a)); }

inline SymmetricMatrix sym_inv_sqrt(const SpectralDecomposition& spec) {
  if (is_singular(spec))
    throw SingularGram("smallest eigenvalue " + std::to_string(spec.smallest()) +
                       " is below the rank tolerance; rows are linearly dependent");
  return spec.apply([](double l) { return 1.0 / std::sqrt(l); });
}

inline SymmetricMatrix sym_inv_sqrt(const SymmetricMatrix& a) { return sym_inv_sqrt(eigen_sym(a)); }

/// Euclidean norms of the columns.
inline Vector column_lengths(const SymmetricMatrix& a) {
  const std::size_t n = a.size();
  Vector out(n);
  for (std::size_t k = 0; k < n; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a(i, k) * a(i, k);
    out[k] = std::sqrt(s);
  }
  return out;
}

/// Solves A x = b by Gaussian elimination with partial pivoting. Returns an
/// empty vector if a pivot falls below `pivot_tol` times the largest entry.
inline Vector solve(Matrix a, Vector b, double pivot_tol = 1e-12) {
  const std::size_t n = a.size();
  double scale = 0.0;
  for (double v : a.data()) scale = std::max(scale, std::abs(v));
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t i = col + 1; i < n; ++i)
      if (std::abs(a(i, col)) > std::abs(a(piv, col))) piv = i;
    if (!(std::abs(a(piv, col)) > pivot_tol * scale)) return {};
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(piv, j));
      std::swap(b[col], b[piv]);
    }
    for (std::size_t i = col + 1; i < n; ++i) {
      const double f = a(i, col) / a(col, col);
      if (f == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) a(i, j) -= f * a(col, j);
      b[i] -= f * b[col];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * b[j];
    b[i] = s / a(i, i);
  }
  return b;
}

inline constexpr double kUnitTolerance = 1e-10;

inline void require_unit(std::span<const double> y) {
  const double len = norm(y);
  if (!(std::abs(len - 1.0) <= kUnitTolerance))
    throw NotUnit("vector has norm " + std::to_string(len) + ", expected 1");
}

/// sum_j log |<x_j, y>|; -infinity if some factor vanishes. No unit check.
inline double log_product_unchecked(const Matrix& rows, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t j = 0; j < rows.size(); ++j) s += std::log(std::abs(dot(rows.row(j), y)));
  return s;
}

/// prod_j |<x_j, y>| for a unit vector y.
inline double product_at(const Configuration& config, std::span<const double> y) {
  if (y.size() != config.dimension()) throw InvalidInput("vector has wrong dimension");
  require_unit(y);
  double p = 1.0;
  for (std::size_t j = 0; j < config.dimension(); ++j) p *= std::abs(dot(config.row(j), y));
  return p;
}

inline double log_product_at(const Configuration& config, std::span<const double> y) {
  if (y.size() != config.dimension()) throw InvalidInput("vector has wrong dimension");
  require_unit(y);
  return log_product_unchecked(config.matrix(), y);
}

/// Orthogonal U with X = S U^T, where S = (X X^T)^{1/2}. For singular X the
/// completion on the kernel is arbitrary but orthonormal. A unit vector y in
/// the frame of S maps to U y with X (U y) = S y.
inline Matrix polar_rotation(const Configuration& config, const SpectralDecomposition& gram_spec) {
  const std::size_t n = config.dimension();
  const Matrix& x = config.matrix();
  const Matrix xt = x.transposed();
  // X = W Sigma V^T with W the Gram eigenvectors; v_k = X^T w_k / sigma_k.
  const double tol = std::sqrt(rank_tolerance(gram_spec));
  std::vector<Vector> v_cols;
  std::vector<Vector> w_cols;
  std::vector<std::size_t> missing;
  for (std::size_t k = n; k-- > 0;) {
    const double sigma = std::sqrt(std::max(gram_spec.values[k], 0.0));
    Vector w = gram_spec.vectors.column(k);
    if (sigma > tol) {
      Vector v = xt * w;
      for (double& c : v) c /= sigma;
      // Re-orthogonalize against earlier columns for numerical safety.
      for (const Vector& u : v_cols) {
        const double d = dot(u, v);
        for (std::size_t i = 0; i < n; ++i) v[i] -= d * u[i];
      }
      v_cols.push_back(normalized(v));
      w_cols.push_back(std::move(w));
    } else {
      missing.push_back(k);
    }
  }
  // Complete V with an orthonormal basis of the remaining subspace.
  for (std::size_t k : missing) {
    for (std::size_t e = 0; e < n; ++e) {
      Vector v(n, 0.0);
      v[e] = 1.0;
      for (int pass = 0; pass < 2; ++pass)
        for (const Vector& u : v_cols) {
          const double d = dot(u, v);
          for (std::size_t i = 0; i < n; ++i) v[i] -= d * u[i];
        }
      if (norm(v) > 0.5) {
        v_cols.push_back(normalized(v));
        w_cols.push_back(gram_spec.vectors.column(k));
        break;
      }
    }
  }
  // U = V W^T.
  Matrix u(n);
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) u(i, j) += v_cols[c][i] * w_cols[c][j];
  return u;
}

}  // namespace polar
