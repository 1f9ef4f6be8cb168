#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

#include "polar/linalg.hpp"

namespace polar {

using Rng = std::mt19937_64;

/// Independent stream for (seed, stream index); used so results do not depend
/// on the order in which restarts or instances are processed.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

inline Vector gaussian_vector(std::size_t n, Rng& rng) {
  std::normal_distribution<double> normal;
  Vector v(n);
  for (double& c : v) c = normal(rng);
  return v;
}

/// Uniform on the unit sphere (normalized Gaussian).
inline Vector random_unit_vector(std::size_t n, Rng& rng) {
  for (;;) {
    Vector v = gaussian_vector(n, rng);
    if (norm(v) > 1e-12) return normalized(v);
  }
}

/// n independent uniform unit vectors.
inline Configuration random_configuration(std::size_t n, Rng& rng) {
  Matrix m(n);
  for (std::size_t j = 0; j < n; ++j) {
    const Vector v = random_unit_vector(n, rng);
    std::copy(v.begin(), v.end(), m.row(j).begin());
  }
  return Configuration(std::move(m));
}

enum class ConfigFamily { kUniform, kNearOrthonormal, kClustered };

inline std::string_view to_string(ConfigFamily f) {
  switch (f) {
    case ConfigFamily::kUniform:
      return "uniform";
    case ConfigFamily::kNearOrthonormal:
      return "near-orthonormal";
    case ConfigFamily::kClustered:
      return "clustered";
  }
  return "unknown";
}

/// Random configuration from one of three families:
///  - uniform: independent uniform unit vectors;
///  - near-orthonormal: e_j plus Gaussian noise of random scale in (0, 1);
///  - clustered: rows drawn around k <= n random centres with noise in (0.01, 0.5).
inline Configuration random_configuration(std::size_t n, ConfigFamily family, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix m(n);
  switch (family) {
    case ConfigFamily::kUniform:
      return random_configuration(n, rng);
    case ConfigFamily::kNearOrthonormal: {
      const double scale = unit(rng);
      for (std::size_t j = 0; j < n; ++j) {
        const Vector g = gaussian_vector(n, rng);
        for (std::size_t i = 0; i < n; ++i) m(j, i) = (i == j ? 1.0 : 0.0) + scale * g[i];
      }
      break;
    }
    case ConfigFamily::kClustered: {
      std::uniform_int_distribution<std::size_t> pick_k(1, n);
      const std::size_t k = pick_k(rng);
      std::vector<Vector> centres;
      for (std::size_t c = 0; c < k; ++c) centres.push_back(random_unit_vector(n, rng));
      std::uniform_int_distribution<std::size_t> pick_centre(0, k - 1);
      const double noise = 0.01 + 0.49 * unit(rng);
      for (std::size_t j = 0; j < n; ++j) {
        const Vector& c = centres[pick_centre(rng)];
        const Vector g = gaussian_vector(n, rng);
        for (std::size_t i = 0; i < n; ++i) m(j, i) = c[i] + noise * g[i];
      }
      break;
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    const double len = norm(m.row(j));
    for (double& v : m.row(j)) v /= len;
  }
  return Configuration(std::move(m));
}

/// The i-th instance of a seeded corpus; families rotate with i.
inline Configuration corpus_instance(std::size_t n, std::uint64_t seed, std::uint64_t i) {
  Rng rng = make_rng(seed, (static_cast<std::uint64_t>(n) << 40) ^ i);
  return random_configuration(n, static_cast<ConfigFamily>(i % 3), rng);
}

/// Random orthogonal matrix (Gram-Schmidt on a Gaussian matrix).
inline Matrix random_orthogonal(std::size_t n, Rng& rng) {
  std::vector<Vector> cols;
  while (cols.size() < n) {
    Vector v = gaussian_vector(n, rng);
    for (int pass = 0; pass < 2; ++pass)
      for (const Vector& u : cols) {
        const double d = dot(u, v);
        for (std::size_t i = 0; i < n; ++i) v[i] -= d * u[i];
      }
    if (norm(v) > 1e-8) cols.push_back(normalized(v));
  }
  Matrix q(n);
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t i = 0; i < n; ++i) q(i, c) = cols[c][i];
  return q;
}

}  // namespace polar
