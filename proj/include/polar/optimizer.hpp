#pragma once

// Numerical estimation of sup_{|y|=1} prod_j |<x_j, y>| and the searches
// built on it.
//
// The objective is maximized in log form, g(y) = sum_j log|<x_j, y>|. On each
// cell of the hyperplane arrangement {<x_j, y> = 0} the problem
// max g over the unit ball is concave, so an ascent started inside a cell
// reaches that cell's maximum. Restarts therefore only need to visit cells.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "polar/errors.hpp"
#include "polar/linalg.hpp"
#include "polar/random.hpp"

namespace polar {

struct OptimizerSettings {
  /// Random restarts; 0 means 32 * n.
  std::size_t restarts = 0;
  int max_iterations = 500;
  double step_tolerance = 1e-12;
  std::uint64_t seed = 0;
  /// Also start once in every cell of the arrangement (2^(n-1) starts) when
  /// the rows are linearly independent and n is at most this value.
  std::size_t cell_seed_max_dimension = 12;
  /// Extra deterministic starts, tried before everything else.
  std::vector<Vector> extra_starts;
  /// Keep the per-iteration objective values of every restart.
  bool record_iterates = false;
};

struct AscentResult {
  Vector y;
  double log_value = -std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
  bool degenerate = false;
  /// Tangential gradient norm relative to the full gradient norm at exit.
  double relative_tangent_gradient = std::numeric_limits<double>::infinity();
  std::vector<double> iterates;
};

struct OptimizerResult {
  Vector best_y;
  double best_value = 0.0;
  double best_log_value = -std::numeric_limits<double>::infinity();
  std::size_t restarts_used = 0;
  bool converged = false;
  /// Product value reached by each restart, in restart order (0 if degenerate).
  std::vector<double> per_restart_values;
  std::optional<double> oracle_value;
  std::vector<std::vector<double>> iterates;
};

/// Euclidean gradient of g: sum_j x_j / <x_j, y>.
inline Vector log_product_gradient(const Matrix& rows, std::span<const double> y) {
  const std::size_t n = rows.size();
  Vector grad(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double a = dot(rows.row(j), y);
    for (std::size_t i = 0; i < n; ++i) grad[i] += rows(j, i) / a;
  }
  return grad;
}

/// Removes the component along the unit vector y.
inline Vector tangent_part(std::span<const double> v, std::span<const double> y) {
  const double d = dot(v, y);
  Vector out(v.begin(), v.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= d * y[i];
  return out;
}

namespace detail {

inline double min_abs_inner(const Matrix& rows, std::span<const double> y) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < rows.size(); ++j) m = std::min(m, std::abs(dot(rows.row(j), y)));
  return m;
}

/// Newton direction on the sphere. The Riemannian Hessian of g restricted to
/// the tangent space is -(P A P + n P) with A = sum_j x_j x_j^T / <x_j,y>^2,
/// which is negative definite; adding y y^T makes the system SPD without
/// touching the tangent solution. Falls back to the gradient if the solve fails.
inline Vector ascent_direction(const Matrix& rows, std::span<const double> y,
                               std::span<const double> tangent_grad) {
  const std::size_t n = rows.size();
  Matrix a(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double inner = dot(rows.row(j), y);
    const double w = 1.0 / (inner * inner);
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = 0; q < n; ++q) a(p, q) += w * rows(j, p) * rows(j, q);
  }
  // P A P + n P + y y^T with P = I - y y^T.
  Vector ay = a * y;
  const double yay = dot(y, ay);
  Matrix m(n);
  const double nn = static_cast<double>(n);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) {
      const double pap = a(p, q) - y[p] * ay[q] - ay[p] * y[q] + y[p] * y[q] * yay;
      const double proj = (p == q ? 1.0 : 0.0) - y[p] * y[q];
      m(p, q) = pap + nn * proj + y[p] * y[q];
    }
  Vector d = solve(std::move(m), Vector(tangent_grad.begin(), tangent_grad.end()), 1e-14);
  if (d.empty() || dot(d, tangent_grad) <= 0.0) return Vector(tangent_grad.begin(), tangent_grad.end());
  return tangent_part(d, y);
}

}  // namespace detail

/// Monotone ascent of g on the sphere from y0: Newton direction in the tangent
/// space, Armijo backtracking (initial step 1, halving, constant 1e-4, at most
/// 60 halvings) and renormalization after every step. Stops when the
/// tangential gradient is below 1e-8 of the full gradient, when a step moves
/// less than step_tolerance, or after max_iterations.
inline AscentResult ascend(const Matrix& rows, Vector y0, const OptimizerSettings& settings,
                           Rng& rng) {
  constexpr double kDegenerateInner = 1e-9;
  constexpr double kPerturbScale = 1e-6;
  constexpr int kPerturbAttempts = 10;
  constexpr double kArmijo = 1e-4;
  constexpr int kMaxHalvings = 60;
  constexpr double kCriticalTolerance = 1e-8;

  AscentResult out;
  const std::size_t n = rows.size();
  Vector y = normalized(y0);
  for (int attempt = 0; detail::min_abs_inner(rows, y) < kDegenerateInner; ++attempt) {
    if (attempt == kPerturbAttempts) {
      out.degenerate = true;
      out.y = y;
      return out;
    }
    Vector noise = tangent_part(gaussian_vector(n, rng), y);
    for (std::size_t i = 0; i < n; ++i) y[i] += kPerturbScale * noise[i];
    y = normalized(y);
  }

  double g = log_product_unchecked(rows, y);
  if (settings.record_iterates) out.iterates.push_back(g);
  for (int it = 0; it < settings.max_iterations; ++it) {
    const Vector grad = log_product_gradient(rows, y);
    const Vector tg = tangent_part(grad, y);
    out.relative_tangent_gradient = norm(tg) / norm(grad);
    if (out.relative_tangent_gradient < kCriticalTolerance) {
      out.converged = true;
      break;
    }
    const Vector dir = detail::ascent_direction(rows, y, tg);
    const double slope = dot(tg, dir);

    double t = 1.0;
    bool accepted = false;
    Vector trial(n);
    double trial_g = g;
    for (int h = 0; h <= kMaxHalvings; ++h, t *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = y[i] + t * dir[i];
      trial = normalized(trial);
      trial_g = log_product_unchecked(rows, trial);
      if (std::isfinite(trial_g) && trial_g >= g + kArmijo * t * slope) {
        accepted = true;
        break;
      }
    }
    ++out.iterations;
    if (!accepted) break;

    double moved = 0.0;
    for (std::size_t i = 0; i < n; ++i) moved = std::max(moved, std::abs(trial[i] - y[i]));
    y = trial;
    g = trial_g;
    if (settings.record_iterates) out.iterates.push_back(g);
    if (moved < settings.step_tolerance) {
      const Vector grad2 = log_product_gradient(rows, y);
      out.relative_tangent_gradient = norm(tangent_part(grad2, y)) / norm(grad2);
      out.converged = out.relative_tangent_gradient < kCriticalTolerance;
      break;
    }
  }
  out.y = std::move(y);
  out.log_value = g;
  return out;
}

/// One start per cell of the arrangement, y = X^{-1} eps with eps_0 = +1
/// (y and -y give the same product). Empty if the rows are dependent.
inline std::vector<Vector> cell_starts(const Matrix& rows) {
  const std::size_t n = rows.size();
  std::vector<Vector> starts;
  const std::uint64_t count = std::uint64_t{1} << (n - 1);
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    Vector eps(n, 1.0);
    for (std::size_t j = 1; j < n; ++j)
      if ((mask >> (j - 1)) & 1u) eps[j] = -1.0;
    Vector y = solve(rows, eps, 1e-10);
    if (y.empty()) return {};
    starts.push_back(normalized(y));
  }
  return starts;
}

/// Multi-start estimate of the supremum. Starts are tried in a fixed order
/// (extra starts, cell starts, random starts) and the best value wins, ties
/// going to the earliest start.
inline OptimizerResult sup_product(const Configuration& config, const OptimizerSettings& settings = {}) {
  const std::size_t n = config.dimension();
  const Matrix& rows = config.matrix();
  const std::size_t random_restarts = settings.restarts == 0 ? 32 * n : settings.restarts;

  std::vector<Vector> starts;
  for (const Vector& s : settings.extra_starts) {
    if (s.size() != n) throw InvalidInput("extra start has wrong dimension");
    if (norm(s) > 0.0) starts.push_back(normalized(s));
  }
  if (n >= 2 && n <= settings.cell_seed_max_dimension) {
    std::vector<Vector> cells = cell_starts(rows);
    starts.insert(starts.end(), std::make_move_iterator(cells.begin()),
                  std::make_move_iterator(cells.end()));
  }
  const std::size_t deterministic = starts.size();

  OptimizerResult result;
  bool any = false;
  bool best_converged = false;
  for (std::size_t r = 0; r < deterministic + random_restarts; ++r) {
    Rng rng = make_rng(settings.seed, r);
    Vector y0 = r < deterministic ? starts[r] : random_unit_vector(n, rng);
    AscentResult a = ascend(rows, std::move(y0), settings, rng);
    ++result.restarts_used;
    if (settings.record_iterates) result.iterates.push_back(a.iterates);
    if (a.degenerate) {
      result.per_restart_values.push_back(0.0);
      continue;
    }
    result.per_restart_values.push_back(std::exp(a.log_value));
    if (!any || a.log_value > result.best_log_value) {
      any = true;
      result.best_log_value = a.log_value;
      result.best_y = std::move(a.y);
      best_converged = a.converged;
    }
  }
  if (!any) throw AllRestartsDegenerate("every restart started on a zero of the product");
  result.converged = best_converged;
  result.best_log_value = log_product_at(config, result.best_y);
  result.best_value = product_at(config, result.best_y);
  return result;
}

/// Exhaustive grid maximum of the product, for tests: an angle grid on the
/// half circle (n = 2, default 2000 points) or a latitude-longitude grid
/// (n = 3, default 600 x 600).
inline double grid_oracle(const Configuration& config, std::size_t resolution = 0) {
  const std::size_t n = config.dimension();
  const double pi = std::numbers::pi;
  double best = 0.0;
  if (n == 2) {
    const std::size_t m = resolution == 0 ? 2000 : resolution;
    for (std::size_t k = 0; k < m; ++k) {
      const double alpha = pi * static_cast<double>(k) / static_cast<double>(m);
      const double y[2] = {std::cos(alpha), std::sin(alpha)};
      best = std::max(best, std::abs(dot(config.row(0), y) * dot(config.row(1), y)));
    }
    return best;
  }
  if (n == 3) {
    const std::size_t m = resolution == 0 ? 600 : resolution;
    for (std::size_t i = 0; i < m; ++i) {
      const double theta = pi * static_cast<double>(i) / static_cast<double>(m - 1);
      for (std::size_t k = 0; k < m; ++k) {
        const double phi = 2.0 * pi * static_cast<double>(k) / static_cast<double>(m);
        const double y[3] = {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                             std::cos(theta)};
        double p = 1.0;
        for (std::size_t j = 0; j < 3; ++j) p *= std::abs(dot(config.row(j), y));
        best = std::max(best, p);
      }
    }
    return best;
  }
  throw UnsupportedDimension("grid oracle supports n = 2 and n = 3 only");
}

inline double conjecture_threshold(std::size_t n) {
  const double nn = static_cast<double>(n);
  return std::exp(-0.5 * nn * std::log(nn));
}

struct SearchTraceEntry {
  std::size_t iteration = 0;
  double value = 0.0;
  double gap = 0.0;
};

struct SearchResult {
  Configuration worst_config = Configuration::orthonormal(1);
  double worst_sup = 0.0;
  double threshold = 0.0;
  std::size_t iterations = 0;
  std::uint64_t seed = 0;
  /// Global improvements, in order.
  std::vector<SearchTraceEntry> trace;

  double gap() const { return worst_sup - threshold; }
};

struct SearchSettings {
  /// Random restarts of the inner sup estimate per evaluation.
  std::size_t inner_restarts = 8;
  /// Outer iterations per random starting configuration.
  std::size_t segment_length = 100;
  double initial_scale = 0.3;
  double final_scale = 1e-4;
};

namespace detail {

inline Configuration perturb(const Configuration& config, double scale, Rng& rng) {
  const std::size_t n = config.dimension();
  Matrix m = config.matrix();
  std::uniform_int_distribution<std::size_t> pick(0, n);
  const std::size_t only = pick(rng);  // == n: perturb every row
  for (std::size_t j = 0; j < n; ++j) {
    if (only != n && only != j) continue;
    const Vector noise = tangent_part(gaussian_vector(n, rng), m.row(j));
    for (std::size_t i = 0; i < n; ++i) m(j, i) += scale * noise[i];
    const double len = norm(m.row(j));
    for (double& v : m.row(j)) v /= len;
  }
  return Configuration(std::move(m));
}

}  // namespace detail

/// Minimizes the sup over configurations: random starting configurations,
/// each followed by a perturbation descent whose tangential noise scale decays
/// geometrically; a perturbed configuration is kept only if its sup is lower.
/// The reported worst sup is re-estimated with default optimizer settings.
inline SearchResult conjecture_search(std::size_t n, std::size_t budget, std::uint64_t seed,
                                      const SearchSettings& search = {}) {
  if (n < 2) throw InvalidInput("conjecture search needs n >= 2");
  SearchResult result;
  result.threshold = conjecture_threshold(n);
  result.seed = seed;

  OptimizerSettings inner;
  inner.restarts = search.inner_restarts;

  Rng rng = make_rng(seed, 0xC0FFEE);
  std::optional<Configuration> best_config;
  double best = std::numeric_limits<double>::infinity();

  auto evaluate = [&](const Configuration& c, std::size_t iteration) {
    inner.seed = seed ^ (iteration * 0x9E3779B97F4A7C15ull);
    return sup_product(c, inner).best_value;
  };

  const std::size_t segment = std::max<std::size_t>(1, search.segment_length);
  std::size_t it = 0;
  while (it < budget) {
    Configuration current = random_configuration(n, rng);
    double current_value = evaluate(current, it);
    const std::size_t len = std::min(segment, budget - it);
    for (std::size_t s = 0; s < len; ++s, ++it) {
      if (s > 0) {
        const double frac = len > 2 ? static_cast<double>(s - 1) / static_cast<double>(len - 2) : 1.0;
        const double scale =
            search.initial_scale * std::pow(search.final_scale / search.initial_scale, frac);
        Configuration candidate = detail::perturb(current, scale, rng);
        const double value = evaluate(candidate, it);
        if (value < current_value) {
          current = std::move(candidate);
          current_value = value;
        }
      }
      if (current_value < best) {
        best = current_value;
        best_config = current;
        result.trace.push_back({it, best, best - result.threshold});
      }
    }
  }
  result.iterations = it;
  result.worst_config = best_config.value_or(Configuration::orthonormal(n));
  OptimizerSettings final_settings;
  final_settings.seed = seed;
  result.worst_sup = sup_product(result.worst_config, final_settings).best_value;
  return result;
}

struct LEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;

  /// e^{-L}, the asymptotic polarization constant.
  double constant() const { return std::exp(-mean); }
};

/// Monte Carlo estimate of the spherical mean of log|<x, e>| with x uniform
/// on the sphere. e defaults to the first basis vector.
inline LEstimate estimate_L(std::size_t n, std::size_t samples, std::uint64_t seed,
                            std::optional<Vector> e = std::nullopt) {
  if (n < 2) throw InvalidInput("estimate_L needs n >= 2");
  if (samples < 10000) throw InvalidInput("estimate_L needs at least 10^4 samples");
  Vector dir(n, 0.0);
  dir[0] = 1.0;
  if (e) {
    if (e->size() != n) throw InvalidInput("direction has wrong dimension");
    require_unit(*e);
    dir = *e;
  }
  Rng rng = make_rng(seed, 0x4C);
  std::normal_distribution<double> normal;
  double mean = 0.0;
  double m2 = 0.0;
  Vector x(n);
  for (std::size_t s = 0; s < samples; ++s) {
    for (double& c : x) c = normal(rng);
    const double v = std::log(std::abs(dot(x, dir)) / norm(x));
    const double delta = v - mean;
    mean += delta / static_cast<double>(s + 1);
    m2 += delta * (v - mean);
  }
  const double var = m2 / static_cast<double>(samples - 1);
  return {mean, std::sqrt(var / static_cast<double>(samples)), samples};
}

}  // namespace polar
