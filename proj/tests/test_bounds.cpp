#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "oracles.hpp"
#include "polar/bounds.hpp"
#include "polar/random.hpp"

namespace polar {
namespace {

constexpr double kSlack = 1e-12;

Configuration pair_at(double theta) {
  return Configuration({{1.0, 0.0}, {std::cos(theta), std::sin(theta)}});
}

double threshold(std::size_t n) { return std::pow(static_cast<double>(n), -0.5 * static_cast<double>(n)); }

const Configuration kPair60 = pair_at(std::numbers::pi / 3);

TEST(Symmetrize, OrthonormalIsIdentity) {
  const SymmetricMatrix s = symmetrize(Configuration::orthonormal(4));
  EXPECT_LE(max_abs_diff(s.dense(), Matrix::identity(4)), 1e-15);
}

TEST(Symmetrize, PairAtSixtyDegrees) {
  const SymmetricMatrix s = symmetrize(kPair60);
  const double sp = std::sqrt(1.5);
  const double sm = std::sqrt(0.5);
  EXPECT_NEAR(s(0, 0), 0.5 * (sp + sm), 1e-14);
  EXPECT_NEAR(s(0, 1), 0.5 * (sp - sm), 1e-14);
}

TEST(Symmetrize, DiagonalDominatesBothEigenvalueRoots) {
  for (std::uint64_t i = 0; i < 200; ++i) {
    const std::size_t n = 2 + i % 7;
    const Symmetrization sym(corpus_instance(n, 12, i));
    for (double a : sym.root.diagonal()) {
      EXPECT_GE(a, std::sqrt(std::max(sym.spectrum.smallest(), 0.0)) - 1e-12);
      EXPECT_GE(a, 1.0 / std::sqrt(sym.spectrum.largest()) - 1e-12);
      EXPECT_LE(a, 1.0 + 1e-12);
    }
  }
}

TEST(MarcusBound, ClosedForms) {
  EXPECT_NEAR(marcus_bound(eigen_sym(gram(Configuration::orthonormal(3)))).value, threshold(3), 1e-15);
  EXPECT_NEAR(marcus_bound(eigen_sym(gram(kPair60))).value, 0.25, 1e-15);
  const Configuration dependent({{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {1.0, 0.0, 0.0}});
  EXPECT_EQ(marcus_bound(eigen_sym(gram(dependent))).value, 0.0);
}

TEST(HarmonicBound, ClosedForms) {
  EXPECT_NEAR(harmonic_bound(eigen_sym(gram(Configuration::orthonormal(5)))).value, threshold(5), 1e-15);
  // Harmonic mean of (0.5, 1.5) is 0.75, so the bound is 0.75 / 2 = (1 - c^2) / 2.
  EXPECT_NEAR(harmonic_bound(eigen_sym(gram(kPair60))).value, 0.375, 1e-14);
  EXPECT_THROW(harmonic_bound(eigen_sym(gram(Configuration({{1.0, 0.0}, {1.0, 0.0}})))), SingularGram);
}

TEST(Thm1, Orthonormal) {
  for (std::size_t n = 1; n <= 6; ++n) {
    const BoundWithWitness t = thm1_bound_and_witness(Configuration::orthonormal(n));
    EXPECT_NEAR(t.bound.value, threshold(n), 1e-14);
    EXPECT_NEAR(t.witness.achieved, threshold(n), 1e-14);
  }
}

TEST(Thm1, PairAtSixtyDegreesAgainstEnumeration) {
  const BoundWithWitness t = thm1_bound_and_witness(kPair60);
  // V1 = V2 = sqrt((1/0.5 + 1/1.5) / 2) = sqrt(4/3).
  const double v = std::sqrt(4.0 / 3.0);
  EXPECT_NEAR(t.bound.value, 0.5 / (v * v), 1e-14);

  // Enumerate the four sign patterns with the closed-form S^{-1}.
  const double ip = 1.0 / std::sqrt(1.5);
  const double im = 1.0 / std::sqrt(0.5);
  const double d = 0.5 * (ip + im);
  const double o = 0.5 * (ip - im);
  const double sp = std::sqrt(1.5);
  const double sm = std::sqrt(0.5);
  const double sd = 0.5 * (sp + sm);
  const double so = 0.5 * (sp - sm);
  double best_norm2 = 1e300;
  double product_at_best = 0.0;
  for (int e1 : {1, -1})
    for (int e2 : {1, -1}) {
      const double c1 = e1 / v;
      const double c2 = e2 / v;
      const double w1 = d * c1 + o * c2;
      const double w2 = o * c1 + d * c2;
      const double len2 = w1 * w1 + w2 * w2;
      if (len2 < best_norm2) {
        best_norm2 = len2;
        const double y1 = w1 / std::sqrt(len2);
        const double y2 = w2 / std::sqrt(len2);
        product_at_best = std::abs((sd * y1 + so * y2) * (so * y1 + sd * y2));
      }
    }
  EXPECT_LE(best_norm2, 2.0 + 1e-12);
  EXPECT_NEAR(t.witness.achieved, product_at_best, 1e-12);
  EXPECT_GE(t.witness.achieved, t.bound.value);
}

TEST(Thm1, SingularGramIsRejected) {
  EXPECT_THROW(thm1_bound_and_witness(Configuration({{1.0, 0.0}, {1.0, 0.0}})), SingularGram);
}

TEST(Thm1, LargeDimensionUsesGreedySigns) {
  Rng rng = make_rng(5);
  const Configuration c = random_configuration(24, ConfigFamily::kNearOrthonormal, rng);
  const BoundWithWitness t = thm1_bound_and_witness(c);
  EXPECT_GE(t.witness.achieved, t.bound.value - kSlack);
}

TEST(Thm2, ClosedForms) {
  for (std::size_t n = 1; n <= 6; ++n) {
    const BoundWithWitness t = thm2_bound_and_witness(Configuration::orthonormal(n));
    EXPECT_NEAR(t.bound.value, threshold(n), 1e-14);
    EXPECT_NEAR(t.witness.achieved, threshold(n), 1e-14);
  }
  const BoundWithWitness t = thm2_bound_and_witness(kPair60);
  EXPECT_NEAR(t.bound.value, 1.0 / 3.0, 1e-14);
  EXPECT_GE(t.witness.achieved, 1.0 / 3.0);
}

TEST(Thm2, WitnessReachesThresholdForSmallDimensions) {
  for (std::size_t n = 1; n <= 5; ++n)
    for (std::uint64_t i = 0; i < 60; ++i) {
      const BoundWithWitness t = thm2_bound_and_witness(corpus_instance(n, 13, i));
      EXPECT_GE(t.witness.achieved, threshold(n) - 1e-10) << "n=" << n << " i=" << i;
    }
}

TEST(Thm3, ClosedForms) {
  for (std::size_t n = 1; n <= 6; ++n) {
    const BoundWithWitness t = thm3_bound_and_witness(Configuration::orthonormal(n));
    EXPECT_NEAR(t.bound.value, threshold(n), 1e-14);
    EXPECT_NEAR(t.witness.achieved, threshold(n), 1e-14);
    for (double y : t.witness.y_symmetric) EXPECT_NEAR(std::abs(y), 1.0 / std::sqrt(double(n)), 1e-15);
  }
  // a1 a2 = (s+ + s-)^2 / 4 with s+- = sqrt(1 +- 0.5).
  const BoundWithWitness t = thm3_bound_and_witness(kPair60);
  EXPECT_NEAR(t.bound.value, (1.0 + std::sqrt(0.75)) / 4.0, 1e-14);
  EXPECT_NEAR(t.bound.value, 0.466506351, 1e-9);
  EXPECT_GE(t.witness.achieved, t.bound.value);
}

TEST(Witnesses, SoundOnSeededCorpus) {
  for (std::size_t n = 2; n <= 8; ++n)
    for (std::uint64_t i = 0; i < 50; ++i) {
      const Configuration c = corpus_instance(n, 99, i);
      const BoundReport r = full_report(c);
      for (const Witness& w : r.witnesses) {
        EXPECT_NEAR(norm(w.y), 1.0, 1e-12);
        // Same value in the symmetrized and the original frame.
        EXPECT_NEAR(w.achieved, w.achieved_symmetric, 1e-12);
      }
      if (r.thm1) { EXPECT_GE(r.witness(Construction::kAveraging)->achieved, r.thm1->value - kSlack); }
      EXPECT_GE(r.witness(Construction::kBangGram)->achieved, r.thm2->value - kSlack);
      EXPECT_GE(r.witness(Construction::kBangDiagonal)->achieved, r.thm3->value - kSlack);
    }
}

TEST(Ordering, ChainOnSeededCorpus) {
  for (std::size_t n = 2; n <= 8; ++n)
    for (std::uint64_t i = 0; i < 50; ++i) {
      const BoundReport r = full_report(corpus_instance(n, 98, i));
      if (r.harmonic) {
        EXPECT_LE(r.marcus.value, r.harmonic->value + kSlack);
        EXPECT_LE(r.harmonic->value, r.thm1->value + kSlack);
      }
      EXPECT_LE(r.marcus.value, r.thm3->value + kSlack);
    }
}

// The diagonal bound dominates the other two constructive bounds, since
// a_j >= lambda_n^{-1/2} and a_j >= 1 / (G^{-1/2})_jj >= 1 / V_j.
TEST(Ordering, DiagonalBoundDominates) {
  for (std::size_t n = 2; n <= 8; ++n)
    for (std::uint64_t i = 0; i < 50; ++i) {
      const BoundReport r = full_report(corpus_instance(n, 97, i));
      EXPECT_GE(r.thm3->log_value, r.thm2->log_value - 1e-12);
      if (r.thm1) { EXPECT_GE(r.thm3->log_value, r.thm1->log_value - 1e-12); }
    }
}

TEST(FullReport, OrthonormalAllEqual) {
  const BoundReport r = full_report(Configuration::orthonormal(3));
  const double t = threshold(3);
  EXPECT_NEAR(r.threshold.value, t, 1e-15);
  EXPECT_NEAR(r.marcus.value, t, 1e-14);
  EXPECT_NEAR(r.harmonic->value, t, 1e-14);
  EXPECT_NEAR(r.thm1->value, t, 1e-14);
  EXPECT_NEAR(r.thm2->value, t, 1e-14);
  EXPECT_NEAR(r.thm3->value, t, 1e-14);
  EXPECT_TRUE(r.absent.empty());
}

TEST(FullReport, RankDeficient) {
  const BoundReport r = full_report(Configuration({{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {1.0, 0.0, 0.0}}));
  EXPECT_EQ(r.marcus.value, 0.0);
  EXPECT_FALSE(r.harmonic.has_value());
  EXPECT_FALSE(r.thm1.has_value());
  EXPECT_FALSE(r.v_lengths.has_value());
  EXPECT_TRUE(r.absent.contains("thm1"));
  EXPECT_TRUE(r.absent.contains("harmonic"));
  ASSERT_TRUE(r.thm2.has_value());
  ASSERT_TRUE(r.thm3.has_value());
  EXPECT_GE(r.witness(Construction::kBangGram)->achieved, r.thm2->value - kSlack);
  EXPECT_GE(r.witness(Construction::kBangDiagonal)->achieved, r.thm3->value - kSlack);
}

TEST(FullReport, PairWithSupEstimate) {
  ReportOptions options;
  options.with_sup = true;
  const BoundReport r = full_report(kPair60, options);
  ASSERT_TRUE(r.sup_estimate.has_value());
  EXPECT_NEAR(*r.sup_estimate, 0.75, 1e-10);
  for (double b : {r.marcus.value, r.harmonic->value, r.thm1->value, r.thm2->value, r.thm3->value})
    EXPECT_LE(b, *r.sup_estimate + 1e-9);
  EXPECT_EQ(r.winners(), std::vector<std::string>{"thm3"});
}

TEST(FullReport, RotationInvariance) {
  for (std::uint64_t i = 0; i < 40; ++i) {
    const std::size_t n = 2 + i % 6;
    const Configuration c = corpus_instance(n, 55, i);
    Rng rng = make_rng(56, i);
    const BoundReport a = full_report(c);
    const BoundReport b = full_report(Configuration(c.matrix() * random_orthogonal(n, rng)));
    EXPECT_NEAR(a.marcus.value, b.marcus.value, 1e-9);
    EXPECT_NEAR(a.thm2->value, b.thm2->value, 1e-9);
    EXPECT_NEAR(a.thm3->value, b.thm3->value, 1e-9);
    ASSERT_EQ(a.thm1.has_value(), b.thm1.has_value());
    if (a.thm1) {
      EXPECT_NEAR(a.thm1->value, b.thm1->value, 1e-9);
      EXPECT_NEAR(a.harmonic->value, b.harmonic->value, 1e-9);
    }
  }
}

TEST(FullReport, PermutationEquivariance) {
  for (std::uint64_t i = 0; i < 40; ++i) {
    const std::size_t n = 2 + i % 6;
    const Configuration c = corpus_instance(n, 57, i);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::rotate(perm.begin(), perm.begin() + 1, perm.end());
    Matrix m(n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) m(j, k) = c.matrix()(perm[j], k);
    const BoundReport a = full_report(c);
    const BoundReport b = full_report(Configuration(m));
    for (std::size_t j = 0; j < n; ++j) EXPECT_NEAR(b.a_diag[j], a.a_diag[perm[j]], 1e-12);
    EXPECT_NEAR(a.marcus.value, b.marcus.value, 1e-12);
    EXPECT_NEAR(a.thm2->value, b.thm2->value, 1e-12);
    EXPECT_NEAR(a.thm3->value, b.thm3->value, 1e-12);
    if (a.thm1) { EXPECT_NEAR(a.thm1->value, b.thm1->value, 1e-12); }
  }
}

TEST(FullReport, LogDomainAvoidsUnderflow) {
  const BoundReport r = full_report(Configuration::orthonormal(300));
  EXPECT_EQ(r.threshold.value, 0.0);  // underflows in linear form
  EXPECT_NEAR(r.threshold.log_value, -150.0 * std::log(300.0), 1e-9);
  EXPECT_NEAR(r.thm3->log_value, r.threshold.log_value, 1e-9);
  EXPECT_NEAR(r.thm2->log_value, r.threshold.log_value, 1e-9);
}

}  // namespace
}  // namespace polar
