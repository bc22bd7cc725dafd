#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles/oracles.hpp"
#include "qcorr/error.hpp"
#include "qcorr/numkernel.hpp"

using namespace qcorr;
using namespace qcorr::numkernel;

namespace {

DenseMatrix diag(std::initializer_list<double> d) {
  std::vector<Complex> v;
  for (double x : d) v.emplace_back(x, 0.0);
  return DenseMatrix::diagonal(v);
}

DenseMatrix random_real(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Complex> e(n * n);
  for (auto& x : e) x = g(rng);
  return DenseMatrix(n, n, std::move(e));
}

}  // namespace

TEST(DenseMatrix, RejectsBadShapesAndNonFinite) {
  EXPECT_THROW(DenseMatrix(2, 2, std::vector<Complex>(3)), PreconditionError);
  EXPECT_THROW(DenseMatrix(0, 2, {}), PreconditionError);
  EXPECT_THROW(DenseMatrix(1, 1, {Complex(NAN, 0.0)}), PreconditionError);
  EXPECT_THROW(DenseMatrix::from_rows({{1.0, 2.0}, {3.0}}), PreconditionError);
}

TEST(InfNorm, Examples) {
  EXPECT_DOUBLE_EQ(inf_norm(DenseMatrix::from_rows({{1, -2}, {3, 4}})), 7.0);
  EXPECT_DOUBLE_EQ(inf_norm(DenseMatrix::zeros(3, 3)), 0.0);
  const DenseMatrix m(2, 2, {0.0, Complex(1.0, 1.0), 0.0, 0.0});
  EXPECT_NEAR(inf_norm(m), std::sqrt(2.0), 1e-15);
}

TEST(TwoNorm, Examples) {
  EXPECT_NEAR(two_norm(diag({1, 3})), 3.0, 1e-14);
  EXPECT_EQ(two_norm(DenseMatrix::zeros(2, 2)), 0.0);
  EXPECT_NEAR(two_norm(DenseMatrix::from_rows({{0, 2}, {0, 0}})), 2.0, 1e-14);
}

TEST(TwoNorm, MatchesQuadraticFormulaOn2x2) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const Complex a(g(rng), g(rng)), b(g(rng), g(rng)), c(g(rng), g(rng)), d(g(rng), g(rng));
    const DenseMatrix m(2, 2, {a, b, c, d});
    const auto s = oracle::singular_values_2x2(a, b, c, d);
    EXPECT_NEAR(two_norm(m), s[0], 1e-12 * s[0]);
    EXPECT_NEAR(min_singular(m), s[1], 1e-10 * s[0]);
  }
}

TEST(MinSingular, Examples) {
  EXPECT_NEAR(min_singular(diag({2, 5})), 2.0, 1e-14);
  EXPECT_NEAR(min_singular(DenseMatrix::from_rows({{1, 1}, {1, 1}})), 0.0, 1e-15);
  EXPECT_NEAR(min_singular(diag({-2.1, -0.1})), 0.1, 1e-15);
  EXPECT_THROW(min_singular(DenseMatrix::zeros(2, 3)), PreconditionError);
}

TEST(PortraitValue, Examples) {
  EXPECT_NEAR(portrait_value(diag({2}), Complex(0, 0)), 0.0, 1e-15);
  EXPECT_NEAR(portrait_value(diag({1, 3}), Complex(3.1, 0)), std::log10(30.0), 1e-12);
  EXPECT_EQ(portrait_value(diag({1, 3}), Complex(3, 0)), kPortraitInfinity);
  EXPECT_THROW(portrait_value(DenseMatrix::zeros(2, 3), Complex(0, 0)), PreconditionError);
}

TEST(PortraitValue, EqualsDefinitionAndIsConjugateSymmetric) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 30; ++k) {
    const DenseMatrix m = random_real(rng, 2 + k % 5);
    const Complex z(u(rng), u(rng));
    const double v = portrait_value(m, z);
    ASSERT_TRUE(std::isfinite(v));
    const DenseMatrix shifted(m.values() - z * Eigen::MatrixXcd::Identity(m.rows(), m.cols()));
    const double expect = std::log10(two_norm(m)) - std::log10(min_singular(shifted));
    EXPECT_NEAR(v, expect, 1e-12 * std::max(1.0, std::abs(expect)));
    EXPECT_NEAR(portrait_value(m, std::conj(z)), v, 1e-10);
    EXPECT_GE(two_norm(m), min_singular(m));
  }
}

TEST(Eigenvalues, Examples) {
  const auto d = eigenvalues(diag({3, 1, 2})).values;
  ASSERT_EQ(d.size(), 3u);
  EXPECT_EQ(d[0], Complex(1, 0));
  EXPECT_EQ(d[1], Complex(2, 0));
  EXPECT_EQ(d[2], Complex(3, 0));

  const auto rot = eigenvalues(DenseMatrix::from_rows({{0, 1}, {-1, 0}})).values;
  ASSERT_EQ(rot.size(), 2u);
  EXPECT_NEAR(std::abs(rot[0] - Complex(0, -1)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(rot[1] - Complex(0, 1)), 0.0, 1e-14);

  // Roots of x^2 - 3x + 2 checked by substitution.
  const std::vector<Root> roots{{1.0, 1}, {2.0, 1}};
  for (const Complex& z : eigenvalues(companion_matrix(roots)).values) {
    EXPECT_LT(std::abs(z * z - 3.0 * z + 2.0), 1e-12);
  }
}

TEST(Eigenvalues, ResidualBoundHolds) {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 10; ++k) {
    const DenseMatrix m = random_real(rng, 6);
    const Spectrum s = eigenvalues(m);
    EXPECT_EQ(s.values.size(), 6u);
    EXPECT_GE(s.residual_bound, 0.0);
    EXPECT_LT(s.residual_bound, 1e-10);
  }
}

TEST(Companion, TopRowConvention) {
  const std::vector<Root> roots{{1.0, 1}, {2.0, 1}};
  EXPECT_EQ(companion_matrix(roots), DenseMatrix::from_rows({{3, -2}, {1, 0}}));
  const std::vector<Root> zero{{0.0, 4}};
  const DenseMatrix shift = companion_matrix(zero);
  for (std::size_t c = 0; c < 4; ++c) EXPECT_EQ(shift(0, c), Complex(0, 0));
  EXPECT_EQ(shift(3, 2), Complex(1, 0));
  EXPECT_THROW(companion_matrix(std::vector<Root>{}), PreconditionError);
}

TEST(Companion, RoundTripsSeparatedRoots) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int k = 0; k < 20; ++k) {
    std::vector<Root> roots;
    std::vector<double> values;
    const int degree = 2 + k % 5;
    while (static_cast<int>(values.size()) < degree) {
      const double v = u(rng);
      bool far = true;
      for (double w : values) far = far && std::abs(v - w) > 0.5;
      if (far) values.push_back(v);
    }
    std::sort(values.begin(), values.end());
    for (double v : values) roots.push_back({v, 1});
    const auto eig = eigenvalues(companion_matrix(roots)).values;
    ASSERT_EQ(eig.size(), values.size());
    for (std::size_t i = 0; i < values.size(); ++i) EXPECT_NEAR(std::abs(eig[i] - values[i]), 0.0, 1e-6);
  }
}

TEST(Companion, FigureOneSpectrumClustersNearRoots) {
  const std::vector<Root> roots{{1.0, 3}, {2.0, 3}, {3.0, 3}, {4.0, 1}};
  const auto eig = eigenvalues(companion_matrix(roots)).values;
  ASSERT_EQ(eig.size(), 10u);
  for (const Complex& z : eig) {
    double best = 1e9;
    for (double r : {1.0, 2.0, 3.0, 4.0}) best = std::min(best, std::abs(z - r));
    EXPECT_LT(best, 0.05);
  }
}

TEST(SynthJordan, IdentityLikeBasisGivesTheBlock) {
  const std::vector<JordanBlockSpec> blocks{{7.0, 3}};
  const DenseMatrix m = synth_jordan(blocks, 1, 1.0 + 1e-12);
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 3; ++c) {
      const double want = r == c ? 7.0 : (c == r + 1 ? 1.0 : 0.0);
      EXPECT_NEAR(std::abs(m(r, c) - want), 0.0, 1e-9);
    }
  }
}

TEST(SynthJordan, DeterministicAndSpectrallyCorrect) {
  const std::vector<JordanBlockSpec> blocks{{-1.0, 1}, {-2.0, 1}, {7.0, 3}, {7.0, 3}};
  const DenseMatrix a = synth_jordan(blocks, 42, 10.0);
  EXPECT_EQ(a, synth_jordan(blocks, 42, 10.0));
  EXPECT_FALSE(a == synth_jordan(blocks, 43, 10.0));
  EXPECT_EQ(a.rows(), 8u);
  EXPECT_TRUE(a.is_real());
  const auto eig = eigenvalues(a).values;
  int near7 = 0, nearm1 = 0, nearm2 = 0;
  for (const Complex& z : eig) {
    near7 += std::abs(z - 7.0) < 1e-4;
    nearm1 += std::abs(z + 1.0) < 1e-4;
    nearm2 += std::abs(z + 2.0) < 1e-4;
  }
  EXPECT_EQ(near7, 6);
  EXPECT_EQ(nearm1, 1);
  EXPECT_EQ(nearm2, 1);
  EXPECT_THROW(synth_jordan(blocks, 1, 1.0), PreconditionError);
  EXPECT_THROW(synth_jordan(std::vector<JordanBlockSpec>{}, 1, 10.0), PreconditionError);
}
