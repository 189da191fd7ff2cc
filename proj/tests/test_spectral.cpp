#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "wegnerlab/spectral.hpp"

using namespace wegnerlab;

namespace {

TridiagonalOperator random_operator(CounterStream& s, std::size_t n, double range) {
  std::vector<double> d(n), e(n - 1);
  for (double& v : d) v = range * (2.0 * s.uniform() - 1.0);
  for (double& v : e) v = range * (2.0 * s.uniform() - 1.0);
  return make_operator(std::move(d), std::move(e));
}

std::size_t dense_count(const std::vector<double>& values, double e) {
  return static_cast<std::size_t>(std::lower_bound(values.begin(), values.end(), e) - values.begin());
}

TEST(CountBelow, MatchesDenseOracleOnRandomOperators) {
  CounterStream s(101, 0);
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(s.uniform() * 128);
    const auto op = random_operator(s, n, 100.0);
    const auto values = dense_spectrum(op).values;
    for (int j = 0; j < 20; ++j) {
      const double e = 300.0 * (2.0 * s.uniform() - 1.0);
      // Skip energies within rounding distance of an eigenvalue.
      const auto it = std::lower_bound(values.begin(), values.end(), e);
      const double gap = std::min(it == values.end() ? 1e300 : *it - e,
                                  it == values.begin() ? 1e300 : e - *(it - 1));
      if (gap < 1e-9) continue;
      if (count_below(op, e) != dense_count(values, e)) ++mismatches;
    }
  }
  EXPECT_EQ(mismatches, 0u);
}

TEST(CountBelow, ZeroPivotIsReplaced) {
  // [[1, 1], [1, 1]] at E = 1: first pivot is exactly 0. Eigenvalues 0, 2.
  const auto op = make_operator({1.0, 1.0}, {1.0});
  EXPECT_EQ(count_below(op, 1.0), 1u);
  // Pivot hits in the middle of a longer chain.
  const auto op2 = make_operator({2.0, 3.0, 2.0, 5.0, 1.0}, {1.0, 2.0, 1.0, 1.5});
  const auto values = dense_spectrum(op2).values;
  for (double e : {2.0, 3.0, 2.5, 5.0, 1.0})
    if (std::none_of(values.begin(), values.end(), [&](double v) { return std::abs(v - e) < 1e-9; }))
      EXPECT_EQ(count_below(op2, e), dense_count(values, e)) << e;
}

TEST(CountBelow, DecoupledBlocks) {
  const auto op = make_operator({1.0, 5.0, 3.0}, {0.0, 0.0});
  EXPECT_EQ(count_below(op, 0.5), 0u);
  EXPECT_EQ(count_below(op, 2.0), 1u);
  EXPECT_EQ(count_below(op, 4.0), 2u);
  EXPECT_EQ(count_below(op, 6.0), 3u);
  EXPECT_THROW(count_below(op, std::nan("")), std::invalid_argument);
}

TEST(TraceProjection, HonoursClosure) {
  const auto op = make_operator({1.0, 2.0, 3.0}, {0.0, 0.0});
  EXPECT_EQ(trace_projection(op, {1.0, 3.0, true, true}), 3u);
  EXPECT_EQ(trace_projection(op, {1.0, 3.0, true, false}), 2u);
  EXPECT_EQ(trace_projection(op, {1.0, 3.0, false, false}), 1u);
  EXPECT_EQ(trace_projection(op, SpectralWindow::below(2.0, 0.0)), 0u);
  EXPECT_EQ(trace_projection(op, {2.0, 2.0, true, true}), 1u);
  EXPECT_THROW(trace_projection(op, {3.0, 1.0, true, true}), std::invalid_argument);
}

TEST(KthEigenvalue, AgreesWithDense) {
  CounterStream s(7, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const auto op = random_operator(s, 60, 10.0);
    const auto values = dense_spectrum(op).values;
    for (std::size_t k = 0; k < values.size(); ++k)
      EXPECT_NEAR(kth_eigenvalue(op, k), values[k], 1e-11 * 40.0);
  }
  const auto op = random_operator(s, 5, 1.0);
  EXPECT_THROW(kth_eigenvalue(op, 5), std::out_of_range);
}

TEST(EigenvaluesIn, ReturnsAscendingValuesAndGuardsCapacity) {
  CounterStream s(8, 1);
  const auto op = random_operator(s, 100, 10.0);
  const auto values = dense_spectrum(op).values;
  const SpectralWindow w{-5.0, 5.0, true, true};
  const auto got = eigenvalues_in(op, w, 1000);
  const auto lo = dense_count(values, -5.0);
  ASSERT_EQ(got.size(), dense_count(values, 5.0) - lo);
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], values[lo + i], 1e-8);
  EXPECT_THROW(eigenvalues_in(op, w, 1), CapacityError);
}

TEST(Eigenpair, ResidualNormalizationAndSign) {
  CounterStream s(9, 2);
  const double h = 0.05;
  auto op = random_operator(s, 80, 5.0);
  op.spacing = h;
  const auto dense = dense_spectrum(op, true);
  for (std::size_t k : {0ul, 17ul, 79ul}) {
    const auto pair = eigenpair(op, kth_eigenvalue(op, k));
    EXPECT_NEAR(pair.value, dense.values[k], 1e-10);
    double norm = 0.0;
    for (double v : pair.vector) norm += h * v * v;
    EXPECT_NEAR(norm, 1.0, 1e-12);
    const auto peak = *std::max_element(pair.vector.begin(), pair.vector.end(),
                                        [](double a, double b) { return std::abs(a) < std::abs(b); });
    EXPECT_GT(peak, 0.0);
    // Same vector as the dense oracle up to sign and the sqrt(h) scaling.
    const Eigen::VectorXd col = dense.vectors.col(static_cast<Eigen::Index>(k));
    double dot = 0.0;
    for (std::size_t i = 0; i < op.size(); ++i) dot += col[static_cast<Eigen::Index>(i)] * pair.vector[i];
    EXPECT_NEAR(std::abs(dot) * std::sqrt(h), 1.0, 1e-9);
  }
}

TEST(Eigenpair, ParityEigenvectorFromSymmetricOperator) {
  // Free Dirichlet operator: the deterministic start has components along
  // odd eigenvectors too.
  const std::size_t n = 31;
  const auto op = make_operator(std::vector<double>(n, 2.0), std::vector<double>(n - 1, -1.0));
  const auto pair = eigenpair(op, kth_eigenvalue(op, 1));
  EXPECT_NEAR(pair.value, 4.0 * std::pow(std::sin(2.0 * M_PI / 64.0), 2), 1e-12);
  EXPECT_NEAR(pair.vector[15], 0.0, 1e-10);
}

TEST(DenseSpectrum, GuardsSize) {
  const auto op = make_operator(std::vector<double>(5000, 1.0), std::vector<double>(4999, 0.0));
  EXPECT_THROW(dense_spectrum(op), CapacityError);
}

}  // namespace
