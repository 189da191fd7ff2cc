#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "wegnerlab/operator.hpp"
#include "wegnerlab/spectral.hpp"

using namespace wegnerlab;

namespace {

CanonicalModel free_model() {
  auto m = default_model();
  m.coupling = CouplingDensity::fixed(0.0);
  return m;
}

Realization zero_realization(const CanonicalModel& model, int l) {
  const auto sites = coupled_sites(model, l);
  Realization r;
  r.box_length = l;
  r.first_site = sites.first;
  r.couplings.assign(sites.size(), 0.0);
  return r;
}

TEST(Assemble, FreeDirichletEntries) {
  const auto model = free_model();
  const auto op = assemble(model, zero_realization(model, 1), {1, 4, Boundary::dirichlet});
  ASSERT_EQ(op.size(), 3u);
  for (double d : op.diag) EXPECT_EQ(d, 32.0);
  for (double e : op.offdiag) EXPECT_EQ(e, -16.0);
  EXPECT_DOUBLE_EQ(op.nodes.front(), -0.25);
  EXPECT_DOUBLE_EQ(op.nodes.back(), 0.25);
}

TEST(Assemble, FreeNeumannEndpoints) {
  const auto model = free_model();
  const auto op = assemble(model, zero_realization(model, 1), {1, 4, Boundary::neumann});
  ASSERT_EQ(op.size(), 5u);
  EXPECT_EQ(op.diag.front(), 16.0);
  EXPECT_EQ(op.diag.back(), 16.0);
  EXPECT_EQ(op.diag[2], 32.0);
  EXPECT_DOUBLE_EQ(op.nodes.front(), -0.5);
}

TEST(Assemble, ClosedFormDirichletSpectrum) {
  const auto model = free_model();
  for (int m : {4, 8, 16}) {
    const GridSpec grid{3, m, Boundary::dirichlet};
    const auto op = assemble(model, zero_realization(model, 3), grid);
    const double h = grid.spacing();
    const auto n = op.size();
    for (std::size_t k = 0; k < n; ++k) {
      // Box length 3: lambda_k = (4/h^2) sin^2((k+1) pi h / 6).
      const double s = std::sin(static_cast<double>(k + 1) * std::numbers::pi * h / 6.0);
      EXPECT_NEAR(kth_eigenvalue(op, k), 4.0 / (h * h) * s * s, 1e-9 * op.scale());
    }
  }
}

TEST(Assemble, LengthMismatchIsConfigError) {
  const auto model = free_model();
  EXPECT_THROW(assemble(model, zero_realization(model, 4), {8, 4, Boundary::dirichlet}), ConfigError);
}

TEST(Assemble, DiagonalMatchesPotentialAtBoxNodes) {
  // Off-centre window: canonical nodes are box nodes minus the origin shift.
  ModelSpec spec;
  spec.periodic = PeriodicPotential::harmonic(1.0, 8);
  spec.site = {-0.1, 0.3, {2.0, 2.0}, 0.1, 0.2, 2.0};
  spec.coupling = CouplingDensity::uniform(0.0, 1.0);
  const auto model = canonicalize(spec);
  const GridSpec grid{6, 8, Boundary::dirichlet};
  CounterStream s(1, 0);
  const auto r = sample_couplings(model.coupling, s, coupled_sites(model, 6), 6);
  const auto op = assemble(model, r, grid);
  const double h = grid.spacing();
  for (std::size_t i = 0; i < op.size(); ++i) {
    const double x = grid.node_position(static_cast<long>(i));
    double v = spec.periodic(x);
    for (long k = r.sites().first; k <= r.sites().last; ++k)
      v += (r.coupling(k) / model.coupling_scale) * spec.site(x - static_cast<double>(k));
    EXPECT_NEAR(op.diag[i] - 2.0 / (h * h), v, 1e-12) << x;
  }
}

TEST(SplitAt, DirichletRemovesCutNodes) {
  const auto model = free_model();
  const auto op = assemble(model, zero_realization(model, 4), {4, 8, Boundary::dirichlet});
  const auto cut = split_at(op, 0, 0.25, Boundary::dirichlet);
  EXPECT_EQ(cut.size(), op.size() - 2);
  EXPECT_TRUE(cut.warnings.empty());
  ASSERT_EQ(cut.interfaces.size(), 2u);
  EXPECT_DOUBLE_EQ(cut.interfaces[0].actual, -0.25);
  EXPECT_DOUBLE_EQ(cut.interfaces[1].actual, 0.25);
  // Three decoupled blocks: two zero couplings.
  EXPECT_EQ(std::count(cut.offdiag.begin(), cut.offdiag.end(), 0.0), 2);
  // Middle block [-0.125, 0.125] has 3 nodes with free Dirichlet spectrum of length 0.5.
  const auto mid = std::find(cut.nodes.begin(), cut.nodes.end(), -0.125) - cut.nodes.begin();
  EXPECT_EQ(cut.offdiag[static_cast<std::size_t>(mid) - 1], 0.0);
  EXPECT_EQ(cut.offdiag[static_cast<std::size_t>(mid) + 2], 0.0);
}

TEST(SplitAt, NeumannKeepsDimensionAndLowersSpectrum) {
  const auto model = free_model();
  const auto op = assemble(model, zero_realization(model, 4), {4, 8, Boundary::dirichlet});
  const auto cut = split_at(op, 1, 0.5, Boundary::neumann);
  ASSERT_EQ(cut.size(), op.size());
  const auto a = dense_spectrum(op).values;
  const auto b = dense_spectrum(cut).values;
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_LE(b[k], a[k] + 1e-9);
  // The cut block [0.5, 1.5] is a free Neumann box: lowest eigenvalue 0.
  EXPECT_NEAR(b[0], 0.0, 1e-10);
}

TEST(SplitAt, OffGridCutIsMovedWithWarning) {
  const auto model = free_model();
  const auto op = assemble(model, zero_realization(model, 4), {4, 8, Boundary::dirichlet});
  const auto cut = split_at(op, 0, 0.15, Boundary::dirichlet);
  EXPECT_EQ(cut.warnings.size(), 2u);
  EXPECT_DOUBLE_EQ(cut.interfaces[0].actual, -0.125);
}

TEST(SplitAt, ZeroRadiusIsSingleCut) {
  const auto model = free_model();
  const auto op = assemble(model, zero_realization(model, 4), {4, 8, Boundary::dirichlet});
  EXPECT_EQ(split_at(op, 0, 0.0, Boundary::dirichlet).size(), op.size() - 1);
  EXPECT_EQ(split_at(op, 0, 0.0, Boundary::dirichlet).interfaces.size(), 1u);
}

TEST(SplitAt, CutOutsideBoxIsConfigError) {
  const auto model = free_model();
  const auto op = assemble(model, zero_realization(model, 4), {4, 8, Boundary::dirichlet});
  EXPECT_THROW(split_at(op, 2, 0.15, Boundary::dirichlet), ConfigError);
  EXPECT_THROW(split_at(op, 0, -1.0, Boundary::neumann), ConfigError);
}

TEST(Export, TextHasOneRowPerNode) {
  const auto op = make_operator({1.0, 2.0}, {-0.5});
  std::ostringstream out;
  write_operator_text(out, op);
  EXPECT_EQ(out.str(), "0 1 -0.5\n1 2 0\n");
}

}  // namespace
