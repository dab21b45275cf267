#include <cmath>

#include <gtest/gtest.h>

#include "hessflow/errors.hpp"
#include "hessflow/grid.hpp"

using namespace hessflow;

namespace {

GridSpec spec2(std::size_t nx, std::size_t ny, Boundary b = Boundary::Periodic, int shear = 0) {
  GridSpec s;
  s.dim = 2;
  s.shape = {nx, ny};
  s.boundary = b;
  s.shear = shear;
  return s;
}

}  // namespace

TEST(Grid, NodeCountsAndSpacing) {
  const DomainGrid periodic(spec2(8, 4), identity_inverse_metric(2));
  EXPECT_EQ(periodic.node_count(), 32u);
  EXPECT_DOUBLE_EQ(periodic.spacing(0), 0.125);
  EXPECT_DOUBLE_EQ(periodic.h_min(), 0.125);
  EXPECT_EQ(periodic.active_nodes().size(), 32u);

  const DomainGrid dirichlet(spec2(8, 4, Boundary::Dirichlet), identity_inverse_metric(2));
  EXPECT_EQ(dirichlet.node_count(), 45u);
  EXPECT_EQ(dirichlet.active_nodes().size(), 7u * 3u);
  for (std::size_t k : dirichlet.active_nodes()) EXPECT_FALSE(dirichlet.is_boundary(k));
  EXPECT_TRUE(dirichlet.is_boundary(dirichlet.node_at(8, 2)));
  const auto c = dirichlet.coords(dirichlet.node_at(8, 4));
  EXPECT_DOUBLE_EQ(c[0], 1.0);
  EXPECT_DOUBLE_EQ(c[1], 1.0);
}

TEST(Grid, RowMajorLastAxisFastest) {
  const DomainGrid g(spec2(4, 6), identity_inverse_metric(2));
  EXPECT_EQ(g.node_at(1, 2), 8u);
  const auto ij = g.index(8);
  EXPECT_EQ(ij[0], 1);
  EXPECT_EQ(ij[1], 2);
}

TEST(Grid, RejectsBadSpecs) {
  EXPECT_THROW(DomainGrid(spec2(3, 8), identity_inverse_metric(2)), InvalidArgument);
  GridSpec s3 = spec2(8, 8);
  s3.dim = 3;
  s3.shape = {8, 8, 8};
  EXPECT_THROW(DomainGrid(s3, identity_inverse_metric(3)), InvalidArgument);
  GridSpec neg = spec2(8, 8);
  neg.spacing = {0.1, -0.1};
  EXPECT_THROW(DomainGrid(neg, identity_inverse_metric(2)), InvalidArgument);
  EXPECT_THROW(DomainGrid(spec2(8, 8, Boundary::Dirichlet, 1), identity_inverse_metric(2)), InvalidArgument);
  EXPECT_THROW(DomainGrid(spec2(12, 8, Boundary::Periodic, 1), identity_inverse_metric(2)), InvalidArgument);
  EXPECT_THROW(DomainGrid(spec2(8, 8), identity_inverse_metric(3)), ShapeMismatch);
  EXPECT_THROW(DomainGrid(spec2(8, 8), identity_inverse_metric(2, -1.0)), NotPositiveDefinite);
}

TEST(Grid, CflBound) {
  const DomainGrid g(spec2(16, 8), identity_inverse_metric(2, 3.0));
  EXPECT_DOUBLE_EQ(g.lambda_max(), 3.0);
  EXPECT_DOUBLE_EQ(g.cfl_bound(0.5), 0.5 * 0.0625 * 0.0625 / (2 * 2 * 3.0));
}

TEST(Grid, SampledInverseMetric) {
  const DomainGrid g(spec2(8, 8, Boundary::Periodic, 1), sheared_torus_inverse_metric());
  const std::size_t k = g.node_at(3, 6);
  const auto x = g.coords(k);
  const auto m = g.inverse_metric(k);
  EXPECT_DOUBLE_EQ(m[0], x[1] * x[1] + 1);
  EXPECT_DOUBLE_EQ(m[1], x[1]);
  EXPECT_DOUBLE_EQ(m[2], x[1]);
  EXPECT_DOUBLE_EQ(m[3], 1.0);
}

TEST(Grid, PeriodicWrap) {
  const DomainGrid g(spec2(8, 4), identity_inverse_metric(2));
  auto w = g.wrap(-1, 5);
  EXPECT_EQ(w.node, g.node_at(7, 1));
  EXPECT_EQ(w.deck[0], -1);
  EXPECT_EQ(w.deck[1], 1);
  w = g.wrap(17, -9);
  EXPECT_EQ(w.node, g.node_at(1, 3));
  EXPECT_EQ(w.deck[0], 2);
  EXPECT_EQ(w.deck[1], -3);
  const DomainGrid d(spec2(8, 4, Boundary::Dirichlet), identity_inverse_metric(2));
  EXPECT_THROW(d.wrap(-1, 0), ShapeMismatch);
}

// The index-space point must be the deck image T_{m,n}(x,y) = (x + s(n y + n^2/2) + m, y + n)
// of the wrapped node.
TEST(Grid, ShearedWrapIsTheDeckAction) {
  for (int s : {1, 2, -1}) {
    for (auto shape : {std::array<std::size_t, 2>{8, 8}, std::array<std::size_t, 2>{16, 8}}) {
      const DomainGrid g(spec2(shape[0], shape[1], Boundary::Periodic, s), identity_inverse_metric(2));
      const double hx = g.spacing(0), hy = g.spacing(1);
      for (long i = -20; i <= 30; i += 3) {
        for (long j = -19; j <= 25; j += 2) {
          const auto w = g.wrap(i, j);
          const auto p = g.coords(w.node);
          const double m = static_cast<double>(w.deck[0]), n = static_cast<double>(w.deck[1]);
          EXPECT_NEAR(p[0] + s * (n * p[1] + 0.5 * n * n) + m, i * hx, 1e-12) << s << " " << i << " " << j;
          EXPECT_NEAR(p[1] + n, j * hy, 1e-12);
        }
      }
    }
  }
}
