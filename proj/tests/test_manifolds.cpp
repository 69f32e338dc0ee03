#include "oracles.hpp"
#include "tgp/manifolds.hpp"

#include <gtest/gtest.h>

using namespace tgp;

namespace {

const ManifoldKind kSt = ManifoldKind::stiefel(4, 2);
const ManifoldKind kGr = ManifoldKind::grassmann(4, 2);

} // namespace

TEST(Manifolds, KindValidation) {
  EXPECT_THROW(ManifoldKind::stiefel(2, 3), std::invalid_argument);
  EXPECT_THROW(ManifoldKind::grassmann(3, 0), std::invalid_argument);
  EXPECT_THROW(ManifoldKind::grassmann(3, 3), std::invalid_argument);
  EXPECT_EQ(kSt.name(), "St(2,4)");
  EXPECT_EQ(kGr.name(), "Gr(2,4)");
  EXPECT_EQ(kGr.ambient_cols(), 4);
}

TEST(Manifolds, PointConstructionValidates) {
  EXPECT_THROW(ManifoldPoint(kSt, Matrix::Ones(4, 2)), InfeasiblePointError);
  EXPECT_THROW(ManifoldPoint(kSt, Matrix::Zero(3, 2)), DimensionError);
  Matrix P = Matrix::Zero(4, 4);
  P(0, 0) = P(1, 1) = 1.0;
  EXPECT_NO_THROW(ManifoldPoint(kGr, P));
  P(2, 2) = 1.0;
  EXPECT_THROW(ManifoldPoint(kGr, P), InfeasiblePointError);
}

TEST(Manifolds, ReachValues) {
  EXPECT_DOUBLE_EQ(reach(kSt), 1.0);
  EXPECT_DOUBLE_EQ(reach(kGr), 1.0 / std::sqrt(2.0));
}

TEST(Manifolds, TangentAndNormalSplitIsOrthogonal) {
  Rng rng(3);
  for (const ManifoldKind &kind : {kSt, kGr}) {
    for (int i = 0; i < 100; ++i) {
      const ManifoldPoint X = random_point(kind, rng);
      const Matrix Y = rand_gaussian(kind.ambient_rows(), kind.ambient_cols(), rng);
      const Matrix T = project_tangent(X, Y).value;
      const Matrix N = project_normal(X, Y).value;
      EXPECT_LT((T + N - Y).norm(), 1e-13);
      EXPECT_NEAR(inner(T, N), 0.0, 1e-12);
      EXPECT_TRUE(is_tangent(X, T));
      EXPECT_TRUE(is_normal(X, N));
      // Idempotence.
      EXPECT_LT((project_tangent(X, T).value - T).norm(), 1e-13);
    }
  }
}

TEST(Manifolds, StiefelTangentSatisfiesDefiningEquation) {
  Rng rng(8);
  const ManifoldPoint X = random_point(kSt, rng);
  const Matrix V = project_tangent(X, rand_gaussian(4, 2, rng)).value;
  // X^T V + V^T X = 0.
  EXPECT_LT((X.value().transpose() * V + V.transpose() * X.value()).norm(), 1e-13);
}

TEST(Manifolds, GrassmannTangentIsSymmetricOffDiagonalBlock) {
  Rng rng(9);
  const ManifoldPoint X = random_point(kGr, rng);
  const Matrix V = project_tangent(X, rand_gaussian(4, 4, rng)).value;
  const Matrix &P = X.value();
  EXPECT_LT((V - V.transpose()).norm(), 1e-13);
  // V = P V + V P for tangent vectors at a projector.
  EXPECT_LT((P * V + V * P - V).norm(), 1e-13);
}

TEST(Manifolds, StiefelProjectionMatchesOracle) {
  Rng rng(21);
  for (int i = 0; i < 100; ++i) {
    const Matrix Y = rand_gaussian(4, 2, rng);
    const ProjectionResult p = project_to_manifold(kSt, Y);
    EXPECT_TRUE(p.unique);
    EXPECT_LT((p.point.value() - oracle::polar_factor(Y)).norm(), 1e-10);
  }
}

TEST(Manifolds, GrassmannProjectionMatchesOracle) {
  Rng rng(22);
  for (int i = 0; i < 100; ++i) {
    const Matrix Y = rand_gaussian(4, 4, rng);
    const ProjectionResult p = project_to_manifold(kGr, Y);
    EXPECT_TRUE(p.unique);
    EXPECT_LT((p.point.value() - oracle::grassmann_projection(Y, 2)).norm(), 1e-9);
  }
}

TEST(Manifolds, ProjectionFlagsTies) {
  // Equal 2nd and 3rd eigenvalues: the top-2 eigenspace is not unique.
  Matrix Y = Matrix::Zero(4, 4);
  Y(0, 0) = 3.0;
  Y(1, 1) = Y(2, 2) = 1.0;
  EXPECT_FALSE(project_to_manifold(kGr, Y).unique);
  EXPECT_FALSE(project_to_manifold(kSt, Matrix::Zero(4, 2)).unique);
}

TEST(Manifolds, DistanceIsZeroOnManifold) {
  Rng rng(1);
  const ManifoldPoint X = random_point(kSt, rng);
  EXPECT_LT(distance_to_manifold(kSt, X.value()), 1e-14);
  EXPECT_NEAR(distance_to_manifold(kSt, 2.0 * X.value()), std::sqrt(2.0), 1e-13);
}

TEST(Manifolds, RandomVectorsHaveRequestedNorm) {
  Rng rng(4);
  for (const ManifoldKind &kind : {kSt, kGr}) {
    const ManifoldPoint X = random_point(kind, rng);
    EXPECT_NEAR(random_tangent(X, 0.3, rng).norm(), 0.3, 1e-14);
    const Matrix W = random_normal(X, 0.7, rng);
    EXPECT_NEAR(W.norm(), 0.7, 1e-14);
    EXPECT_TRUE(is_normal(X, W));
  }
}

TEST(Manifolds, NormalStepInsideReachProjectsBack) {
  Rng rng(12);
  for (const ManifoldKind &kind : {kSt, kGr}) {
    for (int i = 0; i < 200; ++i) {
      const ManifoldPoint X = random_point(kind, rng);
      const Matrix W = random_normal(X, 0.99 * reach(kind), rng);
      EXPECT_LT((project_to_manifold(kind, X.value() + W).point.value() - X.value()).norm(),
                1e-10);
    }
  }
}

TEST(Manifolds, GrassmannBasisSpansPoint) {
  Rng rng(6);
  const ManifoldPoint X = random_point(kGr, rng);
  const Matrix U = grassmann_basis(X).leftCols(2);
  EXPECT_LT((U * U.transpose() - X.value()).norm(), 1e-12);
  EXPECT_THROW(grassmann_basis(random_point(kSt, rng)), std::invalid_argument);
}
