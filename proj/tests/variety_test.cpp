#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "lowrank/cone_oracle.hpp"
#include "lowrank/errors.hpp"
#include "lowrank/variety.hpp"

namespace lowrank {
namespace {

using verify::random_gaussian;
using verify::random_rank_matrix;

Matrix diag(std::initializer_list<double> d) {
  Vector v(static_cast<Eigen::Index>(d.size()));
  Eigen::Index k = 0;
  for (double x : d) v(k++) = x;
  return v.asDiagonal();
}

Matrix levin_x5() {
  return diag({1.0 + std::pow(-0.6, 5), std::pow(0.6, 5), 0.0});
}

TEST(VarietySpec, RejectsRankNotBelowMinDimension) {
  EXPECT_THROW(VarietySpec(2, 2, 2), InvalidParameter);
  EXPECT_THROW(VarietySpec(3, 2, 0), InvalidParameter);
  EXPECT_THROW(VarietySpec(3, 3, 1, -1.0), InvalidParameter);
  const VarietySpec spec(3, 4, 2);
  EXPECT_EQ(spec.rows(), 3);
  EXPECT_EQ(spec.cols(), 4);
  EXPECT_EQ(spec.max_rank(), 2);
  EXPECT_EQ(spec.rank_tol(), VarietySpec::kDefaultRankTol);
}

TEST(ThinSvd, DiagonalMatrix) {
  const SvdFactors f = thin_svd(diag({2, 1, 0}));
  EXPECT_EQ(f.sigma, Vector(Eigen::Vector3d(2, 1, 0)));
}

TEST(ThinSvd, ZeroMatrix) {
  const SvdFactors f = thin_svd(Matrix::Zero(2, 2));
  EXPECT_EQ(f.sigma, Vector::Zero(2));
}

TEST(ThinSvd, RejectsNonFinite) {
  Matrix X = Matrix::Identity(2, 2);
  X(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(thin_svd(X), NonFiniteInput);
  X(0, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(thin_svd(X), NonFiniteInput);
}

TEST(ThinSvd, FactorInvariantsOnRandomMatrices) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 200; ++t) {
    const Eigen::Index m = 2 + t % 3;
    const Eigen::Index n = 2 + (t / 3) % 3;
    const Matrix A = random_gaussian(m, n, rng);
    const SvdFactors f = thin_svd(A);
    const Eigen::Index k = std::min(m, n);
    ASSERT_EQ(f.width(), k);
    for (Eigen::Index i = 0; i + 1 < k; ++i) EXPECT_GE(f.sigma(i), f.sigma(i + 1));
    EXPECT_GE(f.sigma.minCoeff(), 0.0);
    EXPECT_LE((f.U.transpose() * f.U - Matrix::Identity(k, k)).norm(), 1e-12);
    EXPECT_LE((f.V.transpose() * f.V - Matrix::Identity(k, k)).norm(), 1e-12);
    EXPECT_LE((f.reconstruct() - A).norm(), 1e-10 * A.norm());
  }
}

TEST(ThinSvd, SignConventionIsDeterministic) {
  std::mt19937_64 rng(2);
  const Matrix A = random_gaussian(3, 3, rng);
  const SvdFactors f = thin_svd(A);
  const SvdFactors g = thin_svd(A);
  EXPECT_EQ(f.U, g.U);
  EXPECT_EQ(f.V, g.V);
  for (Eigen::Index j = 0; j < f.U.cols(); ++j) {
    Eigen::Index arg = 0;
    f.U.col(j).cwiseAbs().maxCoeff(&arg);
    EXPECT_GT(f.U(arg, j), 0.0);
  }
  const SvdFactors neg = thin_svd(Matrix(-A));
  EXPECT_LE((neg.U - f.U).norm(), 1e-12);
  EXPECT_LE((neg.V + f.V).norm(), 1e-12);
}

TEST(NumericalRank, Examples) {
  EXPECT_EQ(numerical_rank(diag({1, 0}), 1e-12), 1);
  EXPECT_EQ(numerical_rank(Matrix::Zero(3, 2), 1e-12), 0);
  EXPECT_EQ(numerical_rank(diag({1, 3e-13}), 1e-12), 1);
  EXPECT_EQ(numerical_rank(diag({1, 3e-12}), 1e-12), 2);
  EXPECT_EQ(numerical_rank(diag({2, 1, 0}), VarietySpec(3, 3, 2)), 2);
}

TEST(DeltaRank, Examples) {
  EXPECT_EQ(delta_rank(levin_x5(), 0.1), 1);
  EXPECT_EQ(delta_rank(diag({2, 1, 0}), 0.1), 2);
  EXPECT_EQ(delta_rank(Matrix::Zero(2, 2), 0.0), 0);
  EXPECT_EQ(delta_rank(Matrix::Zero(2, 2), 5.0), 0);
  EXPECT_EQ(delta_rank(diag({2, 1, 0}), 0.0), 2);
  EXPECT_EQ(delta_rank(diag({2, 1, 0}), 1.0), 1);
  EXPECT_EQ(delta_rank(diag({2, 1, 0}), 2.0), 0);
}

TEST(DeltaRank, NonincreasingAndScaleInvariant) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unif(0.0, 3.0);
  for (int t = 0; t < 500; ++t) {
    const Matrix X = random_rank_matrix(3, 4, 1 + t % 3, rng);
    const double d1 = unif(rng);
    const double d2 = d1 + unif(rng);
    EXPECT_GE(delta_rank(X, d1), delta_rank(X, d2));
    const double c = std::ldexp(1.0, t % 7 - 3);
    EXPECT_EQ(delta_rank(Matrix(c * X), c * d1), delta_rank(X, d1));
  }
}

TEST(ProjectToRank, Examples) {
  EXPECT_EQ(project_to_rank(diag({2, 1, 0}), 1), diag({2, 0, 0}));
  std::mt19937_64 rng(4);
  EXPECT_EQ(project_to_rank(random_gaussian(3, 2, rng), 0), Matrix::Zero(3, 2));

  const Matrix Y = project_to_rank(levin_x5(), 1);
  EXPECT_NEAR(Y(0, 0), 1.0 + std::pow(-0.6, 5), 1e-15);
  EXPECT_NEAR(Y(0, 0), 0.92224, 1e-15);
  EXPECT_EQ(Y(1, 1), 0.0);
  EXPECT_EQ(Y(2, 2), 0.0);
}

TEST(ProjectToRank, RejectsOutOfRange) {
  EXPECT_THROW(project_to_rank(Matrix::Zero(2, 3), 3), RankOutOfRange);
  EXPECT_THROW(project_to_rank(Matrix::Zero(2, 3), -1), RankOutOfRange);
  EXPECT_NO_THROW(project_to_rank(Matrix::Zero(2, 3), 2));
}

TEST(ProjectToRank, TiesKeepFirstComputedDirections) {
  const Matrix Y = project_to_rank(Matrix::Identity(2, 2), 1);
  EXPECT_EQ(numerical_rank(Y, 1e-12), 1);
  EXPECT_NEAR(Y.norm(), 1.0, 1e-15);
  EXPECT_EQ(Y, project_to_rank(Matrix::Identity(2, 2), 1));
}

TEST(ProjectToRank, EckartYoungAgainstRandomCompetitors) {
  std::mt19937_64 rng(5);
  const Matrix X = random_gaussian(3, 3, rng);
  for (Eigen::Index k = 1; k <= 2; ++k) {
    const double best = (X - project_to_rank(X, k)).norm();
    for (int t = 0; t < 10000; ++t) {
      const Matrix B = random_rank_matrix(3, 3, k, rng);
      ASSERT_LE(best, (X - B).norm()) << "rank " << k << " trial " << t;
    }
  }
}

TEST(TangentCone, ApocalypseRayDirection) {
  const VarietySpec spec(2, 2, 1);
  for (double x : {1.0, 0.4, 1e-6}) {
    const TangentProjection p = project_tangent_cone(diag({x, 0}), diag({-x, 1}), spec);
    EXPECT_LE((p.direction - diag({-x, 0})).norm(), 1e-15 * x);
    EXPECT_NEAR(p.s_f, x, 1e-15 * x);
  }
}

TEST(TangentCone, AtOriginIsTheVariety) {
  const VarietySpec spec(2, 2, 1);
  const Matrix zero = Matrix::Zero(2, 2);
  TangentProjection p = project_tangent_cone(zero, diag({0, 1}), spec);
  EXPECT_EQ(p.direction, diag({0, 1}));
  EXPECT_EQ(p.s_f, 1.0);
  p = project_tangent_cone(zero, diag({4, 6}), spec);
  EXPECT_EQ(p.direction, diag({0, 6}));
  EXPECT_EQ(p.s_f, 6.0);
}

TEST(TangentCone, FullRankIsTangentSpace) {
  const VarietySpec spec(3, 3, 2);
  std::mt19937_64 rng(6);
  const Matrix X = random_rank_matrix(3, 3, 2, rng);
  const Matrix Z = random_gaussian(3, 3, rng);
  const TangentProjection p = project_tangent_cone(X, Z, spec);
  EXPECT_LE((Z - p.direction - p.residual_rank_block).norm(), 1e-12 * Z.norm());
}

TEST(TangentCone, Errors) {
  const VarietySpec spec(3, 3, 1);
  EXPECT_THROW(project_tangent_cone(diag({1, 1, 0}), Matrix::Zero(3, 3), spec),
               RankExceedsVariety);
  EXPECT_THROW(project_tangent_cone(Matrix::Zero(2, 2), Matrix::Zero(3, 3), spec),
               ShapeMismatch);
  EXPECT_THROW(project_tangent_cone(Matrix::Zero(3, 3), Matrix::Zero(3, 2), spec),
               ShapeMismatch);
}

TEST(TangentCone, MatchesBruteForceForRankOneInThreeByThree) {
  const VarietySpec spec(3, 3, 2);
  std::mt19937_64 rng(7);
  for (int t = 0; t < 20; ++t) {
    const Matrix X = random_rank_matrix(3, 3, 1, rng);
    const Matrix Z = random_gaussian(3, 3, rng);
    const TangentProjection p = project_tangent_cone(X, Z, spec);
    const verify::ConeSearchResult ref = verify::brute_force_cone_projection(X, Z, 2, 20, rng);
    EXPECT_LE((Z - p.direction).norm(), ref.distance + 1e-6);
    EXPECT_LE((p.direction - ref.best).norm(), 1e-6);
  }
}

TEST(TangentCone, ProjectionProperties) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 300; ++t) {
    const Eigen::Index m = 3 + t % 2;
    const Eigen::Index n = 3 + (t / 2) % 2;
    const Eigen::Index r = 1 + t % 2;
    const VarietySpec spec(m, n, r);
    const Matrix X = random_rank_matrix(m, n, t % (r + 1), rng);
    const Matrix Z = random_gaussian(m, n, rng);
    const TangentProjection p = project_tangent_cone(X, Z, spec);
    const Matrix rest = Z - p.direction;
    const double scale = Z.squaredNorm();

    EXPECT_NEAR(p.s_f, p.direction.norm(), 1e-14 * p.direction.norm());
    EXPECT_LE(std::abs((p.direction.array() * rest.array()).sum()), 1e-10 * scale);
    EXPECT_NEAR(scale, p.direction.squaredNorm() + rest.squaredNorm(), 1e-10 * scale);
    EXPECT_TRUE(in_tangent_cone(X, p.direction, spec, 1e-10));
    const TangentProjection again = project_tangent_cone(X, p.direction, spec);
    EXPECT_LE((again.direction - p.direction).norm(), 1e-12 * std::max(1.0, p.s_f));
    EXPECT_LE(stationarity_measure(X, -Z, spec), Z.norm() * (1 + 1e-15));
  }
}

TEST(InTangentCone, Examples) {
  const VarietySpec spec(2, 2, 1);
  std::mt19937_64 rng(9);
  const Matrix X = random_rank_matrix(2, 2, 1, rng);
  EXPECT_TRUE(in_tangent_cone(X, X, spec, 1e-12));
  EXPECT_FALSE(in_tangent_cone(diag({1, 0}), diag({0, 1}), spec, 1e-12));
  EXPECT_TRUE(in_tangent_cone(Matrix::Zero(2, 2), random_rank_matrix(2, 2, 1, rng), spec,
                              1e-12));
  EXPECT_FALSE(in_tangent_cone(Matrix::Zero(2, 2), Matrix::Identity(2, 2), spec, 1e-12));
}

TEST(StationarityMeasure, Examples) {
  const VarietySpec spec(2, 2, 1);
  // Gradients of the three 2x2 objectives written out by hand.
  for (int i = 0; i < 10; ++i) {
    const double x = std::pow(0.4, i);
    const Matrix grad = diag({x, -1});
    EXPECT_NEAR(stationarity_measure(diag({x, 0}), grad, spec), x, 1e-16);
  }
  EXPECT_EQ(stationarity_measure(diag({4, 0}), diag({0, -6}), spec), 0.0);
  EXPECT_EQ(stationarity_measure(Matrix::Zero(2, 2), diag({-2, -3}), spec), 3.0);
}

}  // namespace
}  // namespace lowrank
