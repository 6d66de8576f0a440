#include <numbers>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace jive {
namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

SignalEstimate estimate_from_basis(const Matrix& v) {
  SignalEstimate e;
  e.rank = v.cols();
  e.score_basis = v;
  e.singular_values = Vector::Ones(v.cols());
  e.left_basis = Matrix::Identity(v.cols(), v.cols());
  return e;
}

StackedScores stack(std::initializer_list<Matrix> bases) {
  std::vector<SignalEstimate> est;
  for (const auto& b : bases) est.push_back(estimate_from_basis(b));
  return stack_scores(est);
}

Matrix random_basis(Index n, Index r, std::uint64_t seed) {
  Engine rng = RandomStreams(seed).engine(0);
  return random_orthonormal(n, r, rng);
}

TEST(StackScores, IdenticalBases) {
  const Matrix v = random_basis(10, 2, 1);
  const auto s = stack({v, v});
  ASSERT_EQ(s.svd.s.size(), 4);
  EXPECT_NEAR(s.svd.s(0), std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(s.svd.s(1), std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(s.svd.s(2), 0.0, 1e-12);
  EXPECT_NEAR(s.svd.s(3), 0.0, 1e-12);
}

TEST(StackScores, OrthogonalRankOne) {
  const Matrix q = random_basis(8, 2, 2);
  const auto s = stack({q.col(0), q.col(1)});
  EXPECT_NEAR(s.svd.s(0), 1.0, 1e-12);
  EXPECT_NEAR(s.svd.s(1), 1.0, 1e-12);
}

TEST(StackScores, CrossProductIdentity) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const Index n = 6 + static_cast<Index>(seed % 20);
    const Index r1 = 1 + static_cast<Index>(seed % 4);
    const Index r2 = 1 + static_cast<Index>((seed / 2) % 5);
    const Matrix v1 = random_basis(n, r1, seed);
    const Matrix v2 = random_basis(n, r2, seed + 1000);
    const auto s = stack({v1, v2});
    const Vector cross = test::reference_svd(v1.transpose() * v2).singularValues();
    for (Index i = 0; i < cross.size(); ++i) {
      EXPECT_NEAR(s.svd.s(i) * s.svd.s(i) - 1.0, cross(i), 1e-10) << "seed " << seed;
    }
  }
}

TEST(StackScores, Invariants) {
  const auto s = stack({random_basis(12, 3, 1), random_basis(12, 2, 2), random_basis(12, 4, 3)});
  ASSERT_EQ(s.blocks(), 3u);
  for (std::size_t k = 0; k < s.blocks(); ++k) {
    const auto [begin, end] = s.block_row_ranges[k];
    EXPECT_EQ(end - begin, s.ranks[k]);
    const Matrix slice = s.stacked.middleRows(begin, end - begin);
    EXPECT_LE(linalg::orthonormality_error(slice.transpose()), 1e-10);
  }
  EXPECT_LE(s.svd.s.maxCoeff(), std::sqrt(3.0) + 1e-10);
  EXPECT_GE(s.svd.s.minCoeff(), -1e-10);
}

TEST(StackScores, ObjectMismatch) {
  std::vector<SignalEstimate> est{estimate_from_basis(random_basis(5, 1, 1)),
                                  estimate_from_basis(random_basis(6, 1, 2))};
  EXPECT_THROW(stack_scores(est), ValidationError);
  EXPECT_THROW(stack_scores(std::span(est).first(1)), ValidationError);
}

TEST(PrincipalAngles, IdenticalAndOrthogonal) {
  const Matrix q = random_basis(9, 4, 5);
  for (double a : principal_angles(stack({q.leftCols(2), q.leftCols(2)}))) EXPECT_NEAR(a, 0.0, 1e-5);
  const auto orth = principal_angles(stack({q.leftCols(2), q.rightCols(2)}));
  ASSERT_EQ(orth.size(), 2u);
  for (double a : orth) EXPECT_NEAR(a, 90.0, 1e-10);
}

TEST(PrincipalAngles, MatchesOracleAndAscending) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const Index r1 = 1 + static_cast<Index>(seed % 5);
    const Index r2 = 1 + static_cast<Index>((seed * 3) % 6);
    const Matrix v1 = random_basis(20, r1, seed);
    const Matrix v2 = random_basis(20, r2, seed + 500);
    const auto angles = principal_angles(stack({v1, v2}));
    const auto oracle = cross_product_angle_oracle(v1, v2);
    ASSERT_EQ(angles.size(), oracle.size());
    for (std::size_t i = 0; i < angles.size(); ++i) {
      EXPECT_NEAR(angles[i] / kDeg, oracle[i], 1e-8);
      if (i > 0) EXPECT_GE(angles[i], angles[i - 1]);
    }
  }
}

TEST(PrincipalAngles, RequiresTwoBlocks) {
  const Matrix v = random_basis(6, 1, 1);
  EXPECT_THROW(principal_angles(stack({v, v, v})), ValidationError);
}

TEST(AngleThreshold, NoiselessIsZero) {
  const auto t = two_block_angle_threshold(test::constant_bound(0.0, 100), test::constant_bound(0.0, 100));
  EXPECT_EQ(t.value, 0.0);
  EXPECT_EQ(t.ci, (std::pair<double, double>{0.0, 0.0}));
}

TEST(AngleThreshold, SaturatesAtRightAngle) {
  const double s60 = std::sin(60.0 / kDeg);
  const auto t = two_block_angle_threshold(test::constant_bound(s60, 50), test::constant_bound(s60, 50));
  EXPECT_EQ(t.value, 90.0);
  ASSERT_FALSE(t.warnings.empty());
  EXPECT_NE(t.warnings[0].find("saturated"), std::string::npos);
}

TEST(AngleThreshold, PerReplicateSum) {
  PerturbationBound a, b;
  for (int r = 0; r < 20; ++r) {
    a.sin_theta_samples.push_back(std::sin((1.0 + r) / kDeg));
    b.sin_theta_samples.push_back(std::sin((40.0 - 2.0 * r) / kDeg));
  }
  const auto t = two_block_angle_threshold(a, b, {0.5, {0.1, 0.9}});
  // Per replicate: 41 - r degrees for r = 0..19, so sorted 22..41.
  ASSERT_EQ(t.samples.size(), 20u);
  for (int r = 0; r < 20; ++r) EXPECT_NEAR(t.samples[static_cast<std::size_t>(r)], 41.0 - r, 1e-10);
  EXPECT_NEAR(t.value, 31.0, 1e-10);       // ceil(10) - 1 -> 10th smallest
  EXPECT_NEAR(t.ci.first, 23.0, 1e-10);    // 2nd smallest
  EXPECT_NEAR(t.ci.second, 39.0, 1e-10);   // 18th smallest
  EXPECT_TRUE(t.warnings.empty());
}

TEST(AngleThreshold, ReplicateMismatch) {
  EXPECT_THROW(two_block_angle_threshold(test::constant_bound(0.1, 5), test::constant_bound(0.1, 6)),
               ValidationError);
}

TEST(SvThreshold, NoiselessIsK) {
  std::vector<PerturbationBound> b(4, test::constant_bound(0.0, 30));
  EXPECT_EQ(multi_block_sv_threshold(b).value, 4.0);
}

TEST(SvThreshold, ThreeBlocksHalfSines) {
  std::vector<PerturbationBound> b(3, test::constant_bound(0.5, 30));
  EXPECT_DOUBLE_EQ(multi_block_sv_threshold(b).value, 2.25);
}

TEST(SvThreshold, InvertedQuantiles) {
  // Block sines grow with the replicate index, so t decreases with it.
  PerturbationBound a, b;
  for (int r = 0; r < 100; ++r) {
    a.sin_theta_samples.push_back(std::sqrt(r / 200.0));
    b.sin_theta_samples.push_back(std::sqrt(r / 400.0));
  }
  const std::vector<PerturbationBound> bounds{a, b};
  const auto t = multi_block_sv_threshold(bounds, {0.5, {0.05, 0.95}});
  // t_r = 2 - 3r/400 is decreasing in r; the (1 - q) order statistics of t
  // sit at sorted index ceil(100 (1 - q)) - 1.
  EXPECT_NEAR(t.value, 2.0 - 3.0 * 50 / 400.0, 1e-12);
  EXPECT_NEAR(t.ci.first, 2.0 - 3.0 * 5 / 400.0, 1e-12);    // level 0.95
  EXPECT_NEAR(t.ci.second, 2.0 - 3.0 * 95 / 400.0, 1e-12);  // level 0.05
  EXPECT_GT(t.ci.first, t.ci.second);
}

TEST(SvThreshold, Errors) {
  std::vector<PerturbationBound> one{test::constant_bound(0.1, 5)};
  EXPECT_THROW(multi_block_sv_threshold(one), ValidationError);
  std::vector<PerturbationBound> uneven{test::constant_bound(0.1, 5), test::constant_bound(0.1, 4)};
  EXPECT_THROW(multi_block_sv_threshold(uneven), ValidationError);
}

TEST(Counting, StrictAnglesInclusiveSquares) {
  const std::vector<double> angles{10.0, 20.0, 30.0};
  EXPECT_EQ(count_angles_below(angles, 20.001), 2);
  EXPECT_EQ(count_angles_below(angles, 19.999), 1);
  EXPECT_EQ(count_angles_below(angles, 0.0), 0);
  const std::vector<double> zero{0.0, 45.0};
  EXPECT_EQ(count_angles_below(zero, 0.0), 1);  // exact sharing survives a zero bound

  const std::vector<double> squared{2.0, 1.5, 1.0};
  EXPECT_EQ(count_squared_at_least(squared, 2.0), 1);
  EXPECT_EQ(count_squared_at_least(squared, 1.5), 2);
  EXPECT_EQ(count_squared_at_least(squared, 1.6), 1);
}

ThresholdEstimate fixed(double v) {
  ThresholdEstimate t;
  t.value = v;
  t.ci = {v, v};
  return t;
}

TEST(SelectJointRank, BothCriteriaOnTwoBlocks) {
  // Angles 10 and 50 degrees between the two 2-dimensional score spaces.
  const Matrix q = random_basis(12, 4, 9);
  Matrix v1(12, 2), v2(12, 2);
  v1 << q.col(0), q.col(1);
  v2 << std::cos(10 / kDeg) * q.col(0) + std::sin(10 / kDeg) * q.col(2),
      std::cos(50 / kDeg) * q.col(1) + std::sin(50 / kDeg) * q.col(3);
  const auto s = stack({v1, v2});

  const auto multi = select_joint_rank(s, Criterion::multi_block_singular_value, fixed(1.85), fixed(31.0));
  EXPECT_EQ(multi.provisional_joint_rank, 1);
  ASSERT_TRUE(multi.principal_angles_deg);
  EXPECT_NEAR((*multi.principal_angles_deg)[0], 10.0, 1e-8);
  EXPECT_NEAR((*multi.principal_angles_deg)[1], 50.0, 1e-8);
  EXPECT_NEAR(multi.squared_singular_values[0], 1.0 + std::cos(10 / kDeg), 1e-12);
  EXPECT_EQ(multi.alternate_joint_rank, std::optional<Index>(1));
  EXPECT_EQ(multi.candidate_basis.cols(), 1);

  const auto angle = select_joint_rank(s, Criterion::two_block_angle, fixed(1.85), fixed(31.0));
  EXPECT_EQ(angle.provisional_joint_rank, 1);
  EXPECT_EQ(angle.threshold, 31.0);
  EXPECT_EQ(angle.alternate_threshold, std::optional<double>(1.85));

  EXPECT_EQ(select_joint_rank(s, Criterion::two_block_angle, fixed(1.85), fixed(60.0)).provisional_joint_rank, 2);
  EXPECT_EQ(select_joint_rank(s, Criterion::two_block_angle, fixed(1.85), fixed(5.0)).provisional_joint_rank, 0);
  EXPECT_THROW(select_joint_rank(s, Criterion::two_block_angle, fixed(1.85), std::nullopt), ValidationError);

  // The selected direction projects onto each block's space with norm >= cos(threshold).
  const Vector v = angle.candidate_basis.col(0);
  EXPECT_GE((v1.transpose() * v).norm(), std::cos(31.0 / kDeg));
  EXPECT_GE((v2.transpose() * v).norm(), std::cos(31.0 / kDeg));
}

TEST(SelectJointRank, ExactSharingAtThresholdK) {
  const Matrix q = random_basis(10, 4, 3);
  Matrix v2(10, 2);
  v2 << q.col(0), q.col(3);
  const auto s = stack({q.leftCols(2), v2, q.leftCols(1)});
  const auto d = select_joint_rank(s, Criterion::multi_block_singular_value, fixed(3.0), std::nullopt);
  EXPECT_EQ(d.provisional_joint_rank, 1);
  EXPECT_FALSE(d.principal_angles_deg);
  EXPECT_LE(subspace_distance(d.candidate_basis, q.col(0)), 1e-10);
}

TEST(SelectJointRank, CappedAtSmallestRankAndPrefix) {
  const Matrix v = random_basis(10, 3, 4);
  const auto s = stack({v, v.leftCols(1)});
  const auto d = select_joint_rank(s, Criterion::multi_block_singular_value, fixed(0.0), fixed(90.0));
  EXPECT_EQ(d.provisional_joint_rank, 1);
  EXPECT_EQ(d.alternate_joint_rank, std::optional<Index>(1));
  for (std::size_t i = 1; i < d.squared_singular_values.size(); ++i) {
    EXPECT_GE(d.squared_singular_values[i - 1], d.squared_singular_values[i]);
  }
}

}  // namespace
}  // namespace jive
