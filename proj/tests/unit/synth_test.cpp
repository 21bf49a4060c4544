#include "ticc/error.hpp"
#include "ticc/synth.hpp"

#include "error_helpers.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace ticc {
namespace {

using testing::code_of;

TEST(RandomPrecision, SmallestEigenvalueIsPointOne) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const BlockToeplitzMatrix t = random_toeplitz_precision(5, 5, 0.2, seed);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(t.assemble(), Eigen::EigenvaluesOnly);
    EXPECT_GE(eig.eigenvalues().minCoeff(), 0.1 - 1e-9);
    EXPECT_NEAR(eig.eigenvalues().minCoeff(), 0.1, 1e-9);
  }
}

TEST(RandomPrecision, ZeroEdgeProbabilityIsScaledIdentity) {
  const BlockToeplitzMatrix t = random_toeplitz_precision(4, 3, 0.0, 17);
  EXPECT_EQ(t.block(0), Matrix::Identity(4, 4) * 0.1);
  EXPECT_EQ(t.block(1), Matrix::Zero(4, 4));
  EXPECT_EQ(t.block(2), Matrix::Zero(4, 4));
}

TEST(RandomPrecision, WeightsBoundedAwayFromZero) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const BlockToeplitzMatrix t = random_toeplitz_precision(5, 3, 0.3, seed);
    for (Index m = 0; m < t.w(); ++m) {
      for (Index i = 0; i < 5; ++i) {
        for (Index j = 0; j < 5; ++j) {
          if (m == 0 && i == j) continue;
          const double v = std::abs(t.block(m)(i, j));
          EXPECT_TRUE(v == 0.0 || (v >= 0.25 && v <= 1.0)) << v;
        }
      }
    }
  }
}

TEST(RandomPrecision, EdgeFractionNearProbability) {
  double selected = 0.0, possible = 0.0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const BlockToeplitzMatrix t = random_toeplitz_precision(5, 5, 0.2, seed);
    for (Index m = 0; m < 5; ++m) {
      for (Index i = 0; i < 5; ++i) {
        for (Index j = (m == 0 ? i + 1 : 0); j < 5; ++j) {
          possible += 1.0;
          if (t.block(m)(i, j) != 0.0) selected += 1.0;
        }
      }
    }
  }
  EXPECT_NEAR(selected / possible, 0.2, 0.02);
}

TEST(RandomPrecision, RejectsBadArguments) {
  EXPECT_EQ(code_of([] { random_toeplitz_precision(0, 2, 0.2, 1); }), ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([] { random_toeplitz_precision(2, 2, 1.5, 1); }), ErrorCode::invalid_argument);
}

TEST(GenerateSequence, LabelsFollowSegments) {
  const std::vector<BlockToeplitzMatrix> thetas{random_toeplitz_precision(2, 2, 0.2, 1),
                                                random_toeplitz_precision(2, 2, 0.2, 2)};
  const std::vector<Segment> segments{{0, 200}, {1, 200}, {0, 200}};
  const GroundTruth gt = generate_sequence(segments, thetas, 4);
  ASSERT_EQ(gt.labels.size(), 600u);
  EXPECT_EQ(gt.series.length(), 600);
  for (std::size_t t = 0; t < 600; ++t) EXPECT_EQ(gt.labels[t], (t >= 200 && t < 400) ? 1 : 0);
  EXPECT_EQ(gt.segments, segments);
}

TEST(GenerateSequence, IidCaseMatchesCovariance) {
  const BlockToeplitzMatrix theta = random_toeplitz_precision(3, 1, 0.5, 8);
  const std::vector<Segment> segments{{0, 50000}};
  const std::vector<BlockToeplitzMatrix> thetas{theta};
  const GroundTruth gt = generate_sequence(segments, thetas, 9);
  const Matrix& x = gt.series.data();
  const Index N = x.rows();
  const Matrix sigma = theta.assemble().inverse();
  const Matrix sample = (x.transpose() * x) / static_cast<double>(N);
  for (Index i = 0; i < 3; ++i) {
    for (Index j = 0; j < 3; ++j) {
      // Var(x_i x_j) = sigma_ii sigma_jj + sigma_ij^2 for a zero-mean Gaussian.
      const double se = std::sqrt((sigma(i, i) * sigma(j, j) + sigma(i, j) * sigma(i, j)) / N);
      EXPECT_LE(std::abs(sample(i, j) - sigma(i, j)), 5.0 * se) << i << "," << j;
    }
    const double mean = x.col(i).mean();
    EXPECT_LE(std::abs(mean), 5.0 * std::sqrt(sigma(i, i) / N));
  }
}

TEST(GenerateSequence, StationaryWindowsFollowJointLaw) {
  // Within one long segment, consecutive windows of length w should have
  // covariance close to the inverse of the generating precision.
  const BlockToeplitzMatrix theta = random_toeplitz_precision(2, 2, 0.4, 12);
  const std::vector<Segment> segments{{0, 40000}};
  const std::vector<BlockToeplitzMatrix> thetas{theta};
  const GroundTruth gt = generate_sequence(segments, thetas, 13);
  const SubsequenceMatrix windows = stack_windows(gt.series, 2);
  const Matrix rows = windows.rows().bottomRows(39000);
  const Matrix sample = rows.transpose() * rows / 39000.0;
  const Matrix sigma = theta.assemble().inverse();
  EXPECT_LT((sample - sigma).cwiseAbs().maxCoeff(), 0.15 * sigma.cwiseAbs().maxCoeff());
}

TEST(GenerateSequence, DeterministicPerSeed) {
  const Preset& p = find_preset("1,2,1");
  const GroundTruth a = generate_preset(p, 5, 5, 0.2, 21);
  const GroundTruth b = generate_preset(p, 5, 5, 0.2, 21);
  const GroundTruth c = generate_preset(p, 5, 5, 0.2, 22);
  EXPECT_EQ(a.series.data(), b.series.data());
  EXPECT_EQ(a.thetas, b.thetas);
  EXPECT_NE(a.series.data()(0, 0), c.series.data()(0, 0));
}

TEST(GenerateSequence, RejectsBadSegments) {
  const std::vector<BlockToeplitzMatrix> thetas{BlockToeplitzMatrix::identity(2, 2)};
  EXPECT_EQ(code_of([&] { generate_sequence(std::vector<Segment>{{1, 10}}, thetas, 1); }),
            ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([&] { generate_sequence(std::vector<Segment>{{0, 0}}, thetas, 1); }),
            ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([&] { generate_sequence(std::vector<Segment>{}, thetas, 1); }),
            ErrorCode::invalid_argument);
  const std::vector<BlockToeplitzMatrix> mixed{BlockToeplitzMatrix::identity(2, 2),
                                               BlockToeplitzMatrix::identity(3, 2)};
  EXPECT_EQ(code_of([&] { generate_sequence(std::vector<Segment>{{0, 5}}, mixed, 1); }),
            ErrorCode::dimension_mismatch);
}

TEST(Presets, TableMatchesNamedSequences) {
  ASSERT_EQ(presets().size(), 4u);
  EXPECT_EQ(find_preset("1,2,1").order, (std::vector<int>{0, 1, 0}));
  EXPECT_EQ(find_preset("1,2,3,2,1").num_clusters, 3);
  EXPECT_EQ(find_preset("1,2,3,4,1,2,3,4").num_clusters, 4);
  EXPECT_EQ(find_preset("1,2,2,1,3,3,3,1").order, (std::vector<int>{0, 1, 1, 0, 2, 2, 2, 0}));
}

TEST(Presets, HundredKSamplesPerSegment) {
  const GroundTruth gt = generate_preset(find_preset("1,2,1"), 5, 5, 0.2, 0);
  EXPECT_EQ(gt.series.length(), 600);
  EXPECT_EQ(gt.thetas.size(), 2u);
  EXPECT_EQ(gt.series.dim(), 5);
  for (const Segment& s : gt.segments) EXPECT_EQ(s.length, 200);
  const auto custom = preset_segments(find_preset("1,2,3,2,1"), 50);
  ASSERT_EQ(custom.size(), 5u);
  EXPECT_EQ(custom[2], (Segment{2, 50}));
}

TEST(Presets, UnknownNameListsValidOnes) {
  EXPECT_EQ(code_of([] { find_preset("9,9"); }), ErrorCode::unknown_preset);
  const std::string msg = testing::message_of([] { find_preset("9,9"); });
  EXPECT_NE(msg.find("1,2,3,4,1,2,3,4"), std::string::npos);
  EXPECT_NE(msg.find("1,2,2,1,3,3,3,1"), std::string::npos);
}

}  // namespace
}  // namespace ticc
