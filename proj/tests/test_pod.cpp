// Copyright (c) 2026, the podhjb developers.
// SPDX-License-Identifier: Apache-2.0

#include "podhjb/pod.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "podhjb/pde.hpp"

using namespace podhjb;

namespace {

Eigen::MatrixXd random_matrix(int rows, int cols, std::mt19937& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = dist(rng);
  }
  return m;
}

// Orthonormal competitor set via QR of a random matrix.
Eigen::MatrixXd random_orthonormal(int rows, int cols, std::mt19937& rng) {
  const Eigen::MatrixXd m = random_matrix(rows, cols, rng);
  return Eigen::HouseholderQR<Eigen::MatrixXd>(m)
      .householderQ() *
      Eigen::MatrixXd::Identity(rows, cols);
}

// The projection functional evaluated directly for an arbitrary orthonormal
// set; independent oracle for the POD optimality check.
double projection_functional(const Eigen::MatrixXd& Y,
                             const Eigen::MatrixXd& basis) {
  return (Y - basis * (basis.transpose() * Y)).squaredNorm();
}

SnapshotMatrix heat_snapshots() {
  const double dt = commensurate_dt(5.0, 0.012);
  const Grid1D g = make_grid(-1.0, 4.0, 0.02, 5.0, dt);
  const PdeParams p{1.0 / 60.0, 0.0};
  return simulate(initial_parabola(g), ControlSignal(g.steps, 0.0), p, g);
}

}  // namespace

TEST(ComputeSvd, IdentityMatrix) {
  const auto svd = compute_svd(Eigen::MatrixXd::Identity(3, 3));
  ASSERT_EQ(svd.singular_values.size(), 3);
  for (int i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(svd.singular_values[i], 1.0);
  EXPECT_LT((svd.left.transpose() * svd.left - Eigen::MatrixXd::Identity(3, 3))
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
}

TEST(ComputeSvd, RankOneRepeatedColumn) {
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(3, 2);
  y(0, 0) = 2.0;
  y(0, 1) = 2.0;
  const auto svd = compute_svd(y);
  ASSERT_EQ(svd.singular_values.size(), 1);
  EXPECT_NEAR(svd.singular_values[0], 2.0 * std::sqrt(2.0), 1e-12);
  // Sign convention pins the vector to +e1.
  EXPECT_NEAR(svd.left(0, 0), 1.0, 1e-12);
}

TEST(ComputeSvd, DiagonalMatrix) {
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(2, 2);
  y(0, 0) = 3.0;
  y(1, 1) = 1.0;
  const auto svd = compute_svd(y);
  ASSERT_EQ(svd.singular_values.size(), 2);
  EXPECT_DOUBLE_EQ(svd.singular_values[0], 3.0);
  EXPECT_DOUBLE_EQ(svd.singular_values[1], 1.0);
  EXPECT_NEAR(std::abs(svd.left(0, 0)), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(svd.left(1, 1)), 1.0, 1e-12);
}

TEST(ComputeSvd, ReconstructsAndStaysOrthonormal) {
  std::mt19937 rng(3);
  const Eigen::MatrixXd y = random_matrix(14, 9, rng);
  const auto svd = compute_svd(y);
  const Eigen::MatrixXd rebuilt =
      svd.left * svd.singular_values.asDiagonal() * svd.right.transpose();
  EXPECT_LT((rebuilt - y).norm() / y.norm(), 1e-10);
  const int d = static_cast<int>(svd.singular_values.size());
  EXPECT_LT((svd.left.transpose() * svd.left -
             Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff(),
            1e-10);
  EXPECT_LT((svd.right.transpose() * svd.right -
             Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff(),
            1e-10);
}

TEST(ComputeSvd, RejectsNonFinite) {
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(2, 2);
  y(1, 1) = std::nan("");
  EXPECT_THROW(compute_svd(y), std::invalid_argument);
}

TEST(PodBasis, RankOneCapturesEverything) {
  Eigen::MatrixXd y(3, 2);
  y.col(0) << 1.0, 2.0, 2.0;
  y.col(1) << 2.0, 4.0, 4.0;
  const PodBasis basis = pod_basis(y, 1);
  EXPECT_NEAR(truncation_error(y, basis), 0.0, 1e-20);
  // The single vector spans the common column direction.
  Eigen::VectorXd direction(3);
  direction << 1.0, 2.0, 2.0;
  direction.normalize();
  EXPECT_NEAR(std::abs(basis.vectors.col(0).dot(direction)), 1.0, 1e-12);
}

TEST(PodBasis, DiagonalTruncation) {
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(2, 2);
  y(0, 0) = 3.0;
  y(1, 1) = 1.0;
  const PodBasis basis = pod_basis(y, 1);
  EXPECT_NEAR(std::abs(basis.vectors(0, 0)), 1.0, 1e-12);
  EXPECT_NEAR(truncation_error(y, basis), 1.0, 1e-12);  // sigma_2^2
}

TEST(PodBasis, RejectsRankAboveNumericalRank) {
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(3, 2);
  y(0, 0) = 2.0;
  y(0, 1) = 2.0;  // rank one
  try {
    pod_basis(y, 2);
    FAIL() << "expected rejection";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("[1, 1]"), std::string::npos);
  }
}

TEST(PodBasis, ThreeModesCaptureHeatSnapshots) {
  const SnapshotMatrix snaps = heat_snapshots();
  const PodBasis basis = pod_basis(snaps, 3);
  const double rel =
      truncation_error(snaps.data, basis) / snaps.data.squaredNorm();
  EXPECT_LE(rel, 1e-3);
  EXPECT_GE(energy_ratio(basis.singular_values, 3), 0.99);
}

TEST(EnergyRatio, DirectValues) {
  Eigen::VectorXd sv(2);
  sv << 3.0, 1.0;
  EXPECT_DOUBLE_EQ(energy_ratio(sv, 1), 0.75);
  EXPECT_DOUBLE_EQ(energy_ratio(sv, 2), 1.0);
  EXPECT_DOUBLE_EQ(energy_ratio_squared(sv, 1), 0.9);
  EXPECT_THROW(energy_ratio(Eigen::VectorXd(), 1), std::invalid_argument);
}

TEST(EnergyRatio, MonotoneAndExactlyOneAtFullRank) {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd y = random_matrix(12, 8, rng);
    const auto svd = compute_svd(y);
    const int d = static_cast<int>(svd.singular_values.size());
    double prev = 0.0;
    for (int r = 1; r <= d; ++r) {
      const double e = energy_ratio(svd.singular_values, r);
      EXPECT_GE(e, prev);
      prev = e;
    }
    EXPECT_EQ(energy_ratio(svd.singular_values, d), 1.0);
  }
}

TEST(TruncationError, MatchesTailSumOfSquaredSingularValues) {
  std::mt19937 rng(23);
  const Eigen::MatrixXd y = random_matrix(10, 8, rng);
  const auto svd = compute_svd(y);
  const PodBasis basis = pod_basis(y, 4);
  double tail = 0.0;
  for (int i = 4; i < svd.singular_values.size(); ++i) {
    tail += svd.singular_values[i] * svd.singular_values[i];
  }
  const double direct = truncation_error(y, basis);
  EXPECT_NEAR(direct, tail, 1e-8 * tail);
}

TEST(TruncationError, PropertyOverRandomMatrices) {
  std::mt19937 rng(29);
  std::uniform_int_distribution<int> rows(4, 30);
  std::uniform_int_distribution<int> cols(3, 20);
  for (int trial = 0; trial < 25; ++trial) {
    const Eigen::MatrixXd y = random_matrix(rows(rng), cols(rng), rng);
    const auto svd = compute_svd(y);
    const int d = static_cast<int>(svd.singular_values.size());
    std::uniform_int_distribution<int> rank_dist(1, d);
    const int r = rank_dist(rng);
    const PodBasis basis = pod_basis(y, r);
    double tail = 0.0;
    for (int i = r; i < d; ++i) {
      tail += svd.singular_values[i] * svd.singular_values[i];
    }
    EXPECT_NEAR(truncation_error(y, basis), tail,
                1e-8 * std::max(tail, 1e-12));
    if (r == d) {
      EXPECT_NEAR(truncation_error(y, basis), 0.0, 1e-16 * y.squaredNorm());
    }
  }
}

TEST(PodBasis, BeatsRandomOrthonormalCompetitors) {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd y = random_matrix(12, 8, rng);
    const int r = 3;
    const PodBasis basis = pod_basis(y, r);
    const double optimal = projection_functional(y, basis.vectors);
    for (int c = 0; c < 5; ++c) {
      const Eigen::MatrixXd competitor = random_orthonormal(12, r, rng);
      EXPECT_LE(optimal, projection_functional(y, competitor) + 1e-10);
    }
  }
}

TEST(AdaptiveSplit, HeatCaseNeedsNoSplit) {
  const SnapshotMatrix snaps = heat_snapshots();
  const auto plan = adaptive_split(snaps, 3, 0.99);
  EXPECT_EQ(plan.windows.size(), 1u);
  EXPECT_EQ(plan.boundaries.size(), 2u);
  EXPECT_GE(plan.windows[0].attained_energy, 0.99);
  EXPECT_FALSE(plan.windows[0].below_threshold);
}

TEST(AdaptiveSplit, ThreeColumnMatrixIsOneWindow) {
  SnapshotMatrix snaps;
  std::mt19937 rng(37);
  snaps.data = random_matrix(6, 3, rng);
  snaps.times = {0.0, 0.5, 1.0};
  const auto plan = adaptive_split(snaps, 2, 0.999999);
  EXPECT_EQ(plan.windows.size(), 1u);
  EXPECT_EQ(plan.windows[0].first, 0);
  EXPECT_EQ(plan.windows[0].last, 2);
}

TEST(AdaptiveSplit, SplitsAdvectionDominatedSnapshots) {
  const Grid1D g = make_grid(-1.0, 4.0, 0.1, 3.0, 0.008);
  const PdeParams p{0.05, 1.0};
  const auto snaps =
      simulate(initial_parabola(g), ControlSignal(g.steps, 0.0), p, g);
  const auto plan = adaptive_split(snaps, 4, 0.984);
  EXPECT_GE(plan.windows.size(), 2u);
  // Every window either meets the threshold or carries the warning flag.
  for (const auto& w : plan.windows) {
    if (!w.below_threshold) {
      EXPECT_GE(w.attained_energy, plan.threshold - 1e-9);
    }
  }
}

TEST(AdaptiveSplit, PartitionInvariants) {
  const Grid1D g = make_grid(-1.0, 4.0, 0.1, 3.0, 0.008);
  const PdeParams p{0.05, 1.0};
  const auto snaps =
      simulate(initial_parabola(g), ControlSignal(g.steps, 0.0), p, g);
  const auto plan = adaptive_split(snaps, 4, 0.984);
  ASSERT_EQ(plan.boundaries.size(), plan.windows.size() + 1);
  EXPECT_EQ(plan.boundaries.front(), snaps.times.front());
  EXPECT_EQ(plan.boundaries.back(), snaps.times.back());
  for (size_t k = 0; k < plan.windows.size(); ++k) {
    const auto& w = plan.windows[k];
    EXPECT_GE(w.last - w.first + 1, 3);  // at least 3 snapshots
    // Boundaries coincide with snapshot times.
    EXPECT_EQ(plan.boundaries[k], snaps.times[w.first]);
    EXPECT_EQ(plan.boundaries[k + 1], snaps.times[w.last]);
    if (k > 0) {
      // Consecutive windows share the boundary snapshot.
      EXPECT_EQ(plan.windows[k - 1].last, w.first);
    }
    // Basis columns are orthonormal.
    const auto& v = w.basis.vectors;
    EXPECT_LT((v.transpose() * v -
               Eigen::MatrixXd::Identity(v.cols(), v.cols()))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-10);
  }
}

TEST(AdaptiveSplit, UnattainableThresholdStillReturnsAPlan) {
  // Snapshots of numerical rank 3 everywhere force rank-1 energy below any
  // tight threshold even on 3-column windows.
  SnapshotMatrix snaps;
  std::mt19937 rng(41);
  snaps.data = random_matrix(8, 9, rng);
  snaps.times.resize(9);
  for (int j = 0; j < 9; ++j) snaps.times[j] = 0.1 * j;
  const auto plan = adaptive_split(snaps, 1, 0.999);
  ASSERT_GE(plan.windows.size(), 1u);
  bool warned = false;
  for (const auto& w : plan.windows) warned = warned || w.below_threshold;
  EXPECT_TRUE(warned);
  EXPECT_EQ(plan.boundaries.back(), snaps.times.back());
}

TEST(AdaptiveSplit, ValidatesInputs) {
  SnapshotMatrix snaps;
  snaps.data = Eigen::MatrixXd::Identity(3, 2);
  snaps.times = {0.0, 1.0};
  EXPECT_THROW(adaptive_split(snaps, 1, 0.9), std::invalid_argument);
  snaps.data = Eigen::MatrixXd::Identity(3, 3);
  snaps.times = {0.0, 0.5, 1.0};
  EXPECT_THROW(adaptive_split(snaps, 1, 1.5), std::invalid_argument);
  EXPECT_THROW(adaptive_split(snaps, 0, 0.9), std::invalid_argument);
}
