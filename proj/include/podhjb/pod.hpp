// Copyright (c) 2026, the podhjb developers.
// SPDX-License-Identifier: Apache-2.0
//
// POD basis computation via SVD, the singular-value energy indicator, and the
// adaptive splitting of [0,T] into sub-intervals that each keep the indicator
// above a threshold with a fixed basis rank.

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "podhjb/pde.hpp"

namespace podhjb {

// Numerically nonzero part of a thin SVD. Columns of `left` and `right` are
// orthonormal; singular values are positive and non-increasing. The sign of
// each left vector is fixed so its first nonzero component is positive.
struct SvdResult {
  Eigen::MatrixXd left;             // m x d
  Eigen::VectorXd singular_values;  // length d
  Eigen::MatrixXd right;            // n x d
};

struct PodBasis {
  Eigen::MatrixXd vectors;          // m x rank, orthonormal columns
  Eigen::VectorXd singular_values;  // full spectrum of the source window
  int rank = 0;
  double window_begin = 0.0;
  double window_end = 0.0;
};

struct PodWindow {
  int first = 0;  // inclusive snapshot column range
  int last = 0;
  PodBasis basis;
  double attained_energy = 1.0;  // indicator at the plan rank on this window
  bool below_threshold = false;  // threshold unattainable on this window
};

// Partition 0 = T_0 < T_1 < ... < T_K = T, one basis per sub-interval.
// Consecutive windows share their boundary snapshot.
struct SubIntervalPlan {
  std::vector<double> boundaries;
  std::vector<PodWindow> windows;
  double threshold = 0.0;
  int rank = 0;
};

enum class EnergyVariant {
  kFirstPower,  // sum of sigma_i (as-printed indicator); the default
  kSquared,     // sum of sigma_i^2 (energy interpretation), for experiments
};

SvdResult compute_svd(const Eigen::MatrixXd& Y);

PodBasis pod_basis(const Eigen::MatrixXd& Y, int rank);
PodBasis pod_basis(const SnapshotMatrix& Y, int rank);

// (sum_{i<=rank} sigma_i) / (sum_{i<=d} sigma_i); equals 1 exactly at rank=d.
double energy_ratio(const Eigen::VectorXd& singular_values, int rank);
double energy_ratio_squared(const Eigen::VectorXd& singular_values, int rank);

// Direct evaluation of sum_j ||y_j - proj y_j||^2; equals the tail sum of
// squared singular values.
double truncation_error(const Eigen::MatrixXd& Y, const PodBasis& basis);

// Greedy left-to-right windowing: grow the window one snapshot at a time and
// close it just before the indicator drops below the threshold. Windows keep
// at least 3 snapshots, the final window always extends to T, and consecutive
// windows share their boundary snapshot.
SubIntervalPlan adaptive_split(const SnapshotMatrix& Y, int rank,
                               double threshold,
                               EnergyVariant variant = EnergyVariant::kFirstPower);

// Plan with prescribed interior boundaries (snapshot column indices).
SubIntervalPlan plan_from_boundaries(const SnapshotMatrix& Y,
                                     const std::vector<int>& interior_cols,
                                     int rank);
// Single global window over all snapshots.
SubIntervalPlan single_window_plan(const SnapshotMatrix& Y, int rank);

}  // namespace podhjb
