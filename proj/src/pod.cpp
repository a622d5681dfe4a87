// Copyright (c) 2026, the podhjb developers.
// SPDX-License-Identifier: Apache-2.0

#include "podhjb/pod.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace podhjb {

namespace {

constexpr double kRankCutoff = 1e-12;  // relative to the largest singular value

// First nonzero component of each left vector is made positive; the matching
// right vector flips with it so the product reconstructs Y unchanged.
void fix_signs(Eigen::MatrixXd& left, Eigen::MatrixXd& right) {
  for (Eigen::Index j = 0; j < left.cols(); ++j) {
    for (Eigen::Index i = 0; i < left.rows(); ++i) {
      if (std::abs(left(i, j)) > 1e-12) {
        if (left(i, j) < 0.0) {
          left.col(j) = -left.col(j);
          right.col(j) = -right.col(j);
        }
        break;
      }
    }
  }
}

double partial_sum(const Eigen::VectorXd& sv, int count, EnergyVariant variant) {
  double s = 0.0;
  for (int i = 0; i < count; ++i) {
    s += variant == EnergyVariant::kSquared ? sv[i] * sv[i] : sv[i];
  }
  return s;
}

double energy_indicator(const Eigen::VectorXd& sv, int rank,
                        EnergyVariant variant) {
  if (sv.size() == 0) {
    throw std::invalid_argument("energy_ratio: empty singular value vector");
  }
  const double cutoff = kRankCutoff * sv[0];
  int d = 0;
  while (d < sv.size() && sv[d] > cutoff) ++d;
  if (d == 0) {
    return 1.0;  // zero matrix: nothing left to capture
  }
  if (rank < 1 || rank > d) {
    std::ostringstream msg;
    msg << "energy_ratio: rank " << rank << " outside [1, " << d << "]";
    throw std::invalid_argument(msg.str());
  }
  return partial_sum(sv, rank, variant) / partial_sum(sv, d, variant);
}

// Singular values of a snapshot block via the Gram matrix, used only inside
// the adaptive scan where the basis itself is not needed yet. The Gram matrix
// of the whole snapshot set is computed once and blocks of it are free.
Eigen::VectorXd block_singular_values(const Eigen::MatrixXd& gram, int first,
                                      int last) {
  const int n = last - first + 1;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
      gram.block(first, first, n, n), Eigen::EigenvaluesOnly);
  Eigen::VectorXd sv(n);
  for (int i = 0; i < n; ++i) {
    sv[i] = std::sqrt(std::max(0.0, eig.eigenvalues()[n - 1 - i]));
  }
  return sv;
}

// Indicator at (capped) rank for the scan. Ranks above the numerical rank
// capture everything, giving 1.
double scan_energy(const Eigen::VectorXd& sv, int rank, EnergyVariant variant) {
  const double cutoff = kRankCutoff * (sv.size() > 0 ? sv[0] : 0.0);
  int d = 0;
  while (d < sv.size() && sv[d] > cutoff) ++d;
  if (d == 0) return 1.0;
  return energy_indicator(sv, std::min(rank, d), variant);
}

PodWindow close_window(const SnapshotMatrix& Y, int first, int last, int rank,
                       double threshold, EnergyVariant variant) {
  PodWindow w;
  w.first = first;
  w.last = last;
  const Eigen::MatrixXd block =
      Y.data.middleCols(first, last - first + 1);
  SvdResult svd = compute_svd(block);
  const int d = static_cast<int>(svd.singular_values.size());
  w.basis.vectors = svd.left.leftCols(std::min(rank, d));
  w.basis.singular_values = svd.singular_values;
  w.basis.rank = static_cast<int>(w.basis.vectors.cols());
  w.basis.window_begin = Y.times[first];
  w.basis.window_end = Y.times[last];
  w.attained_energy =
      d == 0 ? 1.0 : energy_indicator(svd.singular_values, std::min(rank, d), variant);
  w.below_threshold = w.attained_energy < threshold;
  return w;
}

}  // namespace

SvdResult compute_svd(const Eigen::MatrixXd& Y) {
  if (Y.size() == 0) {
    throw std::invalid_argument("compute_svd: empty matrix");
  }
  if (!Y.allFinite()) {
    throw std::invalid_argument("compute_svd: input has non-finite entries");
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(Y, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  const double cutoff = sigma.size() > 0 ? kRankCutoff * sigma[0] : 0.0;
  int d = 0;
  while (d < sigma.size() && sigma[d] > cutoff) ++d;
  SvdResult out;
  out.left = svd.matrixU().leftCols(d);
  out.singular_values = sigma.head(d);
  out.right = svd.matrixV().leftCols(d);
  fix_signs(out.left, out.right);
  return out;
}

PodBasis pod_basis(const Eigen::MatrixXd& Y, int rank) {
  SvdResult svd = compute_svd(Y);
  const int d = static_cast<int>(svd.singular_values.size());
  if (rank < 1 || rank > d) {
    std::ostringstream msg;
    msg << "pod_basis: rank " << rank << " outside [1, " << d
        << "] (numerical rank of the snapshot set)";
    throw std::invalid_argument(msg.str());
  }
  PodBasis basis;
  basis.vectors = svd.left.leftCols(rank);
  basis.singular_values = svd.singular_values;
  basis.rank = rank;
  return basis;
}

PodBasis pod_basis(const SnapshotMatrix& Y, int rank) {
  PodBasis basis = pod_basis(Y.data, rank);
  basis.window_begin = Y.times.front();
  basis.window_end = Y.times.back();
  return basis;
}

double energy_ratio(const Eigen::VectorXd& singular_values, int rank) {
  return energy_indicator(singular_values, rank, EnergyVariant::kFirstPower);
}

double energy_ratio_squared(const Eigen::VectorXd& singular_values, int rank) {
  return energy_indicator(singular_values, rank, EnergyVariant::kSquared);
}

double truncation_error(const Eigen::MatrixXd& Y, const PodBasis& basis) {
  if (Y.rows() != basis.vectors.rows()) {
    throw std::invalid_argument(
        "truncation_error: snapshot and basis dimensions differ");
  }
  const Eigen::MatrixXd coeffs = basis.vectors.transpose() * Y;
  return (Y - basis.vectors * coeffs).squaredNorm();
}

SubIntervalPlan adaptive_split(const SnapshotMatrix& Y, int rank,
                               double threshold, EnergyVariant variant) {
  const int n = static_cast<int>(Y.data.cols());
  if (n < 3) {
    throw std::invalid_argument("adaptive_split: needs at least 3 snapshots");
  }
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw std::invalid_argument("adaptive_split: threshold must lie in (0,1)");
  }
  if (rank < 1) {
    throw std::invalid_argument("adaptive_split: rank must be positive");
  }
  const Eigen::MatrixXd gram = Y.data.transpose() * Y.data;

  SubIntervalPlan plan;
  plan.threshold = threshold;
  plan.rank = rank;
  plan.boundaries.push_back(Y.times.front());

  int start = 0;
  for (;;) {
    int close = -1;
    for (int end = start + 1; end < n; ++end) {
      const double energy =
          scan_energy(block_singular_values(gram, start, end), rank, variant);
      if (energy < threshold) {
        close = std::max(end - 1, start + 2);  // keep at least 3 snapshots
        break;
      }
    }
    // No drop, or too few snapshots would remain: extend to the final time.
    if (close < 0 || close > n - 3) {
      close = n - 1;
    }
    plan.windows.push_back(
        close_window(Y, start, close, rank, threshold, variant));
    plan.boundaries.push_back(Y.times[close]);
    if (close == n - 1) break;
    start = close;  // boundary snapshot is shared with the next window
  }
  return plan;
}

SubIntervalPlan plan_from_boundaries(const SnapshotMatrix& Y,
                                     const std::vector<int>& interior_cols,
                                     int rank) {
  const int n = static_cast<int>(Y.data.cols());
  if (n < 3) {
    throw std::invalid_argument("plan_from_boundaries: needs >= 3 snapshots");
  }
  std::vector<int> cuts;
  cuts.push_back(0);
  for (int c : interior_cols) cuts.push_back(c);
  cuts.push_back(n - 1);
  for (size_t k = 0; k + 1 < cuts.size(); ++k) {
    if (cuts[k + 1] - cuts[k] < 2) {
      throw std::invalid_argument(
          "plan_from_boundaries: every window needs at least 3 snapshots");
    }
  }
  SubIntervalPlan plan;
  plan.threshold = 0.0;
  plan.rank = rank;
  plan.boundaries.push_back(Y.times.front());
  for (size_t k = 0; k + 1 < cuts.size(); ++k) {
    plan.windows.push_back(close_window(Y, cuts[k], cuts[k + 1], rank, 0.0,
                                        EnergyVariant::kFirstPower));
    plan.boundaries.push_back(Y.times[cuts[k + 1]]);
  }
  return plan;
}

SubIntervalPlan single_window_plan(const SnapshotMatrix& Y, int rank) {
  return plan_from_boundaries(Y, {}, rank);
}

}  // namespace podhjb
