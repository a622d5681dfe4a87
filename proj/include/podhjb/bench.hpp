// Copyright (c) 2026, the podhjb developers.
// SPDX-License-Identifier: Apache-2.0
//
// Cost evaluation, residual and error diagnostics, reference trajectories,
// and two independent oracles for the value iteration: exhaustive
// enumeration of control sequences and a finite-horizon discrete Riccati
// regulator.

#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "podhjb/hjb.hpp"
#include "podhjb/pde.hpp"
#include "podhjb/rom.hpp"

namespace podhjb {

struct Diagnostics {
  double cost = 0.0;
  double residual = 0.0;
  double l1_error = 0.0;
  double l2_error = 0.0;
};

// Left Riemann sum of the dx-weighted squared tracking error plus R u^2.
// Trajectory and reference columns must be sampled at the same times. The
// `times` overload handles trajectories whose step size varies per window.
double evaluate_cost(const Eigen::MatrixXd& trajectory, const ControlSignal& u,
                     const Eigen::MatrixXd& reference, double control_weight,
                     double dt, double dx);
double evaluate_cost(const Eigen::MatrixXd& trajectory, const ControlSignal& u,
                     const Eigen::MatrixXd& reference, double control_weight,
                     const std::vector<double>& times, double dx);

// Space-time L2 norm (dx*dt weights, interior nodes, forward time
// differences) of the PDE residual y_s - eps y_xx + c y_x - u along a
// trajectory sampled at spacing dt (or at the given sample times).
double residual(const Eigen::MatrixXd& trajectory, const ControlSignal& u,
                const PdeParams& params, double dx, double dt);
double residual(const Eigen::MatrixXd& trajectory, const ControlSignal& u,
                const PdeParams& params, double dx,
                const std::vector<double>& times);

// Trapezoidal discrete L1 and L2 norms of y1 - y2.
std::pair<double, double> error_norms(const Eigen::VectorXd& y1,
                                      const Eigen::VectorXd& y2, double dx);

struct BruteForceResult {
  double cost = 0.0;
  std::vector<int> sequence;  // control indices, lexicographically smallest
};

// Exhaustive enumeration over all |U|^N control sequences with the same
// discrete flow and box clamping as the semi-Lagrangian scheme. Guarded to
// at most 1e6 sequences.
BruteForceResult brute_force_dp(const ReducedModel& model,
                                const StageCost& cost,
                                const std::vector<double>& controls,
                                const BoxDomain& box, double dt, int levels,
                                const Eigen::VectorXd& w_start);

struct RiccatiResult {
  Eigen::MatrixXd gains;       // levels x rank, u_n = -gains.row(n) * w_n
  Eigen::MatrixXd trajectory;  // rank x (levels+1)
  ControlSignal control;
  double cost = 0.0;
};

// Finite-horizon regulator on the Euler-discretised reduced system
// (A_d = I + dt*A, B_d = dt*b(1)), terminal weight zero, cost
// sum dt (w'Qw + R u^2). The reference must be zero for this baseline.
RiccatiResult riccati_lqr(const ReducedModel& model, const Eigen::MatrixXd& Q,
                          double control_weight, double dt, int levels,
                          const Eigen::VectorXd& w_start);

// Reference trajectories: identically zero, or the trajectory driven by a
// given control from a given initial state.
SnapshotMatrix make_reference_zero(const Grid1D& grid);
SnapshotMatrix make_reference_from_control(const Eigen::VectorXd& y0,
                                           const ControlSignal& u,
                                           const PdeParams& params,
                                           const Grid1D& grid);

// Piecewise-constant schedule -1 on [0,1), 0 on [1,2), 1 on [2,T].
ControlSignal step_control_schedule(const Grid1D& grid);

// Columns of `ref` re-sampled at the query times by nearest-time lookup.
Eigen::MatrixXd sample_reference(const SnapshotMatrix& ref,
                                 const std::vector<double>& times);

}  // namespace podhjb
