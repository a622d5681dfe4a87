// Copyright (c) 2026, the podhjb developers.
// SPDX-License-Identifier: Apache-2.0
//
// Galerkin compression of the full-order dynamics onto a POD basis, state
// projection/lifting, and the bounding box of reduced coordinates swept by
// constant-control trajectories.

#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "podhjb/pde.hpp"
#include "podhjb/pod.hpp"

namespace podhjb {

// Reduced dynamics w' = mass^{-1} (op * w + u * control). For an orthonormal
// basis the Gramian is the identity and the solve is skipped.
struct ReducedModel {
  Eigen::MatrixXd op;            // (op)_{ij} = <A psi_j, psi_i>
  Eigen::VectorXd control;       // b(u) = u * control
  Eigen::MatrixXd mass;          // Gramian <psi_j, psi_i>
  Eigen::MatrixXd mass_inverse;  // only used when the Gramian is not identity
  bool mass_is_identity = true;
  PodBasis basis;
  Eigen::VectorXd w0;  // projected initial condition

  int rank() const { return static_cast<int>(op.rows()); }
};

struct BoxDomain {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  int dim() const { return static_cast<int>(lo.size()); }
  double width(int i) const { return hi[i] - lo[i]; }
  bool contains(const Eigen::VectorXd& w, double tol = 0.0) const;
  Eigen::VectorXd clamp(const Eigen::VectorXd& w) const;
};

ReducedModel assemble_reduced(const PodBasis& basis, const PdeParams& params,
                              const Grid1D& grid, const Eigen::VectorXd& y0);

// Build a reduced model directly from its blocks (test instances, synthetic
// dynamics). Throws if the Gramian is singular.
ReducedModel make_reduced_model(const Eigen::MatrixXd& op,
                                const Eigen::VectorXd& control,
                                const Eigen::MatrixXd& mass,
                                const Eigen::VectorXd& w0);

Eigen::VectorXd project(const Eigen::VectorXd& y, const PodBasis& basis);
Eigen::VectorXd lift(const Eigen::VectorXd& w, const PodBasis& basis);

Eigen::VectorXd reduced_rhs(const ReducedModel& model, const Eigen::VectorXd& w,
                            double u);

// One explicit Euler step of the reduced dynamics; this is the discrete flow
// the value iteration, the synthesis, and the oracles all share.
Eigen::VectorXd reduced_flow(const ReducedModel& model, const Eigen::VectorXd& w,
                             double u, double dt);
void reduced_flow_into(const ReducedModel& model, const Eigen::VectorXd& w,
                       double u, double dt, Eigen::VectorXd& out);

// Constant-control Euler trajectory, columns at 0, dt, ..., steps*dt.
Eigen::MatrixXd integrate_reduced(const ReducedModel& model,
                                  const Eigen::VectorXd& w_start, double u,
                                  double dt, int steps);

// Sweep one constant-control trajectory per control value over [0, duration]
// and box the coordinate ranges, inflating each side by `margin` times the
// width (degenerate widths are opened up to 1e-6). Extra start states join
// the sweep; notes receive asymmetric-control warnings and per-dimension
// widths.
BoxDomain compute_box(const ReducedModel& model,
                      const std::vector<double>& controls, double duration,
                      double dt, double margin,
                      std::vector<std::string>* notes = nullptr,
                      const std::vector<Eigen::VectorXd>& extra_starts = {});

}  // namespace podhjb
