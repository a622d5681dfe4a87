// Copyright (c) 2026, the podhjb developers.
// SPDX-License-Identifier: Apache-2.0
//
// Semi-Lagrangian value iteration for the reduced finite-horizon optimal
// control problem on a box grid of reduced coordinates, with multilinear
// interpolation, feedback-control synthesis, and the chaining of per-window
// solves into a global trajectory.

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "podhjb/pde.hpp"
#include "podhjb/pod.hpp"
#include "podhjb/rom.hpp"

namespace podhjb {

// Regular lattice over a box; node indexing is row-major with the last
// dimension fastest.
struct ValueGrid {
  BoxDomain box;
  std::vector<int> nodes_per_dim;
  std::vector<double> spacing;
  std::vector<long> strides;
  long total = 0;

  int dim() const { return static_cast<int>(nodes_per_dim.size()); }
  Eigen::VectorXd coords(long index) const;
};

ValueGrid make_value_grid(const BoxDomain& box,
                          const std::vector<int>& nodes_per_dim);
ValueGrid make_value_grid(const BoxDomain& box, int nodes_per_dim);

// Tensor-product linear interpolation. Points outside the box are clamped
// componentwise before interpolation; that is the defined behaviour, not an
// error.
double interpolate(const ValueGrid& grid, const std::vector<double>& values,
                   const Eigen::VectorXd& point);

// Cost functional of the tracking problem: running cost
// ||y - yhat(s)||^2 + R u^2 in the dx-weighted discrete spatial norm,
// optional terminal tracking weight, optional discount rate.
struct CostSpec {
  double control_weight = 1e-2;  // R
  double lambda = 0.0;           // discount rate, >= 0
  double terminal_weight = 0.0;  // weight on the terminal tracking term
  Eigen::MatrixXd reference;     // full-order yhat, nodes x (pde steps + 1)
  std::vector<double> reference_times;
  double dx = 0.0;               // spatial quadrature weight
};

// Stage cost bound to one reduced model and one time window:
//   running(w,u,n) = w'Qw - 2 w'q_n + s_n + R u^2
// with per-level data resolved against the reference trajectory. Values of
// the tracking form are exact in reduced coordinates through the Gramian.
class StageCost {
 public:
  StageCost(Eigen::MatrixXd quad, std::vector<Eigen::VectorXd> linear,
            std::vector<double> offsets, double control_weight, double lambda,
            double t_begin, double dt, Eigen::MatrixXd terminal_quad,
            Eigen::VectorXd terminal_linear, double terminal_offset);

  int levels() const { return levels_; }
  double control_weight() const { return control_weight_; }
  // Running cost split: running = state_part(w, n) + control_weight * u^2.
  double state_part(const Eigen::VectorXd& w, int level) const;
  double running(const Eigen::VectorXd& w, double u, int level) const;
  double discount(int level) const { return discounts_[level]; }
  double terminal(const Eigen::VectorXd& w) const;

 private:
  Eigen::MatrixXd quad_;
  std::vector<Eigen::VectorXd> linear_;  // empty means zero
  std::vector<double> offsets_;          // empty means zero
  double control_weight_ = 0.0;
  int levels_ = 0;
  std::vector<double> discounts_;
  Eigen::MatrixXd terminal_quad_;
  Eigen::VectorXd terminal_linear_;
  double terminal_offset_ = 0.0;
};

// Resolve the tracking cost against a reduced model for a window starting at
// absolute time t_begin with `levels` steps of size dt. Reference columns are
// looked up by nearest time. The terminal weight can be overridden so that
// intermediate windows of a chain carry no terminal cost.
StageCost bind_tracking_cost(const CostSpec& spec, const ReducedModel& model,
                             double t_begin, double dt, int levels);
StageCost bind_tracking_cost(const CostSpec& spec, const ReducedModel& model,
                             double t_begin, double dt, int levels,
                             double terminal_weight);

struct SlOptions {
  // Golden-section refinement of the minimisation over the hull of the
  // control set, on top of the discrete candidates. Off by default; all
  // headline results use the discrete control set alone.
  bool refine_control = false;
  int refine_iterations = 60;
};

// Value arrays per time level over the grid, plus per-level argmin controls.
// Level `levels` holds the terminal cost; level 0 the value at t_begin.
struct ValueStack {
  ValueGrid grid;
  std::vector<std::vector<double>> values;
  std::vector<std::vector<uint8_t>> argmin;
  std::vector<double> controls;
  double dt = 0.0;
  double t_begin = 0.0;
};

// Backward-in-time recursion
//   v_i^n = min_u [ dt e^{-lambda t_n} L(x_i,u,t_n) + I[v^{n+1}](x_i + dt F(x_i,u)) ]
// from v^N = g. Ties at the argmin go to the lowest control index.
ValueStack sl_backward_solve(const ReducedModel& model, const ValueGrid& grid,
                             const StageCost& cost,
                             const std::vector<double>& controls, double dt,
                             int levels, const SlOptions& options = {});

struct SynthesisResult {
  Eigen::MatrixXd trajectory;      // rank x (levels+1)
  ControlSignal control;           // levels entries
  std::vector<double> cumulative;  // accumulated cost per level, terminal incl.
  double cost = 0.0;
  std::vector<std::string> warnings;
};

// Forward march choosing at each level the control minimising the one-step
// cost plus the interpolated next-level value. States leaving the box are
// clamped and the exit recorded as a warning.
SynthesisResult synthesize_feedback(const ValueStack& stack,
                                    const ReducedModel& model,
                                    const Eigen::VectorXd& w_start,
                                    const StageCost& cost,
                                    const SlOptions& options = {});

struct ChainOptions {
  double dt = 0.05;        // requested step; adjusted per window to fit exactly
  int nodes_per_dim = 21;
  double box_margin = 0.1;
  bool keep_stacks = false;
  SlOptions sl;
};

struct WindowRecord {
  int index = 0;
  double t_begin = 0.0;
  double t_end = 0.0;
  int levels = 0;
  double dt = 0.0;
  BoxDomain box;
  double value_at_start = 0.0;
  double synthesized_cost = 0.0;
  std::vector<std::string> notes;
};

struct ChainResult {
  Eigen::MatrixXd state_trajectory;    // nodes x (total levels + 1)
  Eigen::MatrixXd reduced_trajectory;  // rank x (total levels + 1)
  std::vector<double> times;
  ControlSignal control;
  std::vector<double> cumulative;
  double cost = 0.0;
  std::vector<double> jumps;  // re-projection jumps at interior boundaries
  std::vector<WindowRecord> windows;
  std::vector<ValueStack> stacks;  // filled only when keep_stacks is set
};

// Solve the windows of a plan in forward order. Intermediate windows carry a
// zero terminal cost; the final window uses the cost spec's terminal weight.
// The closing state of each window is lifted to full order and re-projected
// onto the next window's basis.
ChainResult chain_subintervals(const SubIntervalPlan& plan,
                               const std::vector<ReducedModel>& models,
                               const CostSpec& spec,
                               const std::vector<double>& controls,
                               const ChainOptions& options);

}  // namespace podhjb
