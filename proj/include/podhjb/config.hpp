// Copyright (c) 2026, the podhjb developers.
// SPDX-License-Identifier: Apache-2.0
//
// Flat key=value configuration with block prefixes (pde.epsilon=0.05).
// Every numeric key is validated against the consuming module's
// preconditions before any computation starts.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "podhjb/pde.hpp"
#include "podhjb/pod.hpp"

namespace podhjb {

enum class InitialKind { kParabola, kHat };
enum class ReferenceKind {
  kZero,          // yhat identically zero
  kUncontrolled,  // yhat from the dynamics with control 0
  kStepSchedule,  // yhat from the -1/0/1 step schedule
};

struct PipelineConfig {
  // pde block
  double epsilon = 0.0;
  double c = 0.0;
  double a = 0.0;
  double b = 1.0;
  double t_final = 1.0;
  double dx = 0.1;
  double dt_pde = 0.1;          // as adjusted; see dt_pde_requested
  double dt_pde_requested = 0.1;
  bool dt_adjusted = false;
  InitialKind initial = InitialKind::kParabola;

  // cost block
  double control_weight = 1e-2;
  double lambda = 0.0;
  ReferenceKind reference = ReferenceKind::kZero;
  double terminal_weight = 0.0;

  // reduction block
  int rank = 3;
  double threshold = 0.99;
  EnergyVariant energy = EnergyVariant::kFirstPower;

  // hjb block
  double dt_hjb = 0.05;
  int nodes_per_dim = 21;
  std::vector<double> controls = {-1.0, 0.0, 1.0};
  double box_margin = 0.1;
  bool save_stacks = false;
  bool refine_control = false;

  // run block
  std::string preset;
  long seed = 0;

  Grid1D grid() const;
  PdeParams params() const;
  Eigen::VectorXd initial_state(const Grid1D& g) const;
  // The control driving both the snapshot run and the reference trajectory.
  ControlSignal reference_control(const Grid1D& g) const;

  void validate() const;

  static PipelineConfig from_string(const std::string& text);
  static PipelineConfig from_file(const std::filesystem::path& path);
};

}  // namespace podhjb
