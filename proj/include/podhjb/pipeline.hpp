// Copyright (c) 2026, the podhjb developers.
// SPDX-License-Identifier: Apache-2.0
//
// Orchestration of the full workflow: snapshot generation, adaptive
// splitting, per-window reduction, box construction, value iteration,
// feedback synthesis, lifting, and diagnostics, with every intermediate
// artifact persisted under the output directory.

#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "podhjb/bench.hpp"
#include "podhjb/config.hpp"
#include "podhjb/hjb.hpp"
#include "podhjb/pde.hpp"
#include "podhjb/pod.hpp"
#include "podhjb/rom.hpp"

namespace podhjb {

struct PipelineResult {
  SnapshotMatrix snapshots;
  SnapshotMatrix reference;
  SubIntervalPlan plan;
  std::vector<ReducedModel> models;
  ChainResult chain;
  Diagnostics diagnostics;
  std::filesystem::path out_dir;
  std::vector<std::pair<std::string, std::string>> manifest;
};

// Runs the eight-step workflow end to end and writes snapshots, plan, bases,
// reduced models, boxes, the synthesized trajectory, diagnostics, and a
// manifest under out_dir. Value stacks are persisted only when
// hjb.save_stacks is set; they dwarf every other artifact. Any stage failure
// is rethrown with the stage name prefixed.
PipelineResult run_pipeline(const PipelineConfig& config,
                            const std::filesystem::path& out_dir);

// Same workflow with the adaptive split replaced by a single global window,
// for side-by-side comparison.
PipelineResult run_nonadaptive(const PipelineConfig& config,
                               const std::filesystem::path& out_dir);

}  // namespace podhjb
