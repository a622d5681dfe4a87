// Copyright (c) 2026, the podhjb developers.
// SPDX-License-Identifier: Apache-2.0

#include "podhjb/pipeline.hpp"

#include <chrono>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "podhjb/csv.hpp"

namespace podhjb {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string window_dir_name(int k) {
  std::ostringstream name;
  name << "window_" << (k < 10 ? "0" : "") << k;
  return name.str();
}

template <typename F>
auto stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("[") + name + "] " + e.what());
  }
}

void write_plan(const fs::path& path, const SubIntervalPlan& plan) {
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("windows", std::to_string(plan.windows.size()));
  kv.emplace_back("rank", std::to_string(plan.rank));
  kv.emplace_back("threshold", format_double(plan.threshold));
  for (size_t b = 0; b < plan.boundaries.size(); ++b) {
    kv.emplace_back("boundary_" + std::to_string(b),
                    format_double(plan.boundaries[b]));
  }
  for (size_t k = 0; k < plan.windows.size(); ++k) {
    const PodWindow& w = plan.windows[k];
    const std::string p = "window_" + std::to_string(k) + ".";
    kv.emplace_back(p + "first_snapshot", std::to_string(w.first));
    kv.emplace_back(p + "last_snapshot", std::to_string(w.last));
    kv.emplace_back(p + "attained_energy", format_double(w.attained_energy));
    kv.emplace_back(p + "below_threshold", w.below_threshold ? "1" : "0");
    kv.emplace_back(p + "basis_rank", std::to_string(w.basis.rank));
  }
  write_keyvalue(path, kv);
}

void write_model(const fs::path& dir, const ReducedModel& model,
                 const BoxDomain& box) {
  write_matrix_csv(dir / "A.csv", model.op);
  write_vector_csv(dir / "b.csv", model.control);
  write_vector_csv(dir / "w0.csv", model.w0);
  Eigen::MatrixXd intervals(box.dim(), 2);
  intervals.col(0) = box.lo;
  intervals.col(1) = box.hi;
  write_matrix_csv(dir / "box.csv", intervals);
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("rank", std::to_string(model.rank()));
  kv.emplace_back("mass_is_identity", model.mass_is_identity ? "1" : "0");
  kv.emplace_back("window_begin", format_double(model.basis.window_begin));
  kv.emplace_back("window_end", format_double(model.basis.window_end));
  for (int i = 0; i < box.dim(); ++i) {
    kv.emplace_back("box_width_" + std::to_string(i),
                    format_double(box.width(i)));
  }
  write_keyvalue(dir / "model.txt", kv);
}

void write_stack(const fs::path& dir, const ValueStack& stack) {
  fs::create_directories(dir);
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("levels", std::to_string(stack.values.size() - 1));
  kv.emplace_back("dt", format_double(stack.dt));
  kv.emplace_back("dims", std::to_string(stack.grid.dim()));
  for (int d = 0; d < stack.grid.dim(); ++d) {
    kv.emplace_back("nodes_" + std::to_string(d),
                    std::to_string(stack.grid.nodes_per_dim[d]));
    kv.emplace_back("lo_" + std::to_string(d),
                    format_double(stack.grid.box.lo[d]));
    kv.emplace_back("hi_" + std::to_string(d),
                    format_double(stack.grid.box.hi[d]));
  }
  for (size_t k = 0; k < stack.controls.size(); ++k) {
    kv.emplace_back("control_" + std::to_string(k),
                    format_double(stack.controls[k]));
  }
  write_keyvalue(dir / "manifest.txt", kv);
  for (size_t n = 0; n < stack.values.size(); ++n) {
    std::ostringstream name;
    name << "level_" << n << ".csv";
    Eigen::Map<const Eigen::VectorXd> v(stack.values[n].data(),
                                        static_cast<Eigen::Index>(
                                            stack.values[n].size()));
    write_vector_csv(dir / name.str(), v);
  }
}

void write_trajectory(const fs::path& path, const ChainResult& chain) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  const int rank = static_cast<int>(chain.reduced_trajectory.rows());
  out << "t";
  for (int i = 0; i < rank; ++i) out << ",w" << i + 1;
  out << ",u,cost\n";
  const size_t cols = chain.times.size();
  for (size_t j = 0; j < cols; ++j) {
    out << format_double(chain.times[j]);
    for (int i = 0; i < rank; ++i) {
      out << ',' << format_double(chain.reduced_trajectory(i, j));
    }
    // No step leaves the final row; its control column is written as zero.
    const double u = j + 1 < cols ? chain.control[j] : 0.0;
    out << ',' << format_double(u) << ',' << format_double(chain.cumulative[j])
        << '\n';
  }
}

PipelineResult run_impl(const PipelineConfig& config, const fs::path& out_dir,
                        bool adaptive) {
  PipelineResult result;
  result.out_dir = out_dir;
  fs::create_directories(out_dir);
  auto& manifest = result.manifest;
  manifest.emplace_back("preset", config.preset.empty() ? "-" : config.preset);
  manifest.emplace_back("adaptive", adaptive ? "1" : "0");
  manifest.emplace_back("pde.dt_requested",
                        format_double(config.dt_pde_requested));
  manifest.emplace_back("pde.dt", format_double(config.dt_pde));
  manifest.emplace_back("pde.dt_adjusted", config.dt_adjusted ? "1" : "0");

  const Grid1D grid = config.grid();
  const PdeParams params = config.params();
  const Eigen::VectorXd y0 = config.initial_state(grid);

  // Step 1: snapshots, collected under the same control guess that defines
  // the reference trajectory.
  const auto t_snap = Clock::now();
  const ControlSignal guess = config.reference_control(grid);
  result.snapshots = stage("simulate", [&] { return simulate(y0, guess, params, grid); });
  result.reference = config.reference == ReferenceKind::kZero
                         ? make_reference_zero(grid)
                         : result.snapshots;
  write_snapshot_csv(out_dir / "snapshots.csv", result.snapshots);
  write_snapshot_csv(out_dir / "reference.csv", result.reference);
  manifest.emplace_back("runtime.snapshots_s",
                        format_double(seconds_since(t_snap)));

  // Step 2 and 3: split [0,T] by the energy indicator and compute one POD
  // basis per window (single global window in the non-adaptive run).
  const auto t_split = Clock::now();
  result.plan = stage("split", [&] {
    return adaptive ? adaptive_split(result.snapshots, config.rank,
                                     config.threshold, config.energy)
                    : single_window_plan(result.snapshots, config.rank);
  });
  write_plan(out_dir / "plan.txt", result.plan);
  manifest.emplace_back("runtime.split_s", format_double(seconds_since(t_split)));
  manifest.emplace_back("windows", std::to_string(result.plan.windows.size()));
  for (size_t k = 0; k < result.plan.windows.size(); ++k) {
    manifest.emplace_back("attained_energy_" + std::to_string(k),
                          format_double(result.plan.windows[k].attained_energy));
  }

  // Step 4 is the control set, fixed by the configuration.
  // Step 5: Galerkin projection per window.
  const auto t_reduce = Clock::now();
  stage("reduce", [&] {
    for (size_t k = 0; k < result.plan.windows.size(); ++k) {
      const PodWindow& w = result.plan.windows[k];
      const Eigen::VectorXd start = result.snapshots.data.col(w.first);
      result.models.push_back(
          assemble_reduced(w.basis, params, grid, start));
      const fs::path dir = out_dir / window_dir_name(static_cast<int>(k));
      fs::create_directories(dir);
      write_matrix_csv(dir / "basis.csv", w.basis.vectors);
    }
    return 0;
  });
  manifest.emplace_back("runtime.reduce_s",
                        format_double(seconds_since(t_reduce)));

  // Steps 6-8: per-window box, value iteration, synthesis, and lifting.
  const auto t_hjb = Clock::now();
  CostSpec spec;
  spec.control_weight = config.control_weight;
  spec.lambda = config.lambda;
  spec.terminal_weight = config.terminal_weight;
  spec.reference = result.reference.data;
  spec.reference_times = result.reference.times;
  spec.dx = grid.dx;

  ChainOptions chain_options;
  chain_options.dt = config.dt_hjb;
  chain_options.nodes_per_dim = config.nodes_per_dim;
  chain_options.box_margin = config.box_margin;
  chain_options.keep_stacks = config.save_stacks;
  chain_options.sl.refine_control = config.refine_control;

  result.chain = stage("hjb", [&] {
    return chain_subintervals(result.plan, result.models, spec, config.controls,
                              chain_options);
  });
  manifest.emplace_back("runtime.hjb_s", format_double(seconds_since(t_hjb)));

  for (size_t k = 0; k < result.models.size(); ++k) {
    const fs::path dir = out_dir / window_dir_name(static_cast<int>(k));
    write_model(dir, result.models[k], result.chain.windows[k].box);
    if (config.save_stacks) {
      write_stack(dir / "value", result.chain.stacks[k]);
    }
  }
  write_trajectory(out_dir / "trajectory.csv", result.chain);
  SnapshotMatrix lifted;
  lifted.data = result.chain.state_trajectory;
  lifted.times = result.chain.times;
  write_snapshot_csv(out_dir / "state_trajectory.csv", lifted);

  // Diagnostics: discrete cost, PDE residual along the lifted trajectory,
  // and the error norms against the reference at the final time.
  const auto t_diag = Clock::now();
  stage("diagnostics", [&] {
    const Eigen::MatrixXd ref_at =
        sample_reference(result.reference, result.chain.times);
    result.diagnostics.cost =
        evaluate_cost(result.chain.state_trajectory, result.chain.control,
                      ref_at, config.control_weight, result.chain.times,
                      grid.dx);
    result.diagnostics.residual =
        residual(result.chain.state_trajectory, result.chain.control, params,
                 grid.dx, result.chain.times);
    const auto norms =
        error_norms(result.chain.state_trajectory.rightCols<1>(),
                    ref_at.rightCols<1>(), grid.dx);
    result.diagnostics.l1_error = norms.first;
    result.diagnostics.l2_error = norms.second;
    return 0;
  });
  manifest.emplace_back("runtime.diagnostics_s",
                        format_double(seconds_since(t_diag)));

  for (size_t k = 0; k < result.chain.windows.size(); ++k) {
    const WindowRecord& w = result.chain.windows[k];
    const std::string p = "window_" + std::to_string(k) + ".";
    manifest.emplace_back(p + "t_begin", format_double(w.t_begin));
    manifest.emplace_back(p + "t_end", format_double(w.t_end));
    manifest.emplace_back(p + "levels", std::to_string(w.levels));
    manifest.emplace_back(p + "dt", format_double(w.dt));
    manifest.emplace_back(p + "value_at_start",
                          format_double(w.value_at_start));
    manifest.emplace_back(p + "synthesized_cost",
                          format_double(w.synthesized_cost));
    for (size_t x = 0; x < w.notes.size(); ++x) {
      manifest.emplace_back(p + "note_" + std::to_string(x), w.notes[x]);
    }
  }
  for (size_t j = 0; j < result.chain.jumps.size(); ++j) {
    manifest.emplace_back("jump_" + std::to_string(j),
                          format_double(result.chain.jumps[j]));
  }

  std::vector<std::pair<std::string, std::string>> diag_kv;
  diag_kv.emplace_back("cost", format_double(result.diagnostics.cost));
  diag_kv.emplace_back("residual", format_double(result.diagnostics.residual));
  diag_kv.emplace_back("residual_norm", "space-time L2, dx*dt weights");
  diag_kv.emplace_back("l1_error_at_T",
                       format_double(result.diagnostics.l1_error));
  diag_kv.emplace_back("l2_error_at_T",
                       format_double(result.diagnostics.l2_error));
  write_keyvalue(out_dir / "diagnostics.txt", diag_kv);
  {
    std::ofstream csv(out_dir / "diagnostics.csv");
    csv << "cost,residual,l1_error,l2_error\n"
        << format_double(result.diagnostics.cost) << ','
        << format_double(result.diagnostics.residual) << ','
        << format_double(result.diagnostics.l1_error) << ','
        << format_double(result.diagnostics.l2_error) << '\n';
  }

  for (const auto& kv : diag_kv) manifest.push_back(kv);
  write_keyvalue(out_dir / "manifest.txt", manifest);
  return result;
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config,
                            const fs::path& out_dir) {
  return run_impl(config, out_dir, /*adaptive=*/true);
}

PipelineResult run_nonadaptive(const PipelineConfig& config,
                               const fs::path& out_dir) {
  return run_impl(config, out_dir, /*adaptive=*/false);
}

}  // namespace podhjb
