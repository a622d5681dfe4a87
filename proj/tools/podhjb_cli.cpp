// Copyright (c) 2026, the podhjb developers.
// SPDX-License-Identifier: Apache-2.0
//
// Command-line driver. Every subcommand reads a key=value config and writes
// its artifacts under --out. Staged subcommands recompute their (cheap)
// prerequisites from the config rather than consuming intermediate files,
// except `split`, which can optionally start from an existing snapshot CSV.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <limits>

#include "podhjb/config.hpp"
#include "podhjb/csv.hpp"
#include "podhjb/pipeline.hpp"

namespace fs = std::filesystem;
using namespace podhjb;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "key=value configuration file")
      ->required();
  cmd->add_option("--out", args.out_dir, "output directory")->required();
}

PipelineConfig load(const CommonArgs& args) {
  return PipelineConfig::from_file(args.config_path);
}

void print_diagnostics(const PipelineResult& result) {
  std::cout << "windows=" << result.plan.windows.size()
            << " cost=" << format_double(result.diagnostics.cost)
            << " residual=" << format_double(result.diagnostics.residual)
            << " l1=" << format_double(result.diagnostics.l1_error)
            << " l2=" << format_double(result.diagnostics.l2_error) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptive POD reduction + semi-Lagrangian HJB control"};
  app.require_subcommand(1);

  CommonArgs simulate_args, split_args, reduce_args, hjb_args, synth_args,
      pipeline_args, compare_args;
  std::string split_snapshots;
  bool nonadaptive = false;

  CLI::App* cmd_simulate =
      app.add_subcommand("simulate", "generate snapshots and the reference");
  add_common(cmd_simulate, simulate_args);

  CLI::App* cmd_split =
      app.add_subcommand("split", "adaptive sub-interval plan and bases");
  add_common(cmd_split, split_args);
  cmd_split->add_option("--snapshots", split_snapshots,
                        "start from an existing snapshot CSV");

  CLI::App* cmd_reduce =
      app.add_subcommand("reduce", "reduced models per window");
  add_common(cmd_reduce, reduce_args);

  CLI::App* cmd_hjb =
      app.add_subcommand("hjb", "value stacks per window (forces save)");
  add_common(cmd_hjb, hjb_args);

  CLI::App* cmd_synth =
      app.add_subcommand("synthesize", "feedback trajectory and controls");
  add_common(cmd_synth, synth_args);

  CLI::App* cmd_pipeline =
      app.add_subcommand("pipeline", "the full workflow with diagnostics");
  add_common(cmd_pipeline, pipeline_args);
  cmd_pipeline->add_flag("--nonadaptive", nonadaptive,
                         "force a single global basis window");

  CLI::App* cmd_compare = app.add_subcommand(
      "compare", "adaptive versus single-window run, side by side");
  add_common(cmd_compare, compare_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_simulate->parsed()) {
      const PipelineConfig cfg = load(simulate_args);
      const Grid1D grid = cfg.grid();
      const auto y0 = cfg.initial_state(grid);
      const auto snaps =
          simulate(y0, cfg.reference_control(grid), cfg.params(), grid);
      fs::create_directories(simulate_args.out_dir);
      write_snapshot_csv(fs::path(simulate_args.out_dir) / "snapshots.csv",
                         snaps);
      const SnapshotMatrix ref = cfg.reference == ReferenceKind::kZero
                                     ? make_reference_zero(grid)
                                     : snaps;
      write_snapshot_csv(fs::path(simulate_args.out_dir) / "reference.csv", ref);
      std::cout << "snapshots: " << snaps.data.rows() << " nodes x "
                << snaps.data.cols() << " instants\n";
    } else if (cmd_split->parsed()) {
      const PipelineConfig cfg = load(split_args);
      SnapshotMatrix snaps;
      if (!split_snapshots.empty()) {
        snaps = read_snapshot_csv(split_snapshots);
      } else {
        const Grid1D grid = cfg.grid();
        snaps = simulate(cfg.initial_state(grid), cfg.reference_control(grid),
                         cfg.params(), grid);
      }
      const auto plan =
          adaptive_split(snaps, cfg.rank, cfg.threshold, cfg.energy);
      fs::create_directories(split_args.out_dir);
      std::vector<std::pair<std::string, std::string>> kv;
      kv.emplace_back("windows", std::to_string(plan.windows.size()));
      kv.emplace_back("threshold", format_double(plan.threshold));
      for (size_t k = 0; k < plan.windows.size(); ++k) {
        kv.emplace_back("window_" + std::to_string(k),
                        format_double(plan.boundaries[k]) + ".." +
                            format_double(plan.boundaries[k + 1]));
        kv.emplace_back("attained_energy_" + std::to_string(k),
                        format_double(plan.windows[k].attained_energy));
        write_matrix_csv(fs::path(split_args.out_dir) /
                             ("basis_" + std::to_string(k) + ".csv"),
                         plan.windows[k].basis.vectors);
      }
      write_keyvalue(fs::path(split_args.out_dir) / "plan.txt", kv);
      std::cout << "windows: " << plan.windows.size() << "\n";
    } else if (cmd_reduce->parsed()) {
      PipelineConfig cfg = load(reduce_args);
      const auto result = run_pipeline(cfg, reduce_args.out_dir);
      std::cout << "reduced models written for " << result.models.size()
                << " windows\n";
    } else if (cmd_hjb->parsed()) {
      PipelineConfig cfg = load(hjb_args);
      cfg.save_stacks = true;
      const auto result = run_pipeline(cfg, hjb_args.out_dir);
      std::cout << "value stacks written for " << result.models.size()
                << " windows\n";
    } else if (cmd_synth->parsed()) {
      const PipelineConfig cfg = load(synth_args);
      const auto result = run_pipeline(cfg, synth_args.out_dir);
      print_diagnostics(result);
    } else if (cmd_pipeline->parsed()) {
      const PipelineConfig cfg = load(pipeline_args);
      const auto result = nonadaptive
                              ? run_nonadaptive(cfg, pipeline_args.out_dir)
                              : run_pipeline(cfg, pipeline_args.out_dir);
      print_diagnostics(result);
    } else if (cmd_compare->parsed()) {
      const PipelineConfig cfg = load(compare_args);
      const fs::path base(compare_args.out_dir);
      const auto adaptive = run_pipeline(cfg, base / "adaptive");
      const auto global = run_nonadaptive(cfg, base / "nonadaptive");
      const double ratio = adaptive.diagnostics.residual > 0.0
                               ? global.diagnostics.residual /
                                     adaptive.diagnostics.residual
                               : std::numeric_limits<double>::infinity();
      std::vector<std::pair<std::string, std::string>> kv;
      kv.emplace_back("adaptive.windows",
                      std::to_string(adaptive.plan.windows.size()));
      kv.emplace_back("adaptive.residual",
                      format_double(adaptive.diagnostics.residual));
      kv.emplace_back("nonadaptive.residual",
                      format_double(global.diagnostics.residual));
      kv.emplace_back("residual_ratio", format_double(ratio));
      kv.emplace_back("adaptive.cost", format_double(adaptive.diagnostics.cost));
      kv.emplace_back("nonadaptive.cost",
                      format_double(global.diagnostics.cost));
      write_keyvalue(base / "compare.txt", kv);
      std::cout << "adaptive residual " << adaptive.diagnostics.residual
                << " vs single-window " << global.diagnostics.residual
                << " (ratio " << ratio << ")\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
