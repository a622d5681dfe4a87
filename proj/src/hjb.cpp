// Copyright (c) 2026, the podhjb developers.
// SPDX-License-Identifier: Apache-2.0

#include "podhjb/hjb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace podhjb {

namespace {

constexpr int kMaxDims = 16;

int nearest_time_index(const std::vector<double>& times, double t) {
  if (times.empty()) return 0;
  // Uniformly spaced in all our uses, but do the generic search anyway.
  auto it = std::lower_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return 0;
  if (it == times.end()) return static_cast<int>(times.size()) - 1;
  const auto prev = it - 1;
  return (t - *prev <= *it - t) ? static_cast<int>(prev - times.begin())
                                : static_cast<int>(it - times.begin());
}

// Locate the interpolation cell of a (clamped) point: base node index and the
// fractional coordinate in [0,1] per dimension.
void locate(const ValueGrid& grid, const Eigen::VectorXd& point, long& base,
            double* frac) {
  base = 0;
  for (int d = 0; d < grid.dim(); ++d) {
    const double lo = grid.box.lo[d];
    const double hi = grid.box.hi[d];
    double x = std::min(std::max(point[d], lo), hi);
    double u = (x - lo) / grid.spacing[d];
    int cell = static_cast<int>(std::floor(u));
    cell = std::min(std::max(cell, 0), grid.nodes_per_dim[d] - 2);
    double f = u - cell;
    frac[d] = std::min(std::max(f, 0.0), 1.0);
    base += static_cast<long>(cell) * grid.strides[d];
  }
}

double gather(const std::vector<double>& values, long base, const double* frac,
              const std::vector<long>& corner_offsets, int dims) {
  const int corners = 1 << dims;
  double acc = 0.0;
  for (int mask = 0; mask < corners; ++mask) {
    double weight = 1.0;
    for (int d = 0; d < dims; ++d) {
      weight *= (mask >> d) & 1 ? frac[d] : 1.0 - frac[d];
    }
    acc += weight * values[base + corner_offsets[mask]];
  }
  return acc;
}

std::vector<long> make_corner_offsets(const ValueGrid& grid) {
  const int dims = grid.dim();
  std::vector<long> offsets(static_cast<size_t>(1) << dims, 0);
  for (int mask = 0; mask < (1 << dims); ++mask) {
    long off = 0;
    for (int d = 0; d < dims; ++d) {
      if ((mask >> d) & 1) off += grid.strides[d];
    }
    offsets[mask] = off;
  }
  return offsets;
}

// Golden-section search over [lo, hi]; returns the best sampled value of f.
template <typename F>
double golden_min(F&& f, double lo, double hi, int iterations) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  double best = std::min(fc, fd);
  for (int i = 0; i < iterations && b - a > 1e-12; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
    best = std::min(best, std::min(fc, fd));
  }
  return best;
}

}  // namespace

Eigen::VectorXd ValueGrid::coords(long index) const {
  Eigen::VectorXd w(dim());
  for (int d = 0; d < dim(); ++d) {
    const long i = (index / strides[d]) % nodes_per_dim[d];
    w[d] = box.lo[d] + static_cast<double>(i) * spacing[d];
  }
  return w;
}

ValueGrid make_value_grid(const BoxDomain& box,
                          const std::vector<int>& nodes_per_dim) {
  const int dims = box.dim();
  if (static_cast<int>(nodes_per_dim.size()) != dims) {
    throw std::invalid_argument("make_value_grid: dimension mismatch");
  }
  if (dims < 1 || dims > kMaxDims) {
    throw std::invalid_argument("make_value_grid: unsupported dimension");
  }
  ValueGrid grid;
  grid.box = box;
  grid.nodes_per_dim = nodes_per_dim;
  grid.spacing.resize(dims);
  grid.strides.assign(dims, 1);
  grid.total = 1;
  for (int d = 0; d < dims; ++d) {
    if (nodes_per_dim[d] < 2) {
      throw std::invalid_argument(
          "make_value_grid: needs at least 2 nodes per dimension");
    }
    if (!(box.width(d) > 0.0)) {
      throw std::invalid_argument("make_value_grid: degenerate box dimension");
    }
    grid.spacing[d] = box.width(d) / (nodes_per_dim[d] - 1);
  }
  for (int d = dims - 2; d >= 0; --d) {
    grid.strides[d] = grid.strides[d + 1] * nodes_per_dim[d + 1];
  }
  grid.total = grid.strides[0] * nodes_per_dim[0];
  return grid;
}

ValueGrid make_value_grid(const BoxDomain& box, int nodes_per_dim) {
  return make_value_grid(box, std::vector<int>(box.dim(), nodes_per_dim));
}

double interpolate(const ValueGrid& grid, const std::vector<double>& values,
                   const Eigen::VectorXd& point) {
  if (static_cast<long>(values.size()) != grid.total) {
    throw std::invalid_argument("interpolate: value array does not match grid");
  }
  if (point.size() != grid.dim()) {
    throw std::invalid_argument("interpolate: point dimension mismatch");
  }
  double frac[kMaxDims];
  long base = 0;
  locate(grid, point, base, frac);
  const std::vector<long> offsets = make_corner_offsets(grid);
  return gather(values, base, frac, offsets, grid.dim());
}

StageCost::StageCost(Eigen::MatrixXd quad, std::vector<Eigen::VectorXd> linear,
                     std::vector<double> offsets, double control_weight,
                     double lambda, double t_begin, double dt,
                     Eigen::MatrixXd terminal_quad,
                     Eigen::VectorXd terminal_linear, double terminal_offset)
    : quad_(std::move(quad)),
      linear_(std::move(linear)),
      offsets_(std::move(offsets)),
      control_weight_(control_weight),
      terminal_quad_(std::move(terminal_quad)),
      terminal_linear_(std::move(terminal_linear)),
      terminal_offset_(terminal_offset) {
  levels_ = static_cast<int>(
      std::max(linear_.size(), offsets_.size()));
  if (levels_ == 0) levels_ = 1;
  if (!linear_.empty() && !offsets_.empty() &&
      linear_.size() != offsets_.size()) {
    throw std::invalid_argument("StageCost: per-level arrays differ in length");
  }
  if (lambda < 0.0) {
    throw std::invalid_argument("StageCost: discount rate must be >= 0");
  }
  discounts_.resize(levels_);
  for (int n = 0; n < levels_; ++n) {
    discounts_[n] = lambda == 0.0 ? 1.0 : std::exp(-lambda * (t_begin + n * dt));
  }
}

double StageCost::state_part(const Eigen::VectorXd& w, int level) const {
  double acc = 0.0;
  const int r = static_cast<int>(w.size());
  if (quad_.size() > 0) {
    for (int i = 0; i < r; ++i) {
      double row = 0.0;
      for (int j = 0; j < r; ++j) row += quad_(i, j) * w[j];
      acc += w[i] * row;
    }
  }
  if (!linear_.empty()) {
    const Eigen::VectorXd& q = linear_[level];
    double dot = 0.0;
    for (int i = 0; i < r; ++i) dot += q[i] * w[i];
    acc -= 2.0 * dot;
  }
  if (!offsets_.empty()) acc += offsets_[level];
  return acc;
}

double StageCost::running(const Eigen::VectorXd& w, double u, int level) const {
  return state_part(w, level) + control_weight_ * u * u;
}

double StageCost::terminal(const Eigen::VectorXd& w) const {
  double acc = terminal_offset_;
  if (terminal_quad_.size() > 0) {
    acc += w.dot(terminal_quad_ * w);
  }
  if (terminal_linear_.size() > 0) {
    acc -= 2.0 * terminal_linear_.dot(w);
  }
  return acc;
}

StageCost bind_tracking_cost(const CostSpec& spec, const ReducedModel& model,
                             double t_begin, double dt, int levels) {
  return bind_tracking_cost(spec, model, t_begin, dt, levels,
                            spec.terminal_weight);
}

StageCost bind_tracking_cost(const CostSpec& spec, const ReducedModel& model,
                             double t_begin, double dt, int levels,
                             double terminal_weight) {
  if (!(spec.control_weight > 0.0)) {
    throw std::invalid_argument("bind_tracking_cost: R must be positive");
  }
  if (!(spec.dx > 0.0)) {
    throw std::invalid_argument("bind_tracking_cost: dx must be positive");
  }
  if (spec.reference.rows() != model.basis.vectors.rows()) {
    throw std::invalid_argument(
        "bind_tracking_cost: reference does not match the basis dimension");
  }
  const Eigen::MatrixXd quad = spec.dx * model.mass;
  std::vector<Eigen::VectorXd> linear(levels);
  std::vector<double> offsets(levels);
  for (int n = 0; n < levels; ++n) {
    const int j = nearest_time_index(spec.reference_times, t_begin + n * dt);
    const Eigen::VectorXd col = spec.reference.col(j);
    linear[n] = spec.dx * (model.basis.vectors.transpose() * col);
    offsets[n] = spec.dx * col.squaredNorm();
  }
  Eigen::MatrixXd tq;
  Eigen::VectorXd tl;
  double toff = 0.0;
  if (terminal_weight != 0.0) {
    const int j =
        nearest_time_index(spec.reference_times, t_begin + levels * dt);
    const Eigen::VectorXd col = spec.reference.col(j);
    tq = terminal_weight * quad;
    tl = terminal_weight * spec.dx *
         (model.basis.vectors.transpose() * col);
    toff = terminal_weight * spec.dx * col.squaredNorm();
  }
  return StageCost(quad, std::move(linear), std::move(offsets),
                   spec.control_weight, spec.lambda, t_begin, dt, tq, tl, toff);
}

ValueStack sl_backward_solve(const ReducedModel& model, const ValueGrid& grid,
                             const StageCost& cost,
                             const std::vector<double>& controls, double dt,
                             int levels, const SlOptions& options) {
  if (controls.empty()) {
    throw std::invalid_argument("sl_backward_solve: control set is empty");
  }
  if (controls.size() > 255) {
    throw std::invalid_argument("sl_backward_solve: control set too large");
  }
  if (levels < 1 || !(dt > 0.0)) {
    throw std::invalid_argument("sl_backward_solve: bad horizon");
  }
  if (grid.dim() != model.rank()) {
    throw std::invalid_argument(
        "sl_backward_solve: grid dimension does not match the model");
  }
  if (cost.levels() < levels) {
    throw std::invalid_argument(
        "sl_backward_solve: cost has fewer levels than the horizon");
  }

  const int dims = grid.dim();
  const long total = grid.total;
  const int nu = static_cast<int>(controls.size());
  const std::vector<long> corner_offsets = make_corner_offsets(grid);

  // Node coordinates, computed once.
  Eigen::MatrixXd coords(dims, total);
  for (long i = 0; i < total; ++i) coords.col(i) = grid.coords(i);

  // The dynamics are autonomous, so each node/control pair lands at a fixed
  // arrival point; precompute its interpolation cell and fractions.
  std::vector<long> arrival_base(static_cast<size_t>(total) * nu);
  std::vector<double> arrival_frac(static_cast<size_t>(total) * nu * dims);
  {
    Eigen::VectorXd w(dims), next(dims);
    for (long i = 0; i < total; ++i) {
      w = coords.col(i);
      for (int k = 0; k < nu; ++k) {
        reduced_flow_into(model, w, controls[k], dt, next);
        const size_t slot = static_cast<size_t>(i) * nu + k;
        locate(grid, next, arrival_base[slot],
               &arrival_frac[slot * dims]);
      }
    }
  }

  ValueStack stack;
  stack.grid = grid;
  stack.controls = controls;
  stack.dt = dt;
  stack.values.resize(levels + 1);
  stack.argmin.resize(levels);

  // Terminal condition.
  stack.values[levels].resize(total);
  {
    Eigen::VectorXd w(dims);
    for (long i = 0; i < total; ++i) {
      w = coords.col(i);
      stack.values[levels][i] = cost.terminal(w);
    }
  }

  const double cw = cost.control_weight();
  Eigen::VectorXd w(dims), next(dims);
  for (int n = levels - 1; n >= 0; --n) {
    const std::vector<double>& ahead = stack.values[n + 1];
    std::vector<double>& level = stack.values[n];
    std::vector<uint8_t>& best_u = stack.argmin[n];
    level.resize(total);
    best_u.resize(total);
    const double disc = cost.discount(n);
    for (long i = 0; i < total; ++i) {
      w = coords.col(i);
      const double state = cost.state_part(w, n);
      double best = std::numeric_limits<double>::infinity();
      int best_k = 0;
      for (int k = 0; k < nu; ++k) {
        const size_t slot = static_cast<size_t>(i) * nu + k;
        const double ahead_value =
            gather(ahead, arrival_base[slot], &arrival_frac[slot * dims],
                   corner_offsets, dims);
        const double candidate =
            dt * disc * (state + cw * controls[k] * controls[k]) + ahead_value;
        if (candidate < best) {
          best = candidate;
          best_k = k;
        }
      }
      if (options.refine_control && nu > 1) {
        const auto [lo_it, hi_it] =
            std::minmax_element(controls.begin(), controls.end());
        const double refined = golden_min(
            [&](double u) {
              reduced_flow_into(model, w, u, dt, next);
              return dt * disc * (state + cw * u * u) +
                     interpolate(grid, ahead, next);
            },
            *lo_it, *hi_it, options.refine_iterations);
        best = std::min(best, refined);
      }
      if (!std::isfinite(best)) {
        std::ostringstream msg;
        msg << "sl_backward_solve: non-finite value at level " << n << ", node "
            << i;
        throw std::runtime_error(msg.str());
      }
      level[i] = best;
      best_u[i] = static_cast<uint8_t>(best_k);
    }
  }
  return stack;
}

SynthesisResult synthesize_feedback(const ValueStack& stack,
                                    const ReducedModel& model,
                                    const Eigen::VectorXd& w_start,
                                    const StageCost& cost,
                                    const SlOptions& options) {
  const int levels = static_cast<int>(stack.values.size()) - 1;
  const int dims = stack.grid.dim();
  if (w_start.size() != dims || model.rank() != dims) {
    throw std::invalid_argument("synthesize_feedback: dimension mismatch");
  }
  const int nu = static_cast<int>(stack.controls.size());
  const double dt = stack.dt;
  const double cw = cost.control_weight();

  SynthesisResult out;
  out.trajectory.resize(dims, levels + 1);
  out.control.resize(levels);
  out.cumulative.assign(levels + 1, 0.0);

  Eigen::VectorXd w = w_start;
  Eigen::VectorXd next(dims);
  out.trajectory.col(0) = w;
  double acc = 0.0;
  for (int n = 0; n < levels; ++n) {
    const double disc = cost.discount(n);
    const double state = cost.state_part(w, n);
    double best = std::numeric_limits<double>::infinity();
    double best_u = stack.controls.front();
    for (int k = 0; k < nu; ++k) {
      const double u = stack.controls[k];
      reduced_flow_into(model, w, u, dt, next);
      const double candidate = dt * disc * (state + cw * u * u) +
                               interpolate(stack.grid, stack.values[n + 1], next);
      if (candidate < best) {
        best = candidate;
        best_u = u;
      }
    }
    if (options.refine_control && nu > 1) {
      const auto [lo_it, hi_it] =
          std::minmax_element(stack.controls.begin(), stack.controls.end());
      double refined_u = best_u;
      double refined = best;
      constexpr double kInvPhi = 0.6180339887498949;
      double a = *lo_it, b = *hi_it;
      double c = b - kInvPhi * (b - a);
      double d = a + kInvPhi * (b - a);
      auto eval = [&](double u) {
        reduced_flow_into(model, w, u, dt, next);
        return dt * disc * (state + cw * u * u) +
               interpolate(stack.grid, stack.values[n + 1], next);
      };
      double fc = eval(c), fd = eval(d);
      for (int it = 0; it < options.refine_iterations && b - a > 1e-12; ++it) {
        if (fc < fd) {
          b = d;
          d = c;
          fd = fc;
          c = b - kInvPhi * (b - a);
          fc = eval(c);
        } else {
          a = c;
          c = d;
          fc = fd;
          d = a + kInvPhi * (b - a);
          fd = eval(d);
        }
      }
      refined_u = fc < fd ? c : d;
      refined = std::min(fc, fd);
      if (refined < best) {
        best = refined;
        best_u = refined_u;
      }
    }
    acc += dt * disc * (state + cw * best_u * best_u);
    out.control[n] = best_u;
    reduced_flow_into(model, w, best_u, dt, next);
    if (!stack.grid.box.contains(next, 1e-12)) {
      std::ostringstream msg;
      msg << "state left the box at step " << n + 1 << " (clamped)";
      out.warnings.push_back(msg.str());
      next = stack.grid.box.clamp(next);
    }
    w = next;
    out.trajectory.col(n + 1) = w;
    out.cumulative[n + 1] = acc;
  }
  acc += cost.terminal(w);
  out.cumulative[levels] = acc;
  out.cost = acc;
  return out;
}

ChainResult chain_subintervals(const SubIntervalPlan& plan,
                               const std::vector<ReducedModel>& models,
                               const CostSpec& spec,
                               const std::vector<double>& controls,
                               const ChainOptions& options) {
  const int windows = static_cast<int>(plan.windows.size());
  if (windows == 0 || models.size() != plan.windows.size()) {
    throw std::invalid_argument(
        "chain_subintervals: plan and models are inconsistent");
  }
  const int rank = plan.rank;
  const int nodes = static_cast<int>(models.front().basis.vectors.rows());

  // Window level counts, fitted so each window is spanned exactly.
  std::vector<int> window_levels(windows);
  std::vector<double> window_dt(windows);
  int total_levels = 0;
  for (int k = 0; k < windows; ++k) {
    const double duration = plan.boundaries[k + 1] - plan.boundaries[k];
    int n = std::max(1, static_cast<int>(std::lround(duration / options.dt)));
    window_levels[k] = n;
    window_dt[k] = duration / n;
    total_levels += n;
  }

  ChainResult out;
  out.state_trajectory.resize(nodes, total_levels + 1);
  out.reduced_trajectory = Eigen::MatrixXd::Zero(rank, total_levels + 1);
  out.times.resize(total_levels + 1);
  out.control.resize(total_levels);
  out.cumulative.assign(total_levels + 1, 0.0);

  Eigen::VectorXd w_cur = models.front().w0;
  double cost_offset = 0.0;
  int col = 0;
  for (int k = 0; k < windows; ++k) {
    const ReducedModel& model = models[k];
    const double t0 = plan.boundaries[k];
    const int levels = window_levels[k];
    const double dt = window_dt[k];
    const bool last = (k == windows - 1);

    WindowRecord record;
    record.index = k;
    record.t_begin = t0;
    record.t_end = plan.boundaries[k + 1];
    record.levels = levels;
    record.dt = dt;

    const double duration = record.t_end - record.t_begin;
    record.box = compute_box(model, controls, duration, dt, options.box_margin,
                             &record.notes, {w_cur});
    const ValueGrid grid = make_value_grid(record.box, options.nodes_per_dim);
    const StageCost cost = bind_tracking_cost(
        spec, model, t0, dt, levels, last ? spec.terminal_weight : 0.0);
    ValueStack stack =
        sl_backward_solve(model, grid, cost, controls, dt, levels, options.sl);
    record.value_at_start =
        interpolate(grid, stack.values[0], record.box.clamp(w_cur));
    SynthesisResult synth =
        synthesize_feedback(stack, model, w_cur, cost, options.sl);
    record.synthesized_cost = synth.cost;
    for (const auto& warning : synth.warnings) record.notes.push_back(warning);

    const Eigen::MatrixXd lifted = model.basis.vectors * synth.trajectory;
    const int keep = last ? levels + 1 : levels;  // boundary column comes from
                                                  // the next window
    for (int j = 0; j < keep; ++j) {
      out.state_trajectory.col(col + j) = lifted.col(j);
      out.reduced_trajectory.block(0, col + j, synth.trajectory.rows(), 1) =
          synth.trajectory.col(j);
      out.times[col + j] = t0 + j * dt;
      out.cumulative[col + j] = cost_offset + synth.cumulative[j];
    }
    for (int j = 0; j < levels; ++j) {
      out.control[col + j] = synth.control[j];
    }
    col += keep;
    cost_offset += synth.cost;

    if (!last) {
      const Eigen::VectorXd y_end = lifted.col(levels);
      const Eigen::VectorXd w_next = project(y_end, models[k + 1].basis);
      const Eigen::VectorXd y_next = lift(w_next, models[k + 1].basis);
      out.jumps.push_back(std::sqrt(spec.dx) * (y_end - y_next).norm());
      w_cur = w_next;
    }
    if (options.keep_stacks) {
      out.stacks.push_back(std::move(stack));
      stack = ValueStack{};
    }
    out.windows.push_back(std::move(record));
  }
  out.cost = cost_offset;
  out.cumulative[total_levels] = cost_offset;
  return out;
}

}  // namespace podhjb
