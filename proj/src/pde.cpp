// Copyright (c) 2026, the podhjb developers.
// SPDX-License-Identifier: Apache-2.0

#include "podhjb/pde.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "podhjb/csv.hpp"

namespace podhjb {

namespace {

constexpr double kRatioTol = 1e-9;

int checked_count(double span, double step, const char* span_name,
                  const char* step_name) {
  const double ratio = span / step;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > kRatioTol) {
    std::ostringstream msg;
    msg << "make_grid: " << span_name << "/" << step_name << " = " << ratio
        << " is not an integer (" << span_name << "=" << span << ", "
        << step_name << "=" << step << ")";
    throw std::invalid_argument(msg.str());
  }
  return static_cast<int>(rounded);
}

}  // namespace

Grid1D make_grid(double a, double b, double dx, double t_final, double dt) {
  if (!(a < b)) {
    throw std::invalid_argument("make_grid: requires a < b");
  }
  if (!(dx > 0.0) || !(dt > 0.0) || !(t_final > 0.0)) {
    throw std::invalid_argument("make_grid: dx, dt, T must all be positive");
  }
  Grid1D g;
  g.a = a;
  g.b = b;
  g.dx = dx;
  g.t_final = t_final;
  g.dt = dt;
  g.nodes = checked_count(b - a, dx, "(b-a)", "dx") + 1;
  g.steps = checked_count(t_final, dt, "T", "dt");
  if (g.nodes < 2 || g.steps < 2) {
    throw std::invalid_argument("make_grid: needs at least 2 nodes and 2 steps");
  }
  return g;
}

double commensurate_dt(double t_final, double dt) {
  if (!(dt > 0.0) || !(t_final > 0.0)) {
    throw std::invalid_argument("commensurate_dt: T and dt must be positive");
  }
  const double ratio = t_final / dt;
  if (std::abs(ratio - std::round(ratio)) <= kRatioTol) {
    return dt;
  }
  return t_final / std::ceil(ratio);
}

double cfl_bound(const PdeParams& params, double dx) {
  const double denom = 2.0 * params.epsilon / (dx * dx) + std::abs(params.c) / dx;
  if (denom <= 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return 1.0 / denom;
}

Eigen::VectorXd stencil_rhs(const Eigen::VectorXd& state,
                            const PdeParams& params, double u,
                            const Grid1D& grid) {
  if (state.size() != grid.nodes) {
    throw std::invalid_argument("stencil_rhs: state length does not match grid");
  }
  const int n = grid.nodes;
  const double dx = grid.dx;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (int i = 1; i + 1 < n; ++i) {
    const double diff =
        params.epsilon * (state[i + 1] - 2.0 * state[i] + state[i - 1]) / (dx * dx);
    // Upwind: one-sided difference chosen by the sign of c.
    const double adv = params.c > 0.0
                           ? params.c * (state[i] - state[i - 1]) / dx
                           : params.c * (state[i + 1] - state[i]) / dx;
    rhs[i] = diff - adv + u;
  }
  return rhs;
}

Eigen::VectorXd fd_step(const Eigen::VectorXd& state, const PdeParams& params,
                        double u, const Grid1D& grid) {
  if (params.epsilon < 0.0) {
    throw std::invalid_argument("fd_step: epsilon must be non-negative");
  }
  const double bound = cfl_bound(params, grid.dx);
  if (grid.dt > bound * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "fd_step: CFL violation, dt = " << grid.dt
        << " exceeds 1/(2*eps/dx^2 + |c|/dx) = " << bound;
    throw std::invalid_argument(msg.str());
  }
  Eigen::VectorXd next = state + grid.dt * stencil_rhs(state, params, u, grid);
  next[0] = 0.0;
  next[grid.nodes - 1] = 0.0;
  return next;
}

SnapshotMatrix simulate(const Eigen::VectorXd& y0, const ControlSignal& u,
                        const PdeParams& params, const Grid1D& grid) {
  if (y0.size() != grid.nodes) {
    throw std::invalid_argument("simulate: y0 length does not match grid");
  }
  if (static_cast<int>(u.size()) != grid.steps) {
    throw std::invalid_argument(
        "simulate: control signal needs one value per time step");
  }
  SnapshotMatrix snaps;
  snaps.data.resize(grid.nodes, grid.steps + 1);
  snaps.times.resize(grid.steps + 1);
  Eigen::VectorXd y = y0;
  y[0] = 0.0;
  y[grid.nodes - 1] = 0.0;
  snaps.data.col(0) = y;
  snaps.times[0] = 0.0;
  for (int n = 0; n < grid.steps; ++n) {
    y = fd_step(y, params, u[n], grid);
    if (!y.allFinite()) {
      std::ostringstream msg;
      msg << "simulate: solution diverged at step " << n + 1;
      throw std::runtime_error(msg.str());
    }
    snaps.data.col(n + 1) = y;
    snaps.times[n + 1] = grid.time(n + 1);
  }
  return snaps;
}

Eigen::VectorXd initial_parabola(const Grid1D& grid) {
  Eigen::VectorXd y(grid.nodes);
  for (int i = 0; i < grid.nodes; ++i) {
    const double x = grid.x(i);
    y[i] = (x >= 0.0 && x <= 1.0) ? 5.0 * x - 5.0 * x * x : 0.0;
  }
  return y;
}

Eigen::VectorXd initial_hat(const Grid1D& grid) {
  Eigen::VectorXd y(grid.nodes);
  for (int i = 0; i < grid.nodes; ++i) {
    y[i] = std::max(0.0, 1.0 - std::abs(grid.x(i)));
  }
  return y;
}

Eigen::MatrixXd full_operator(const PdeParams& params, const Grid1D& grid) {
  const int n = grid.nodes;
  const double dx = grid.dx;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i + 1 < n; ++i) {
    const double diff = params.epsilon / (dx * dx);
    A(i, i - 1) += diff;
    A(i, i) += -2.0 * diff;
    A(i, i + 1) += diff;
    if (params.c > 0.0) {
      A(i, i) += -params.c / dx;
      A(i, i - 1) += params.c / dx;
    } else {
      A(i, i) += params.c / dx;
      A(i, i + 1) += -params.c / dx;
    }
  }
  return A;
}

Eigen::VectorXd control_injection(const Grid1D& grid) {
  Eigen::VectorXd b = Eigen::VectorXd::Ones(grid.nodes);
  b[0] = 0.0;
  b[grid.nodes - 1] = 0.0;
  return b;
}

void write_snapshot_csv(const std::filesystem::path& path,
                        const SnapshotMatrix& snaps) {
  // First row holds the time stamps, each following row one spatial node.
  Eigen::MatrixXd out(snaps.data.rows() + 1, snaps.data.cols());
  for (Eigen::Index j = 0; j < snaps.data.cols(); ++j) {
    out(0, j) = snaps.times[static_cast<size_t>(j)];
  }
  out.bottomRows(snaps.data.rows()) = snaps.data;
  write_matrix_csv(path, out);
}

SnapshotMatrix read_snapshot_csv(const std::filesystem::path& path) {
  Eigen::MatrixXd raw = read_matrix_csv(path);
  if (raw.rows() < 2) {
    throw std::runtime_error("snapshot CSV needs a time row and node rows: " +
                             path.string());
  }
  SnapshotMatrix snaps;
  snaps.times.resize(raw.cols());
  for (Eigen::Index j = 0; j < raw.cols(); ++j) {
    snaps.times[static_cast<size_t>(j)] = raw(0, j);
    if (j > 0 && !(snaps.times[j] > snaps.times[j - 1])) {
      throw std::runtime_error("snapshot times not strictly increasing: " +
                               path.string());
    }
  }
  snaps.data = raw.bottomRows(raw.rows() - 1);
  return snaps;
}

}  // namespace podhjb
