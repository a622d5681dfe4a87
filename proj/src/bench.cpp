// Copyright (c) 2026, the podhjb developers.
// SPDX-License-Identifier: Apache-2.0

#include "podhjb/bench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace podhjb {

namespace {

double trapezoid_weight(int i, int n, double dx) {
  return (i == 0 || i == n - 1) ? 0.5 * dx : dx;
}

struct BruteForceState {
  const ReducedModel* model;
  const StageCost* cost;
  const std::vector<double>* controls;
  const BoxDomain* box;
  double dt;
  int levels;
  double best;
  std::vector<int> best_seq;
  std::vector<int> seq;
};

void enumerate(BruteForceState& s, int level, const Eigen::VectorXd& w,
               double acc) {
  if (level == s.levels) {
    const double total = acc + s.cost->terminal(w);
    if (total < s.best) {
      s.best = total;
      s.best_seq = s.seq;
    }
    return;
  }
  Eigen::VectorXd next(w.size());
  for (int k = 0; k < static_cast<int>(s.controls->size()); ++k) {
    const double u = (*s.controls)[k];
    const double stage =
        s.dt * s.cost->discount(level) * s.cost->running(w, u, level);
    reduced_flow_into(*s.model, w, u, s.dt, next);
    const Eigen::VectorXd clamped = s.box->clamp(next);
    s.seq[level] = k;
    enumerate(s, level + 1, clamped, acc + stage);
  }
}

}  // namespace

double evaluate_cost(const Eigen::MatrixXd& trajectory, const ControlSignal& u,
                     const Eigen::MatrixXd& reference, double control_weight,
                     const std::vector<double>& times, double dx) {
  if (trajectory.rows() != reference.rows() ||
      trajectory.cols() != reference.cols()) {
    throw std::invalid_argument(
        "evaluate_cost: trajectory and reference shapes differ");
  }
  if (static_cast<Eigen::Index>(u.size()) + 1 != trajectory.cols() ||
      times.size() != static_cast<size_t>(trajectory.cols())) {
    throw std::invalid_argument(
        "evaluate_cost: control/time lengths do not match the trajectory");
  }
  double acc = 0.0;
  for (Eigen::Index n = 0; n < static_cast<Eigen::Index>(u.size()); ++n) {
    const double dt = times[n + 1] - times[n];
    const double tracking =
        dx * (trajectory.col(n) - reference.col(n)).squaredNorm();
    acc += dt * (tracking + control_weight * u[n] * u[n]);
  }
  return acc;
}

double evaluate_cost(const Eigen::MatrixXd& trajectory, const ControlSignal& u,
                     const Eigen::MatrixXd& reference, double control_weight,
                     double dt, double dx) {
  std::vector<double> times(trajectory.cols());
  for (size_t n = 0; n < times.size(); ++n) times[n] = n * dt;
  return evaluate_cost(trajectory, u, reference, control_weight, times, dx);
}

double residual(const Eigen::MatrixXd& trajectory, const ControlSignal& u,
                const PdeParams& params, double dx,
                const std::vector<double>& times) {
  const Eigen::Index nodes = trajectory.rows();
  const Eigen::Index cols = trajectory.cols();
  if (static_cast<Eigen::Index>(u.size()) + 1 != cols ||
      times.size() != static_cast<size_t>(cols)) {
    throw std::invalid_argument(
        "residual: control/time lengths do not match the trajectory");
  }
  if (nodes < 3 || cols < 2) {
    throw std::invalid_argument("residual: trajectory too small");
  }
  double acc = 0.0;
  for (Eigen::Index n = 0; n + 1 < cols; ++n) {
    const double dt = times[n + 1] - times[n];
    for (Eigen::Index i = 1; i + 1 < nodes; ++i) {
      const double yt = (trajectory(i, n + 1) - trajectory(i, n)) / dt;
      const double yxx =
          (trajectory(i + 1, n) - 2.0 * trajectory(i, n) + trajectory(i - 1, n)) /
          (dx * dx);
      const double yx = params.c > 0.0
                            ? (trajectory(i, n) - trajectory(i - 1, n)) / dx
                            : (trajectory(i + 1, n) - trajectory(i, n)) / dx;
      const double r = yt - params.epsilon * yxx + params.c * yx - u[n];
      acc += dt * dx * r * r;
    }
  }
  return std::sqrt(acc);
}

double residual(const Eigen::MatrixXd& trajectory, const ControlSignal& u,
                const PdeParams& params, double dx, double dt) {
  std::vector<double> times(trajectory.cols());
  for (size_t n = 0; n < times.size(); ++n) times[n] = n * dt;
  return residual(trajectory, u, params, dx, times);
}

std::pair<double, double> error_norms(const Eigen::VectorXd& y1,
                                      const Eigen::VectorXd& y2, double dx) {
  if (y1.size() != y2.size()) {
    throw std::invalid_argument("error_norms: length mismatch");
  }
  const int n = static_cast<int>(y1.size());
  double l1 = 0.0;
  double l2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = trapezoid_weight(i, n, dx);
    const double d = y1[i] - y2[i];
    l1 += w * std::abs(d);
    l2 += w * d * d;
  }
  return {l1, std::sqrt(l2)};
}

BruteForceResult brute_force_dp(const ReducedModel& model,
                                const StageCost& cost,
                                const std::vector<double>& controls,
                                const BoxDomain& box, double dt, int levels,
                                const Eigen::VectorXd& w_start) {
  if (controls.empty() || levels < 1) {
    throw std::invalid_argument("brute_force_dp: empty control set or horizon");
  }
  double count = 1.0;
  for (int n = 0; n < levels; ++n) count *= static_cast<double>(controls.size());
  if (count > 1e6) {
    std::ostringstream msg;
    msg << "brute_force_dp: |U|^N = " << count << " exceeds the 1e6 budget";
    throw std::invalid_argument(msg.str());
  }
  BruteForceState s;
  s.model = &model;
  s.cost = &cost;
  s.controls = &controls;
  s.box = &box;
  s.dt = dt;
  s.levels = levels;
  s.best = std::numeric_limits<double>::infinity();
  s.seq.assign(levels, 0);
  enumerate(s, 0, w_start, 0.0);
  BruteForceResult out;
  out.cost = s.best;
  out.sequence = s.best_seq;
  return out;
}

RiccatiResult riccati_lqr(const ReducedModel& model, const Eigen::MatrixXd& Q,
                          double control_weight, double dt, int levels,
                          const Eigen::VectorXd& w_start) {
  const int r = model.rank();
  if (Q.rows() != r || Q.cols() != r || w_start.size() != r) {
    throw std::invalid_argument("riccati_lqr: dimension mismatch");
  }
  if (!(control_weight > 0.0)) {
    throw std::invalid_argument("riccati_lqr: R must be positive definite");
  }
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(r, r) + dt * model.op;
  Eigen::VectorXd B = dt * model.control;
  if (!model.mass_is_identity) {
    A = Eigen::MatrixXd::Identity(r, r) + dt * (model.mass_inverse * model.op);
    B = dt * (model.mass_inverse * model.control);
  }
  const Eigen::MatrixXd Qd = dt * Q;
  const double Rd = dt * control_weight;

  // Backward recursion with zero terminal weight.
  RiccatiResult out;
  out.gains.resize(levels, r);
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(r, r);
  for (int n = levels - 1; n >= 0; --n) {
    const double denom = Rd + B.dot(P * B);
    if (!(denom > 0.0)) {
      throw std::invalid_argument("riccati_lqr: non-positive control curvature");
    }
    const Eigen::RowVectorXd K = (B.transpose() * P * A) / denom;
    out.gains.row(n) = K;
    const Eigen::MatrixXd closed = A - B * K;
    P = Qd + K.transpose() * Rd * K + closed.transpose() * P * closed;
    P = 0.5 * (P + P.transpose());  // keep symmetric under roundoff
  }

  out.trajectory.resize(r, levels + 1);
  out.control.resize(levels);
  Eigen::VectorXd w = w_start;
  out.trajectory.col(0) = w;
  double cost = 0.0;
  for (int n = 0; n < levels; ++n) {
    const double u = -out.gains.row(n).dot(w);
    out.control[n] = u;
    cost += dt * (w.dot(Q * w) + control_weight * u * u);
    w = A * w + B * u;
    out.trajectory.col(n + 1) = w;
  }
  out.cost = cost;
  return out;
}

SnapshotMatrix make_reference_zero(const Grid1D& grid) {
  SnapshotMatrix ref;
  ref.data = Eigen::MatrixXd::Zero(grid.nodes, grid.steps + 1);
  ref.times.resize(grid.steps + 1);
  for (int n = 0; n <= grid.steps; ++n) ref.times[n] = grid.time(n);
  return ref;
}

SnapshotMatrix make_reference_from_control(const Eigen::VectorXd& y0,
                                           const ControlSignal& u,
                                           const PdeParams& params,
                                           const Grid1D& grid) {
  return simulate(y0, u, params, grid);
}

ControlSignal step_control_schedule(const Grid1D& grid) {
  ControlSignal u(grid.steps);
  for (int n = 0; n < grid.steps; ++n) {
    const double t = grid.time(n);
    u[n] = t < 1.0 ? -1.0 : (t < 2.0 ? 0.0 : 1.0);
  }
  return u;
}

Eigen::MatrixXd sample_reference(const SnapshotMatrix& ref,
                                 const std::vector<double>& times) {
  Eigen::MatrixXd out(ref.data.rows(), static_cast<Eigen::Index>(times.size()));
  for (size_t j = 0; j < times.size(); ++j) {
    auto it = std::lower_bound(ref.times.begin(), ref.times.end(), times[j]);
    int idx;
    if (it == ref.times.begin()) {
      idx = 0;
    } else if (it == ref.times.end()) {
      idx = static_cast<int>(ref.times.size()) - 1;
    } else {
      const auto prev = it - 1;
      idx = (times[j] - *prev <= *it - times[j])
                ? static_cast<int>(prev - ref.times.begin())
                : static_cast<int>(it - ref.times.begin());
    }
    out.col(static_cast<Eigen::Index>(j)) = ref.data.col(idx);
  }
  return out;
}

}  // namespace podhjb
