// Copyright (c) 2026, the podhjb developers.
// SPDX-License-Identifier: Apache-2.0

#include "podhjb/rom.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace podhjb {

namespace {

constexpr double kIdentityTol = 1e-10;
constexpr double kMinBoxWidth = 1e-6;
constexpr double kDivergenceGuard = 1e12;

void finish_mass(ReducedModel& model) {
  const int r = model.rank();
  model.mass_is_identity =
      (model.mass - Eigen::MatrixXd::Identity(r, r)).cwiseAbs().maxCoeff() <=
      kIdentityTol;
  if (model.mass_is_identity) {
    model.mass_inverse = Eigen::MatrixXd::Identity(r, r);
    return;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(model.mass);
  if (!lu.isInvertible()) {
    throw std::invalid_argument("reduced model: singular mass matrix");
  }
  model.mass_inverse = lu.inverse();
}

}  // namespace

bool BoxDomain::contains(const Eigen::VectorXd& w, double tol) const {
  for (int i = 0; i < dim(); ++i) {
    if (w[i] < lo[i] - tol || w[i] > hi[i] + tol) return false;
  }
  return true;
}

Eigen::VectorXd BoxDomain::clamp(const Eigen::VectorXd& w) const {
  Eigen::VectorXd out = w;
  for (int i = 0; i < dim(); ++i) {
    out[i] = std::min(std::max(out[i], lo[i]), hi[i]);
  }
  return out;
}

ReducedModel assemble_reduced(const PodBasis& basis, const PdeParams& params,
                              const Grid1D& grid, const Eigen::VectorXd& y0) {
  if (basis.vectors.rows() != grid.nodes) {
    throw std::invalid_argument(
        "assemble_reduced: basis dimension does not match grid");
  }
  if (y0.size() != grid.nodes) {
    throw std::invalid_argument(
        "assemble_reduced: initial condition does not match grid");
  }
  const Eigen::MatrixXd A = full_operator(params, grid);
  ReducedModel model;
  model.op = basis.vectors.transpose() * (A * basis.vectors);
  model.control = basis.vectors.transpose() * control_injection(grid);
  model.mass = basis.vectors.transpose() * basis.vectors;
  model.basis = basis;
  model.w0 = basis.vectors.transpose() * y0;
  finish_mass(model);
  return model;
}

ReducedModel make_reduced_model(const Eigen::MatrixXd& op,
                                const Eigen::VectorXd& control,
                                const Eigen::MatrixXd& mass,
                                const Eigen::VectorXd& w0) {
  if (op.rows() != op.cols() || op.rows() != control.size() ||
      mass.rows() != op.rows() || mass.cols() != op.cols() ||
      w0.size() != op.rows()) {
    throw std::invalid_argument("make_reduced_model: inconsistent block sizes");
  }
  ReducedModel model;
  model.op = op;
  model.control = control;
  model.mass = mass;
  model.w0 = w0;
  model.basis.vectors = Eigen::MatrixXd::Identity(op.rows(), op.rows());
  model.basis.rank = static_cast<int>(op.rows());
  finish_mass(model);
  return model;
}

Eigen::VectorXd project(const Eigen::VectorXd& y, const PodBasis& basis) {
  if (y.size() != basis.vectors.rows()) {
    throw std::invalid_argument("project: state dimension mismatch");
  }
  return basis.vectors.transpose() * y;
}

Eigen::VectorXd lift(const Eigen::VectorXd& w, const PodBasis& basis) {
  if (w.size() != basis.vectors.cols()) {
    throw std::invalid_argument("lift: coefficient dimension mismatch");
  }
  return basis.vectors * w;
}

Eigen::VectorXd reduced_rhs(const ReducedModel& model, const Eigen::VectorXd& w,
                            double u) {
  if (w.size() != model.rank()) {
    throw std::invalid_argument("reduced_rhs: coefficient dimension mismatch");
  }
  Eigen::VectorXd rhs = model.op * w + u * model.control;
  if (!model.mass_is_identity) {
    rhs = model.mass_inverse * rhs;
  }
  return rhs;
}

Eigen::VectorXd reduced_flow(const ReducedModel& model, const Eigen::VectorXd& w,
                             double u, double dt) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("reduced_flow: dt must be positive");
  }
  return w + dt * reduced_rhs(model, w, u);
}

void reduced_flow_into(const ReducedModel& model, const Eigen::VectorXd& w,
                       double u, double dt, Eigen::VectorXd& out) {
  const int r = model.rank();
  out.resize(r);
  for (int i = 0; i < r; ++i) {
    double acc = 0.0;
    for (int j = 0; j < r; ++j) acc += model.op(i, j) * w[j];
    out[i] = acc + u * model.control[i];
  }
  if (!model.mass_is_identity) {
    out = model.mass_inverse * out;
  }
  for (int i = 0; i < r; ++i) out[i] = w[i] + dt * out[i];
}

Eigen::MatrixXd integrate_reduced(const ReducedModel& model,
                                  const Eigen::VectorXd& w_start, double u,
                                  double dt, int steps) {
  Eigen::MatrixXd traj(model.rank(), steps + 1);
  traj.col(0) = w_start;
  Eigen::VectorXd w = w_start;
  Eigen::VectorXd next;
  for (int n = 0; n < steps; ++n) {
    reduced_flow_into(model, w, u, dt, next);
    w = next;
    traj.col(n + 1) = w;
  }
  return traj;
}

BoxDomain compute_box(const ReducedModel& model,
                      const std::vector<double>& controls, double duration,
                      double dt, double margin,
                      std::vector<std::string>* notes,
                      const std::vector<Eigen::VectorXd>& extra_starts) {
  if (controls.empty()) {
    throw std::invalid_argument("compute_box: control set is empty");
  }
  if (!(duration > 0.0) || !(dt > 0.0)) {
    throw std::invalid_argument("compute_box: duration and dt must be positive");
  }
  if (margin < 0.0) {
    throw std::invalid_argument("compute_box: margin must be non-negative");
  }
  // The scheme assumes a symmetric control set; warn when it is not.
  for (double u : controls) {
    bool mirrored = false;
    for (double v : controls) {
      if (std::abs(u + v) <= 1e-12 * std::max(1.0, std::abs(u))) {
        mirrored = true;
        break;
      }
    }
    if (!mirrored) {
      if (notes) {
        notes->push_back("control set is not symmetric: missing -(" +
                         std::to_string(u) + ")");
      }
      break;
    }
  }

  const int steps = std::max(1, static_cast<int>(std::ceil(duration / dt - 1e-9)));
  std::vector<Eigen::VectorXd> starts;
  starts.push_back(model.w0);
  for (const auto& s : extra_starts) starts.push_back(s);

  const int r = model.rank();
  Eigen::VectorXd lo = starts.front();
  Eigen::VectorXd hi = starts.front();
  Eigen::VectorXd next;
  for (double u : controls) {
    for (const auto& start : starts) {
      Eigen::VectorXd w = start;
      lo = lo.cwiseMin(w);
      hi = hi.cwiseMax(w);
      for (int n = 0; n < steps; ++n) {
        reduced_flow_into(model, w, u, dt, next);
        w = next;
        if (!w.allFinite() || w.cwiseAbs().maxCoeff() > kDivergenceGuard) {
          std::ostringstream msg;
          msg << "compute_box: constant-control trajectory diverged for u = "
              << u << " at step " << n + 1;
          throw std::runtime_error(msg.str());
        }
        lo = lo.cwiseMin(w);
        hi = hi.cwiseMax(w);
      }
    }
  }

  BoxDomain box;
  box.lo.resize(r);
  box.hi.resize(r);
  for (int i = 0; i < r; ++i) {
    const double width = hi[i] - lo[i];
    box.lo[i] = lo[i] - margin * width;
    box.hi[i] = hi[i] + margin * width;
    if (box.hi[i] - box.lo[i] < kMinBoxWidth) {
      const double mid = 0.5 * (box.lo[i] + box.hi[i]);
      box.lo[i] = mid - 0.5 * kMinBoxWidth;
      box.hi[i] = mid + 0.5 * kMinBoxWidth;
    }
    if (notes) {
      notes->push_back("box dim " + std::to_string(i) + " width " +
                       std::to_string(box.hi[i] - box.lo[i]));
    }
  }
  return box;
}

}  // namespace podhjb
