// Copyright (c) 2026, the podhjb developers.
// SPDX-License-Identifier: Apache-2.0
//
// Full-order 1D advection-diffusion solver. Explicit Euler in time, centered
// second differences for diffusion, upwind one-sided differences for
// advection, homogeneous Dirichlet boundaries. The scheme is conditionally
// stable and every entry point checks the CFL bound before stepping.

#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <vector>

namespace podhjb {

// Uniform space-time grid. Node i sits at a + i*dx, time level n at n*dt.
struct Grid1D {
  double a = 0.0;
  double b = 0.0;
  double dx = 0.0;
  int nodes = 0;
  double t_final = 0.0;
  double dt = 0.0;
  int steps = 0;

  double x(int i) const { return a + i * dx; }
  double time(int n) const { return n * dt; }
};

struct PdeParams {
  double epsilon = 0.0;  // diffusion coefficient, >= 0
  double c = 0.0;        // advection speed
};

// Piecewise-constant control: value n applies on [t_n, t_{n+1}). The control
// enters the equation as a space-constant source on the interior nodes.
using ControlSignal = std::vector<double>;

struct SnapshotMatrix {
  Eigen::MatrixXd data;       // nodes x (steps+1), column j = state at times[j]
  std::vector<double> times;  // strictly increasing
};

// Rejects grids whose spans are not integer multiples of the steps
// (tolerance 1e-9 on the ratio) and degenerate node/step counts.
Grid1D make_grid(double a, double b, double dx, double t_final, double dt);

// Largest dt' <= dt with t_final/dt' integral; returns dt unchanged when the
// ratio already is. Used by runners whose quoted time steps do not divide T.
double commensurate_dt(double t_final, double dt);

// dt must stay below 1/(2*eps/dx^2 + |c|/dx); infinite when both terms vanish.
double cfl_bound(const PdeParams& params, double dx);

// Spatial right-hand side eps*y_xx - c*y_x + u evaluated with the scheme's
// stencils; zero on the boundary rows.
Eigen::VectorXd stencil_rhs(const Eigen::VectorXd& state,
                            const PdeParams& params, double u,
                            const Grid1D& grid);

Eigen::VectorXd fd_step(const Eigen::VectorXd& state, const PdeParams& params,
                        double u, const Grid1D& grid);

// Columns at t = 0, dt, ..., T inclusive; column 0 is y0 with the boundary
// values clamped to zero.
SnapshotMatrix simulate(const Eigen::VectorXd& y0, const ControlSignal& u,
                        const PdeParams& params, const Grid1D& grid);

// 5x - 5x^2 on [0,1], zero elsewhere.
Eigen::VectorXd initial_parabola(const Grid1D& grid);
// 1 - |x| clipped at zero.
Eigen::VectorXd initial_hat(const Grid1D& grid);

// Dense full-order operator matching stencil_rhs: A*y == stencil_rhs(y, 0).
Eigen::MatrixXd full_operator(const PdeParams& params, const Grid1D& grid);

// Control-to-state map: 1 on interior nodes, 0 on the boundary.
Eigen::VectorXd control_injection(const Grid1D& grid);

void write_snapshot_csv(const std::filesystem::path& path,
                        const SnapshotMatrix& snaps);
SnapshotMatrix read_snapshot_csv(const std::filesystem::path& path);

}  // namespace podhjb
