// Copyright (c) 2026, the podhjb developers.
// SPDX-License-Identifier: Apache-2.0

#include "podhjb/pde.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

using namespace podhjb;

TEST(MakeGrid, CountsMatchKnownConfigurations) {
  const Grid1D g = make_grid(-1.0, 4.0, 0.1, 3.0, 0.008);
  EXPECT_EQ(g.nodes, 51);
  EXPECT_EQ(g.steps, 375);

  const Grid1D tiny = make_grid(0.0, 1.0, 0.5, 1.0, 0.5);
  EXPECT_EQ(tiny.nodes, 3);
  EXPECT_EQ(tiny.steps, 2);
}

TEST(MakeGrid, RejectsNonCommensurateSteps) {
  // 5/0.012 = 416.67 is not an integer.
  try {
    make_grid(-1.0, 4.0, 0.02, 5.0, 0.012);
    FAIL() << "expected rejection";
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("T"), std::string::npos);
    EXPECT_NE(msg.find("dt"), std::string::npos);
  }
  EXPECT_THROW(make_grid(0.0, 1.0, 0.3, 1.0, 0.5), std::invalid_argument);
  EXPECT_THROW(make_grid(1.0, 0.0, 0.1, 1.0, 0.5), std::invalid_argument);
}

TEST(MakeGrid, CommensurateAdjustmentRoundsDown) {
  const double adjusted = commensurate_dt(5.0, 0.012);
  EXPECT_DOUBLE_EQ(adjusted, 5.0 / 417.0);
  EXPECT_LE(adjusted, 0.012);
  // Already commensurate steps pass through unchanged.
  EXPECT_DOUBLE_EQ(commensurate_dt(3.0, 0.008), 0.008);
}

TEST(FdStep, ZeroStateIsFixedPoint) {
  const Grid1D g = make_grid(0.0, 1.0, 0.1, 1.0, 0.01);
  const PdeParams p{0.1, 0.5};
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(g.nodes);
  EXPECT_EQ(fd_step(zero, p, 0.0, g), zero);
}

TEST(FdStep, ConstantSourceFillsInterior) {
  const Grid1D g = make_grid(0.0, 1.0, 0.1, 1.0, 0.01);
  const PdeParams p{0.1, 0.0};
  const double kappa = 2.5;
  const Eigen::VectorXd next =
      fd_step(Eigen::VectorXd::Zero(g.nodes), p, kappa, g);
  EXPECT_DOUBLE_EQ(next[0], 0.0);
  EXPECT_DOUBLE_EQ(next[g.nodes - 1], 0.0);
  for (int i = 1; i + 1 < g.nodes; ++i) {
    EXPECT_DOUBLE_EQ(next[i], g.dt * kappa);
  }
}

TEST(FdStep, UpwindStencilHandComputed) {
  // Pure advection, c > 0: the one-sided difference looks left.
  const Grid1D g = make_grid(0.0, 4.0, 1.0, 1.0, 0.2);
  const PdeParams p{0.0, 1.0};
  Eigen::VectorXd hat(5);
  hat << 0.0, 1.0, 2.0, 1.0, 0.0;
  const Eigen::VectorXd next = fd_step(hat, p, 0.0, g);
  // y_i - dt*(y_i - y_{i-1})/dx, worked by hand on the 5-node grid.
  EXPECT_DOUBLE_EQ(next[1], 0.8);
  EXPECT_DOUBLE_EQ(next[2], 1.8);
  EXPECT_DOUBLE_EQ(next[3], 1.2);
  EXPECT_DOUBLE_EQ(next[0], 0.0);
  EXPECT_DOUBLE_EQ(next[4], 0.0);
}

TEST(FdStep, RejectsCflViolation) {
  const PdeParams p{0.1, 0.0};
  // dt = 0.1 > dx^2/(2 eps) = 0.05.
  const Grid1D g = make_grid(0.0, 1.0, 0.1, 1.0, 0.1);
  try {
    fd_step(Eigen::VectorXd::Zero(g.nodes), p, 0.0, g);
    FAIL() << "expected rejection";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("CFL"), std::string::npos);
  }
}

TEST(FdStep, MatchesDenseOperator) {
  const Grid1D g = make_grid(-1.0, 1.0, 0.1, 1.0, 0.01);
  const PdeParams p{0.05, -0.7};
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd y(g.nodes);
  for (int i = 0; i < g.nodes; ++i) y[i] = dist(rng);
  y[0] = 0.0;
  y[g.nodes - 1] = 0.0;
  const double u = 0.3;
  const Eigen::VectorXd via_matrix =
      y + g.dt * (full_operator(p, g) * y + u * control_injection(g));
  const Eigen::VectorXd via_stencil = fd_step(y, p, u, g);
  EXPECT_LT((via_matrix - via_stencil).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Simulate, ZeroInitialZeroControlStaysZero) {
  const Grid1D g = make_grid(0.0, 1.0, 0.1, 1.0, 0.01);
  const PdeParams p{0.05, 1.0};
  const auto snaps = simulate(Eigen::VectorXd::Zero(g.nodes),
                              ControlSignal(g.steps, 0.0), p, g);
  EXPECT_EQ(snaps.data.cols(), g.steps + 1);
  EXPECT_DOUBLE_EQ(snaps.data.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Simulate, HeatEnergyDecays) {
  // Heat configuration: eps = 1/60, c = 0, parabola initial datum. The
  // quoted step 0.012 does not divide T = 5 and is rounded down.
  const double dt = commensurate_dt(5.0, 0.012);
  const Grid1D g = make_grid(-1.0, 4.0, 0.02, 5.0, dt);
  const PdeParams p{1.0 / 60.0, 0.0};
  const auto snaps =
      simulate(initial_parabola(g), ControlSignal(g.steps, 0.0), p, g);
  const double sup0 = snaps.data.col(0).cwiseAbs().maxCoeff();
  const double supT = snaps.data.rightCols<1>().cwiseAbs().maxCoeff();
  EXPECT_LT(supT, sup0);
}

TEST(Simulate, AdvectionTransportsTheBump) {
  const Grid1D g = make_grid(-1.0, 4.0, 0.1, 3.0, 0.008);
  const PdeParams p{0.05, 1.0};
  const auto snaps =
      simulate(initial_parabola(g), ControlSignal(g.steps, 0.0), p, g);
  const Eigen::VectorXd last = snaps.data.rightCols<1>();
  int arg_max = 0;
  last.maxCoeff(&arg_max);
  // The bump starts centred at x = 0.5 and is carried with speed 1 for 3
  // time units, spreading as it goes.
  EXPECT_GT(g.x(arg_max), 2.5);
  EXPECT_LT(last.maxCoeff(), 1.25);
  EXPECT_GT(last.maxCoeff(), 0.0);
}

TEST(Simulate, DivergenceNamesTheStep) {
  // The CFL guard keeps the linear part stable, so non-finite states can only
  // enter through the data; the guard must name the step where they appear.
  const Grid1D g = make_grid(0.0, 1.0, 0.1, 1.0, 0.01);
  const PdeParams p{0.1, 0.0};
  ControlSignal u(g.steps, 0.0);
  u[5] = std::numeric_limits<double>::infinity();
  try {
    simulate(Eigen::VectorXd::Zero(g.nodes), u, p, g);
    FAIL() << "expected divergence";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("step 6"), std::string::npos);
  }
}

TEST(Simulate, MaximumPrincipleWithoutAdvection) {
  const Grid1D g = make_grid(-1.0, 4.0, 0.1, 5.0, 0.25);
  const PdeParams p{1.0 / 60.0, 0.0};
  const auto snaps =
      simulate(initial_parabola(g), ControlSignal(g.steps, 0.0), p, g);
  double prev = snaps.data.col(0).cwiseAbs().maxCoeff();
  for (int n = 1; n <= g.steps; ++n) {
    const double cur = snaps.data.col(n).cwiseAbs().maxCoeff();
    EXPECT_LE(cur, prev + 1e-15);
    prev = cur;
  }
}

TEST(Simulate, LinearInStateAndControl) {
  const Grid1D g = make_grid(-1.0, 4.0, 0.1, 3.0, 0.008);
  const PdeParams p{0.05, 1.0};
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd y0(g.nodes);
  for (int i = 0; i < g.nodes; ++i) y0[i] = dist(rng);
  ControlSignal u(g.steps);
  for (auto& v : u) v = dist(rng);
  const double alpha = -2.75;
  ControlSignal scaled_u(g.steps);
  for (int n = 0; n < g.steps; ++n) scaled_u[n] = alpha * u[n];

  const auto base = simulate(y0, u, p, g);
  const auto scaled = simulate(alpha * y0, scaled_u, p, g);
  const double denom = base.data.norm() * std::abs(alpha);
  EXPECT_LT((scaled.data - alpha * base.data).norm() / denom, 1e-12);
}

TEST(Simulate, BoundariesClampToZero) {
  const Grid1D g = make_grid(-1.0, 4.0, 0.1, 3.0, 0.008);
  const PdeParams p{0.05, 1.0};
  Eigen::VectorXd y0 = initial_parabola(g);
  y0[0] = 0.7;  // deliberately dirty boundary value
  const auto snaps = simulate(y0, ControlSignal(g.steps, 1.0), p, g);
  for (int n = 0; n <= g.steps; ++n) {
    EXPECT_EQ(snaps.data(0, n), 0.0);
    EXPECT_EQ(snaps.data(g.nodes - 1, n), 0.0);
  }
}

TEST(InitialData, PointwiseValues) {
  const Grid1D g = make_grid(-1.0, 4.0, 0.5, 1.0, 0.5);
  const Eigen::VectorXd parabola = initial_parabola(g);
  EXPECT_DOUBLE_EQ(parabola[3], 1.25);  // x = 0.5
  EXPECT_DOUBLE_EQ(parabola[1], 0.0);   // x = -0.5, outside [0,1]
  const Eigen::VectorXd hat = initial_hat(g);
  EXPECT_DOUBLE_EQ(hat[2], 1.0);  // x = 0
  EXPECT_DOUBLE_EQ(hat[4], 0.0);  // x = 1 gives 0, clipped beyond
  EXPECT_DOUBLE_EQ(hat[5], 0.0);  // x = 1.5, clipped
}

TEST(SnapshotCsv, RoundTripsExactly) {
  const Grid1D g = make_grid(0.0, 1.0, 0.25, 1.0, 0.25);
  const PdeParams p{0.01, 0.3};
  const auto snaps = simulate(initial_hat(g), ControlSignal(g.steps, 0.5), p, g);
  const auto path = std::filesystem::temp_directory_path() / "podhjb_snaps.csv";
  write_snapshot_csv(path, snaps);
  const auto back = read_snapshot_csv(path);
  EXPECT_EQ(back.data, snaps.data);
  EXPECT_EQ(back.times, snaps.times);
  std::filesystem::remove(path);
}
