#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "aoc/dynamics.hpp"
#include "aoc/group.hpp"
#include "aoc/pmp.hpp"

namespace aoc {

/// Fixed-time two-point problem with prescribed configurations and body velocities.
struct BoundaryProblem
{
  GroupElement x0;
  GroupElement xT;
  AlgebraVector y0;
  AlgebraVector yT;
  double T = 1.0;
  int steps = 200;
};

void check_problem(const GroupModel& gm, const BoundaryProblem& problem);

struct ShootingOptions
{
  double tol = 1e-8;
  int max_iter = 200;
  /// Relative column step of the finite-difference Jacobian.
  double fd_step = 1e-6;
  double initial_damping = 1e-3;
  int multistart_seeds = 8;
  std::uint64_t seed = 0;
};

struct ShootingResult
{
  AlgebraCovector mu0;
  AlgebraCovector xi0;
  double residual_norm = 0.0;
  int iterations = 0;
  Trajectory trajectory;
  bool converged = false;
  /// Integral of the running cost along the trajectory.
  double cost = 0.0;
  /// Index of the multi-start seed that produced the result (-1: user guess).
  int start_index = -1;
};

/// (log(x(T)^-1 xT), yT - y(T)) for the extremal flow from (mu0, xi0).
Eigen::VectorXd boundary_residual(const GroupModel& gm, const CostModel& cost, const BoundaryProblem& problem,
                                  const AlgebraCovector& mu0, const AlgebraCovector& xi0);

/// Levenberg-Marquardt on the initial costate. Never throws NoConvergence:
/// the best iterate is returned with converged = false.
ShootingResult solve_shooting(const GroupModel& gm, const CostModel& cost, const BoundaryProblem& problem,
                              const std::optional<Eigen::VectorXd>& initial_guess = std::nullopt,
                              const ShootingOptions& options = {});

/// Deterministic multi-start seeds: the zero costate followed by random
/// directions scaled by +-1 and +-10.
std::vector<Eigen::VectorXd> multistart_seeds(int n, int count, std::uint64_t seed);

}  // namespace aoc
