#pragma once

#include <optional>

#include <Eigen/Dense>

#include "aoc/dynamics.hpp"
#include "aoc/group.hpp"
#include "aoc/pmp.hpp"
#include "aoc/shooting.hpp"

namespace aoc {

/// Piecewise-constant control transcription with quadratic boundary penalties.
struct TranscriptionConfig
{
  int segments = 100;
  /// Integration steps per control segment; must be even (Simpson per segment).
  int steps_per_segment = 2;
  double penalty_weight = 1e4;
  int max_outer = 400;
  double grad_step = 1e-6;
  double grad_tol = 1e-5;
  /// First trial step length of the line search.
  double initial_step = 1.0;
  /// Multiply penalty_weight by 10 once after the first convergence.
  bool escalate_penalty = true;
};

void check_config(const TranscriptionConfig& config);

struct ObjectiveBreakdown
{
  double total = 0.0;
  double running_cost = 0.0;
  /// ||log(x(T)^-1 xT)||^2 + ||y(T) - yT||^2.
  double boundary_error = 0.0;
};

/// Simulates the zero-order-hold control U (segments x m), integrates the
/// running cost segment by segment with Simpson's rule and adds the penalty.
ObjectiveBreakdown evaluate_transcription(const GroupModel& gm, const CostModel& cost,
                                          const BoundaryProblem& problem, const Eigen::MatrixXd& U,
                                          const TranscriptionConfig& config, Trajectory* trajectory = nullptr);

double transcription_objective(const GroupModel& gm, const CostModel& cost, const BoundaryProblem& problem,
                               const Eigen::MatrixXd& U, const TranscriptionConfig& config);

/// Samples a continuous control at segment midpoints.
Eigen::MatrixXd sample_controls(const ControlSignal& u, int segments, int m, double T);

struct DirectResult
{
  Eigen::MatrixXd U;
  double objective = 0.0;
  double running_cost = 0.0;
  double boundary_error = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  Trajectory trajectory;
};

/**
 * Momentum gradient descent on U with central finite-difference gradients.
 * The momentum coefficient follows the Polak-Ribiere rule (restarted when it
 * would not give a descent direction); each step is found by a line search
 * that starts from a quadratic-interpolation estimate and halves it until the
 * Armijo condition holds.
 */
DirectResult optimize_direct(const GroupModel& gm, const CostModel& cost, const BoundaryProblem& problem,
                             const TranscriptionConfig& config,
                             const std::optional<Eigen::MatrixXd>& initial_U = std::nullopt);

}  // namespace aoc
