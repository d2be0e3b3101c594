#include "aoc/direct.hpp"

#include <cmath>
#include <limits>

#include "aoc/errors.hpp"
#include "aoc/parallel.hpp"

namespace aoc {

void check_config(const TranscriptionConfig& config)
{
  if (config.segments < 2)
    throw Error("transcription: need at least 2 segments");
  if (config.steps_per_segment < 2 || config.steps_per_segment % 2 != 0)
    throw Error("transcription: steps_per_segment must be even and >= 2");
  if (!(config.penalty_weight > 0.0))
    throw Error("transcription: penalty_weight must be positive");
  if (!(config.grad_step > 0.0))
    throw Error("transcription: grad_step must be positive");
}

ObjectiveBreakdown evaluate_transcription(const GroupModel& gm, const CostModel& cost,
                                          const BoundaryProblem& problem, const Eigen::MatrixXd& U,
                                          const TranscriptionConfig& config, Trajectory* trajectory)
{
  check_config(config);
  check_problem(gm, problem);
  const LieAlgebraModel& A = gm.algebra();
  const int N = config.segments;
  if (U.rows() != N || U.cols() != A.actuated_dim())
    throw DimensionMismatch("transcription: U must be segments x m");

  const int sub = config.steps_per_segment;
  const double h = problem.T / (static_cast<double>(N) * sub);

  GroupElement x = problem.x0;
  Eigen::VectorXd y = problem.y0;
  Eigen::VectorXd u;
  const CoupledField field = [&](double, const GroupElement&, const Eigen::VectorXd& yy, AlgebraVector& body,
                                 Eigen::VectorXd& ydot) {
    body = yy;
    ydot = bias(A, yy) + embed_control(A, u);
  };

  if (trajectory)
  {
    *trajectory = Trajectory{};
    trajectory->times.push_back(0.0);
    trajectory->states.push_back({x, y});
    trajectory->controls.push_back(U.row(0).transpose());
  }

  ObjectiveBreakdown out;
  std::vector<double> L(sub + 1);
  for (int seg = 0; seg < N; ++seg)
  {
    u = U.row(seg).transpose();
    L[0] = cost.eval({x, y}, u);
    for (int j = 0; j < sub; ++j)
    {
      const int step = seg * sub + j;
      rkmk4_step(gm, field, step * h, h, x, y);
      if (!x.allFinite() || !y.allFinite())
        throw NonFinite(static_cast<std::size_t>(step + 1));
      L[j + 1] = cost.eval({x, y}, u);
      if (trajectory)
      {
        const bool last = (step + 1 == N * sub);
        trajectory->times.push_back(last ? problem.T : (step + 1) * h);
        trajectory->states.push_back({x, y});
        // Grid points on a segment boundary report the segment that starts there.
        const int next_seg = (j + 1 == sub && !last) ? seg + 1 : seg;
        trajectory->controls.push_back(U.row(next_seg).transpose());
      }
    }
    double seg_cost = 0.0;
    for (int j = 0; j + 2 <= sub; j += 2)
      seg_cost += h / 3.0 * (L[j] + 4.0 * L[j + 1] + L[j + 2]);
    out.running_cost += seg_cost;
  }

  const Eigen::VectorXd pos_err = log_map(gm, group_inverse(gm, x) * problem.xT);
  out.boundary_error = pos_err.squaredNorm() + (y - problem.yT).squaredNorm();
  out.total = out.running_cost + config.penalty_weight * out.boundary_error;
  return out;
}

double transcription_objective(const GroupModel& gm, const CostModel& cost, const BoundaryProblem& problem,
                               const Eigen::MatrixXd& U, const TranscriptionConfig& config)
{
  return evaluate_transcription(gm, cost, problem, U, config).total;
}

Eigen::MatrixXd sample_controls(const ControlSignal& u, int segments, int m, double T)
{
  Eigen::MatrixXd U(segments, m);
  for (int k = 0; k < segments; ++k)
    U.row(k) = u((k + 0.5) * T / segments).transpose();
  return U;
}

namespace {

constexpr double kArmijo = 1e-4;

double safe_objective(const GroupModel& gm, const CostModel& cost, const BoundaryProblem& problem,
                      const Eigen::MatrixXd& U, const TranscriptionConfig& config)
{
  try
  {
    const double f = transcription_objective(gm, cost, problem, U, config);
    return std::isfinite(f) ? f : std::numeric_limits<double>::infinity();
  }
  catch (const Error&)
  {
    return std::numeric_limits<double>::infinity();
  }
}

Eigen::MatrixXd fd_gradient(const GroupModel& gm, const CostModel& cost, const BoundaryProblem& problem,
                            const Eigen::MatrixXd& U, const TranscriptionConfig& config)
{
  Eigen::MatrixXd G(U.rows(), U.cols());
  const auto count = static_cast<std::size_t>(U.size());
  parallel_for(count, [&](std::size_t idx) {
    const auto i = static_cast<Eigen::Index>(idx);
    Eigen::MatrixXd Up = U;
    Eigen::MatrixXd Um = U;
    Up(i) += config.grad_step;
    Um(i) -= config.grad_step;
    G(i) = (transcription_objective(gm, cost, problem, Up, config) -
            transcription_objective(gm, cost, problem, Um, config)) /
           (2.0 * config.grad_step);
  });
  return G;
}

struct PhaseOutcome
{
  int iterations = 0;
  bool converged = false;
  double grad_norm = 0.0;
};

PhaseOutcome descend(const GroupModel& gm, const CostModel& cost, const BoundaryProblem& problem,
                     const TranscriptionConfig& config, int budget, Eigen::MatrixXd& U)
{
  PhaseOutcome out;
  double f = transcription_objective(gm, cost, problem, U, config);
  Eigen::MatrixXd g = fd_gradient(gm, cost, problem, U, config);
  Eigen::MatrixXd g_prev;
  Eigen::MatrixXd d;
  double alpha = config.initial_step;

  for (int it = 0; it < budget; ++it)
  {
    out.grad_norm = g.lpNorm<Eigen::Infinity>();
    if (out.grad_norm < config.grad_tol)
    {
      out.converged = true;
      return out;
    }
    out.iterations = it + 1;

    if (it == 0)
    {
      d = -g;
    }
    else
    {
      const double beta = std::max(0.0, (g.array() * (g - g_prev).array()).sum() / g_prev.squaredNorm());
      d = -g + beta * d;
    }
    double slope = (g.array() * d.array()).sum();
    if (slope >= 0.0)
    {
      d = -g;
      slope = -g.squaredNorm();
    }

    // Trial step, then the minimiser of the quadratic through f(0), f'(0), f(trial).
    double trial = alpha;
    double f_trial = safe_objective(gm, cost, problem, U + trial * d, config);
    double step = trial;
    double f_step = f_trial;
    if (std::isfinite(f_trial))
    {
      const double curvature = f_trial - f - slope * trial;
      if (curvature > 0.0)
      {
        const double a_star = -slope * trial * trial / (2.0 * curvature);
        const double f_star = safe_objective(gm, cost, problem, U + a_star * d, config);
        if (f_star < f_step)
        {
          step = a_star;
          f_step = f_star;
        }
      }
    }
    while (!(f_step <= f + kArmijo * step * slope) && step > 1e-20)
    {
      step *= 0.5;
      f_step = safe_objective(gm, cost, problem, U + step * d, config);
    }
    if (!(f_step <= f + kArmijo * step * slope))
      return out;  // line search failed: no further progress possible

    U += step * d;
    f = f_step;
    alpha = 2.0 * step;
    g_prev = std::move(g);
    g = fd_gradient(gm, cost, problem, U, config);
  }
  out.grad_norm = g.lpNorm<Eigen::Infinity>();
  out.converged = out.grad_norm < config.grad_tol;
  return out;
}

}  // namespace

DirectResult optimize_direct(const GroupModel& gm, const CostModel& cost, const BoundaryProblem& problem,
                             const TranscriptionConfig& config, const std::optional<Eigen::MatrixXd>& initial_U)
{
  check_config(config);
  check_problem(gm, problem);
  const int m = gm.algebra().actuated_dim();

  DirectResult result;
  result.U = initial_U ? *initial_U : Eigen::MatrixXd::Zero(config.segments, m);
  if (result.U.rows() != config.segments || result.U.cols() != m)
    throw DimensionMismatch("optimize_direct: initial U must be segments x m");

  TranscriptionConfig phase = config;
  PhaseOutcome o = descend(gm, cost, problem, phase, config.max_outer, result.U);
  result.iterations = o.iterations;
  result.converged = o.converged;
  result.grad_norm = o.grad_norm;
  if (o.converged && config.escalate_penalty && result.iterations < config.max_outer)
  {
    phase.penalty_weight *= 10.0;
    o = descend(gm, cost, problem, phase, config.max_outer - result.iterations, result.U);
    result.iterations += o.iterations;
    result.converged = o.converged;
    result.grad_norm = o.grad_norm;
  }

  const ObjectiveBreakdown b = evaluate_transcription(gm, cost, problem, result.U, phase, &result.trajectory);
  result.objective = b.total;
  result.running_cost = b.running_cost;
  result.boundary_error = b.boundary_error;
  return result;
}

}  // namespace aoc
