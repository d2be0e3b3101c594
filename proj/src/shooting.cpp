#include "aoc/shooting.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <random>

#include "aoc/errors.hpp"
#include "aoc/parallel.hpp"

namespace aoc {

namespace {

struct Evaluation
{
  bool ok = false;
  Eigen::VectorXd residual;
};

Evaluation try_residual(const GroupModel& gm, const CostModel& cost, const BoundaryProblem& problem,
                        const Eigen::VectorXd& p)
{
  const int n = gm.algebra().dim();
  try
  {
    Eigen::VectorXd r = boundary_residual(gm, cost, problem, p.head(n), p.tail(n));
    if (!r.allFinite())
      return {};
    return {true, std::move(r)};
  }
  catch (const Error&)
  {
    return {};
  }
}

struct LmOutcome
{
  Eigen::VectorXd p;
  Eigen::VectorXd residual;
  int iterations = 0;
  bool valid = false;
};

LmOutcome levenberg_marquardt(const GroupModel& gm, const CostModel& cost, const BoundaryProblem& problem,
                              Eigen::VectorXd p, const ShootingOptions& opt)
{
  LmOutcome out;
  Evaluation current = try_residual(gm, cost, problem, p);
  if (!current.ok)
    return out;
  out.valid = true;
  out.p = p;
  out.residual = current.residual;

  const auto dim = p.size();
  double lambda = opt.initial_damping;
  for (int it = 0; it < opt.max_iter; ++it)
  {
    if (out.residual.lpNorm<Eigen::Infinity>() < opt.tol)
      break;
    out.iterations = it + 1;

    Eigen::MatrixXd J(out.residual.size(), dim);
    std::atomic<bool> jac_ok{true};
    parallel_for(static_cast<std::size_t>(dim), [&](std::size_t c) {
      const auto col = static_cast<Eigen::Index>(c);
      const double h = opt.fd_step * (1.0 + std::abs(out.p(col)));
      Eigen::VectorXd pp = out.p;
      Eigen::VectorXd pm = out.p;
      pp(col) += h;
      pm(col) -= h;
      const Evaluation ep = try_residual(gm, cost, problem, pp);
      const Evaluation em = try_residual(gm, cost, problem, pm);
      if (!ep.ok || !em.ok)
      {
        jac_ok = false;
        return;
      }
      J.col(col) = (ep.residual - em.residual) / (2.0 * h);
    });
    if (!jac_ok)
      break;

    const Eigen::MatrixXd JtJ = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * out.residual;
    const double scale = std::max(JtJ.diagonal().maxCoeff(), 1e-12);
    const double rnorm = out.residual.squaredNorm();

    bool accepted = false;
    while (lambda < 1e12)
    {
      Eigen::MatrixXd M = JtJ;
      M.diagonal().array() += lambda * scale;
      const Eigen::VectorXd step = M.ldlt().solve(-g);
      const Eigen::VectorXd trial = out.p + step;
      const Evaluation e = try_residual(gm, cost, problem, trial);
      if (e.ok && e.residual.squaredNorm() < rnorm)
      {
        out.p = trial;
        out.residual = e.residual;
        lambda = std::max(lambda / 10.0, 1e-15);
        accepted = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted)
      break;
  }
  return out;
}

}  // namespace

void check_problem(const GroupModel& gm, const BoundaryProblem& problem)
{
  const int d = gm.rep_dim();
  if (!(problem.T > 0.0))
    throw Error("boundary problem: T must be positive");
  if (problem.steps < 1)
    throw Error("boundary problem: steps must be >= 1");
  if (problem.x0.rows() != d || problem.x0.cols() != d || problem.xT.rows() != d || problem.xT.cols() != d)
    throw DimensionMismatch("boundary problem: group elements have wrong size");
  gm.algebra().check_dim(problem.y0, "boundary problem y0");
  gm.algebra().check_dim(problem.yT, "boundary problem yT");
}

Eigen::VectorXd boundary_residual(const GroupModel& gm, const CostModel& cost, const BoundaryProblem& problem,
                                  const AlgebraCovector& mu0, const AlgebraCovector& xi0)
{
  check_problem(gm, problem);
  const Trajectory traj = flow_extremal(gm, cost, {problem.x0, problem.y0}, {mu0, xi0}, problem.T, problem.steps);
  const State& end = traj.states.back();
  const int n = gm.algebra().dim();
  Eigen::VectorXd r(2 * n);
  r << log_map(gm, group_inverse(gm, end.x) * problem.xT), problem.yT - end.y;
  return r;
}

std::vector<Eigen::VectorXd> multistart_seeds(int n, int count, std::uint64_t seed)
{
  static constexpr double kScales[] = {1.0, -1.0, 10.0, -10.0};
  std::vector<Eigen::VectorXd> seeds;
  if (count <= 0)
    return seeds;
  seeds.push_back(Eigen::VectorXd::Zero(2 * n));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (int s = 1; s < count; ++s)
  {
    Eigen::VectorXd dir(2 * n);
    for (int i = 0; i < 2 * n; ++i)
      dir(i) = normal(rng);
    dir.normalize();
    seeds.push_back(kScales[(s - 1) % 4] * dir);
  }
  return seeds;
}

ShootingResult solve_shooting(const GroupModel& gm, const CostModel& cost, const BoundaryProblem& problem,
                              const std::optional<Eigen::VectorXd>& initial_guess, const ShootingOptions& options)
{
  check_problem(gm, problem);
  const int n = gm.algebra().dim();

  std::vector<Eigen::VectorXd> starts;
  if (initial_guess)
  {
    if (initial_guess->size() != 2 * n)
      throw DimensionMismatch("shooting guess must have 2n components");
    starts.push_back(*initial_guess);
  }
  else
  {
    starts = multistart_seeds(n, options.multistart_seeds, options.seed);
  }

  LmOutcome best;
  int best_index = -1;
  int total_iterations = 0;
  double best_norm = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < starts.size(); ++s)
  {
    LmOutcome o = levenberg_marquardt(gm, cost, problem, starts[s], options);
    total_iterations += o.iterations;
    if (!o.valid)
      continue;
    const double norm = o.residual.lpNorm<Eigen::Infinity>();
    if (norm < best_norm)
    {
      best_norm = norm;
      best = std::move(o);
      best_index = initial_guess ? -1 : static_cast<int>(s);
    }
    if (best_norm < options.tol)
      break;
  }

  ShootingResult result;
  result.iterations = total_iterations;
  if (!best.valid)
  {
    result.mu0 = AlgebraCovector::Zero(n);
    result.xi0 = AlgebraCovector::Zero(n);
    result.residual_norm = std::numeric_limits<double>::infinity();
    return result;
  }
  result.mu0 = best.p.head(n);
  result.xi0 = best.p.tail(n);
  result.residual_norm = best_norm;
  result.converged = best_norm < options.tol;
  result.start_index = best_index;
  result.trajectory = flow_extremal(gm, cost, {problem.x0, problem.y0}, {result.mu0, result.xi0}, problem.T,
                                    problem.steps);
  result.cost = trajectory_cost(cost, result.trajectory);
  return result;
}

}  // namespace aoc
