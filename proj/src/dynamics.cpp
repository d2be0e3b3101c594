#include "aoc/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "aoc/errors.hpp"

namespace aoc {

ControlSignal zero_control(int m)
{
  return [m](double) { return Eigen::VectorXd::Zero(m).eval(); };
}

ControlSignal interpolated_control(std::vector<double> times, std::vector<Eigen::VectorXd> values)
{
  if (times.empty() || times.size() != values.size())
    throw DimensionMismatch("control samples: times and values must be non-empty and of equal length");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw DimensionMismatch("control samples: times must be strictly increasing");
  return [times = std::move(times), values = std::move(values)](double t) -> Eigen::VectorXd {
    if (t <= times.front())
      return values.front();
    if (t >= times.back())
      return values.back();
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const auto hi = static_cast<std::size_t>(it - times.begin());
    const std::size_t lo = hi - 1;
    const double w = (t - times[lo]) / (times[hi] - times[lo]);
    return (1.0 - w) * values[lo] + w * values[hi];
  };
}

ControlSignal piecewise_constant_control(Eigen::MatrixXd U, double T)
{
  const auto N = U.rows();
  return [U = std::move(U), N, T](double t) -> Eigen::VectorXd {
    // Nudge by a few ulps so that stage times landing exactly on a segment
    // boundary from rounding pick the segment they belong to.
    auto k = static_cast<Eigen::Index>(std::floor(t / T * static_cast<double>(N) + 1e-9));
    k = std::clamp<Eigen::Index>(k, 0, N - 1);
    return U.row(k).transpose();
  };
}

bool Trajectory::consistent() const
{
  const std::size_t n = times.size();
  if (states.size() != n || controls.size() != n)
    return false;
  if (costates && costates->size() != n)
    return false;
  if (hamiltonian && hamiltonian->size() != n)
    return false;
  for (std::size_t i = 1; i < n; ++i)
    if (!(times[i] > times[i - 1]))
      return false;
  return true;
}

EpRate ep_rhs(const LieAlgebraModel& model, const State& s, const Eigen::VectorXd& u)
{
  return {bias(model, s.y) + embed_control(model, u), s.y};
}

AlgebraVector covariant_acceleration(const LieAlgebraModel& model, const AlgebraVector& y, const AlgebraVector& ydot)
{
  model.check_dim(ydot, "covariant_acceleration");
  return ydot - bias(model, y);
}

double kinetic_energy(const LieAlgebraModel& model, const AlgebraVector& y)
{
  return 0.5 * inner(model, y, y);
}

bool all_finite(const Eigen::MatrixXd& m)
{
  return m.allFinite();
}

Trajectory simulate(const GroupModel& gm, const State& s0, const ControlSignal& u, double T, int steps)
{
  if (!(T > 0.0) || steps < 1)
    throw Error("simulate: need T > 0 and steps >= 1");
  const LieAlgebraModel& A = gm.algebra();
  A.check_dim(s0.y, "simulate");
  if (s0.x.rows() != gm.rep_dim() || s0.x.cols() != gm.rep_dim())
    throw DimensionMismatch("simulate: initial group element has wrong size");

  const double h = T / steps;
  const CoupledField field = [&](double t, const GroupElement&, const Eigen::VectorXd& y, AlgebraVector& body,
                                 Eigen::VectorXd& ydot) {
    body = y;
    ydot = bias(A, y) + embed_control(A, u(t));
  };

  Trajectory traj;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  traj.controls.reserve(steps + 1);

  GroupElement x = s0.x;
  Eigen::VectorXd y = s0.y;
  traj.times.push_back(0.0);
  traj.states.push_back({x, y});
  traj.controls.push_back(u(0.0));
  for (int k = 0; k < steps; ++k)
  {
    const double t = k * h;
    rkmk4_step(gm, field, t, h, x, y);
    if (!x.allFinite() || !y.allFinite())
      throw NonFinite(static_cast<std::size_t>(k + 1));
    const double t1 = (k + 1 == steps) ? T : (k + 1) * h;
    traj.times.push_back(t1);
    traj.states.push_back({x, y});
    traj.controls.push_back(u(t1));
  }
  return traj;
}

}  // namespace aoc
