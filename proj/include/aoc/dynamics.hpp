#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "aoc/algebra.hpp"
#include "aoc/group.hpp"

namespace aoc {

/// Configuration and body velocity.
struct State
{
  GroupElement x;
  AlgebraVector y;
};

/// Left-trivialized costate (mu pairs with x, xi with y).
struct Costate
{
  AlgebraCovector mu;
  AlgebraCovector xi;
};

/// Time -> m-vector of control components along E_1..E_m.
using ControlSignal = std::function<Eigen::VectorXd(double)>;

ControlSignal zero_control(int m);
/// Piecewise-linear interpolation of samples (held constant outside the range).
ControlSignal interpolated_control(std::vector<double> times, std::vector<Eigen::VectorXd> values);
/// Zero-order hold: U.row(k) applies on [k T/N, (k+1) T/N).
ControlSignal piecewise_constant_control(Eigen::MatrixXd U, double T);

struct Trajectory
{
  std::vector<double> times;
  std::vector<State> states;
  std::vector<Eigen::VectorXd> controls;
  std::optional<std::vector<Costate>> costates;
  std::optional<std::vector<double>> hamiltonian;

  std::size_t size() const { return times.size(); }
  /// Equal lengths and strictly increasing times.
  bool consistent() const;
};

struct EpRate
{
  AlgebraVector ydot;
  /// Body direction of dx/dt; dx/dt = x hat(body).
  AlgebraVector body;
};

/// Controlled Euler-Poincare right-hand side: ydot = bias(y) + embed(u).
EpRate ep_rhs(const LieAlgebraModel& model, const State& s, const Eigen::VectorXd& u);

/// Body form of the covariant acceleration: ydot - bias(y).
AlgebraVector covariant_acceleration(const LieAlgebraModel& model, const AlgebraVector& y, const AlgebraVector& ydot);

/// Uniform-grid RKMK4 simulation; controls are sampled at stage times.
/// Throws NonFinite with the offending step index.
Trajectory simulate(const GroupModel& gm, const State& s0, const ControlSignal& u, double T, int steps);

/// Kinetic energy 0.5 I(y, y).
double kinetic_energy(const LieAlgebraModel& model, const AlgebraVector& y);

bool all_finite(const Eigen::MatrixXd& m);

}  // namespace aoc
