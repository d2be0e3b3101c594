#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "aoc/algebra.hpp"
#include "aoc/dynamics.hpp"
#include "aoc/group.hpp"

namespace aoc {

/// Running cost L(x, y, u) with its left-trivialized partial derivatives.
struct CostModel
{
  std::string kind = "custom";
  std::function<double(const State&, const Eigen::VectorXd&)> eval;
  /// T_e^* L_x dL/dx, i.e. d/ds L(x exp(s E_i), y, u) at s = 0.
  std::function<AlgebraCovector(const State&, const Eigen::VectorXd&)> dL_dx_triv;
  std::function<AlgebraCovector(const State&, const Eigen::VectorXd&)> dL_dy;
  std::function<Eigen::VectorXd(const State&, const Eigen::VectorXd&)> dL_du;
  std::function<Eigen::MatrixXd(const State&, const Eigen::VectorXd&)> d2L_du2;
  bool x_independent = true;
  /// Set when L = 0.5 u^T R u exactly; enables closed-form control elimination.
  std::optional<Eigen::MatrixXd> quadratic_weight;
};

/// L = 0.5 I(u, u) restricted to the actuated subspace.
CostModel min_acc_cost(const LieAlgebraModel& model);
/// L = 0.5 u^T R u.
CostModel quadratic_cost(const Eigen::MatrixXd& R);

inline constexpr double kCostFdStep = 1e-6;
inline constexpr double kCheckFdStep = 1e-5;

/// Central-difference trivialized x-derivative of any scalar function of the
/// state: varies x along x exp(s E_i) with step rel_step (1 + ||x||).
AlgebraCovector fd_trivialized_dx(const GroupModel& gm, const std::function<double(const State&)>& f,
                                  const State& s, double rel_step = kCostFdStep);

/// Fills in dL_dx_triv by finite differences of eval; clears x_independent.
CostModel with_fd_x_derivative(CostModel cost, const GroupModel& gm, double rel_step = kCostFdStep);

struct ExtremalPoint
{
  State state;
  Costate costate;
  Eigen::VectorXd u;
};

double hamiltonian(const LieAlgebraModel& model, const CostModel& cost, const ExtremalPoint& a);

inline constexpr double kRegularityDetTol = 1e-10;

/// Solves dL/du(s, u) = xi restricted to the actuated components.
/// Throws SingularRegularity or NoConvergence.
Eigen::VectorXd eliminate_control(const LieAlgebraModel& model, const CostModel& cost, const State& s,
                                  const AlgebraCovector& xi);

struct ExtremalRate
{
  AlgebraVector body;  // dx/dt = x hat(body)
  AlgebraVector ydot;
  AlgebraCovector mudot;
  AlgebraCovector xidot;
};

/// Critical-trajectory vector field at a point already satisfying stationarity.
ExtremalRate extremal_rhs(const LieAlgebraModel& model, const CostModel& cost, const ExtremalPoint& a);

/// extremal_rhs for the minimum covariant acceleration cost with the control eliminated inline.
ExtremalRate min_acc_rhs(const LieAlgebraModel& model, const State& s, const Costate& p);

/// Integrates the extremal flow from (state0, costate0); records u(t) and H(t).
/// Errors carry the step index.
Trajectory flow_extremal(const GroupModel& gm, const CostModel& cost, const State& state0, const Costate& costate0,
                         double T, int steps);

/// Left-trivialized tangent vector (z, w; v_mu, v_xi) at (x, y; mu, xi).
struct TangentTuple
{
  AlgebraVector z;
  AlgebraVector w;
  AlgebraCovector v_mu;
  AlgebraCovector v_xi;
};

/// Omega(A, B) = v'_mu(z) + v'_xi(w) - v_mu(z') - v_xi(w') + mu([z, z']).
double symplectic_form_eval(const LieAlgebraModel& model, const AlgebraCovector& mu, const TangentTuple& A,
                            const TangentTuple& B);

/// Max over random directions V of |Omega(X_H, V) - dH(V)|, with dH taken by
/// five-point central differences (control re-eliminated at each perturbed point).
double hamiltonian_field_check(const GroupModel& gm, const CostModel& cost, const ExtremalPoint& a,
                               int n_directions, double fd_step = kCheckFdStep, std::uint64_t seed = 7);

struct PhasePoint
{
  State state;
  Costate costate;
};

/// Functional derivatives of an observable at a phase point.
struct ObservableDerivatives
{
  AlgebraCovector dx_triv;
  AlgebraCovector dy;
  AlgebraVector dmu;
  AlgebraVector dxi;
};

struct Observable
{
  std::function<double(const PhasePoint&)> value;
  /// Optional analytic derivatives; finite differences are used when empty.
  std::function<ObservableDerivatives(const PhasePoint&)> derivatives;
};

ObservableDerivatives fd_derivatives(const GroupModel& gm, const Observable& f, const PhasePoint& p,
                                     double step = kCheckFdStep);

enum class Coordinate
{
  y,
  mu,
  xi
};

Observable coordinate_observable(int n, Coordinate which, int index);

/// H with the control eliminated at each evaluation.
Observable hamiltonian_observable(const GroupModel& gm, const CostModel& cost);

/// Linear Poisson bracket on G x g x 2g*.
double poisson_bracket(const GroupModel& gm, const Observable& f, const Observable& g, const PhasePoint& p,
                       double fd_step = kCheckFdStep);

/// Covector pi with <pi, z> = <mu, Ad_{x^-1} z>.
AlgebraCovector spatial_momentum(const GroupModel& gm, const GroupElement& x, const AlgebraCovector& mu);

/// Integral of L along the stored trajectory (composite Simpson).
double trajectory_cost(const CostModel& cost, const Trajectory& traj);

/// Max pointwise mismatch between five-point finite-difference derivatives of
/// a stored extremal trajectory and extremal_rhs, over interior grid points.
double extremal_defect(const GroupModel& gm, const CostModel& cost, const Trajectory& traj);

}  // namespace aoc
