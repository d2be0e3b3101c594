#include "aoc/pmp.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>

#include "aoc/errors.hpp"

namespace aoc {

namespace {

CostModel quadratic_in_u(Eigen::MatrixXd R, std::string kind)
{
  CostModel c;
  c.kind = std::move(kind);
  c.quadratic_weight = R;
  c.eval = [R](const State&, const Eigen::VectorXd& u) { return 0.5 * u.dot(R * u); };
  c.dL_dx_triv = [](const State& s, const Eigen::VectorXd&) { return AlgebraCovector::Zero(s.y.size()).eval(); };
  c.dL_dy = [](const State& s, const Eigen::VectorXd&) { return AlgebraCovector::Zero(s.y.size()).eval(); };
  c.dL_du = [R](const State&, const Eigen::VectorXd& u) { return (R * u).eval(); };
  c.d2L_du2 = [R](const State&, const Eigen::VectorXd&) { return R; };
  c.x_independent = true;
  return c;
}

Eigen::VectorXd newton_solve(const CostModel& cost, const State& s, const Eigen::VectorXd& target,
                             Eigen::VectorXd u)
{
  constexpr double kTol = 1e-12;
  constexpr int kMaxIter = 50;
  for (int it = 0; it < kMaxIter; ++it)
  {
    const Eigen::VectorXd g = cost.dL_du(s, u) - target;
    const double gnorm = g.lpNorm<Eigen::Infinity>();
    const Eigen::MatrixXd H = cost.d2L_du2(s, u);
    // Regularity is required at the solution too, not just along the iteration.
    if (std::abs(H.determinant()) < kRegularityDetTol)
      throw SingularRegularity("d2L/du2 is singular during control elimination");
    if (gnorm < kTol)
      return u;
    const Eigen::VectorXd step = H.partialPivLu().solve(g);
    double lambda = 1.0;
    Eigen::VectorXd trial = u - step;
    while (lambda > 1e-8)
    {
      trial = u - lambda * step;
      if ((cost.dL_du(s, trial) - target).lpNorm<Eigen::Infinity>() < gnorm)
        break;
      lambda *= 0.5;
    }
    u = trial;
  }
  if ((cost.dL_du(s, u) - target).lpNorm<Eigen::Infinity>() < kTol &&
      std::abs(cost.d2L_du2(s, u).determinant()) >= kRegularityDetTol)
    return u;
  throw NoConvergence("Newton control elimination did not converge");
}

Eigen::VectorXd fd5(const Eigen::VectorXd& fm2, const Eigen::VectorXd& fm1, const Eigen::VectorXd& fp1,
                    const Eigen::VectorXd& fp2, double h)
{
  return (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
}

}  // namespace

CostModel min_acc_cost(const LieAlgebraModel& model)
{
  const int m = model.actuated_dim();
  return quadratic_in_u(model.inertia().topLeftCorner(m, m), "min_acc");
}

CostModel quadratic_cost(const Eigen::MatrixXd& R)
{
  if (R.rows() != R.cols())
    throw DimensionMismatch("quadratic cost weight must be square");
  return quadratic_in_u(R, "quadratic");
}

AlgebraCovector fd_trivialized_dx(const GroupModel& gm, const std::function<double(const State&)>& f,
                                  const State& s, double rel_step)
{
  const int n = gm.algebra().dim();
  const double h = rel_step * (1.0 + s.x.norm());
  AlgebraCovector out(n);
  State p = s;
  for (int i = 0; i < n; ++i)
  {
    const AlgebraVector e = AlgebraVector::Unit(n, i);
    p.x = s.x * exp_map(gm, e, h);
    const double fp = f(p);
    p.x = s.x * exp_map(gm, e, -h);
    const double fm = f(p);
    out(i) = (fp - fm) / (2.0 * h);
  }
  return out;
}

CostModel with_fd_x_derivative(CostModel cost, const GroupModel& gm, double rel_step)
{
  auto eval = cost.eval;
  cost.dL_dx_triv = [eval, gm, rel_step](const State& s, const Eigen::VectorXd& u) {
    return fd_trivialized_dx(gm, [&](const State& q) { return eval(q, u); }, s, rel_step);
  };
  cost.x_independent = false;
  return cost;
}

double hamiltonian(const LieAlgebraModel& model, const CostModel& cost, const ExtremalPoint& a)
{
  const auto& y = a.state.y;
  return a.costate.mu.dot(y) + a.costate.xi.dot(embed_control(model, a.u) + bias(model, y)) -
         cost.eval(a.state, a.u);
}

Eigen::VectorXd eliminate_control(const LieAlgebraModel& model, const CostModel& cost, const State& s,
                                  const AlgebraCovector& xi)
{
  model.check_dim(xi, "eliminate_control");
  const int m = model.actuated_dim();
  const Eigen::VectorXd target = xi.head(m);

  if (cost.quadratic_weight)
  {
    const Eigen::MatrixXd& R = *cost.quadratic_weight;
    if (R.rows() != m)
      throw DimensionMismatch("quadratic weight must be m x m");
    if (std::abs(R.determinant()) < kRegularityDetTol)
      throw SingularRegularity("quadratic control weight is singular");
    return R.partialPivLu().solve(target);
  }

  try
  {
    return newton_solve(cost, s, target, Eigen::VectorXd::Zero(m));
  }
  catch (const NoConvergence&)
  {
    return newton_solve(cost, s, target, target);
  }
}

ExtremalRate extremal_rhs(const LieAlgebraModel& model, const CostModel& cost, const ExtremalPoint& a)
{
  const auto& y = a.state.y;
  const auto& mu = a.costate.mu;
  const auto& xi = a.costate.xi;
  model.check_dim(mu, "extremal_rhs");
  model.check_dim(xi, "extremal_rhs");

  const AlgebraVector xi_sharp = sharp(model, xi);
  const AlgebraCovector y_flat = flat(model, y);

  ExtremalRate r;
  r.body = y;
  r.ydot = embed_control(model, a.u) + bias(model, y);
  r.mudot = ad_star(model, y, mu);
  if (!cost.x_independent)
    r.mudot += cost.dL_dx_triv(a.state, a.u);
  r.xidot = -mu + cost.dL_dy(a.state, a.u) - flat(model, bracket(model, y, xi_sharp)) +
            ad_star(model, xi_sharp, y_flat);
  return r;
}

ExtremalRate min_acc_rhs(const LieAlgebraModel& model, const State& s, const Costate& p)
{
  const auto& y = s.y;
  const AlgebraVector xi_sharp = sharp(model, p.xi);
  ExtremalRate r;
  r.body = y;
  r.ydot = sharp(model, restrict_covector(model, p.xi)) + bias(model, y);
  r.mudot = ad_star(model, y, p.mu);
  r.xidot = -p.mu - flat(model, bracket(model, y, xi_sharp)) + ad_star(model, xi_sharp, flat(model, y));
  return r;
}

Trajectory flow_extremal(const GroupModel& gm, const CostModel& cost, const State& state0, const Costate& costate0,
                         double T, int steps)
{
  if (!(T > 0.0) || steps < 1)
    throw Error("flow_extremal: need T > 0 and steps >= 1");
  const LieAlgebraModel& A = gm.algebra();
  const int n = A.dim();
  A.check_dim(state0.y, "flow_extremal");
  A.check_dim(costate0.mu, "flow_extremal");
  A.check_dim(costate0.xi, "flow_extremal");

  const CoupledField field = [&](double, const GroupElement& x, const Eigen::VectorXd& z, AlgebraVector& body,
                                 Eigen::VectorXd& zdot) {
    ExtremalPoint a{{x, z.segment(0, n)}, {z.segment(n, n), z.segment(2 * n, n)}, {}};
    a.u = eliminate_control(A, cost, a.state, a.costate.xi);
    const ExtremalRate r = extremal_rhs(A, cost, a);
    body = r.body;
    zdot.resize(3 * n);
    zdot << r.ydot, r.mudot, r.xidot;
  };

  Trajectory traj;
  traj.costates.emplace();
  traj.hamiltonian.emplace();

  GroupElement x = state0.x;
  Eigen::VectorXd z(3 * n);
  z << state0.y, costate0.mu, costate0.xi;

  auto record = [&](double t, std::size_t step) {
    ExtremalPoint a{{x, z.segment(0, n)}, {z.segment(n, n), z.segment(2 * n, n)}, {}};
    try
    {
      a.u = eliminate_control(A, cost, a.state, a.costate.xi);
    }
    catch (const SingularRegularity& e)
    {
      throw SingularRegularity(std::string(e.what()) + " (step " + std::to_string(step) + ")");
    }
    traj.times.push_back(t);
    traj.states.push_back(a.state);
    traj.controls.push_back(a.u);
    traj.costates->push_back(a.costate);
    traj.hamiltonian->push_back(hamiltonian(A, cost, a));
  };

  const double h = T / steps;
  record(0.0, 0);
  for (int k = 0; k < steps; ++k)
  {
    try
    {
      rkmk4_step(gm, field, k * h, h, x, z);
    }
    catch (const SingularRegularity& e)
    {
      throw SingularRegularity(std::string(e.what()) + " (step " + std::to_string(k + 1) + ")");
    }
    if (!x.allFinite() || !z.allFinite())
      throw NonFinite(static_cast<std::size_t>(k + 1));
    record(k + 1 == steps ? T : (k + 1) * h, static_cast<std::size_t>(k + 1));
  }
  return traj;
}

double symplectic_form_eval(const LieAlgebraModel& model, const AlgebraCovector& mu, const TangentTuple& A,
                            const TangentTuple& B)
{
  return B.v_mu.dot(A.z) + B.v_xi.dot(A.w) - A.v_mu.dot(B.z) - A.v_xi.dot(B.w) +
         mu.dot(bracket(model, A.z, B.z));
}

double hamiltonian_field_check(const GroupModel& gm, const CostModel& cost, const ExtremalPoint& a,
                               int n_directions, double fd_step, std::uint64_t seed)
{
  const LieAlgebraModel& A = gm.algebra();
  const int n = A.dim();
  const ExtremalRate r = extremal_rhs(A, cost, a);
  const TangentTuple XH{r.body, r.ydot, r.mudot, r.xidot};

  auto H_at = [&](const TangentTuple& V, double eps) {
    ExtremalPoint p;
    p.state.x = a.state.x * exp_map(gm, V.z, eps);
    p.state.y = a.state.y + eps * V.w;
    p.costate.mu = a.costate.mu + eps * V.v_mu;
    p.costate.xi = a.costate.xi + eps * V.v_xi;
    p.u = eliminate_control(A, cost, p.state, p.costate.xi);
    return hamiltonian(A, cost, p);
  };

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  auto random_vec = [&]() {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i)
      v(i) = normal(rng);
    return v;
  };

  double worst = 0.0;
  for (int d = 0; d < n_directions; ++d)
  {
    const TangentTuple V{random_vec(), random_vec(), random_vec(), random_vec()};
    // Five-point central stencil; the plain two-point one leaves an O(step^2)
    // floor from the cubic bias term.
    const double dH = (H_at(V, -2.0 * fd_step) - 8.0 * H_at(V, -fd_step) + 8.0 * H_at(V, fd_step) -
                       H_at(V, 2.0 * fd_step)) /
                      (12.0 * fd_step);
    const double omega = symplectic_form_eval(A, a.costate.mu, XH, V);
    worst = std::max(worst, std::abs(omega - dH));
  }
  return worst;
}

ObservableDerivatives fd_derivatives(const GroupModel& gm, const Observable& f, const PhasePoint& p, double step)
{
  const int n = gm.algebra().dim();
  ObservableDerivatives d{AlgebraCovector(n), AlgebraCovector(n), AlgebraVector(n), AlgebraVector(n)};
  for (int i = 0; i < n; ++i)
  {
    const AlgebraVector e = AlgebraVector::Unit(n, i);
    PhasePoint q = p;
    q.state.x = p.state.x * exp_map(gm, e, step);
    double fp = f.value(q);
    q.state.x = p.state.x * exp_map(gm, e, -step);
    double fm = f.value(q);
    d.dx_triv(i) = (fp - fm) / (2.0 * step);

    q = p;
    q.state.y(i) += step;
    fp = f.value(q);
    q.state.y(i) -= 2.0 * step;
    fm = f.value(q);
    d.dy(i) = (fp - fm) / (2.0 * step);

    q = p;
    q.costate.mu(i) += step;
    fp = f.value(q);
    q.costate.mu(i) -= 2.0 * step;
    fm = f.value(q);
    d.dmu(i) = (fp - fm) / (2.0 * step);

    q = p;
    q.costate.xi(i) += step;
    fp = f.value(q);
    q.costate.xi(i) -= 2.0 * step;
    fm = f.value(q);
    d.dxi(i) = (fp - fm) / (2.0 * step);
  }
  return d;
}

Observable coordinate_observable(int n, Coordinate which, int index)
{
  if (index < 0 || index >= n)
    throw DimensionMismatch("coordinate observable index out of range");
  Observable f;
  f.value = [which, index](const PhasePoint& p) {
    switch (which)
    {
    case Coordinate::y:
      return p.state.y(index);
    case Coordinate::mu:
      return p.costate.mu(index);
    case Coordinate::xi:
      break;
    }
    return p.costate.xi(index);
  };
  f.derivatives = [n, which, index](const PhasePoint&) {
    ObservableDerivatives d{AlgebraCovector::Zero(n), AlgebraCovector::Zero(n), AlgebraVector::Zero(n),
                            AlgebraVector::Zero(n)};
    switch (which)
    {
    case Coordinate::y:
      d.dy(index) = 1.0;
      break;
    case Coordinate::mu:
      d.dmu(index) = 1.0;
      break;
    case Coordinate::xi:
      d.dxi(index) = 1.0;
      break;
    }
    return d;
  };
  return f;
}

Observable hamiltonian_observable(const GroupModel& gm, const CostModel& cost)
{
  Observable f;
  f.value = [&gm, cost](const PhasePoint& p) {
    ExtremalPoint a{p.state, p.costate, eliminate_control(gm.algebra(), cost, p.state, p.costate.xi)};
    return hamiltonian(gm.algebra(), cost, a);
  };
  return f;
}

double poisson_bracket(const GroupModel& gm, const Observable& f, const Observable& g, const PhasePoint& p,
                       double fd_step)
{
  const ObservableDerivatives df = f.derivatives ? f.derivatives(p) : fd_derivatives(gm, f, p, fd_step);
  const ObservableDerivatives dg = g.derivatives ? g.derivatives(p) : fd_derivatives(gm, g, p, fd_step);
  return dg.dx_triv.dot(df.dmu) - df.dx_triv.dot(dg.dmu) + dg.dy.dot(df.dxi) - df.dy.dot(dg.dxi) +
         p.costate.mu.dot(bracket(gm.algebra(), df.dmu, dg.dmu));
}

AlgebraCovector spatial_momentum(const GroupModel& gm, const GroupElement& x, const AlgebraCovector& mu)
{
  const int n = gm.algebra().dim();
  const GroupElement xinv = group_inverse(gm, x);
  AlgebraCovector pi(n);
  for (int j = 0; j < n; ++j)
    pi(j) = mu.dot(adjoint_action(gm, xinv, AlgebraVector::Unit(n, j)));
  return pi;
}

double trajectory_cost(const CostModel& cost, const Trajectory& traj)
{
  const std::size_t N = traj.size();
  if (N < 2)
    return 0.0;
  std::vector<double> L(N);
  for (std::size_t k = 0; k < N; ++k)
    L[k] = cost.eval(traj.states[k], traj.controls[k]);

  const std::size_t intervals = N - 1;
  double total = 0.0;
  std::size_t end = intervals;
  if (intervals % 2 == 1)
  {
    if (intervals >= 3)
    {
      // Simpson 3/8 on the last three intervals.
      const std::size_t k = intervals - 3;
      const double h = (traj.times[k + 3] - traj.times[k]) / 3.0;
      total += 3.0 * h / 8.0 * (L[k] + 3.0 * L[k + 1] + 3.0 * L[k + 2] + L[k + 3]);
      end = k;
    }
    else
    {
      return 0.5 * (traj.times[1] - traj.times[0]) * (L[0] + L[1]);
    }
  }
  for (std::size_t k = 0; k + 2 <= end; k += 2)
  {
    const double h = 0.5 * (traj.times[k + 2] - traj.times[k]);
    total += h / 3.0 * (L[k] + 4.0 * L[k + 1] + L[k + 2]);
  }
  return total;
}

double extremal_defect(const GroupModel& gm, const CostModel& cost, const Trajectory& traj)
{
  if (!traj.costates)
    throw Error("extremal_defect: trajectory has no costates");
  const LieAlgebraModel& A = gm.algebra();
  const auto& P = *traj.costates;
  const std::size_t N = traj.size();
  double worst = 0.0;
  for (std::size_t k = 2; k + 2 < N; ++k)
  {
    const double h = (traj.times[k + 2] - traj.times[k - 2]) / 4.0;
    const auto& S = traj.states;
    ExtremalPoint a{S[k], P[k], {}};
    a.u = eliminate_control(A, cost, a.state, a.costate.xi);
    const ExtremalRate r = extremal_rhs(A, cost, a);

    const GroupElement xinv = group_inverse(gm, S[k].x);
    auto rel = [&](std::size_t j) { return log_map(gm, xinv * S[j].x); };
    const AlgebraVector body = fd5(rel(k - 2), rel(k - 1), rel(k + 1), rel(k + 2), h);
    const AlgebraVector ydot = fd5(S[k - 2].y, S[k - 1].y, S[k + 1].y, S[k + 2].y, h);
    const AlgebraCovector mudot = fd5(P[k - 2].mu, P[k - 1].mu, P[k + 1].mu, P[k + 2].mu, h);
    const AlgebraCovector xidot = fd5(P[k - 2].xi, P[k - 1].xi, P[k + 1].xi, P[k + 2].xi, h);

    worst = std::max({worst, (body - r.body).lpNorm<Eigen::Infinity>(), (ydot - r.ydot).lpNorm<Eigen::Infinity>(),
                      (mudot - r.mudot).lpNorm<Eigen::Infinity>(), (xidot - r.xidot).lpNorm<Eigen::Infinity>()});
  }
  return worst;
}

}  // namespace aoc
