// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "aoc/algebra.hpp"
#include "aoc/direct.hpp"
#include "aoc/group.hpp"
#include "aoc/pmp.hpp"
#include "aoc/shooting.hpp"

using namespace aoc;

namespace
{

struct Outcome
{
  bool ok;
  std::string measured;
};

Eigen::VectorXd normal_vec(std::mt19937_64& rng, int n, double scale = 1.0)
{
  std::normal_distribution<double> N(0.0, scale);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i)
    v(i) = N(rng);
  return v;
}

std::string fmt(const char* f, double a)
{
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b)
{
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

LieAlgebraModel body123(int m = 3)
{
  return make_so3(Eigen::Vector3d(1.0, 2.0, 3.0), m);
}

LieAlgebraModel abelian3()
{
  Eigen::MatrixXd I(3, 3);
  I << 2.0, 0.5, 0.0,
       0.5, 1.0, 0.0,
       0.0, 0.0, 3.0;
  return make_abelian(I, 2);
}

// 1
Outcome algebra_validity()
{
  double worst = 0.0;
  bool ok = true;
  for (const auto& model : {body123(), body123(2), abelian3(), make_abelian(Eigen::MatrixXd::Identity(1, 1), 1)})
  {
    const ValidationReport rep = validate_model(model);
    ok = ok && rep.ok();
    for (const auto& c : rep.checks)
      worst = std::max(worst, c.residual);
  }
  return {ok && worst < 1e-12, fmt("max_residual=%.3e", worst)};
}

// 2
Outcome connection()
{
  std::mt19937_64 rng(2);
  double torsion = 0.0, metric = 0.0;
  for (const auto& model : {body123(), abelian3()})
    for (int s = 0; s < 1000; ++s)
    {
      const int n = model.dim();
      const Eigen::VectorXd y = normal_vec(rng, n), z = normal_vec(rng, n), w = normal_vec(rng, n);
      torsion = std::max(
          torsion, (connection_alpha(model, y, z) - connection_alpha(model, z, y) - bracket(model, y, z)).norm());
      metric = std::max(metric, std::abs(inner(model, connection_alpha(model, w, y), z) +
                                         inner(model, y, connection_alpha(model, w, z))));
    }
  return {torsion < 1e-10 && metric < 1e-10, fmt("torsion=%.3e metric=%.3e", torsion, metric)};
}

// 3: rigid body extremal equations written out with cross products.
Outcome hand_coded_rhs()
{
  std::mt19937_64 rng(3);
  const Eigen::Vector3d J(1.0, 2.0, 3.0);
  const auto A = body123(2);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k)
  {
    const Eigen::Vector3d y = normal_vec(rng, 3), mu = normal_vec(rng, 3), xi = normal_vec(rng, 3);
    Eigen::Vector3d xi_d = xi;
    xi_d(2) = 0.0;
    const Eigen::Vector3d Jy = J.cwiseProduct(y);
    const Eigen::Vector3d Jinv_xi = xi.cwiseQuotient(J);
    const Eigen::Vector3d ydot = xi_d.cwiseQuotient(J) + Jy.cross(y).cwiseQuotient(J);
    const Eigen::Vector3d mudot = mu.cross(y);
    const Eigen::Vector3d xidot = -mu + J.cwiseProduct(Jinv_xi.cross(y)) + Jy.cross(Jinv_xi);
    const ExtremalRate r = min_acc_rhs(A, {Eigen::Matrix3d::Identity(), y}, {mu, xi});
    worst = std::max({worst, (r.ydot - ydot).lpNorm<Eigen::Infinity>(), (r.mudot - mudot).lpNorm<Eigen::Infinity>(),
                      (r.xidot - xidot).lpNorm<Eigen::Infinity>()});
  }
  return {worst < 1e-12, fmt("max_abs_diff=%.3e", worst)};
}

// 4
Outcome symplectic_identity()
{
  std::mt19937_64 rng(4);
  double worst = 0.0;
  for (const auto& gm : {make_so3_group(body123()), make_so3_group(body123(2)), make_abelian_group(abelian3())})
  {
    const CostModel cost = min_acc_cost(gm.algebra());
    const int n = gm.algebra().dim();
    for (int k = 0; k < 100; ++k)
    {
      ExtremalPoint a;
      a.state = {exp_map(gm, normal_vec(rng, n, 0.5)), normal_vec(rng, n)};
      a.costate = {normal_vec(rng, n), normal_vec(rng, n)};
      a.u = eliminate_control(gm.algebra(), cost, a.state, a.costate.xi);
      worst = std::max(worst, hamiltonian_field_check(gm, cost, a, 8, 1e-5, 100 + k));
    }
  }
  return {worst < 1e-6, fmt("max_residual=%.3e", worst)};
}

// 5
Outcome conservation()
{
  const auto gm = make_so3_group(body123());
  const CostModel cost = min_acc_cost(gm.algebra());
  const Trajectory traj = flow_extremal(gm, cost, {gm.identity(), Eigen::Vector3d(0.4, -0.3, 0.6)},
                                        {Eigen::Vector3d(1.0, -0.5, 0.8), Eigen::Vector3d(-0.7, 0.9, 0.3)}, 1.0, 1000);
  const auto& H = *traj.hamiltonian;
  const auto& P = *traj.costates;
  const Eigen::VectorXd pi0 = spatial_momentum(gm, traj.states[0].x, P[0].mu);
  double dh = 0, dmu = 0, dpi = 0, defect = 0;
  for (std::size_t k = 0; k < traj.size(); ++k)
  {
    dh = std::max(dh, std::abs(H[k] - H[0]));
    dmu = std::max(dmu, std::abs(P[k].mu.norm() - P[0].mu.norm()));
    dpi = std::max(dpi, (spatial_momentum(gm, traj.states[k].x, P[k].mu) - pi0).norm());
    defect = std::max(defect, manifold_defect(gm, traj.states[k].x));
  }
  char buf[200];
  std::snprintf(buf, sizeof buf, "dH=%.3e dmu=%.3e dpi=%.3e defect=%.3e", dh, dmu, dpi, defect);
  return {dh < 1e-7 && dmu < 1e-8 && dpi < 1e-7 && defect < 1e-9, buf};
}

// 6
Outcome cubic_limit()
{
  const auto gm = make_abelian_group(make_abelian(Eigen::MatrixXd::Identity(1, 1), 1));
  const BoundaryProblem pb{gm.identity(), exp_map(gm, Eigen::VectorXd::Constant(1, 1.0)), Eigen::VectorXd::Zero(1),
                           Eigen::VectorXd::Zero(1), 1.0, 200};
  const ShootingResult r = solve_shooting(gm, min_acc_cost(gm.algebra()), pb);
  double sup = 0.0;
  for (std::size_t k = 0; k < r.trajectory.size(); ++k)
  {
    const double t = r.trajectory.times[k];
    sup = std::max(sup, std::abs(r.trajectory.states[k].x(0, 1) - (3 * t * t - 2 * t * t * t)));
  }
  const double emu = std::abs(r.mu0(0) - 12.0), exi = std::abs(r.xi0(0) - 6.0), ecost = std::abs(r.cost - 6.0);
  char buf[200];
  std::snprintf(buf, sizeof buf, "mu0=%.9f xi0=%.9f sup=%.3e cost=%.9f", r.mu0(0), r.xi0(0), sup, r.cost);
  return {r.converged && emu < 1e-6 && exi < 1e-6 && sup < 1e-7 && ecost < 1e-6, buf};
}

// 7
Outcome oracle_equivalence()
{
  const auto gm = make_so3_group(body123());
  const CostModel cost = min_acc_cost(gm.algebra());
  const BoundaryProblem pb{gm.identity(), exp_map(gm, Eigen::Vector3d(0, 0, 0.5)), Eigen::Vector3d::Zero(),
                           Eigen::Vector3d::Zero(), 1.0, 200};
  const ShootingResult indirect = solve_shooting(gm, cost, pb);
  TranscriptionConfig cfg;
  cfg.segments = 100;
  const DirectResult direct = optimize_direct(gm, cost, pb, cfg);
  const double gap = std::abs(direct.objective - indirect.cost) / indirect.cost;
  char buf[200];
  std::snprintf(buf, sizeof buf, "shooting=%.6f direct=%.6f rel_gap=%.3e residual=%.3e", indirect.cost,
                direct.objective, gap, indirect.residual_norm);
  return {indirect.converged && indirect.residual_norm < 1e-8 && gap < 0.02, buf};
}

// 8: J1 != J2, third axis unactuated. Refining the grid from the converged
// costates must shrink the extremal defect by ~2^4.
Outcome underactuated()
{
  const auto gm = make_so3_group(body123(2));
  const CostModel cost = min_acc_cost(gm.algebra());
  BoundaryProblem pb{gm.identity(), exp_map(gm, Eigen::Vector3d(0.3, -0.2, 0.1)), Eigen::Vector3d::Zero(),
                     Eigen::Vector3d::Zero(), 1.0, 100};
  ShootingOptions opts;
  opts.max_iter = 40;
  const ShootingResult coarse = solve_shooting(gm, cost, pb, std::nullopt, opts);
  if (!coarse.converged)
    return {false, fmt("coarse residual=%.3e", coarse.residual_norm)};
  Eigen::VectorXd guess(6);
  guess << coarse.mu0, coarse.xi0;
  pb.steps = 200;
  const ShootingResult fine = solve_shooting(gm, cost, pb, guess, opts);
  const double d1 = extremal_defect(gm, cost, coarse.trajectory);
  const double d2 = extremal_defect(gm, cost, fine.trajectory);
  const double ratio = d1 / d2;
  char buf[200];
  std::snprintf(buf, sizeof buf, "residual=%.3e cost=%.4f defect_ratio=%.3f", fine.residual_norm, fine.cost, ratio);
  return {fine.converged && coarse.residual_norm < 1e-8 && ratio >= 12.0 && ratio <= 20.0, buf};
}

// 9
Outcome integrator_order()
{
  const auto gm = make_so3_group(body123());
  const BodyVelocity y = [](double t) { return Eigen::Vector3d(std::sin(t), std::cos(2 * t), 0.5 * t).eval(); };
  auto run = [&](int steps) {
    const double T = 2.0;
    const double h = T / steps;
    Eigen::MatrixXd x = gm.identity();
    for (int k = 0; k < steps; ++k)
      x = reconstruct_step(gm, x, y, k * h, h);
    return x;
  };
  const Eigen::MatrixXd ref = run(20 * 128);
  const double e1 = log_map(gm, run(20).transpose() * ref).norm();
  const double e2 = log_map(gm, run(40).transpose() * ref).norm();
  const double ratio = e1 / e2;
  return {ratio >= 12.0 && ratio <= 20.0, fmt("ratio=%.3f", ratio)};
}

// 10
Outcome poisson()
{
  std::mt19937_64 rng(10);
  const auto gm = make_so3_group(body123());
  const Coordinate kinds[3] = {Coordinate::y, Coordinate::mu, Coordinate::xi};
  double anti = 0.0, coord = 0.0, jacobi = 0.0;
  for (int s = 0; s < 20; ++s)
  {
    const PhasePoint p{{exp_map(gm, normal_vec(rng, 3)), normal_vec(rng, 3)},
                       {normal_vec(rng, 3), normal_vec(rng, 3)}};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
      {
        const double xy = poisson_bracket(gm, coordinate_observable(3, Coordinate::xi, i),
                                          coordinate_observable(3, Coordinate::y, j), p);
        coord = std::max(coord, std::abs(xy - (i == j ? 1.0 : 0.0)));
        double expected = 0.0;
        for (int k = 0; k < 3; ++k)
          expected += gm.algebra().C(k, i, j) * p.costate.mu(k);
        coord = std::max(coord, std::abs(poisson_bracket(gm, coordinate_observable(3, Coordinate::mu, i),
                                                         coordinate_observable(3, Coordinate::mu, j), p) -
                                         expected));
      }
    std::uniform_int_distribution<int> pick(0, 2);
    const Observable f = coordinate_observable(3, kinds[pick(rng)], pick(rng));
    const Observable g = coordinate_observable(3, kinds[pick(rng)], pick(rng));
    const Observable h = coordinate_observable(3, kinds[pick(rng)], pick(rng));
    anti = std::max(anti, std::abs(poisson_bracket(gm, f, g, p) + poisson_bracket(gm, g, f, p)));
    auto nest = [&](const Observable& a, const Observable& b) {
      return Observable{[&gm, a, b](const PhasePoint& q) { return poisson_bracket(gm, a, b, q); }, {}};
    };
    jacobi = std::max(jacobi, std::abs(poisson_bracket(gm, f, nest(g, h), p) + poisson_bracket(gm, g, nest(h, f), p) +
                                       poisson_bracket(gm, h, nest(f, g), p)));
  }
  char buf[200];
  std::snprintf(buf, sizeof buf, "antisym=%.3e coords=%.3e jacobi=%.3e", anti, coord, jacobi);
  return {anti == 0.0 && coord < 1e-10 && jacobi < 1e-6, buf};
}

struct Criterion
{
  int id;
  const char* desc;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main()
{
  const Criterion criteria[] = {
      {1, "algebra validity", 1.0, algebra_validity},
      {2, "connection torsion-free and metric", 1.0, connection},
      {3, "min_acc_rhs vs hand-coded rigid body", 1.0, hand_coded_rhs},
      {4, "symplectic identity of the Hamiltonian field", 5.0, symplectic_identity},
      {5, "conservation along the extremal flow", 5.0, conservation},
      {6, "Riemannian cubic limit", 5.0, cubic_limit},
      {7, "direct oracle vs shooting", 120.0, oracle_equivalence},
      {8, "underactuated shooting with fourth-order defect", 120.0, underactuated},
      {9, "RKMK4 order", 10.0, integrator_order},
      {10, "Poisson structure", 5.0, poisson},
  };
  int failures = 0;
  for (const auto& c : criteria)
  {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try
    {
      o = c.run();
    }
    catch (const std::exception& e)
    {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.ok && dt < c.budget_s;
    failures += !pass;
    std::printf("%s %d: %s measured=%s time=%.2fs budget=%.0fs\n", pass ? "PASS" : "FAIL", c.id, c.desc,
                o.measured.c_str(), dt, c.budget_s);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
