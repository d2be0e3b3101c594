#include "aoc/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "aoc/config.hpp"
#include "aoc/errors.hpp"
#include "aoc/io.hpp"

namespace aoc {

using nlohmann::json;

namespace {

struct Invocation
{
  std::string command;
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  bool dump = false;
  std::vector<double> mu0;
  std::vector<double> xi0;
};

json report_to_json(const ValidationReport& r)
{
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"residual", c.residual}});
  return checks;
}

void emit(const RunConfig& config, const json& summary, const Trajectory* traj, std::ostream& out)
{
  out << summary.dump(2) << '\n';
  const std::string& path = config.output.path;
  if (path.empty())
    return;
  if (config.output.format == "json")
  {
    json doc = {{"summary", summary}};
    if (traj)
      doc["trajectory"] = trajectory_to_json(*traj);
    std::ofstream os(path);
    if (!os)
      throw Error("cannot open " + path + " for writing");
    os << doc.dump(2) << '\n';
    return;
  }
  if (traj)
    write_trajectory_csv(path, *traj);
  std::ofstream os(path + ".summary.json");
  if (!os)
    throw Error("cannot open " + path + ".summary.json for writing");
  os << summary.dump(2) << '\n';
}

double max_defect(const GroupModel& gm, const Trajectory& traj)
{
  double worst = 0.0;
  for (const auto& s : traj.states)
    worst = std::max(worst, manifold_defect(gm, s.x));
  return worst;
}

int cmd_validate(const RunConfig& config, std::ostream& out)
{
  const GroupModel gm = build_group(config.algebra);
  ValidationReport report = validate_model(gm.algebra());
  for (const auto& c : validate_group(gm).checks)
    report.checks.push_back(c);
  const json summary = {{"command", "validate"}, {"model", config.algebra.kind}, {"ok", report.ok()},
                        {"checks", report_to_json(report)}};
  emit(config, summary, nullptr, out);
  return report.ok() ? kExitOk : kExitValidation;
}

int cmd_simulate(const RunConfig& config, std::ostream& out)
{
  const GroupModel gm = build_group(config.algebra);
  const LieAlgebraModel& A = gm.algebra();
  const ControlSignal u = build_control(config, A.actuated_dim());
  const Trajectory traj = simulate(gm, {config.problem.x0, config.problem.y0}, u, config.problem.T,
                                   config.problem.steps);
  const double e0 = kinetic_energy(A, traj.states.front().y);
  double drift = 0.0;
  for (const auto& s : traj.states)
    drift = std::max(drift, std::abs(kinetic_energy(A, s.y) - e0));
  json summary = {{"command", "simulate"},
                  {"steps", config.problem.steps},
                  {"T", config.problem.T},
                  {"zero_control", !config.control.has_value()},
                  {"energy_drift", drift},
                  {"group_defect", max_defect(gm, traj)},
                  {"final_y", to_json(Eigen::VectorXd(traj.states.back().y))}};
  emit(config, summary, &traj, out);
  return kExitOk;
}

int cmd_extremal(const RunConfig& config, const Invocation& inv, std::ostream& out)
{
  const GroupModel gm = build_group(config.algebra);
  const LieAlgebraModel& A = gm.algebra();
  const int n = A.dim();
  const CostModel cost = build_cost(config.cost, A);

  auto pick = [&](const std::vector<double>& flag, const std::optional<Eigen::VectorXd>& cfg, int offset) {
    if (!flag.empty())
    {
      if (static_cast<int>(flag.size()) != n)
        throw ConfigError("costate flag needs " + std::to_string(n) + " entries");
      return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(flag.data(), n));
    }
    if (cfg)
      return *cfg;
    if (config.solver.guess)
      return Eigen::VectorXd(config.solver.guess->segment(offset, n));
    return Eigen::VectorXd(Eigen::VectorXd::Zero(n));
  };
  const Costate p0{pick(inv.mu0, config.mu0, 0), pick(inv.xi0, config.xi0, n)};

  const Trajectory traj =
      flow_extremal(gm, cost, {config.problem.x0, config.problem.y0}, p0, config.problem.T, config.problem.steps);
  const auto& H = *traj.hamiltonian;
  const auto& P = *traj.costates;
  double h_drift = 0.0;
  double mu_drift = 0.0;
  double pi_drift = 0.0;
  const AlgebraCovector pi0 = spatial_momentum(gm, traj.states.front().x, P.front().mu);
  for (std::size_t k = 0; k < traj.size(); ++k)
  {
    h_drift = std::max(h_drift, std::abs(H[k] - H.front()));
    mu_drift = std::max(mu_drift, std::abs(P[k].mu.norm() - P.front().mu.norm()));
    pi_drift = std::max(pi_drift, (spatial_momentum(gm, traj.states[k].x, P[k].mu) - pi0).lpNorm<Eigen::Infinity>());
  }
  json summary = {{"command", "extremal"},
                  {"mu0", to_json(p0.mu)},
                  {"xi0", to_json(p0.xi)},
                  {"H_drift", h_drift},
                  {"mu_norm_drift", mu_drift},
                  {"spatial_momentum_drift", pi_drift},
                  {"group_defect", max_defect(gm, traj)},
                  {"cost", trajectory_cost(cost, traj)}};
  emit(config, summary, &traj, out);
  return kExitOk;
}

json shooting_summary(const ShootingResult& r)
{
  return {{"converged", r.converged},     {"residual_norm", r.residual_norm},
          {"iterations", r.iterations},   {"mu0", to_json(r.mu0)},
          {"xi0", to_json(r.xi0)},        {"cost", r.cost},
          {"start_index", r.start_index}};
}

int cmd_shoot(const RunConfig& config, std::ostream& out)
{
  const GroupModel gm = build_group(config.algebra);
  const CostModel cost = build_cost(config.cost, gm.algebra());
  const ShootingResult r =
      solve_shooting(gm, cost, build_problem(config.problem), config.solver.guess, build_shooting_options(config));
  json summary = shooting_summary(r);
  summary["command"] = "shoot";
  emit(config, summary, r.trajectory.size() > 0 ? &r.trajectory : nullptr, out);
  return r.converged ? kExitOk : kExitNoConvergence;
}

int cmd_compare(const RunConfig& config, std::ostream& out)
{
  const GroupModel gm = build_group(config.algebra);
  const LieAlgebraModel& A = gm.algebra();
  const CostModel cost = build_cost(config.cost, A);
  const BoundaryProblem problem = build_problem(config.problem);
  const ShootingResult indirect =
      solve_shooting(gm, cost, problem, config.solver.guess, build_shooting_options(config));
  const DirectResult direct = optimize_direct(gm, cost, problem, config.oracle);

  const double gap = std::abs(indirect.cost) > 1e-12 ? (direct.objective - indirect.cost) / std::abs(indirect.cost)
                                                      : std::abs(direct.objective - indirect.cost);
  double sup = 0.0;
  if (indirect.trajectory.size() > 0)
  {
    const ControlSignal u = interpolated_control(indirect.trajectory.times, indirect.trajectory.controls);
    const Eigen::MatrixXd Ui = sample_controls(u, config.oracle.segments, A.actuated_dim(), problem.T);
    sup = (Ui - direct.U).cwiseAbs().maxCoeff();
  }
  json summary = {{"command", "compare"},
                  {"indirect_cost", indirect.cost},
                  {"direct_cost", direct.objective},
                  {"direct_running_cost", direct.running_cost},
                  {"gap", gap},
                  {"control_sup_distance", sup},
                  {"shooting", shooting_summary(indirect)},
                  {"direct", {{"objective", direct.objective},
                              {"boundary_error", direct.boundary_error},
                              {"iterations", direct.iterations},
                              {"converged", direct.converged}}}};
  emit(config, summary, &direct.trajectory, out);
  return indirect.converged ? kExitOk : kExitNoConvergence;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Optimal control of affine connection control systems on Lie groups", "aoc"};
  Invocation inv;
  app.add_option("command", inv.command, "validate | simulate | extremal | shoot | compare")
      ->required()
      ->check(CLI::IsMember({"validate", "simulate", "extremal", "shoot", "compare"}));
  app.add_option("--config", inv.config_path, "JSON run configuration")->required();
  app.add_option("--out", inv.out_path, "Output path (overrides output.path)");
  auto* seed_opt = app.add_option("--seed", inv.seed, "Seed for multi-start fallbacks (overrides config)");
  app.add_flag("--dump-config", inv.dump, "Print the resolved configuration and exit");
  app.add_option("--mu0", inv.mu0, "Initial mu for extremal (comma separated)")->delimiter(',');
  app.add_option("--xi0", inv.xi0, "Initial xi for extremal (comma separated)")->delimiter(',');

  try
  {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  }
  catch (const CLI::CallForHelp& e)
  {
    out << app.help();
    return kExitOk;
  }
  catch (const CLI::ParseError& e)
  {
    err << "usage error: " << e.what() << '\n' << app.help();
    return kExitUsage;
  }

  RunConfig config;
  try
  {
    config = load_config(inv.config_path);
  }
  catch (const Error& e)
  {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (!inv.out_path.empty())
    config.output.path = inv.out_path;
  if (*seed_opt)
    config.seed = *inv.seed;

  if (inv.dump)
  {
    out << dump_config(config).dump(2) << '\n';
    return kExitOk;
  }

  try
  {
    if (inv.command == "validate")
      return cmd_validate(config, out);

    const GroupModel gm = build_group(config.algebra);
    ValidationReport report = validate_model(gm.algebra());
    for (const auto& c : validate_group(gm).checks)
      report.checks.push_back(c);
    if (!report.ok())
    {
      for (const auto& c : report.checks)
        if (!c.passed)
          err << "validation failed: " << c.name << " (residual " << c.residual << ")\n";
      return kExitValidation;
    }

    if (inv.command == "simulate")
      return cmd_simulate(config, out);
    if (inv.command == "extremal")
      return cmd_extremal(config, inv, out);
    if (inv.command == "shoot")
      return cmd_shoot(config, out);
    return cmd_compare(config, out);
  }
  catch (const ConfigError& e)
  {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  }
  catch (const NonFinite& e)
  {
    err << "numeric blow-up: " << e.what() << '\n';
    return kExitNumeric;
  }
  catch (const SingularRegularity& e)
  {
    err << "irregular point: " << e.what() << '\n';
    return kExitNumeric;
  }
  catch (const NoConvergence& e)
  {
    err << "no convergence: " << e.what() << '\n';
    return kExitNoConvergence;
  }
  catch (const Error& e)
  {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace aoc
