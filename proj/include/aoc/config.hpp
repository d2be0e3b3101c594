#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "aoc/algebra.hpp"
#include "aoc/direct.hpp"
#include "aoc/dynamics.hpp"
#include "aoc/group.hpp"
#include "aoc/pmp.hpp"
#include "aoc/shooting.hpp"

namespace aoc {

struct AlgebraConfig
{
  std::string kind = "so3";  // so3 | abelian | custom
  Eigen::MatrixXd inertia;
  int n = 0;
  int m = 0;
  std::vector<StructureConstant> structure_constants;
  /// Optional explicit matrix representation (custom models only).
  std::vector<Eigen::MatrixXd> basis_matrices;
};

struct CostConfig
{
  std::string kind = "min_acc";  // min_acc | quadratic
  std::optional<Eigen::MatrixXd> R;
};

struct ProblemConfig
{
  Eigen::MatrixXd x0;
  Eigen::MatrixXd xT;
  Eigen::VectorXd y0;
  Eigen::VectorXd yT;
  double T = 1.0;
  int steps = 200;
};

struct SolverConfig
{
  double tol = 1e-8;
  int max_iter = 200;
  double fd_step = 1e-6;
  std::optional<Eigen::VectorXd> guess;
};

struct ControlSamples
{
  std::vector<double> times;
  std::vector<Eigen::VectorXd> values;
};

struct OutputConfig
{
  std::string path;
  std::string format = "csv";  // csv | json
};

/// Fully resolved run description. Group elements given as exponential
/// coordinates are expanded to matrices at load time.
struct RunConfig
{
  AlgebraConfig algebra;
  CostConfig cost;
  ProblemConfig problem;
  SolverConfig solver;
  TranscriptionConfig oracle;
  OutputConfig output;
  /// Empty means zero control.
  std::optional<ControlSamples> control;
  std::optional<Eigen::VectorXd> mu0;
  std::optional<Eigen::VectorXd> xi0;
  std::uint64_t seed = 0;
};

/// Parses and checks a config document; relative file references resolve
/// against base_dir. Throws ConfigError.
RunConfig parse_config(const nlohmann::json& doc, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

/// Canonical JSON form; parse_config(dump_config(c)) reproduces c.
nlohmann::json dump_config(const RunConfig& config);

LieAlgebraModel build_algebra(const AlgebraConfig& config);
GroupModel build_group(const AlgebraConfig& config);
CostModel build_cost(const CostConfig& config, const LieAlgebraModel& model);
BoundaryProblem build_problem(const ProblemConfig& config);
ShootingOptions build_shooting_options(const RunConfig& config);
ControlSignal build_control(const RunConfig& config, int m);

}  // namespace aoc
