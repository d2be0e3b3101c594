#include "aoc/config.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <initializer_list>

#include "aoc/errors.hpp"
#include "aoc/io.hpp"

namespace aoc {

using nlohmann::json;

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where)
{
  if (!obj.is_object())
    throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : obj.items())
  {
    const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
    if (!known)
      throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

double as_number(const json& j, const std::string& where)
{
  if (!j.is_number())
    throw ConfigError(where + ": expected a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& where)
{
  if (!j.is_number_integer())
    throw ConfigError(where + ": expected an integer");
  return j.get<int>();
}

Eigen::VectorXd as_vector(const json& j, const std::string& where)
{
  if (!j.is_array())
    throw ConfigError(where + ": expected an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = as_number(j[i], where);
  return v;
}

bool is_nested(const json& j)
{
  return j.is_array() && !j.empty() && j[0].is_array();
}

Eigen::MatrixXd as_matrix(const json& j, const std::string& where)
{
  if (!is_nested(j))
    throw ConfigError(where + ": expected a matrix (array of rows)");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd M(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
  {
    if (!j[r].is_array() || static_cast<Eigen::Index>(j[r].size()) != cols)
      throw ConfigError(where + ": ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c)
      M(r, c) = as_number(j[r][c], where);
  }
  return M;
}

/// Matrix, diagonal list of length n, or row-major flat list of length n*n.
Eigen::MatrixXd as_square(const json& j, int n, const std::string& where)
{
  if (is_nested(j))
  {
    Eigen::MatrixXd M = as_matrix(j, where);
    if (n > 0 && (M.rows() != n || M.cols() != n))
      throw ConfigError(where + ": expected a " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
    if (M.rows() != M.cols())
      throw ConfigError(where + ": matrix must be square");
    return M;
  }
  const Eigen::VectorXd v = as_vector(j, where);
  if (n <= 0 || v.size() == n)
    return v.asDiagonal();
  if (v.size() == static_cast<Eigen::Index>(n) * n)
    return v.reshaped<Eigen::RowMajor>(n, n);
  throw ConfigError(where + ": expected " + std::to_string(n) + " diagonal entries or a full matrix");
}

void parse_custom_fields(const json& j, AlgebraConfig& a, const std::string& where)
{
  if (!j.contains("n"))
    throw ConfigError(where + ": custom model needs 'n'");
  a.n = as_int(j.at("n"), where + ".n");
  a.m = j.contains("m") ? as_int(j.at("m"), where + ".m") : a.n;
  if (!j.contains("inertia"))
    throw ConfigError(where + ": custom model needs 'inertia'");
  a.inertia = as_square(j.at("inertia"), a.n, where + ".inertia");
  a.structure_constants.clear();
  if (j.contains("structure_constants"))
  {
    for (const auto& t : j.at("structure_constants"))
    {
      if (!t.is_array() || t.size() != 4)
        throw ConfigError(where + ".structure_constants: expected [k, i, j, value] entries");
      a.structure_constants.push_back({as_int(t[0], where), as_int(t[1], where), as_int(t[2], where),
                                       as_number(t[3], where)});
    }
  }
  a.basis_matrices.clear();
  if (j.contains("basis_matrices"))
    for (const auto& b : j.at("basis_matrices"))
      a.basis_matrices.push_back(as_matrix(b, where + ".basis_matrices"));
}

AlgebraConfig parse_algebra(const json& j, const std::string& base_dir)
{
  check_keys(j, {"kind", "inertia", "n", "m", "structure_constants", "basis_matrices", "file"}, "algebra");
  AlgebraConfig a;
  a.kind = j.value("kind", std::string("so3"));
  if (a.kind == "so3")
  {
    a.n = 3;
    if (j.contains("n") && as_int(j.at("n"), "algebra.n") != 3)
      throw ConfigError("algebra: so3 has n = 3");
    a.m = j.contains("m") ? as_int(j.at("m"), "algebra.m") : 3;
    a.inertia = j.contains("inertia") ? as_square(j.at("inertia"), 3, "algebra.inertia")
                                      : Eigen::MatrixXd::Identity(3, 3);
    if ((a.inertia - Eigen::MatrixXd(a.inertia.diagonal().asDiagonal())).cwiseAbs().maxCoeff() != 0.0)
      throw ConfigError("algebra: so3 inertia must be diagonal (principal axes)");
    if (j.contains("structure_constants") || j.contains("basis_matrices") || j.contains("file"))
      throw ConfigError("algebra: so3 takes only inertia and m");
  }
  else if (a.kind == "abelian")
  {
    if (j.contains("inertia"))
    {
      const int n_hint = j.contains("n") ? as_int(j.at("n"), "algebra.n") : 0;
      a.inertia = as_square(j.at("inertia"), n_hint, "algebra.inertia");
      a.n = static_cast<int>(a.inertia.rows());
    }
    else
    {
      if (!j.contains("n"))
        throw ConfigError("algebra: abelian model needs 'n' or 'inertia'");
      a.n = as_int(j.at("n"), "algebra.n");
      if (a.n <= 0)
        throw ConfigError("algebra: n must be positive");
      a.inertia = Eigen::MatrixXd::Identity(a.n, a.n);
    }
    a.m = j.contains("m") ? as_int(j.at("m"), "algebra.m") : a.n;
    if (j.contains("structure_constants") || j.contains("basis_matrices") || j.contains("file"))
      throw ConfigError("algebra: abelian takes only n, m and inertia");
  }
  else if (a.kind == "custom")
  {
    if (j.contains("file"))
    {
      auto path = std::filesystem::path(j.at("file").get<std::string>());
      if (path.is_relative())
        path = std::filesystem::path(base_dir) / path;
      std::ifstream is(path);
      if (!is)
        throw ConfigError("algebra: cannot open model file " + path.string());
      json file_doc;
      try
      {
        file_doc = json::parse(is);
      }
      catch (const json::exception& e)
      {
        throw ConfigError("algebra: malformed model file " + path.string() + ": " + e.what());
      }
      check_keys(file_doc, {"n", "m", "structure_constants", "inertia", "basis_matrices"}, "model file");
      parse_custom_fields(file_doc, a, "model file");
      if (j.contains("m"))
        a.m = as_int(j.at("m"), "algebra.m");
    }
    else
    {
      parse_custom_fields(j, a, "algebra");
    }
  }
  else
  {
    throw ConfigError("algebra: unknown kind '" + a.kind + "'");
  }
  if (a.m <= 0 || a.m > a.n)
    throw ConfigError("algebra: actuated dimension m must satisfy 0 < m <= n (m=" + std::to_string(a.m) +
                      ", n=" + std::to_string(a.n) + ")");
  return a;
}

Eigen::MatrixXd parse_element(const json& j, const GroupModel& gm, const std::string& where)
{
  if (is_nested(j))
  {
    Eigen::MatrixXd g = as_matrix(j, where);
    if (g.rows() != gm.rep_dim() || g.cols() != gm.rep_dim())
      throw ConfigError(where + ": expected a " + std::to_string(gm.rep_dim()) + "x" +
                        std::to_string(gm.rep_dim()) + " matrix");
    return g;
  }
  const Eigen::VectorXd v = as_vector(j, where);
  if (v.size() != gm.algebra().dim())
    throw ConfigError(where + ": exponential coordinates need " + std::to_string(gm.algebra().dim()) + " entries");
  return exp_map(gm, v);
}

Eigen::VectorXd sized_vector(const json& j, int n, const std::string& where)
{
  Eigen::VectorXd v = as_vector(j, where);
  if (v.size() != n)
    throw ConfigError(where + ": expected " + std::to_string(n) + " entries");
  return v;
}

}  // namespace

LieAlgebraModel build_algebra(const AlgebraConfig& a)
{
  try
  {
    if (a.kind == "so3")
      return make_so3(a.inertia.diagonal(), a.m);
    if (a.kind == "abelian")
      return make_abelian(a.inertia, a.m);
    return make_custom(a.n, a.m, a.structure_constants, a.inertia);
  }
  catch (const DimensionMismatch& e)
  {
    throw ConfigError(std::string("algebra: ") + e.what());
  }
}

GroupModel build_group(const AlgebraConfig& a)
{
  LieAlgebraModel model = build_algebra(a);
  if (a.kind == "custom" && !a.basis_matrices.empty())
  {
    try
    {
      return make_matrix_group(std::move(model), a.basis_matrices);
    }
    catch (const DimensionMismatch& e)
    {
      throw ConfigError(std::string("algebra.basis_matrices: ") + e.what());
    }
  }
  return make_group_for(model);
}

CostModel build_cost(const CostConfig& c, const LieAlgebraModel& model)
{
  if (c.kind == "min_acc")
    return min_acc_cost(model);
  if (!c.R)
    throw ConfigError("cost: quadratic cost needs R");
  if (c.R->rows() != model.actuated_dim())
    throw ConfigError("cost: R must be m x m");
  return quadratic_cost(*c.R);
}

BoundaryProblem build_problem(const ProblemConfig& p)
{
  return {p.x0, p.xT, p.y0, p.yT, p.T, p.steps};
}

ShootingOptions build_shooting_options(const RunConfig& c)
{
  ShootingOptions o;
  o.tol = c.solver.tol;
  o.max_iter = c.solver.max_iter;
  o.fd_step = c.solver.fd_step;
  o.seed = c.seed;
  return o;
}

ControlSignal build_control(const RunConfig& c, int m)
{
  if (!c.control)
    return zero_control(m);
  return interpolated_control(c.control->times, c.control->values);
}

RunConfig parse_config(const json& doc, const std::string& base_dir)
{
  check_keys(doc, {"algebra", "cost", "problem", "solver", "oracle", "output", "control", "extremal", "seed"},
             "config");
  RunConfig c;
  c.algebra = parse_algebra(doc.value("algebra", json::object()), base_dir);
  const GroupModel gm = build_group(c.algebra);
  const int n = c.algebra.n;
  const int m = c.algebra.m;

  const json cost = doc.value("cost", json::object());
  check_keys(cost, {"kind", "R"}, "cost");
  c.cost.kind = cost.value("kind", std::string("min_acc"));
  if (c.cost.kind != "min_acc" && c.cost.kind != "quadratic")
    throw ConfigError("cost: unknown kind '" + c.cost.kind + "'");
  if (cost.contains("R"))
    c.cost.R = as_square(cost.at("R"), m, "cost.R");
  if (c.cost.kind == "quadratic" && !c.cost.R)
    throw ConfigError("cost: quadratic cost needs R");

  const json prob = doc.value("problem", json::object());
  check_keys(prob, {"x0", "xT", "y0", "yT", "T", "steps"}, "problem");
  c.problem.x0 = prob.contains("x0") ? parse_element(prob.at("x0"), gm, "problem.x0") : gm.identity();
  c.problem.xT = prob.contains("xT") ? parse_element(prob.at("xT"), gm, "problem.xT") : gm.identity();
  c.problem.y0 = prob.contains("y0") ? sized_vector(prob.at("y0"), n, "problem.y0") : Eigen::VectorXd::Zero(n);
  c.problem.yT = prob.contains("yT") ? sized_vector(prob.at("yT"), n, "problem.yT") : Eigen::VectorXd::Zero(n);
  if (prob.contains("T"))
    c.problem.T = as_number(prob.at("T"), "problem.T");
  if (prob.contains("steps"))
    c.problem.steps = as_int(prob.at("steps"), "problem.steps");
  if (!(c.problem.T > 0.0))
    throw ConfigError("problem.T must be positive");
  if (c.problem.steps < 1)
    throw ConfigError("problem.steps must be >= 1");

  const json solver = doc.value("solver", json::object());
  check_keys(solver, {"tol", "max_iter", "fd_step", "guess"}, "solver");
  if (solver.contains("tol"))
    c.solver.tol = as_number(solver.at("tol"), "solver.tol");
  if (solver.contains("max_iter"))
    c.solver.max_iter = as_int(solver.at("max_iter"), "solver.max_iter");
  if (solver.contains("fd_step"))
    c.solver.fd_step = as_number(solver.at("fd_step"), "solver.fd_step");
  if (solver.contains("guess"))
    c.solver.guess = sized_vector(solver.at("guess"), 2 * n, "solver.guess");

  const json oracle = doc.value("oracle", json::object());
  check_keys(oracle,
             {"segments", "steps_per_segment", "penalty_weight", "max_outer", "grad_step", "grad_tol",
              "initial_step", "escalate_penalty"},
             "oracle");
  auto& o = c.oracle;
  if (oracle.contains("segments"))
    o.segments = as_int(oracle.at("segments"), "oracle.segments");
  if (oracle.contains("steps_per_segment"))
    o.steps_per_segment = as_int(oracle.at("steps_per_segment"), "oracle.steps_per_segment");
  if (oracle.contains("penalty_weight"))
    o.penalty_weight = as_number(oracle.at("penalty_weight"), "oracle.penalty_weight");
  if (oracle.contains("max_outer"))
    o.max_outer = as_int(oracle.at("max_outer"), "oracle.max_outer");
  if (oracle.contains("grad_step"))
    o.grad_step = as_number(oracle.at("grad_step"), "oracle.grad_step");
  if (oracle.contains("grad_tol"))
    o.grad_tol = as_number(oracle.at("grad_tol"), "oracle.grad_tol");
  if (oracle.contains("initial_step"))
    o.initial_step = as_number(oracle.at("initial_step"), "oracle.initial_step");
  if (oracle.contains("escalate_penalty"))
  {
    if (!oracle.at("escalate_penalty").is_boolean())
      throw ConfigError("oracle.escalate_penalty: expected a boolean");
    o.escalate_penalty = oracle.at("escalate_penalty").get<bool>();
  }
  try
  {
    check_config(o);
  }
  catch (const Error& e)
  {
    throw ConfigError(std::string("oracle: ") + e.what());
  }

  const json out = doc.value("output", json::object());
  check_keys(out, {"path", "format"}, "output");
  c.output.path = out.value("path", std::string());
  c.output.format = out.value("format", std::string("csv"));
  if (c.output.format != "csv" && c.output.format != "json")
    throw ConfigError("output.format must be 'csv' or 'json'");

  if (doc.contains("control"))
  {
    const json& ctl = doc.at("control");
    if (ctl.is_string())
    {
      if (ctl.get<std::string>() != "zero")
        throw ConfigError("control: expected \"zero\" or {times, values}");
    }
    else
    {
      check_keys(ctl, {"times", "values"}, "control");
      ControlSamples s;
      const Eigen::VectorXd t = as_vector(ctl.at("times"), "control.times");
      s.times.assign(t.data(), t.data() + t.size());
      for (const auto& v : ctl.at("values"))
        s.values.push_back(sized_vector(v, m, "control.values"));
      if (s.times.empty() || s.times.size() != s.values.size())
        throw ConfigError("control: times and values must be non-empty and of equal length");
      if (!std::is_sorted(s.times.begin(), s.times.end()) ||
          std::adjacent_find(s.times.begin(), s.times.end()) != s.times.end())
        throw ConfigError("control: times must be strictly increasing");
      c.control = std::move(s);
    }
  }

  if (doc.contains("extremal"))
  {
    const json& e = doc.at("extremal");
    check_keys(e, {"mu0", "xi0"}, "extremal");
    if (e.contains("mu0"))
      c.mu0 = sized_vector(e.at("mu0"), n, "extremal.mu0");
    if (e.contains("xi0"))
      c.xi0 = sized_vector(e.at("xi0"), n, "extremal.xi0");
  }

  if (doc.contains("seed"))
  {
    if (!doc.at("seed").is_number_unsigned())
      throw ConfigError("seed: expected a non-negative integer");
    c.seed = doc.at("seed").get<std::uint64_t>();
  }
  return c;
}

RunConfig load_config(const std::string& path)
{
  std::ifstream is(path);
  if (!is)
    throw ConfigError("cannot open config " + path);
  json doc;
  try
  {
    doc = json::parse(is);
  }
  catch (const json::exception& e)
  {
    throw ConfigError("malformed config " + path + ": " + e.what());
  }
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_config(doc, dir.empty() ? std::string(".") : dir.string());
}

json dump_config(const RunConfig& c)
{
  json doc;
  json& a = doc["algebra"];
  a["kind"] = c.algebra.kind;
  a["m"] = c.algebra.m;
  if (c.algebra.kind == "so3")
  {
    a["inertia"] = to_json(Eigen::VectorXd(c.algebra.inertia.diagonal()));
  }
  else
  {
    a["n"] = c.algebra.n;
    a["inertia"] = to_json(c.algebra.inertia);
  }
  if (c.algebra.kind == "custom")
  {
    json triples = json::array();
    for (const auto& s : c.algebra.structure_constants)
      triples.push_back(json::array({s.k, s.i, s.j, s.value}));
    a["structure_constants"] = std::move(triples);
    if (!c.algebra.basis_matrices.empty())
    {
      json mats = json::array();
      for (const auto& b : c.algebra.basis_matrices)
        mats.push_back(to_json(b));
      a["basis_matrices"] = std::move(mats);
    }
  }

  doc["cost"]["kind"] = c.cost.kind;
  if (c.cost.R)
    doc["cost"]["R"] = to_json(*c.cost.R);

  json& p = doc["problem"];
  p["x0"] = to_json(c.problem.x0);
  p["xT"] = to_json(c.problem.xT);
  p["y0"] = to_json(c.problem.y0);
  p["yT"] = to_json(c.problem.yT);
  p["T"] = c.problem.T;
  p["steps"] = c.problem.steps;

  json& s = doc["solver"];
  s["tol"] = c.solver.tol;
  s["max_iter"] = c.solver.max_iter;
  s["fd_step"] = c.solver.fd_step;
  if (c.solver.guess)
    s["guess"] = to_json(*c.solver.guess);

  json& o = doc["oracle"];
  o["segments"] = c.oracle.segments;
  o["steps_per_segment"] = c.oracle.steps_per_segment;
  o["penalty_weight"] = c.oracle.penalty_weight;
  o["max_outer"] = c.oracle.max_outer;
  o["grad_step"] = c.oracle.grad_step;
  o["grad_tol"] = c.oracle.grad_tol;
  o["initial_step"] = c.oracle.initial_step;
  o["escalate_penalty"] = c.oracle.escalate_penalty;

  doc["output"]["path"] = c.output.path;
  doc["output"]["format"] = c.output.format;

  if (c.control)
  {
    doc["control"]["times"] = c.control->times;
    json vals = json::array();
    for (const auto& v : c.control->values)
      vals.push_back(to_json(v));
    doc["control"]["values"] = std::move(vals);
  }
  else
  {
    doc["control"] = "zero";
  }
  if (c.mu0)
    doc["extremal"]["mu0"] = to_json(*c.mu0);
  if (c.xi0)
    doc["extremal"]["xi0"] = to_json(*c.xi0);
  doc["seed"] = c.seed;
  return doc;
}

}  // namespace aoc
