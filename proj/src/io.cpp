#include "aoc/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

#include "aoc/errors.hpp"

namespace aoc {

std::string format_double(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trajectory_csv_header(const Trajectory& traj)
{
  if (traj.size() == 0)
    return "t";
  const auto d = traj.states.front().x.rows();
  const auto n = traj.states.front().y.size();
  const auto m = traj.controls.front().size();
  std::string h = "t";
  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c < d; ++c)
      h += ",x_" + std::to_string(r) + "_" + std::to_string(c);
  for (Eigen::Index i = 0; i < n; ++i)
    h += ",y_" + std::to_string(i);
  for (Eigen::Index a = 0; a < m; ++a)
    h += ",u_" + std::to_string(a);
  if (traj.costates)
  {
    for (Eigen::Index i = 0; i < n; ++i)
      h += ",mu_" + std::to_string(i);
    for (Eigen::Index i = 0; i < n; ++i)
      h += ",xi_" + std::to_string(i);
  }
  if (traj.hamiltonian)
    h += ",H";
  return h;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj)
{
  if (!traj.consistent())
    throw Error("cannot serialise an inconsistent trajectory");
  os << trajectory_csv_header(traj) << '\n';
  for (std::size_t k = 0; k < traj.size(); ++k)
  {
    std::string line = format_double(traj.times[k]);
    const auto& x = traj.states[k].x;
    for (Eigen::Index r = 0; r < x.rows(); ++r)
      for (Eigen::Index c = 0; c < x.cols(); ++c)
        line += "," + format_double(x(r, c));
    for (double v : traj.states[k].y)
      line += "," + format_double(v);
    for (double v : traj.controls[k])
      line += "," + format_double(v);
    if (traj.costates)
    {
      for (double v : (*traj.costates)[k].mu)
        line += "," + format_double(v);
      for (double v : (*traj.costates)[k].xi)
        line += "," + format_double(v);
    }
    if (traj.hamiltonian)
      line += "," + format_double((*traj.hamiltonian)[k]);
    os << line << '\n';
  }
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj)
{
  std::ofstream os(path);
  if (!os)
    throw Error("cannot open " + path + " for writing");
  write_trajectory_csv(os, traj);
}

nlohmann::json to_json(const Eigen::VectorXd& v)
{
  return std::vector<double>(v.data(), v.data() + v.size());
}

nlohmann::json to_json(const Eigen::MatrixXd& m)
{
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
  {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json trajectory_to_json(const Trajectory& traj)
{
  nlohmann::json j;
  j["t"] = traj.times;
  nlohmann::json xs = nlohmann::json::array();
  nlohmann::json ys = nlohmann::json::array();
  nlohmann::json us = nlohmann::json::array();
  for (std::size_t k = 0; k < traj.size(); ++k)
  {
    xs.push_back(to_json(Eigen::MatrixXd(traj.states[k].x)));
    ys.push_back(to_json(Eigen::VectorXd(traj.states[k].y)));
    us.push_back(to_json(Eigen::VectorXd(traj.controls[k])));
  }
  j["x"] = std::move(xs);
  j["y"] = std::move(ys);
  j["u"] = std::move(us);
  if (traj.costates)
  {
    nlohmann::json mus = nlohmann::json::array();
    nlohmann::json xis = nlohmann::json::array();
    for (const auto& c : *traj.costates)
    {
      mus.push_back(to_json(Eigen::VectorXd(c.mu)));
      xis.push_back(to_json(Eigen::VectorXd(c.xi)));
    }
    j["mu"] = std::move(mus);
    j["xi"] = std::move(xis);
  }
  if (traj.hamiltonian)
    j["H"] = *traj.hamiltonian;
  return j;
}

}  // namespace aoc
