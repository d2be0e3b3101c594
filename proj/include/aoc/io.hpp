#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "aoc/dynamics.hpp"

namespace aoc {

/// Header: t, x_r_c (row-major), y_i, u_a, then mu_i, xi_i, H when present.
std::string trajectory_csv_header(const Trajectory& traj);

/// Writes the trajectory with 17 significant digits per value.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

/// Column-oriented JSON form of a trajectory.
nlohmann::json trajectory_to_json(const Trajectory& traj);

nlohmann::json to_json(const Eigen::VectorXd& v);
nlohmann::json to_json(const Eigen::MatrixXd& m);

std::string format_double(double v);

}  // namespace aoc
