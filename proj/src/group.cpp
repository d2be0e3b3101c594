#include "aoc/group.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include <unsupported/Eigen/MatrixFunctions>

#include "aoc/errors.hpp"

namespace aoc {

namespace {

constexpr double kSmallAngle = 1e-4;

Eigen::MatrixXd exp_series(const Eigen::MatrixXd& A)
{
  // Scaling and squaring around a Taylor series.
  const double norm = A.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5)
    squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Eigen::MatrixXd B = A / std::ldexp(1.0, squarings);

  const auto d = A.rows();
  Eigen::MatrixXd sum = Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(d, d);
  for (int k = 1; k < 60; ++k)
  {
    term = term * B / static_cast<double>(k);
    sum += term;
    if (term.norm() <= std::numeric_limits<double>::epsilon() * sum.norm())
      break;
  }
  for (int s = 0; s < squarings; ++s)
    sum = sum * sum;
  return sum;
}

Eigen::Matrix3d so3_exp(const Eigen::Vector3d& w)
{
  const double theta2 = w.squaredNorm();
  const double theta = std::sqrt(theta2);
  double a;
  double b;
  if (theta < kSmallAngle)
  {
    a = 1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0;
    b = 0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0;
  }
  else
  {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / theta2;
  }
  const Eigen::Matrix3d K = skew(w);
  return Eigen::Matrix3d::Identity() + a * K + b * K * K;
}

Eigen::Vector3d so3_log(const Eigen::Matrix3d& R, double max_angle)
{
  const double c = std::clamp(0.5 * (R.trace() - 1.0), -1.0, 1.0);
  const double theta = std::acos(c);
  if (theta >= max_angle)
    throw AngleOutOfRange(theta);

  const Eigen::Vector3d v(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1));
  if (theta < kSmallAngle)
    return 0.5 * (1.0 + theta * theta / 6.0 + 7.0 * std::pow(theta, 4) / 360.0) * v;
  if (theta < 3.0)
    return 0.5 * theta / std::sin(theta) * v;

  // Near a half-turn the skew part vanishes; recover the axis from the
  // symmetric part, which is (1 - cos theta)(a a^T - I).
  const Eigen::Matrix3d S = 0.5 * (R + R.transpose()) - Eigen::Matrix3d::Identity();
  const Eigen::Matrix3d aat = S / (1.0 - c) + Eigen::Matrix3d::Identity();
  int col = 0;
  aat.diagonal().maxCoeff(&col);
  Eigen::Vector3d axis = aat.col(col) / std::sqrt(std::max(aat(col, col), 1e-300));
  axis.normalize();
  if (axis.dot(v) < 0.0)
    axis = -axis;
  return theta * axis;
}

}  // namespace

Eigen::Matrix3d skew(const Eigen::Vector3d& v)
{
  Eigen::Matrix3d m;
  m << 0.0, -v(2), v(1),
       v(2), 0.0, -v(0),
       -v(1), v(0), 0.0;
  return m;
}

GroupModel::GroupModel(LieAlgebraModel algebra, std::vector<Eigen::MatrixXd> basis, GroupKind kind)
  : algebra_(std::move(algebra)), basis_(std::move(basis)), kind_(kind)
{
  const int n = algebra_.dim();
  if (static_cast<int>(basis_.size()) != n)
    throw DimensionMismatch("group model needs one basis matrix per algebra dimension");
  d_ = static_cast<int>(basis_.front().rows());
  Eigen::MatrixXd stacked(d_ * d_, n);
  for (int i = 0; i < n; ++i)
  {
    if (basis_[i].rows() != d_ || basis_[i].cols() != d_)
      throw DimensionMismatch("basis matrices must be square and of equal size");
    stacked.col(i) = basis_[i].reshaped();
  }
  vee_pinv_ = stacked.completeOrthogonalDecomposition().pseudoInverse();
}

Eigen::MatrixXd GroupModel::hat(const AlgebraVector& y) const
{
  algebra_.check_dim(y, "hat");
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(d_, d_);
  for (int i = 0; i < algebra_.dim(); ++i)
    X += y(i) * basis_[i];
  return X;
}

AlgebraVector GroupModel::vee(const Eigen::MatrixXd& X) const
{
  if (X.rows() != d_ || X.cols() != d_)
    throw DimensionMismatch("vee: matrix has wrong size");
  if (kind_ == GroupKind::so3)
    return Eigen::Vector3d(0.5 * (X(2, 1) - X(1, 2)), 0.5 * (X(0, 2) - X(2, 0)), 0.5 * (X(1, 0) - X(0, 1)));
  if (kind_ == GroupKind::abelian)
    return X.col(d_ - 1).head(d_ - 1);
  return vee_pinv_ * X.reshaped();
}

GroupModel make_so3_group(LieAlgebraModel algebra)
{
  if (algebra.dim() != 3)
    throw DimensionMismatch("so3 group requires a 3-dimensional algebra");
  std::vector<Eigen::MatrixXd> basis;
  for (int i = 0; i < 3; ++i)
    basis.emplace_back(skew(Eigen::Vector3d::Unit(i)));
  return GroupModel(std::move(algebra), std::move(basis), GroupKind::so3);
}

GroupModel make_abelian_group(LieAlgebraModel algebra)
{
  const int n = algebra.dim();
  std::vector<Eigen::MatrixXd> basis;
  for (int i = 0; i < n; ++i)
  {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n + 1, n + 1);
    b(i, n) = 1.0;
    basis.push_back(std::move(b));
  }
  return GroupModel(std::move(algebra), std::move(basis), GroupKind::abelian);
}

GroupModel make_matrix_group(LieAlgebraModel algebra, std::vector<Eigen::MatrixXd> basis)
{
  return GroupModel(std::move(algebra), std::move(basis), GroupKind::generic_matrix);
}

GroupModel make_adjoint_group(LieAlgebraModel algebra)
{
  std::vector<Eigen::MatrixXd> basis;
  for (int i = 0; i < algebra.dim(); ++i)
    basis.push_back(algebra.ad_matrix(AlgebraVector::Unit(algebra.dim(), i)));
  return GroupModel(std::move(algebra), std::move(basis), GroupKind::generic_matrix);
}

GroupModel make_group_for(const LieAlgebraModel& algebra)
{
  if (algebra.name() == "so3")
    return make_so3_group(algebra);
  if (algebra.is_abelian())
    return make_abelian_group(algebra);
  return make_adjoint_group(algebra);
}

GroupElement exp_map(const GroupModel& gm, const AlgebraVector& y, double t)
{
  gm.algebra().check_dim(y, "exp_map");
  switch (gm.kind())
  {
  case GroupKind::so3:
    return so3_exp(t * Eigen::Vector3d(y));
  case GroupKind::abelian:
  {
    GroupElement g = gm.identity();
    g.col(gm.rep_dim() - 1).head(gm.rep_dim() - 1) = t * y;
    return g;
  }
  case GroupKind::generic_matrix:
    break;
  }
  return exp_series(t * gm.hat(y));
}

AlgebraVector log_map(const GroupModel& gm, const GroupElement& g, double max_angle)
{
  if (g.rows() != gm.rep_dim() || g.cols() != gm.rep_dim())
    throw DimensionMismatch("log_map: group element has wrong size");
  switch (gm.kind())
  {
  case GroupKind::so3:
    return so3_log(Eigen::Matrix3d(g), max_angle);
  case GroupKind::abelian:
    return g.col(gm.rep_dim() - 1).head(gm.rep_dim() - 1);
  case GroupKind::generic_matrix:
    break;
  }
  const Eigen::MatrixXd L = g.log();
  return gm.vee(L);
}

GroupElement group_inverse(const GroupModel& gm, const GroupElement& g)
{
  switch (gm.kind())
  {
  case GroupKind::so3:
    return g.transpose();
  case GroupKind::abelian:
  {
    GroupElement inv = gm.identity();
    inv.col(gm.rep_dim() - 1).head(gm.rep_dim() - 1) = -g.col(gm.rep_dim() - 1).head(gm.rep_dim() - 1);
    return inv;
  }
  case GroupKind::generic_matrix:
    break;
  }
  return g.partialPivLu().inverse();
}

AlgebraVector adjoint_action(const GroupModel& gm, const GroupElement& g, const AlgebraVector& z)
{
  return gm.vee(g * gm.hat(z) * group_inverse(gm, g));
}

double manifold_defect(const GroupModel& gm, const GroupElement& g)
{
  const int d = gm.rep_dim();
  switch (gm.kind())
  {
  case GroupKind::so3:
    return (g.transpose() * g - Eigen::MatrixXd::Identity(d, d)).norm();
  case GroupKind::abelian:
  {
    Eigen::MatrixXd expected = Eigen::MatrixXd::Identity(d, d);
    expected.col(d - 1).head(d - 1) = g.col(d - 1).head(d - 1);
    return (g - expected).norm();
  }
  case GroupKind::generic_matrix:
    break;
  }
  // Distance from exp(log(g)) is the only generic membership test available.
  return (exp_map(gm, log_map(gm, g)) - g).norm();
}

double commutator_residual(const GroupModel& gm)
{
  const auto& A = gm.algebra();
  const int n = A.dim();
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
    {
      const Eigen::MatrixXd& Ei = gm.basis()[i];
      const Eigen::MatrixXd& Ej = gm.basis()[j];
      Eigen::MatrixXd r = Ei * Ej - Ej * Ei;
      for (int k = 0; k < n; ++k)
        r -= A.C(k, i, j) * gm.basis()[k];
      worst = std::max(worst, r.cwiseAbs().maxCoeff());
    }
  return worst;
}

ValidationReport validate_group(const GroupModel& gm, double tol)
{
  ValidationReport report;
  const double comm = commutator_residual(gm);
  report.checks.push_back({"commutator_consistency", comm <= tol, comm});

  // hat must be injective for log/vee to be meaningful.
  const int n = gm.algebra().dim();
  Eigen::MatrixXd stacked(gm.rep_dim() * gm.rep_dim(), n);
  for (int i = 0; i < n; ++i)
    stacked.col(i) = gm.basis()[i].reshaped();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(stacked);
  report.checks.push_back({"hat_injective", lu.rank() == n, static_cast<double>(n - lu.rank())});

  if (gm.kind() == GroupKind::so3)
  {
    double skew_res = 0.0;
    for (const auto& b : gm.basis())
      skew_res = std::max(skew_res, (b + b.transpose()).cwiseAbs().maxCoeff());
    report.checks.push_back({"so3_skew", skew_res <= tol, skew_res});
  }
  return report;
}

AlgebraVector dexp_inv(const LieAlgebraModel& model, const AlgebraVector& theta, const AlgebraVector& v)
{
  if (model.is_abelian())
    return v;
  const AlgebraVector tv = bracket(model, theta, v);
  // Left-translation form x' = x v with x = x0 exp(theta) flips the first-order sign.
  return v + 0.5 * tv + bracket(model, theta, tv) / 12.0;
}

void rkmk4_step(const GroupModel& gm, const CoupledField& field, double t, double h, GroupElement& x,
                Eigen::VectorXd& z)
{
  const LieAlgebraModel& A = gm.algebra();
  const int n = A.dim();
  AlgebraVector body(n);
  Eigen::VectorXd zdot(z.size());

  field(t, x, z, body, zdot);
  const AlgebraVector k1 = h * body;
  const Eigen::VectorXd l1 = h * zdot;

  AlgebraVector u = 0.5 * k1;
  field(t + 0.5 * h, x * exp_map(gm, u), z + 0.5 * l1, body, zdot);
  const AlgebraVector k2 = h * dexp_inv(A, u, body);
  const Eigen::VectorXd l2 = h * zdot;

  u = 0.5 * k2;
  field(t + 0.5 * h, x * exp_map(gm, u), z + 0.5 * l2, body, zdot);
  const AlgebraVector k3 = h * dexp_inv(A, u, body);
  const Eigen::VectorXd l3 = h * zdot;

  u = k3;
  field(t + h, x * exp_map(gm, u), z + l3, body, zdot);
  const AlgebraVector k4 = h * dexp_inv(A, u, body);
  const Eigen::VectorXd l4 = h * zdot;

  const AlgebraVector theta = (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
  x = x * exp_map(gm, theta);
  z += (l1 + 2.0 * l2 + 2.0 * l3 + l4) / 6.0;
}

GroupElement reconstruct_step(const GroupModel& gm, const GroupElement& x, const BodyVelocity& y_of_t, double t,
                              double h)
{
  GroupElement out = x;
  Eigen::VectorXd none(0);
  const CoupledField field = [&](double s, const GroupElement&, const Eigen::VectorXd&, AlgebraVector& body,
                                 Eigen::VectorXd&) { body = y_of_t(s); };
  rkmk4_step(gm, field, t, h, out, none);
  return out;
}

GroupElement rk4_project_step(const GroupModel& gm, const GroupElement& x, const BodyVelocity& y_of_t, double t,
                              double h)
{
  auto f = [&](double s, const GroupElement& g) -> GroupElement { return g * gm.hat(y_of_t(s)); };
  const GroupElement k1 = f(t, x);
  const GroupElement k2 = f(t + 0.5 * h, x + 0.5 * h * k1);
  const GroupElement k3 = f(t + 0.5 * h, x + 0.5 * h * k2);
  const GroupElement k4 = f(t + h, x + h * k3);
  GroupElement next = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (gm.kind() == GroupKind::so3)
  {
    // Closest rotation in the Frobenius norm.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(next, Eigen::ComputeFullU | Eigen::ComputeFullV);
    next = svd.matrixU() * svd.matrixV().transpose();
  }
  return next;
}

}  // namespace aoc
