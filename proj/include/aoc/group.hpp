#pragma once

#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "aoc/algebra.hpp"

namespace aoc {

using GroupElement = Eigen::MatrixXd;

enum class GroupKind
{
  so3,
  abelian,
  generic_matrix
};

/**
 * Matrix representation of a connected Lie group.
 *
 * hat(E_i) = basis[i] is a d x d matrix. For so3 these are the skew matrices
 * S(e_i); for the abelian group R^n they are the translation generators of
 * the (n+1) x (n+1) homogeneous representation.
 */
class GroupModel
{
public:
  GroupModel(LieAlgebraModel algebra, std::vector<Eigen::MatrixXd> basis, GroupKind kind);

  const LieAlgebraModel& algebra() const { return algebra_; }
  int rep_dim() const { return d_; }
  GroupKind kind() const { return kind_; }
  const std::vector<Eigen::MatrixXd>& basis() const { return basis_; }

  Eigen::MatrixXd hat(const AlgebraVector& y) const;
  /// Least-squares inverse of hat; exact for matrices in the image of hat.
  AlgebraVector vee(const Eigen::MatrixXd& X) const;

  GroupElement identity() const { return GroupElement::Identity(d_, d_); }

private:
  LieAlgebraModel algebra_;
  std::vector<Eigen::MatrixXd> basis_;
  GroupKind kind_;
  int d_;
  Eigen::MatrixXd vee_pinv_;
};

GroupModel make_so3_group(LieAlgebraModel algebra);
GroupModel make_abelian_group(LieAlgebraModel algebra);
GroupModel make_matrix_group(LieAlgebraModel algebra, std::vector<Eigen::MatrixXd> basis);
/// Uses the adjoint representation hat(E_i) = ad_{E_i}; faithful only for centreless algebras.
GroupModel make_adjoint_group(LieAlgebraModel algebra);
/// Picks the natural representation for so3/abelian models, adjoint otherwise.
GroupModel make_group_for(const LieAlgebraModel& algebra);

Eigen::Matrix3d skew(const Eigen::Vector3d& v);

/// exp(t * hat(y)).
GroupElement exp_map(const GroupModel& gm, const AlgebraVector& y, double t = 1.0);

inline constexpr double kLogAngleMargin = 1e-6;

/// Smallest-magnitude logarithm. For so3, throws AngleOutOfRange when the
/// rotation angle is >= max_angle (default pi - 1e-6).
AlgebraVector log_map(const GroupModel& gm, const GroupElement& g,
                      double max_angle = std::numbers::pi - kLogAngleMargin);

GroupElement group_inverse(const GroupModel& gm, const GroupElement& g);

/// Ad_g z = vee(g hat(z) g^-1).
AlgebraVector adjoint_action(const GroupModel& gm, const GroupElement& g, const AlgebraVector& z);

/// Distance of g from the group manifold (so3: ||g^T g - I||_F).
double manifold_defect(const GroupModel& gm, const GroupElement& g);

/// Max entrywise residual of hat(E_i)hat(E_j) - hat(E_j)hat(E_i) - C^k_ij hat(E_k).
double commutator_residual(const GroupModel& gm);

ValidationReport validate_group(const GroupModel& gm, double tol = kValidationTolerance);

/// Inverse of the trivialized derivative of exp, truncated after the
/// double-bracket term (sufficient for fourth order). Uses the body-side
/// convention, v + [theta,v]/2 + [theta,[theta,v]]/12.
AlgebraVector dexp_inv(const LieAlgebraModel& model, const AlgebraVector& theta, const AlgebraVector& v);

/**
 * Vector field on G x R^k in left-trivialized form. Given (t, x, z) it writes
 * the body velocity of x (so that dx/dt = x hat(body)) and dz/dt.
 */
using CoupledField =
    std::function<void(double t, const GroupElement& x, const Eigen::VectorXd& z, AlgebraVector& body,
                       Eigen::VectorXd& zdot)>;

/// One RKMK4 step on G x R^k; x stays on G up to exp accuracy.
void rkmk4_step(const GroupModel& gm, const CoupledField& field, double t, double h, GroupElement& x,
                Eigen::VectorXd& z);

using BodyVelocity = std::function<AlgebraVector(double)>;

/// x(t+h) from dx/dt = x hat(y(t)) using RKMK4.
GroupElement reconstruct_step(const GroupModel& gm, const GroupElement& x, const BodyVelocity& y_of_t, double t,
                              double h);

/// Classical RK4 on the matrix entries followed by projection back to the
/// group. Reference scheme for comparisons only.
GroupElement rk4_project_step(const GroupModel& gm, const GroupElement& x, const BodyVelocity& y_of_t, double t,
                              double h);

}  // namespace aoc
