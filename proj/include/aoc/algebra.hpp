#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace aoc {

/// Components in the basis {E_i} of the Lie algebra.
using AlgebraVector = Eigen::VectorXd;
/// Components in the dual basis {E_i*}.
using AlgebraCovector = Eigen::VectorXd;

struct StructureConstant
{
  int k;
  int i;
  int j;
  double value;
};

/**
 * Finite-dimensional Lie algebra with a left-invariant inner product.
 *
 * Structure constants are stored as C[k](i, j) = C^k_ij so that
 * [E_i, E_j] = C^k_ij E_k. The first m basis vectors span the actuated
 * subspace and must be inertia-orthogonal to the remaining n - m.
 *
 * Immutable after construction. The constructor checks shapes only; use
 * validate_model() for the algebraic invariants.
 */
class LieAlgebraModel
{
public:
  LieAlgebraModel(int n, int m, std::vector<Eigen::MatrixXd> structure, Eigen::MatrixXd inertia,
                  std::string name = "custom");

  int dim() const { return n_; }
  int actuated_dim() const { return m_; }
  const std::string& name() const { return name_; }

  double C(int k, int i, int j) const { return structure_[k](i, j); }
  const std::vector<Eigen::MatrixXd>& structure() const { return structure_; }
  const Eigen::MatrixXd& inertia() const { return inertia_; }
  /// Inverse of the inertia, cached at construction.
  const Eigen::MatrixXd& inertia_inverse() const { return inertia_inv_; }
  bool is_abelian() const { return abelian_; }

  /// Matrix of ad_y: (ad_y)(k, j) = sum_i y^i C^k_ij.
  Eigen::MatrixXd ad_matrix(const AlgebraVector& y) const;

  void check_dim(const Eigen::VectorXd& v, const char* what) const;

private:
  int n_;
  int m_;
  std::string name_;
  std::vector<Eigen::MatrixXd> structure_;
  Eigen::MatrixXd inertia_;
  Eigen::LLT<Eigen::MatrixXd> inertia_llt_;
  Eigen::MatrixXd inertia_inv_;
  bool abelian_;
};

LieAlgebraModel make_so3(const Eigen::Vector3d& principal_inertia, int m = 3);
LieAlgebraModel make_abelian(const Eigen::MatrixXd& inertia, int m);
LieAlgebraModel make_custom(int n, int m, const std::vector<StructureConstant>& constants,
                            const Eigen::MatrixXd& inertia);

AlgebraVector bracket(const LieAlgebraModel& model, const AlgebraVector& y, const AlgebraVector& z);

/// Coadjoint action with <ad*_y mu, z> = <mu, [y, z]>. On so(3) this is mu x y.
AlgebraCovector ad_star(const LieAlgebraModel& model, const AlgebraVector& y, const AlgebraCovector& mu);

AlgebraCovector flat(const LieAlgebraModel& model, const AlgebraVector& y);
AlgebraVector sharp(const LieAlgebraModel& model, const AlgebraCovector& xi);

/// Levi-Civita bilinear map of the left-invariant metric.
AlgebraVector connection_alpha(const LieAlgebraModel& model, const AlgebraVector& y, const AlgebraVector& z);

/// Geodesic drift I^# ad*_y I^b y (equals -alpha(y, y)).
AlgebraVector bias(const LieAlgebraModel& model, const AlgebraVector& y);

/// Keeps the first m (actuated) components, zeroes the rest.
AlgebraCovector restrict_covector(const LieAlgebraModel& model, const AlgebraCovector& xi);

/// Pads an m-vector of controls with n - m zeros.
AlgebraVector embed_control(const LieAlgebraModel& model, const Eigen::VectorXd& u);

/// Inner product I(y, z).
double inner(const LieAlgebraModel& model, const AlgebraVector& y, const AlgebraVector& z);

struct CheckResult
{
  std::string name;
  bool passed;
  double residual;
};

struct ValidationReport
{
  std::vector<CheckResult> checks;

  bool ok() const;
  const CheckResult* find(const std::string& name) const;
};

inline constexpr double kValidationTolerance = 1e-12;

/// Antisymmetry, Jacobi, SPD inertia and adapted-basis checks.
ValidationReport validate_model(const LieAlgebraModel& model, double tol = kValidationTolerance);

}  // namespace aoc
