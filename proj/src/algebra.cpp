#include "aoc/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "aoc/errors.hpp"

namespace aoc {

LieAlgebraModel::LieAlgebraModel(int n, int m, std::vector<Eigen::MatrixXd> structure, Eigen::MatrixXd inertia,
                                 std::string name)
  : n_(n), m_(m), name_(std::move(name)), structure_(std::move(structure)), inertia_(std::move(inertia))
{
  if (n_ <= 0)
    throw DimensionMismatch("algebra dimension must be positive");
  if (m_ <= 0 || m_ > n_)
    throw DimensionMismatch("actuated dimension must satisfy 0 < m <= n (got m=" + std::to_string(m_) +
                            ", n=" + std::to_string(n_) + ")");
  if (static_cast<int>(structure_.size()) != n_)
    throw DimensionMismatch("expected n structure-constant slices");
  for (const auto& slice : structure_)
    if (slice.rows() != n_ || slice.cols() != n_)
      throw DimensionMismatch("structure-constant slice has wrong shape");
  if (inertia_.rows() != n_ || inertia_.cols() != n_)
    throw DimensionMismatch("inertia must be n x n");

  // The inverse is only meaningful for SPD inertia; validate_model reports otherwise.
  inertia_llt_.compute(inertia_);
  if (inertia_llt_.info() == Eigen::Success)
    inertia_inv_ = inertia_llt_.solve(Eigen::MatrixXd::Identity(n_, n_));
  else
    inertia_inv_ = inertia_.completeOrthogonalDecomposition().pseudoInverse();

  abelian_ = std::all_of(structure_.begin(), structure_.end(),
                         [](const Eigen::MatrixXd& s) { return s.cwiseAbs().maxCoeff() == 0.0; });
}

Eigen::MatrixXd LieAlgebraModel::ad_matrix(const AlgebraVector& y) const
{
  Eigen::MatrixXd ad(n_, n_);
  for (int k = 0; k < n_; ++k)
    ad.row(k) = y.transpose() * structure_[k];
  return ad;
}

void LieAlgebraModel::check_dim(const Eigen::VectorXd& v, const char* what) const
{
  if (v.size() != n_)
    throw DimensionMismatch(std::string(what) + ": expected dimension " + std::to_string(n_) + ", got " +
                            std::to_string(v.size()));
}

LieAlgebraModel make_so3(const Eigen::Vector3d& principal_inertia, int m)
{
  std::vector<Eigen::MatrixXd> c(3, Eigen::MatrixXd::Zero(3, 3));
  // [e1, e2] = e3 and cyclic.
  for (int k = 0; k < 3; ++k)
  {
    const int i = (k + 1) % 3;
    const int j = (k + 2) % 3;
    c[k](i, j) = 1.0;
    c[k](j, i) = -1.0;
  }
  return LieAlgebraModel(3, m, std::move(c), principal_inertia.asDiagonal().toDenseMatrix(), "so3");
}

LieAlgebraModel make_abelian(const Eigen::MatrixXd& inertia, int m)
{
  const int n = static_cast<int>(inertia.rows());
  std::vector<Eigen::MatrixXd> c(n, Eigen::MatrixXd::Zero(n, n));
  return LieAlgebraModel(n, m, std::move(c), inertia, "abelian");
}

LieAlgebraModel make_custom(int n, int m, const std::vector<StructureConstant>& constants,
                            const Eigen::MatrixXd& inertia)
{
  if (n <= 0)
    throw DimensionMismatch("algebra dimension must be positive");
  std::vector<Eigen::MatrixXd> c(n, Eigen::MatrixXd::Zero(n, n));
  for (const auto& sc : constants)
  {
    if (sc.k < 0 || sc.k >= n || sc.i < 0 || sc.i >= n || sc.j < 0 || sc.j >= n)
      throw DimensionMismatch("structure constant index out of range");
    c[sc.k](sc.i, sc.j) = sc.value;
  }
  return LieAlgebraModel(n, m, std::move(c), inertia, "custom");
}

AlgebraVector bracket(const LieAlgebraModel& model, const AlgebraVector& y, const AlgebraVector& z)
{
  model.check_dim(y, "bracket");
  model.check_dim(z, "bracket");
  const int n = model.dim();
  AlgebraVector out(n);
  for (int k = 0; k < n; ++k)
    out(k) = y.dot(model.structure()[k] * z);
  return out;
}

AlgebraCovector ad_star(const LieAlgebraModel& model, const AlgebraVector& y, const AlgebraCovector& mu)
{
  model.check_dim(y, "ad_star");
  model.check_dim(mu, "ad_star");
  return model.ad_matrix(y).transpose() * mu;
}

AlgebraCovector flat(const LieAlgebraModel& model, const AlgebraVector& y)
{
  model.check_dim(y, "flat");
  return model.inertia() * y;
}

AlgebraVector sharp(const LieAlgebraModel& model, const AlgebraCovector& xi)
{
  model.check_dim(xi, "sharp");
  return model.inertia_inverse() * xi;
}

AlgebraVector connection_alpha(const LieAlgebraModel& model, const AlgebraVector& y, const AlgebraVector& z)
{
  const AlgebraCovector sym = ad_star(model, y, flat(model, z)) + ad_star(model, z, flat(model, y));
  return 0.5 * bracket(model, y, z) - 0.5 * sharp(model, sym);
}

AlgebraVector bias(const LieAlgebraModel& model, const AlgebraVector& y)
{
  return sharp(model, ad_star(model, y, flat(model, y)));
}

AlgebraCovector restrict_covector(const LieAlgebraModel& model, const AlgebraCovector& xi)
{
  model.check_dim(xi, "restrict_covector");
  AlgebraCovector out = AlgebraCovector::Zero(model.dim());
  out.head(model.actuated_dim()) = xi.head(model.actuated_dim());
  return out;
}

AlgebraVector embed_control(const LieAlgebraModel& model, const Eigen::VectorXd& u)
{
  if (u.size() != model.actuated_dim())
    throw DimensionMismatch("control: expected dimension " + std::to_string(model.actuated_dim()) + ", got " +
                            std::to_string(u.size()));
  AlgebraVector out = AlgebraVector::Zero(model.dim());
  out.head(model.actuated_dim()) = u;
  return out;
}

double inner(const LieAlgebraModel& model, const AlgebraVector& y, const AlgebraVector& z)
{
  model.check_dim(y, "inner");
  model.check_dim(z, "inner");
  return y.dot(model.inertia() * z);
}

bool ValidationReport::ok() const
{
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

const CheckResult* ValidationReport::find(const std::string& name) const
{
  for (const auto& c : checks)
    if (c.name == name)
      return &c;
  return nullptr;
}

ValidationReport validate_model(const LieAlgebraModel& model, double tol)
{
  const int n = model.dim();
  const int m = model.actuated_dim();
  ValidationReport report;

  double antisym = 0.0;
  for (int k = 0; k < n; ++k)
    antisym = std::max(antisym, (model.structure()[k] + model.structure()[k].transpose()).cwiseAbs().maxCoeff());
  report.checks.push_back({"antisymmetry", antisym <= tol, antisym});

  double jacobi = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int p = 0; p < n; ++p)
        {
          double s = 0.0;
          for (int l = 0; l < n; ++l)
            s += model.C(l, i, j) * model.C(p, l, k) + model.C(l, j, k) * model.C(p, l, i) +
                 model.C(l, k, i) * model.C(p, l, j);
          jacobi = std::max(jacobi, std::abs(s));
        }
  report.checks.push_back({"jacobi", jacobi <= tol, jacobi});

  const Eigen::MatrixXd& I = model.inertia();
  const double sym = (I - I.transpose()).cwiseAbs().maxCoeff();
  report.checks.push_back({"inertia_symmetric", sym <= tol, sym});

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (I + I.transpose()), Eigen::EigenvaluesOnly);
  const double min_eig = eig.eigenvalues().minCoeff();
  // Residual reported as the amount by which the smallest eigenvalue fails to be positive.
  report.checks.push_back({"inertia_spd", min_eig > 0.0, min_eig > 0.0 ? 0.0 : -min_eig});

  double adapted = 0.0;
  if (m < n)
    adapted = std::max(I.topRightCorner(m, n - m).cwiseAbs().maxCoeff(),
                       I.bottomLeftCorner(n - m, m).cwiseAbs().maxCoeff());
  report.checks.push_back({"adapted_basis", adapted <= tol, adapted});

  return report;
}

}  // namespace aoc
