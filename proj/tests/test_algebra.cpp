#include <gtest/gtest.h>

#include <random>

#include "aoc/algebra.hpp"
#include "aoc/errors.hpp"

using namespace aoc;

namespace
{

Eigen::VectorXd random_vec(std::mt19937_64& rng, int n, double scale = 1.0)
{
  std::uniform_real_distribution<double> d(-scale, scale);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i)
    v(i) = d(rng);
  return v;
}

// Heisenberg algebra: [e1, e2] = e3, e3 central.
LieAlgebraModel heisenberg()
{
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(3, 3);
  I(0, 0) = 2.0;
  I(0, 1) = I(1, 0) = 0.3;
  return make_custom(3, 2, {{2, 0, 1, 1.0}, {2, 1, 0, -1.0}}, I);
}

std::vector<LieAlgebraModel> builtin_models()
{
  Eigen::MatrixXd abelian_inertia(3, 3);
  abelian_inertia << 2.0, 0.5, 0.0,
                     0.5, 1.0, 0.0,
                     0.0, 0.0, 3.0;
  return {make_so3(Eigen::Vector3d(1.0, 2.0, 3.0)), make_so3(Eigen::Vector3d(1.0, 2.0, 3.0), 2),
          make_abelian(abelian_inertia, 2), heisenberg()};
}

}  // namespace

TEST(Bracket, So3MatchesCrossProduct)
{
  const auto so3 = make_so3(Eigen::Vector3d(1.0, 2.0, 3.0));
  EXPECT_TRUE(bracket(so3, Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 1, 0)).isApprox(Eigen::Vector3d(0, 0, 1)));

  std::mt19937_64 rng(1);
  for (int s = 0; s < 100; ++s)
  {
    const Eigen::Vector3d y = random_vec(rng, 3);
    const Eigen::Vector3d z = random_vec(rng, 3);
    EXPECT_LT((bracket(so3, y, z) - Eigen::VectorXd(y.cross(z))).norm(), 1e-14);
  }
}

TEST(Bracket, SelfBracketAndAbelianVanish)
{
  std::mt19937_64 rng(2);
  const auto ab = make_abelian(Eigen::MatrixXd::Identity(4, 4), 4);
  for (const auto& model : builtin_models())
  {
    const Eigen::VectorXd y = random_vec(rng, model.dim());
    EXPECT_EQ(bracket(model, y, y).norm(), 0.0);
  }
  EXPECT_EQ(bracket(ab, random_vec(rng, 4), random_vec(rng, 4)).norm(), 0.0);
}

TEST(Bracket, DimensionMismatchThrows)
{
  const auto so3 = make_so3(Eigen::Vector3d::Ones());
  EXPECT_THROW(bracket(so3, Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(3)), DimensionMismatch);
  EXPECT_THROW(ad_star(so3, Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(4)), DimensionMismatch);
  EXPECT_THROW(flat(so3, Eigen::VectorXd::Zero(1)), DimensionMismatch);
}

TEST(AdStar, So3Examples)
{
  const auto so3 = make_so3(Eigen::Vector3d(1.0, 2.0, 3.0));
  // mu x y with y = e3, mu = e1.
  EXPECT_TRUE(ad_star(so3, Eigen::Vector3d(0, 0, 1), Eigen::Vector3d(1, 0, 0)).isApprox(Eigen::Vector3d(0, -1, 0)));
  EXPECT_EQ(ad_star(so3, Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(1, 0, 0)).norm(), 0.0);
  const auto ab = make_abelian(Eigen::MatrixXd::Identity(2, 2), 1);
  EXPECT_EQ(ad_star(ab, Eigen::Vector2d(1, 2), Eigen::Vector2d(3, 4)).norm(), 0.0);
}

TEST(AdStar, DualOfBracketProperty)
{
  std::mt19937_64 rng(3);
  for (const auto& model : builtin_models())
    for (int s = 0; s < 1000; ++s)
    {
      const Eigen::VectorXd y = random_vec(rng, model.dim());
      const Eigen::VectorXd z = random_vec(rng, model.dim());
      const Eigen::VectorXd mu = random_vec(rng, model.dim());
      EXPECT_NEAR(ad_star(model, y, mu).dot(z), mu.dot(bracket(model, y, z)), 1e-12);
    }
}

TEST(AdStar, So3CrossProductForDiagonalInertia)
{
  std::mt19937_64 rng(4);
  for (int s = 0; s < 200; ++s)
  {
    const Eigen::Vector3d J = random_vec(rng, 3).cwiseAbs() + Eigen::Vector3d::Constant(0.1);
    const auto so3 = make_so3(J);
    const Eigen::Vector3d y = random_vec(rng, 3, 3.0);
    const Eigen::Vector3d mu = random_vec(rng, 3, 3.0);
    EXPECT_LT((ad_star(so3, y, mu) - Eigen::VectorXd(mu.cross(y))).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Musical, FlatSharpExamples)
{
  const auto so3 = make_so3(Eigen::Vector3d(1.0, 2.0, 3.0));
  EXPECT_TRUE(flat(so3, Eigen::Vector3d(1, 1, 1)).isApprox(Eigen::Vector3d(1, 2, 3)));
  EXPECT_TRUE(sharp(so3, Eigen::Vector3d(1, 2, 3)).isApprox(Eigen::Vector3d(1, 1, 1)));
  const auto unit = make_so3(Eigen::Vector3d::Ones());
  EXPECT_TRUE(flat(unit, Eigen::Vector3d(0.3, -2, 5)).isApprox(Eigen::Vector3d(0.3, -2, 5)));
}

TEST(Musical, SharpInvertsFlat)
{
  std::mt19937_64 rng(5);
  for (const auto& model : builtin_models())
    for (int s = 0; s < 200; ++s)
    {
      const Eigen::VectorXd y = random_vec(rng, model.dim());
      EXPECT_LT((sharp(model, flat(model, y)) - y).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Connection, Examples)
{
  const auto unit = make_so3(Eigen::Vector3d::Ones());
  EXPECT_LT((connection_alpha(unit, Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 1, 0)) -
             Eigen::Vector3d(0, 0, 0.5)).norm(), 1e-15);

  const auto ab = make_abelian(Eigen::MatrixXd::Identity(3, 3), 3);
  EXPECT_EQ(connection_alpha(ab, Eigen::Vector3d(1, 2, 3), Eigen::Vector3d(-1, 0, 4)).norm(), 0.0);

  std::mt19937_64 rng(6);
  for (const auto& model : builtin_models())
  {
    const Eigen::VectorXd y = random_vec(rng, model.dim());
    const Eigen::VectorXd expected = -sharp(model, ad_star(model, y, flat(model, y)));
    EXPECT_LT((connection_alpha(model, y, y) - expected).norm(), 1e-14);
  }
}

TEST(Connection, TorsionFreeAndMetricProperties)
{
  std::mt19937_64 rng(7);
  for (const auto& model : builtin_models())
    for (int s = 0; s < 1000; ++s)
    {
      const Eigen::VectorXd y = random_vec(rng, model.dim());
      const Eigen::VectorXd z = random_vec(rng, model.dim());
      const Eigen::VectorXd w = random_vec(rng, model.dim());
      const Eigen::VectorXd torsion =
          connection_alpha(model, y, z) - connection_alpha(model, z, y) - bracket(model, y, z);
      EXPECT_LT(torsion.norm(), 1e-10);
      const double metric = inner(model, connection_alpha(model, w, y), z) + inner(model, y, connection_alpha(model, w, z));
      EXPECT_LT(std::abs(metric), 1e-10);
    }
}

TEST(Bias, So3Examples)
{
  const auto so3 = make_so3(Eigen::Vector3d(1.0, 2.0, 3.0));
  EXPECT_EQ(bias(so3, Eigen::Vector3d(1, 0, 0)).norm(), 0.0);
  // (Jy) x y = (1,2,0) x (1,1,0) = (0,0,-1); J^-1 gives (0,0,-1/3).
  EXPECT_LT((bias(so3, Eigen::Vector3d(1, 1, 0)) - Eigen::Vector3d(0, 0, -1.0 / 3.0)).norm(), 1e-15);
}

TEST(Bias, IdentityInertiaVanishesOnSo3)
{
  // Oracle: J^-1 ((J y) x y) with J = I is y x y = 0.
  const auto unit = make_so3(Eigen::Vector3d::Ones());
  std::mt19937_64 rng(8);
  for (int s = 0; s < 100; ++s)
  {
    const Eigen::Vector3d y = random_vec(rng, 3, 5.0);
    EXPECT_LT(bias(unit, y).norm(), 1e-14);
  }
}

TEST(Bias, EqualsMinusAlphaDiagonal)
{
  std::mt19937_64 rng(9);
  for (const auto& model : builtin_models())
  {
    const Eigen::VectorXd y = random_vec(rng, model.dim());
    EXPECT_LT((bias(model, y) + connection_alpha(model, y, y)).norm(), 1e-14);
  }
}

TEST(RestrictCovector, Examples)
{
  const auto so3 = make_so3(Eigen::Vector3d(1, 2, 3), 2);
  EXPECT_TRUE(restrict_covector(so3, Eigen::Vector3d(5, 7, 9)).isApprox(Eigen::Vector3d(5, 7, 0)));
  const auto full = make_so3(Eigen::Vector3d(1, 2, 3), 3);
  EXPECT_TRUE(restrict_covector(full, Eigen::Vector3d(5, 7, 9)).isApprox(Eigen::Vector3d(5, 7, 9)));
  EXPECT_EQ(restrict_covector(so3, Eigen::Vector3d::Zero()).norm(), 0.0);
}

TEST(ValidateModel, BuiltinsPass)
{
  for (const auto& model : builtin_models())
  {
    const auto report = validate_model(model);
    EXPECT_TRUE(report.ok()) << model.name();
    for (const auto& c : report.checks)
      EXPECT_LT(c.residual, 1e-12) << c.name;
  }
}

TEST(ValidateModel, DetectsBrokenAntisymmetry)
{
  // C^3_12 = 1 but C^3_21 = 0.
  const auto broken = make_custom(3, 3, {{2, 0, 1, 1.0}}, Eigen::MatrixXd::Identity(3, 3));
  const auto report = validate_model(broken);
  EXPECT_FALSE(report.ok());
  ASSERT_NE(report.find("antisymmetry"), nullptr);
  EXPECT_FALSE(report.find("antisymmetry")->passed);
  EXPECT_DOUBLE_EQ(report.find("antisymmetry")->residual, 1.0);
}

TEST(ValidateModel, DetectsJacobiFailure)
{
  // Antisymmetric but [e1,e2] = e1 + e3, [e2,e3] = e2 violates Jacobi.
  const auto broken = make_custom(3, 3,
                                  {{0, 0, 1, 1.0}, {0, 1, 0, -1.0}, {2, 0, 1, 1.0}, {2, 1, 0, -1.0},
                                   {1, 1, 2, 1.0}, {1, 2, 1, -1.0}},
                                  Eigen::MatrixXd::Identity(3, 3));
  const auto report = validate_model(broken);
  EXPECT_TRUE(report.find("antisymmetry")->passed);
  EXPECT_FALSE(report.find("jacobi")->passed);
}

TEST(ValidateModel, DetectsIndefiniteInertia)
{
  const auto bad = make_abelian(Eigen::Vector3d(1.0, -2.0, 1.0).asDiagonal().toDenseMatrix(), 3);
  const auto report = validate_model(bad);
  EXPECT_FALSE(report.find("inertia_spd")->passed);
  EXPECT_DOUBLE_EQ(report.find("inertia_spd")->residual, 2.0);
}

TEST(ValidateModel, DetectsUnadaptedBasis)
{
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(3, 3);
  I(0, 2) = I(2, 0) = 0.2;
  const auto report = validate_model(make_abelian(I, 2));
  EXPECT_FALSE(report.find("adapted_basis")->passed);
  // Same inertia is fine when fully actuated.
  EXPECT_TRUE(validate_model(make_abelian(I, 3)).ok());
}

TEST(LieAlgebraModel, RejectsBadActuatedDimension)
{
  EXPECT_THROW(make_so3(Eigen::Vector3d::Ones(), 4), DimensionMismatch);
  EXPECT_THROW(make_so3(Eigen::Vector3d::Ones(), 0), DimensionMismatch);
}
