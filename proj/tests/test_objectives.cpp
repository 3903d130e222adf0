#include <gtest/gtest.h>

#include <random>

#include "saddle/errors.hpp"
#include "saddle/objectives.hpp"
#include "saddle/rng.hpp"

using namespace saddle;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Matrix diag(std::initializer_list<double> v) { return vec(v).asDiagonal(); }

}  // namespace

TEST(Objectives, QuadraticExamples) {
  const auto f = quadratic(diag({2, -2}));
  EXPECT_DOUBLE_EQ(f.eval(vec({1, 1})), 0.0);
  EXPECT_TRUE(f.grad(vec({1, 1})).isApprox(vec({2, -2})));
  EXPECT_TRUE(f.hess(vec({0.3, 0.7})).isApprox(diag({2, -2})));
  const auto g = quadratic(diag({1, -1}));
  EXPECT_EQ(g.grad(vec({0, 0})).norm(), 0.0);
}

TEST(Objectives, QuadraticRejectsAsymmetry) {
  Matrix A(2, 2);
  A << 1, 1e-9, 0, -1;
  EXPECT_THROW((void)quadratic(A), InvalidArgument);
  A(0, 1) = 1e-13;
  EXPECT_NO_THROW((void)quadratic(A));
  EXPECT_THROW((void)quadratic(Matrix(2, 3)), InvalidArgument);
}

TEST(Objectives, Fig1OriginIsStrictSaddle) {
  const auto c = classify_critical_point(fig1_objective(), vec({0, 0}));
  EXPECT_EQ(c.tag, CriticalTag::strict_saddle);
  EXPECT_NEAR(c.min_eigenvalue, -2.0, 1e-12);
}

TEST(Objectives, ClassificationTags) {
  EXPECT_EQ(classify_critical_point(quadratic(diag({1, 1})), vec({0, 0})).tag, CriticalTag::local_min_candidate);
  EXPECT_EQ(classify_critical_point(quadratic(diag({1, 0})), vec({0, 0})).tag, CriticalTag::degenerate);
  EXPECT_EQ(classify_critical_point(quadratic(diag({1, -1})), vec({1, 0})).tag, CriticalTag::not_critical);
}

TEST(Objectives, NotCriticalIffGradientAboveTolerance) {
  const auto f = quadratic(diag({1, -1}));
  const ClassifyTolerances tol{1e-6, 1e-8};
  EXPECT_NE(classify_critical_point(f, vec({0.9e-6, 0}), tol).tag, CriticalTag::not_critical);
  EXPECT_EQ(classify_critical_point(f, vec({1.1e-6, 0}), tol).tag, CriticalTag::not_critical);
}

TEST(Objectives, MinEigenvalueMatchesSmallestEigenvalue) {
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    Matrix B(4, 4);
    for (Eigen::Index i = 0; i < 16; ++i) B.data()[i] = rng.uniform(-1, 1);
    const Matrix A = 0.5 * (B + B.transpose());
    const double expected = Eigen::SelfAdjointEigenSolver<Matrix>(A).eigenvalues().minCoeff();
    EXPECT_NEAR(classify_critical_point(quadratic(A), Vector::Zero(4)).min_eigenvalue, expected, 1e-10);
  }
}

TEST(Objectives, CubicExamples) {
  const auto f0 = cubic_perturbed_saddle(0.0);
  const auto q = quadratic(diag({1, -1}));
  for (const auto& x : {vec({0.3, -0.2}), vec({1.5, 2.0})}) {
    EXPECT_NEAR(f0.eval(x), q.eval(x), 1e-15);
    EXPECT_TRUE(f0.grad(x).isApprox(q.grad(x)));
  }
  const auto f = cubic_perturbed_saddle(0.25);
  EXPECT_EQ(f.grad(vec({0, 0})).norm(), 0.0);
  EXPECT_TRUE(f.hess(vec({0, 0})).isApprox(diag({1, -1})));
  EXPECT_TRUE(f.grad(vec({1, 1})).isApprox(vec({1.5, -0.75}), 1e-15));
  EXPECT_THROW((void)cubic_perturbed_saddle(1.5), InvalidArgument);
}

TEST(Objectives, DerivativesMatchFiniteDifferences) {
  Rng rng(11);
  for (const auto& f : {fig1_objective(), cubic_perturbed_saddle(0.25), cubic_perturbed_saddle(-1.0),
                        quadratic(diag({3, -1, 0.5})), linear(vec({1, -2, 0.5}))}) {
    for (int t = 0; t < 100; ++t) {
      Vector x(f.dimension);
      for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = rng.uniform(-2, 2);
      const Vector g = f.grad(x);
      const Vector fd = fd_gradient(f, x);
      EXPECT_LE((fd - g).norm(), 1e-5 * std::max(1.0, g.norm())) << f.name;
      const Matrix H = f.hess(x);
      EXPECT_LE((fd_hessian(f, x) - H).norm(), 1e-5 * std::max(1.0, H.norm())) << f.name;
      EXPECT_LE((H - H.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(Objectives, CubicRemainderLipschitzBound) {
  // theta(k, x) = x - alpha grad f(x) - (I - alpha H(0)) x; |theta(x) - theta(y)| <= alpha 6|a| delta |x - y|.
  const double a = 0.7, delta = 0.1, alpha = 0.3;
  const auto f = cubic_perturbed_saddle(a);
  const Matrix H0 = f.hess(Vector::Zero(2));
  auto theta = [&](const Vector& x) -> Vector { return x - alpha * f.grad(x) - (x - alpha * H0 * x); };
  Rng rng(2);
  auto draw = [&] {
    Vector v(2);
    do {
      v << rng.uniform(-delta, delta), rng.uniform(-delta, delta);
    } while (v.norm() > delta);
    return v;
  };
  for (int t = 0; t < 10000; ++t) {
    const Vector x = draw(), y = draw();
    EXPECT_LE((theta(x) - theta(y)).norm(), alpha * 6.0 * a * delta * (x - y).norm() * (1 + 1e-12));
  }
}

TEST(Objectives, TagNames) {
  EXPECT_STREQ(to_string(CriticalTag::strict_saddle), "strict_saddle");
  EXPECT_STREQ(to_string(CriticalTag::not_critical), "not_critical");
}
