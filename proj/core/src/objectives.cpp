#include "saddle/objectives.hpp"

#include <cmath>

#include "saddle/errors.hpp"

namespace saddle {

Objective quadratic(const Matrix& A) {
  if (A.rows() != A.cols() || A.rows() == 0) throw InvalidArgument("quadratic: matrix must be square and nonempty");
  if (!A.allFinite()) throw InvalidArgument("quadratic: matrix has non-finite entries");
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw InvalidArgument("quadratic: matrix is not symmetric");
  }
  Objective obj;
  obj.name = "quadratic";
  obj.dimension = static_cast<int>(A.rows());
  obj.eval = [A](const Vector& x) { return 0.5 * x.dot(A * x); };
  obj.grad = [A](const Vector& x) -> Vector { return A * x; };
  obj.hess = [A](const Vector&) -> Matrix { return A; };
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (A + A.transpose()));
  if (es.info() != Eigen::Success) throw EigenSolverError("quadratic: symmetric eigensolver failed");
  obj.structure = Objective::Quadratic{A, es.eigenvalues(), es.eigenvectors()};
  obj.critical_points.push_back(Vector::Zero(A.rows()));
  return obj;
}

Objective fig1_objective() {
  Matrix A(2, 2);
  A << 2.0, 0.0, 0.0, -2.0;
  Objective obj = quadratic(A);
  obj.name = "fig1";
  return obj;
}

Objective cubic_perturbed_saddle(double a) {
  if (!(std::abs(a) <= 1.0)) throw InvalidArgument("cubic_perturbed_saddle: |a| must be <= 1");
  Objective obj;
  obj.name = "cubic";
  obj.dimension = 2;
  obj.eval = [a](const Vector& v) {
    const double x = v(0), y = v(1);
    return 0.5 * x * x - 0.5 * y * y + a * x * x * y;
  };
  obj.grad = [a](const Vector& v) -> Vector {
    const double x = v(0), y = v(1);
    Vector g(2);
    g << x + 2.0 * a * x * y, -y + a * x * x;
    return g;
  };
  obj.hess = [a](const Vector& v) -> Matrix {
    const double x = v(0), y = v(1);
    Matrix h(2, 2);
    h << 1.0 + 2.0 * a * y, 2.0 * a * x, 2.0 * a * x, -1.0;
    return h;
  };
  obj.structure = Objective::CubicSaddle{a};
  // x (1 + 2 a y) = 0 and a x^2 = y have only the origin as a real solution.
  obj.critical_points.push_back(Vector::Zero(2));
  return obj;
}

Objective linear(const Vector& c) {
  Objective obj;
  obj.name = "linear";
  obj.dimension = static_cast<int>(c.size());
  obj.eval = [c](const Vector& x) { return c.dot(x); };
  obj.grad = [c](const Vector&) -> Vector { return c; };
  obj.hess = [n = c.size()](const Vector&) -> Matrix { return Matrix::Zero(n, n); };
  return obj;
}

const char* to_string(CriticalTag tag) noexcept {
  switch (tag) {
    case CriticalTag::strict_saddle: return "strict_saddle";
    case CriticalTag::local_min_candidate: return "local_min_candidate";
    case CriticalTag::degenerate: return "degenerate";
    case CriticalTag::not_critical: return "not_critical";
  }
  return "unknown";
}

CriticalPointClass classify_from_derivatives(const Vector& gradient, const Matrix& hessian,
                                             ClassifyTolerances tol) {
  if (!(tol.grad_tol > 0.0) || !(tol.eig_tol > 0.0)) throw InvalidArgument("classify: tolerances must be > 0");
  if (!gradient.allFinite() || !hessian.allFinite()) throw NumericalError("classify: non-finite derivatives");

  CriticalPointClass out;
  out.grad_norm = gradient.norm();
  if (hessian.size() == 0) {
    out.min_eigenvalue = 0.0;
  } else {
    const Matrix sym = 0.5 * (hessian + hessian.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw EigenSolverError("classify: symmetric eigensolver failed");
    out.min_eigenvalue = es.eigenvalues().minCoeff();
  }

  if (out.grad_norm > tol.grad_tol) {
    out.tag = CriticalTag::not_critical;
  } else if (out.min_eigenvalue < -tol.eig_tol) {
    out.tag = CriticalTag::strict_saddle;
  } else if (out.min_eigenvalue > tol.eig_tol) {
    out.tag = CriticalTag::local_min_candidate;
  } else {
    out.tag = CriticalTag::degenerate;
  }
  return out;
}

CriticalPointClass classify_critical_point(const Objective& obj, const Vector& x, ClassifyTolerances tol) {
  return classify_from_derivatives(obj.grad(x), obj.hess(x), tol);
}

Vector fd_gradient(const Objective& obj, const Vector& x, double h) {
  Vector g(x.size());
  Vector xp = x, xm = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xp(i) = x(i) + h;
    xm(i) = x(i) - h;
    g(i) = (obj.eval(xp) - obj.eval(xm)) / (2.0 * h);
    xp(i) = xm(i) = x(i);
  }
  return g;
}

Matrix fd_hessian(const Objective& obj, const Vector& x, double h) {
  const auto n = x.size();
  Matrix H(n, n);
  Vector xp = x, xm = x;
  for (Eigen::Index j = 0; j < n; ++j) {
    xp(j) = x(j) + h;
    xm(j) = x(j) - h;
    H.col(j) = (obj.grad(xp) - obj.grad(xm)) / (2.0 * h);
    xp(j) = xm(j) = x(j);
  }
  return H;
}

}  // namespace saddle
