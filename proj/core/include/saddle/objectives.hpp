#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace saddle {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A C^2 objective with exact gradient and Hessian oracles.
///
/// The structural tag (`Quadratic`, `CubicSaddle`, `Generic`) lets other
/// modules take closed-form shortcuts: the proximal step on a quadratic, the
/// analytic Taylor remainder of the cubic fixture.
struct Objective {
  struct Quadratic {
    Matrix A;
    // Eigen-decomposition of A, cached for closed-form proximal steps.
    Vector eigenvalues;
    Matrix eigenvectors;
  };
  struct CubicSaddle {
    double a;
  };
  struct Generic {};
  using Structure = std::variant<Quadratic, CubicSaddle, Generic>;

  std::string name;
  int dimension = 0;
  std::function<double(const Vector&)> eval;
  std::function<Vector(const Vector&)> grad;
  std::function<Matrix(const Vector&)> hess;
  Structure structure = Generic{};
  /// Critical points known in closed form (used to double-key "converged to
  /// the saddle").
  std::vector<Vector> critical_points;
};

/// f(x) = 1/2 x^T A x. Rejects A whose symmetry deviation exceeds 1e-12.
[[nodiscard]] Objective quadratic(const Matrix& A);

/// x^2 - y^2, i.e. quadratic(diag(2, -2)).
[[nodiscard]] Objective fig1_objective();

/// f(x, y) = 1/2 x^2 - 1/2 y^2 + a x^2 y, |a| <= 1.
[[nodiscard]] Objective cubic_perturbed_saddle(double a);

/// f(x) = <c, x>; handy for mirror-descent checks on the simplex.
[[nodiscard]] Objective linear(const Vector& c);

enum class CriticalTag { strict_saddle, local_min_candidate, degenerate, not_critical };

[[nodiscard]] const char* to_string(CriticalTag tag) noexcept;

struct CriticalPointClass {
  CriticalTag tag = CriticalTag::not_critical;
  double min_eigenvalue = 0.0;
  double grad_norm = 0.0;
};

struct ClassifyTolerances {
  double grad_tol = 1e-8;
  double eig_tol = 1e-8;
};

/// Classifies from a gradient and a (symmetric) Hessian already expressed in
/// the coordinates the caller cares about. Throws EigenSolverError when the
/// eigensolver fails.
[[nodiscard]] CriticalPointClass classify_from_derivatives(const Vector& gradient, const Matrix& hessian,
                                                          ClassifyTolerances tol = {});

[[nodiscard]] CriticalPointClass classify_critical_point(const Objective& obj, const Vector& x,
                                                        ClassifyTolerances tol = {});

/// Central finite-difference gradient of obj.eval (test and diagnostics use).
[[nodiscard]] Vector fd_gradient(const Objective& obj, const Vector& x, double h = 1e-5);
/// Central finite-difference Hessian from obj.grad.
[[nodiscard]] Matrix fd_hessian(const Objective& obj, const Vector& x, double h = 1e-5);

}  // namespace saddle
