#include "saddle/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "saddle/errors.hpp"

namespace saddle {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kReconstructionTol = 1e-8;

void normalize_signs(Matrix& V) {
  for (Eigen::Index j = 0; j < V.cols(); ++j) {
    Eigen::Index imax = 0;
    V.col(j).cwiseAbs().maxCoeff(&imax);
    if (V(imax, j) < 0.0) V.col(j) = -V.col(j);
  }
}

SpectralSplit assemble(Vector eigenvalues, Matrix V, bool orthogonal) {
  const auto d = eigenvalues.size();
  std::vector<int> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return eigenvalues(a) > eigenvalues(b); });

  SpectralSplit s;
  s.eigenvalues.resize(d);
  Matrix Vs(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    s.eigenvalues(i) = eigenvalues(order[static_cast<std::size_t>(i)]);
    Vs.col(i) = V.col(order[static_cast<std::size_t>(i)]);
  }
  normalize_signs(Vs);
  s.Q_inv = Vs;
  if (orthogonal) {
    s.Q = Vs.transpose();
  } else {
    Eigen::FullPivLU<Matrix> lu(Vs);
    if (!lu.isInvertible()) throw InvalidArgument("split: matrix is not diagonalizable (singular eigenbasis)");
    s.Q = lu.inverse();
  }
  for (int i = 0; i < static_cast<int>(d); ++i) {
    (s.eigenvalues(i) > 0.0 ? s.stable_indices : s.unstable_indices).push_back(i);
  }
  s.P_plus = Matrix::Zero(d, d);
  s.P_minus = Matrix::Zero(d, d);
  for (int i : s.stable_indices) s.P_plus(i, i) = 1.0;
  for (int i : s.unstable_indices) s.P_minus(i, i) = 1.0;
  return s;
}

}  // namespace

SplitVector split_vector(const SpectralSplit& split, const Vector& z) {
  return {z.head(split.stable_dim()), z.tail(split.unstable_dim())};
}

Vector join(const SpectralSplit& split, const SplitVector& v) {
  Vector z(split.dimension());
  z << v.plus, v.minus;
  return z;
}

SpectralSplit split(const Matrix& G) {
  if (G.rows() != G.cols() || G.rows() == 0) throw InvalidArgument("split: matrix must be square and nonempty");
  if (!G.allFinite()) throw InvalidArgument("split: matrix has non-finite entries");
  const double scale = std::max(1.0, G.norm());

  SpectralSplit s;
  if ((G - G.transpose()).cwiseAbs().maxCoeff() <= kSymmetryTol * scale) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (G + G.transpose()));
    if (es.info() != Eigen::Success) throw EigenSolverError("split: symmetric eigensolver failed");
    s = assemble(es.eigenvalues(), es.eigenvectors(), /*orthogonal=*/true);
  } else {
    Eigen::EigenSolver<Matrix> es(G);
    if (es.info() != Eigen::Success) throw EigenSolverError("split: eigensolver failed");
    const auto& ev = es.eigenvalues();
    const auto& vecs = es.eigenvectors();
    if (ev.imag().cwiseAbs().maxCoeff() > kReconstructionTol * scale) {
      throw InvalidArgument("split: matrix has a complex spectrum");
    }
    Matrix V = vecs.real();
    // Real eigenvalues can still carry complex-phased eigenvectors; rotate each
    // column onto the real axis before discarding the imaginary part.
    for (Eigen::Index j = 0; j < V.cols(); ++j) {
      Eigen::Index imax = 0;
      vecs.col(j).cwiseAbs().maxCoeff(&imax);
      const auto phase = vecs(imax, j) / std::abs(vecs(imax, j));
      V.col(j) = (vecs.col(j) / phase).real();
      V.col(j).normalize();
    }
    // Defective matrices have (numerically) parallel eigenvectors.
    const Vector sv = Eigen::JacobiSVD<Matrix>(V).singularValues();
    if (!(sv(sv.size() - 1) > kReconstructionTol * sv(0))) {
      throw InvalidArgument("split: matrix is not diagonalizable (eigenvectors are linearly dependent)");
    }
    s = assemble(ev.real(), V, /*orthogonal=*/false);
  }

  const Matrix D = s.Q * G * s.Q_inv;
  const Matrix residual = D - Matrix(s.eigenvalues.asDiagonal());
  if (residual.norm() > kReconstructionTol * scale) {
    throw InvalidArgument("split: matrix is not real diagonalizable (reconstruction error " +
                          std::to_string(residual.norm()) + ")");
  }
  return s;
}

Vector transition_product(const SpectralSplit& split, const StepSchedule& schedule, std::int64_t m, std::int64_t n) {
  Vector diag = Vector::Ones(split.dimension());
  for (std::int64_t t = n; t <= m; ++t) {
    const double a = schedule.value(t);
    for (Eigen::Index i = 0; i < diag.size(); ++i) diag(i) *= 1.0 - a * split.eigenvalues(i);
  }
  return diag;
}

Vector stable_block(const SpectralSplit& split, const Vector& product_diagonal) {
  return product_diagonal.head(split.stable_dim());
}

Vector unstable_block(const SpectralSplit& split, const Vector& product_diagonal) {
  return product_diagonal.tail(split.unstable_dim());
}

Vector quadratic_trajectory(const SpectralSplit& split, const StepSchedule& schedule, const Vector& x0,
                            std::int64_t k) {
  if (x0.size() != split.dimension()) throw InvalidArgument("quadratic_trajectory: dimension mismatch");
  const Vector factors = transition_product(split, schedule, k, 0);
  return split.from_diagonal(factors.cwiseProduct(split.to_diagonal(x0)));
}

const char* to_string(CoordinateLimit c) noexcept {
  switch (c) {
    case CoordinateLimit::to_zero: return "to_zero";
    case CoordinateLimit::constant: return "constant";
    case CoordinateLimit::diverges: return "diverges";
    case CoordinateLimit::converges_nonzero: return "converges_nonzero";
  }
  return "unknown";
}

CoordinateLimit classify_coordinate_limit(double lambda, const StepSchedule& schedule) {
  if (lambda == 0.0) return CoordinateLimit::constant;
  if (classify_sum(schedule) == SumClass::convergent_sum) return CoordinateLimit::converges_nonzero;
  return lambda > 0.0 ? CoordinateLimit::to_zero : CoordinateLimit::diverges;
}

}  // namespace saddle
