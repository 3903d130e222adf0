#pragma once

#include <cstdint>
#include <vector>

#include "saddle/objectives.hpp"
#include "saddle/schedules.hpp"

namespace saddle {

/// Eigen-decomposition Q G Q^{-1} = diag(eigenvalues) with the eigenvalues in
/// descending order, split into the contracting block (lambda > 0, E^s) and
/// the non-contracting block (lambda <= 0, E^u).
///
/// Because the eigenvalues are sorted, the stable block is always the leading
/// `stable_dim()` coordinates of the diagonal frame.
struct SpectralSplit {
  Vector eigenvalues;
  Matrix Q;
  Matrix Q_inv;
  std::vector<int> stable_indices;
  std::vector<int> unstable_indices;
  Matrix P_plus;
  Matrix P_minus;

  [[nodiscard]] int dimension() const noexcept { return static_cast<int>(eigenvalues.size()); }
  [[nodiscard]] int stable_dim() const noexcept { return static_cast<int>(stable_indices.size()); }
  [[nodiscard]] int unstable_dim() const noexcept { return static_cast<int>(unstable_indices.size()); }

  /// z = Q x, original frame to diagonal frame.
  [[nodiscard]] Vector to_diagonal(const Vector& x) const { return Q * x; }
  [[nodiscard]] Vector from_diagonal(const Vector& z) const { return Q_inv * z; }
};

/// Stable/unstable components of a diagonal-frame vector.
struct SplitVector {
  Vector plus;
  Vector minus;
};

[[nodiscard]] SplitVector split_vector(const SpectralSplit& split, const Vector& z);
[[nodiscard]] Vector join(const SpectralSplit& split, const SplitVector& v);

/// Accepts symmetric input (dense self-adjoint solver) or a real-diagonalizable
/// nonsymmetric matrix; complex spectra and defective matrices are rejected.
/// Eigenvector signs are normalized so the largest-magnitude entry is
/// positive, which makes Q = I for diagonal input.
[[nodiscard]] SpectralSplit split(const Matrix& G);

/// Diagonal of A(m, n) = (I - alpha_m H) ... (I - alpha_n H) in the diagonal
/// frame; identity when m < n.
[[nodiscard]] Vector transition_product(const SpectralSplit& split, const StepSchedule& schedule, std::int64_t m,
                                        std::int64_t n);
/// B(m, n): restriction of A(m, n) to the stable coordinates.
[[nodiscard]] Vector stable_block(const SpectralSplit& split, const Vector& product_diagonal);
/// C(m, n): restriction of A(m, n) to the unstable coordinates.
[[nodiscard]] Vector unstable_block(const SpectralSplit& split, const Vector& product_diagonal);

/// x_{k+1} = Q^{-1} diag(prod_{t=0}^{k} (1 - lambda_i alpha_t)) Q x0.
[[nodiscard]] Vector quadratic_trajectory(const SpectralSplit& split, const StepSchedule& schedule, const Vector& x0,
                                          std::int64_t k);

enum class CoordinateLimit { to_zero, constant, diverges, converges_nonzero };

[[nodiscard]] const char* to_string(CoordinateLimit c) noexcept;

/// Limit of prod_t (1 - lambda alpha_t) predicted from the sign of lambda and
/// the divergence of sum alpha_t.
[[nodiscard]] CoordinateLimit classify_coordinate_limit(double lambda, const StepSchedule& schedule);

}  // namespace saddle
