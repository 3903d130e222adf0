#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "saddle/objectives.hpp"
#include "saddle/schedules.hpp"

namespace saddle {

/// Mirror map Phi together with its gradient, Hessian and the conjugate
/// argmax h(y) = argmax_{z in M} <z, y> - Phi(z).
struct MirrorMap {
  std::string name;
  std::string domain;
  std::function<double(const Vector&)> phi;
  std::function<Vector(const Vector&)> grad_phi;
  std::function<Matrix(const Vector&)> hess_phi;
  std::function<Vector(const Vector&)> conjugate_argmax;
  /// True when x lies in the interior of the domain (away from the boundary).
  std::function<bool(const Vector&)> in_interior;
};

/// Negative entropy on the probability simplex; h is the softmax. Iterates
/// with any coordinate below `boundary_eps` are reported as having reached the
/// boundary.
[[nodiscard]] MirrorMap entropy_simplex_map(double boundary_eps = 1e-300);
/// Phi = 1/2 |x|^2 on R^d; h is the identity.
[[nodiscard]] MirrorMap euclidean_map();

struct EmbeddedManifold {
  std::string name;
  int ambient_dim = 0;
  std::function<Vector(const Vector&)> project_point;
  std::function<Matrix(const Vector&)> project_tangent;
  /// Distance-to-manifold test used for preconditions.
  std::function<bool(const Vector&)> contains;
};

/// S^{d-1} in R^d: P_T(x) = I - x x^T, P_M(v) = v / |v|.
[[nodiscard]] EmbeddedManifold unit_sphere(int ambient_dim);

/// Inverse metric (R^{ij}) in local coordinates.
struct RiemannianMetric {
  std::function<Matrix(const Vector&)> inverse_metric;
};

[[nodiscard]] RiemannianMetric identity_metric(int dim);
[[nodiscard]] RiemannianMetric constant_metric(const Matrix& inverse_metric);

struct ProxOptions {
  double inner_tol = 1e-12;
  int inner_budget = 100;
};

/// x - alpha_k grad f(x)
[[nodiscard]] Vector gd_step(const Objective& obj, const StepSchedule& schedule, std::int64_t k, const Vector& x);

/// h(grad Phi(x) - alpha_k grad f(x))
[[nodiscard]] Vector mirror_step(const Objective& obj, const MirrorMap& mm, const StepSchedule& schedule,
                                 std::int64_t k, const Vector& x);

/// argmin_z f(z) + |x - z|^2 / (2 alpha_k). Closed form for quadratic
/// objectives, damped Newton on z + alpha grad f(z) - x otherwise.
[[nodiscard]] Vector proximal_step(const Objective& obj, const StepSchedule& schedule, std::int64_t k,
                                   const Vector& x, ProxOptions opts = {});
[[nodiscard]] Vector proximal_step_newton(const Objective& obj, double alpha, const Vector& x, ProxOptions opts = {});
[[nodiscard]] Vector proximal_step_closed_form(const Objective& obj, double alpha, const Vector& x);

/// P_M(x - alpha_k P_T(x) grad f(x))
[[nodiscard]] Vector manifold_step(const Objective& obj, const EmbeddedManifold& manifold,
                                   const StepSchedule& schedule, std::int64_t k, const Vector& x);

/// x - alpha_k R^{ij}(x) grad f(x)
[[nodiscard]] Vector intrinsic_manifold_step(const Objective& obj, const RiemannianMetric& metric,
                                             const StepSchedule& schedule, std::int64_t k, const Vector& x);

enum class MethodId { gd, mirror_entropy, mirror_euclidean, prox, manifold_sphere, manifold_intrinsic };

[[nodiscard]] const char* to_string(MethodId id) noexcept;
[[nodiscard]] std::optional<MethodId> parse_method_id(std::string_view id);

/// One of the six update rules, bound to its geometry.
class Method {
 public:
  [[nodiscard]] static Method gd();
  [[nodiscard]] static Method mirror_entropy(double boundary_eps = 1e-300);
  [[nodiscard]] static Method mirror_euclidean();
  [[nodiscard]] static Method prox(ProxOptions opts = {});
  [[nodiscard]] static Method manifold_sphere(int ambient_dim);
  [[nodiscard]] static Method manifold_intrinsic(RiemannianMetric metric);

  /// Build from the CLI id string. `dimension` sizes the sphere and the
  /// default (identity) metric.
  [[nodiscard]] static Method from_id(std::string_view id, int dimension,
                                     std::optional<RiemannianMetric> metric = std::nullopt);

  [[nodiscard]] MethodId id() const noexcept { return id_; }

  [[nodiscard]] Vector step(const Objective& obj, const StepSchedule& schedule, std::int64_t k,
                            const Vector& x) const;

  /// Critical-point classification in the method's geometry: Euclidean for
  /// gd/prox/mirror-euclidean/intrinsic, the simplex's affine tangent space
  /// for mirror-entropy, the sphere's tangent space with the Riemannian
  /// Hessian for manifold-sphere.
  [[nodiscard]] CriticalPointClass classify(const Objective& obj, const Vector& x, ClassifyTolerances tol) const;

  /// Tangent-space gradient norm (Euclidean norm for flat geometries).
  [[nodiscard]] double gradient_norm(const Objective& obj, const Vector& x) const;

 private:
  explicit Method(MethodId id) : id_(id) {}

  MethodId id_;
  std::optional<MirrorMap> mirror_;
  std::optional<EmbeddedManifold> manifold_;
  std::optional<RiemannianMetric> metric_;
  ProxOptions prox_{};
};

enum class Terminal { escaped_region, converged_to_point, budget_exhausted, step_error };

[[nodiscard]] const char* to_string(Terminal t) noexcept;

struct TrajectorySample {
  std::int64_t k = 0;
  Vector x;
  /// alpha_k, the step taken from this iterate.
  double step_size = 0.0;
  double grad_norm = 0.0;
};

struct TrajectoryRecord {
  std::vector<TrajectorySample> samples;
  std::int64_t k_final = 0;
  Terminal terminal = Terminal::budget_exhausted;
  Vector final_point;
  /// Set when terminal == converged_to_point.
  std::optional<CriticalPointClass> limit_class;
  /// Set when terminal == step_error.
  std::string error;
  std::string schedule_id;
  std::string method_id;
  std::uint64_t seed = 0;
};

struct RunOptions {
  std::int64_t budget = 100000;
  double conv_tol = 1e-12;
  double escape_radius = 1e3;
  std::int64_t stride = 10;
  /// Consecutive sub-tolerance steps required to declare convergence.
  int window = 50;
  ClassifyTolerances tol{};
  std::uint64_t seed = 0;
};

/// Iterates x_{k+1} = g(k, x_k) from k = 0 until escape, Cauchy-window
/// convergence, step failure, or the budget runs out. Samples every `stride`
/// iterates plus the final one.
[[nodiscard]] TrajectoryRecord run(const Method& method, const Objective& obj, const StepSchedule& schedule,
                                   const Vector& x0, const RunOptions& opts = {});

}  // namespace saddle
