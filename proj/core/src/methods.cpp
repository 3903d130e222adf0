#include "saddle/methods.hpp"

#include <cmath>
#include <utility>

#include "saddle/errors.hpp"

namespace saddle {

namespace {

Vector checked_gradient(const Objective& obj, const Vector& x) {
  Vector g = obj.grad(x);
  if (!g.allFinite()) throw NumericalError("non-finite gradient in " + obj.name);
  return g;
}

// Orthonormal basis (columns) of the orthogonal complement of `normal`.
Matrix complement_basis(const Vector& normal) {
  const auto d = normal.size();
  Eigen::HouseholderQR<Matrix> qr(Matrix(normal.normalized()));
  const Matrix full = qr.householderQ() * Matrix::Identity(d, d);
  return full.rightCols(d - 1);
}

}  // namespace

MirrorMap entropy_simplex_map(double boundary_eps) {
  MirrorMap mm;
  mm.name = "entropy";
  mm.domain = "probability simplex";
  mm.phi = [](const Vector& x) { return (x.array() * x.array().log()).sum(); };
  mm.grad_phi = [](const Vector& x) -> Vector { return (1.0 + x.array().log()).matrix(); };
  mm.hess_phi = [](const Vector& x) -> Matrix { return x.cwiseInverse().asDiagonal(); };
  mm.conjugate_argmax = [](const Vector& y) -> Vector {
    const Vector e = (y.array() - y.maxCoeff()).exp().matrix();
    return e / e.sum();
  };
  mm.in_interior = [boundary_eps](const Vector& x) {
    return x.allFinite() && x.minCoeff() >= boundary_eps && std::abs(x.sum() - 1.0) <= 1e-9;
  };
  return mm;
}

MirrorMap euclidean_map() {
  MirrorMap mm;
  mm.name = "euclidean";
  mm.domain = "R^d";
  mm.phi = [](const Vector& x) { return 0.5 * x.squaredNorm(); };
  mm.grad_phi = [](const Vector& x) -> Vector { return x; };
  mm.hess_phi = [](const Vector& x) -> Matrix { return Matrix::Identity(x.size(), x.size()); };
  mm.conjugate_argmax = [](const Vector& y) -> Vector { return y; };
  mm.in_interior = [](const Vector& x) { return x.allFinite(); };
  return mm;
}

EmbeddedManifold unit_sphere(int ambient_dim) {
  if (ambient_dim < 2) throw InvalidArgument("unit_sphere: ambient dimension must be >= 2");
  EmbeddedManifold m;
  m.name = "sphere";
  m.ambient_dim = ambient_dim;
  m.project_point = [](const Vector& v) -> Vector {
    const double n = v.norm();
    if (!(n >= 1e-12)) throw DomainError("sphere projection undefined at |v| < 1e-12");
    return v / n;
  };
  m.project_tangent = [](const Vector& x) -> Matrix {
    return Matrix::Identity(x.size(), x.size()) - x * x.transpose();
  };
  m.contains = [](const Vector& x) { return std::abs(x.norm() - 1.0) <= 1e-8; };
  return m;
}

RiemannianMetric identity_metric(int dim) {
  return {[dim](const Vector&) -> Matrix { return Matrix::Identity(dim, dim); }};
}

RiemannianMetric constant_metric(const Matrix& inverse_metric) {
  return {[inverse_metric](const Vector&) -> Matrix { return inverse_metric; }};
}

Vector gd_step(const Objective& obj, const StepSchedule& schedule, std::int64_t k, const Vector& x) {
  return x - schedule.value(k) * checked_gradient(obj, x);
}

Vector mirror_step(const Objective& obj, const MirrorMap& mm, const StepSchedule& schedule, std::int64_t k,
                   const Vector& x) {
  if (!mm.in_interior(x)) throw DomainError("mirror step: iterate is not interior to the " + mm.domain);
  const Vector y = mm.grad_phi(x) - schedule.value(k) * checked_gradient(obj, x);
  Vector next = mm.conjugate_argmax(y);
  if (!mm.in_interior(next)) throw DomainError("mirror step: iterate reached the boundary of the " + mm.domain);
  return next;
}

Vector proximal_step_closed_form(const Objective& obj, double alpha, const Vector& x) {
  const auto* q = std::get_if<Objective::Quadratic>(&obj.structure);
  if (q == nullptr) throw InvalidArgument("proximal closed form requires a quadratic objective");
  const Vector factors = (1.0 + alpha * q->eigenvalues.array()).matrix();
  if (factors.cwiseAbs().minCoeff() <= 1e-14) throw NumericalError("proximal step: I + alpha A is singular");
  return q->eigenvectors * (q->eigenvectors.transpose() * x).cwiseQuotient(factors);
}

Vector proximal_step_newton(const Objective& obj, double alpha, const Vector& x, ProxOptions opts) {
  const auto n = x.size();
  const double tol = opts.inner_tol * std::max(1.0, x.norm());
  auto residual = [&](const Vector& z) -> Vector { return z + alpha * checked_gradient(obj, z) - x; };

  Vector z = x;
  Vector r = residual(z);
  double rnorm = r.norm();
  for (int it = 0; it < opts.inner_budget; ++it) {
    if (rnorm <= tol) return z;
    const Matrix J = Matrix::Identity(n, n) + alpha * obj.hess(z);
    Eigen::FullPivLU<Matrix> lu(J);
    if (!lu.isInvertible()) throw NumericalError("proximal step: singular Newton system I + alpha hess f");
    const Vector dz = lu.solve(-r);
    double t = 1.0;
    Vector z_try = z + dz;
    Vector r_try = residual(z_try);
    while (r_try.norm() > (1.0 - 1e-4 * t) * rnorm && t > 1e-10) {
      t *= 0.5;
      z_try = z + t * dz;
      r_try = residual(z_try);
    }
    z = std::move(z_try);
    r = std::move(r_try);
    rnorm = r.norm();
  }
  if (rnorm <= tol) return z;
  throw NumericalError("proximal step: inner Newton did not converge within " +
                       std::to_string(opts.inner_budget) + " iterations (residual " + std::to_string(rnorm) + ")");
}

Vector proximal_step(const Objective& obj, const StepSchedule& schedule, std::int64_t k, const Vector& x,
                     ProxOptions opts) {
  const double alpha = schedule.value(k);
  if (std::holds_alternative<Objective::Quadratic>(obj.structure)) return proximal_step_closed_form(obj, alpha, x);
  return proximal_step_newton(obj, alpha, x, opts);
}

Vector manifold_step(const Objective& obj, const EmbeddedManifold& manifold, const StepSchedule& schedule,
                     std::int64_t k, const Vector& x) {
  if (manifold.contains && !manifold.contains(x)) throw InvalidArgument("manifold step: x is not on " + manifold.name);
  const Vector riemannian_grad = manifold.project_tangent(x) * checked_gradient(obj, x);
  return manifold.project_point(x - schedule.value(k) * riemannian_grad);
}

Vector intrinsic_manifold_step(const Objective& obj, const RiemannianMetric& metric, const StepSchedule& schedule,
                               std::int64_t k, const Vector& x) {
  const Matrix R = metric.inverse_metric(x);
  Eigen::LLT<Matrix> llt(0.5 * (R + R.transpose()));
  if (llt.info() != Eigen::Success || (R - R.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw DomainError("intrinsic step: inverse metric is not symmetric positive definite at x");
  }
  return x - schedule.value(k) * (R * checked_gradient(obj, x));
}

const char* to_string(MethodId id) noexcept {
  switch (id) {
    case MethodId::gd: return "gd";
    case MethodId::mirror_entropy: return "mirror-entropy";
    case MethodId::mirror_euclidean: return "mirror-euclidean";
    case MethodId::prox: return "prox";
    case MethodId::manifold_sphere: return "manifold-sphere";
    case MethodId::manifold_intrinsic: return "manifold-intrinsic";
  }
  return "unknown";
}

std::optional<MethodId> parse_method_id(std::string_view id) {
  for (MethodId m : {MethodId::gd, MethodId::mirror_entropy, MethodId::mirror_euclidean, MethodId::prox,
                     MethodId::manifold_sphere, MethodId::manifold_intrinsic}) {
    if (id == to_string(m)) return m;
  }
  return std::nullopt;
}

Method Method::gd() { return Method(MethodId::gd); }

Method Method::mirror_entropy(double boundary_eps) {
  Method m(MethodId::mirror_entropy);
  m.mirror_ = entropy_simplex_map(boundary_eps);
  return m;
}

Method Method::mirror_euclidean() {
  Method m(MethodId::mirror_euclidean);
  m.mirror_ = euclidean_map();
  return m;
}

Method Method::prox(ProxOptions opts) {
  Method m(MethodId::prox);
  m.prox_ = opts;
  return m;
}

Method Method::manifold_sphere(int ambient_dim) {
  Method m(MethodId::manifold_sphere);
  m.manifold_ = unit_sphere(ambient_dim);
  return m;
}

Method Method::manifold_intrinsic(RiemannianMetric metric) {
  Method m(MethodId::manifold_intrinsic);
  m.metric_ = std::move(metric);
  return m;
}

Method Method::from_id(std::string_view id, int dimension, std::optional<RiemannianMetric> metric) {
  const auto parsed = parse_method_id(id);
  if (!parsed) throw InvalidArgument("unknown method id '" + std::string(id) + "'");
  switch (*parsed) {
    case MethodId::gd: return gd();
    case MethodId::mirror_entropy: return mirror_entropy();
    case MethodId::mirror_euclidean: return mirror_euclidean();
    case MethodId::prox: return prox();
    case MethodId::manifold_sphere: return manifold_sphere(dimension);
    case MethodId::manifold_intrinsic: return manifold_intrinsic(metric ? *metric : identity_metric(dimension));
  }
  throw InvalidArgument("unknown method id");
}

Vector Method::step(const Objective& obj, const StepSchedule& schedule, std::int64_t k, const Vector& x) const {
  switch (id_) {
    case MethodId::gd: return gd_step(obj, schedule, k, x);
    case MethodId::mirror_entropy:
    case MethodId::mirror_euclidean: return mirror_step(obj, *mirror_, schedule, k, x);
    case MethodId::prox: return proximal_step(obj, schedule, k, x, prox_);
    case MethodId::manifold_sphere: return manifold_step(obj, *manifold_, schedule, k, x);
    case MethodId::manifold_intrinsic: return intrinsic_manifold_step(obj, *metric_, schedule, k, x);
  }
  throw InvalidArgument("unknown method");
}

CriticalPointClass Method::classify(const Objective& obj, const Vector& x, ClassifyTolerances tol) const {
  switch (id_) {
    case MethodId::mirror_entropy: {
      const Matrix U = complement_basis(Vector::Ones(x.size()));
      return classify_from_derivatives(U.transpose() * obj.grad(x), U.transpose() * obj.hess(x) * U, tol);
    }
    case MethodId::manifold_sphere: {
      const Vector g = obj.grad(x);
      const Matrix U = complement_basis(x);
      const Matrix riemannian_hess =
          U.transpose() * (obj.hess(x) - x.dot(g) * Matrix::Identity(x.size(), x.size())) * U;
      return classify_from_derivatives(U.transpose() * g, riemannian_hess, tol);
    }
    default:
      // A positive definite metric preserves the inertia of the Hessian, so
      // the Euclidean classification applies to the intrinsic method as well.
      return classify_critical_point(obj, x, tol);
  }
}

double Method::gradient_norm(const Objective& obj, const Vector& x) const {
  switch (id_) {
    case MethodId::mirror_entropy: {
      const Vector g = obj.grad(x);
      return (g.array() - g.mean()).matrix().norm();
    }
    case MethodId::manifold_sphere: return (manifold_->project_tangent(x) * obj.grad(x)).norm();
    default: return obj.grad(x).norm();
  }
}

const char* to_string(Terminal t) noexcept {
  switch (t) {
    case Terminal::escaped_region: return "escaped_region";
    case Terminal::converged_to_point: return "converged_to_point";
    case Terminal::budget_exhausted: return "budget_exhausted";
    case Terminal::step_error: return "step_error";
  }
  return "unknown";
}

TrajectoryRecord run(const Method& method, const Objective& obj, const StepSchedule& schedule, const Vector& x0,
                     const RunOptions& opts) {
  if (opts.budget < 1) throw InvalidArgument("run: budget must be >= 1");
  if (opts.stride < 1) throw InvalidArgument("run: stride must be >= 1");
  if (opts.window < 1) throw InvalidArgument("run: convergence window must be >= 1");
  if (x0.size() != obj.dimension) throw InvalidArgument("run: x0 dimension does not match the objective");

  TrajectoryRecord rec;
  rec.schedule_id = schedule.id();
  rec.method_id = to_string(method.id());
  rec.seed = opts.seed;

  auto sample = [&](std::int64_t k, const Vector& x) {
    double gnorm = std::numeric_limits<double>::quiet_NaN();
    try {
      gnorm = method.gradient_norm(obj, x);
    } catch (const Error&) {
    }
    rec.samples.push_back({k, x, schedule.value(k), gnorm});
  };

  Vector x = x0;
  sample(0, x);
  int quiet_steps = 0;
  std::int64_t k = 0;
  rec.terminal = Terminal::budget_exhausted;
  while (k < opts.budget) {
    Vector next;
    try {
      next = method.step(obj, schedule, k, x);
      if (!next.allFinite()) throw NumericalError("non-finite iterate");
    } catch (const Error& e) {
      rec.terminal = Terminal::step_error;
      rec.error = e.what();
      break;
    }
    const double motion = (next - x).norm();
    x = std::move(next);
    ++k;

    if (x.norm() > opts.escape_radius) {
      rec.terminal = Terminal::escaped_region;
      break;
    }
    quiet_steps = motion < opts.conv_tol ? quiet_steps + 1 : 0;
    if (quiet_steps >= opts.window) {
      rec.terminal = Terminal::converged_to_point;
      try {
        rec.limit_class = method.classify(obj, x, opts.tol);
      } catch (const Error& e) {
        rec.terminal = Terminal::step_error;
        rec.error = e.what();
      }
      break;
    }
    if (k % opts.stride == 0) sample(k, x);
  }
  if (rec.samples.back().k != k) sample(k, x);
  rec.k_final = k;
  rec.final_point = x;
  return rec;
}

}  // namespace saddle
