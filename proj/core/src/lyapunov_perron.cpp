#include "saddle/lyapunov_perron.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "saddle/errors.hpp"
#include "saddle/parallel.hpp"
#include "saddle/rng.hpp"

namespace saddle {

namespace {

double least_positive_eigenvalue(const SpectralSplit& split) {
  if (split.stable_dim() == 0) throw InvalidArgument("no positive eigenvalue: the stable block is empty");
  return split.eigenvalues(split.stable_dim() - 1);
}

// Unstable eigenvalue closest to zero: it maximizes |C(m, n)^{-1}|.
double weakest_unstable_eigenvalue(const SpectralSplit& split) {
  if (split.unstable_dim() == 0) throw InvalidArgument("no unstable eigenvalue: the unstable block is empty");
  return split.eigenvalues(split.stable_dim());
}

Vector random_point_in_ball(Rng& rng, Eigen::Index dim, double radius) {
  Vector v(dim);
  do {
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = rng.uniform(-radius, radius);
  } while (v.norm() > radius);
  return v;
}

// sup_k S_k <= 1/lambda: S_{k+1} - 1/lambda = (1 - alpha_{k+1} lambda)(S_k - 1/lambda)
// and S_0 = alpha_0 <= 1/lambda. The finite max only bounds the sup from below.
double certified_K1(const SpectralSplit& split, const StepSchedule& schedule, std::int64_t k_max) {
  return std::max(bound_K1(split, schedule, k_max), 1.0 / least_positive_eigenvalue(split));
}

}  // namespace

PerronProblem make_perron_problem(const Vector& eigenvalues, StepSchedule schedule, Remainder eta, double delta,
                                  double epsilon, std::int64_t horizon, double tail_tol) {
  if (eigenvalues.size() == 0) throw InvalidArgument("perron problem: empty spectrum");
  for (Eigen::Index i = 1; i < eigenvalues.size(); ++i) {
    if (eigenvalues(i) > eigenvalues(i - 1)) {
      throw InvalidArgument("perron problem: eigenvalues of H must be sorted in descending order");
    }
  }
  if (!(delta > 0.0)) throw InvalidArgument("perron problem: delta must be > 0");
  if (!(epsilon >= 0.0)) throw InvalidArgument("perron problem: epsilon must be >= 0");
  if (horizon < 1) throw InvalidArgument("perron problem: horizon must be >= 1");
  if (!(tail_tol > 0.0)) throw InvalidArgument("perron problem: tail_tol must be > 0");
  if (!eta) throw InvalidArgument("perron problem: remainder is empty");

  PerronProblem prob{split(Matrix(eigenvalues.asDiagonal())), std::move(schedule), std::move(eta), delta, epsilon,
                     horizon, tail_tol};
  return prob;
}

Remainder zero_remainder() {
  return [](std::int64_t, const Vector& z) -> Vector { return Vector::Zero(z.size()); };
}

Vector perron_step(const PerronProblem& prob, std::int64_t k, const Vector& z) {
  const double a = prob.schedule.value(k);
  return (1.0 - a * prob.split.eigenvalues.array()).matrix().cwiseProduct(z) + prob.eta(k, z);
}

RemainderCheck check_remainder(const PerronProblem& prob, const std::vector<std::int64_t>& ks, int pairs_per_k,
                               std::uint64_t seed) {
  RemainderCheck out;
  Rng rng(seed);
  const auto d = prob.split.dimension();
  for (std::int64_t k : ks) {
    out.max_eta_at_zero = std::max(out.max_eta_at_zero, prob.eta(k, Vector::Zero(d)).norm());
    const double a = prob.schedule.value(k);
    for (int i = 0; i < pairs_per_k; ++i) {
      const Vector x = random_point_in_ball(rng, d, prob.delta);
      const Vector y = random_point_in_ball(rng, d, prob.delta);
      const double dist = (x - y).norm();
      if (dist == 0.0) continue;
      out.max_lipschitz_ratio = std::max(out.max_lipschitz_ratio, (prob.eta(k, x) - prob.eta(k, y)).norm() / (a * dist));
    }
  }
  return out;
}

double bound_K1(const SpectralSplit& split, const StepSchedule& schedule, std::int64_t k_max,
                std::int64_t first_index) {
  const double lambda = least_positive_eigenvalue(split);
  const double lambda_max = split.eigenvalues(0);
  const double a0 = schedule.value(first_index);
  if (a0 * lambda_max > 1.0) {
    throw InvalidArgument("bound_K1: alpha_0 * lambda = " + std::to_string(a0 * lambda_max) +
                          " exceeds 1, so |B(0,0)| < 1 fails");
  }
  double S = a0;
  double S_max = S;
  for (std::int64_t k = 1; k <= k_max; ++k) {
    const double a = schedule.value(first_index + k);
    S = (1.0 - a * lambda) * S + a;
    S_max = std::max(S_max, S);
  }
  if (S_max > (2.0 / lambda) * (1.0 + 1e-12)) {
    throw CertificationError("bound_K1: recursion exceeded the cap 2/lambda");
  }
  return S_max;
}

SeriesBound bound_K2(const SpectralSplit& split, const StepSchedule& schedule, const std::vector<std::int64_t>& k_probe,
                     double tail_tol, std::int64_t max_terms) {
  if (split.unstable_dim() == 0 || split.eigenvalues(split.dimension() - 1) >= 0.0) {
    throw InvalidArgument("bound_K2: needs a strictly negative eigenvalue");
  }
  if (k_probe.empty()) throw InvalidArgument("bound_K2: no probe indices");
  const double lambda = weakest_unstable_eigenvalue(split);
  if (lambda == 0.0) {
    throw CertificationError(
        "bound_K2: zero eigenvalue in the unstable block; the terms alpha_m never decay to a summable series");
  }
  const double inv_abs_lambda = 1.0 / std::abs(lambda);
  const bool summable_steps = classify_sum(schedule) == SumClass::convergent_sum;

  SeriesBound out;
  bool all_converged = true;
  for (std::int64_t k : k_probe) {
    if (k < -1) throw InvalidArgument("bound_K2: probe indices must be >= -1");
    double P = 1.0;
    double partial = 0.0;
    double tail = inv_abs_lambda;
    const double first_tail = tail;
    std::int64_t terms = 0;
    bool converged = false;
    for (std::int64_t m = k + 1; terms < max_terms; ++m) {
      const double a = schedule.value(m);
      P /= 1.0 - a * lambda;
      partial += a * P;
      ++terms;
      tail = P * inv_abs_lambda;
      if (summable_steps) tail = std::min(tail, P * tail_bound(schedule, m));
      if (tail < tail_tol) {
        converged = true;
        break;
      }
    }
    if (!std::isfinite(partial) || !(tail < first_tail)) {
      throw CertificationError("bound_K2: series terms stopped decaying after " + std::to_string(terms) +
                               " summands");
    }
    out.value = std::max(out.value, partial + tail);
    out.tail = std::max(out.tail, tail);
    out.terms = std::max(out.terms, terms);
    all_converged = all_converged && converged;
  }
  out.tail_converged = all_converged;
  return out;
}

ContractionCertificate certify_with_bounds(const PerronProblem& prob, double K1, const SeriesBound& K2) {
  ContractionCertificate c;
  c.lambda_stable = least_positive_eigenvalue(prob.split);
  c.lambda_unstable = prob.split.unstable_dim() > 0 ? weakest_unstable_eigenvalue(prob.split) : 0.0;
  c.alpha0 = prob.schedule.value(0);
  c.epsilon = prob.epsilon;
  c.K1 = K1;
  c.K2 = K2.value;
  c.k2_detail = K2;
  c.K = 1.0 - c.alpha0 * c.lambda_stable + c.epsilon * (c.K1 + c.K2);
  c.valid = c.K < 1.0;
  c.epsilon_star = c.alpha0 * c.lambda_stable / (c.K1 + c.K2);
  if (c.lambda_unstable < 0.0) {
    const double P = 1.0 / transition_product(prob.split, prob.schedule, prob.horizon, 0)(prob.split.stable_dim());
    c.truncation_bound = c.epsilon * prob.delta * P / std::abs(c.lambda_unstable);
  }
  return c;
}

ContractionCertificate contraction_constant(const PerronProblem& prob, const CertifyOptions& opts) {
  const double K1 = certified_K1(prob.split, prob.schedule, std::max(opts.k_max, prob.horizon));
  SeriesBound K2;
  if (prob.epsilon > 0.0 && prob.split.unstable_dim() > 0) {
    K2 = bound_K2(prob.split, prob.schedule, opts.k_probe, prob.tail_tol);
  }
  return certify_with_bounds(prob, K1, K2);
}

SequenceSpaceElement zero_sequence(const PerronProblem& prob) {
  return {std::vector<Vector>(static_cast<std::size_t>(prob.horizon + 1), Vector::Zero(prob.split.dimension()))};
}

double sequence_distance(const SequenceSpaceElement& u, const SequenceSpaceElement& v) {
  if (u.points.size() != v.points.size()) throw InvalidArgument("sequence_distance: length mismatch");
  double d = 0.0;
  for (std::size_t k = 0; k < u.points.size(); ++k) d = std::max(d, (u.points[k] - v.points[k]).norm());
  return d;
}

SequenceSpaceElement apply_T(const PerronProblem& prob, const Vector& x0_plus, const SequenceSpaceElement& u) {
  const auto N = prob.horizon;
  const auto s = prob.split.stable_dim();
  const auto ns = prob.split.unstable_dim();
  if (static_cast<std::int64_t>(u.points.size()) != N + 1) throw InvalidArgument("apply_T: sequence length != horizon + 1");
  if (x0_plus.size() != s) throw InvalidArgument("apply_T: x0_plus has the wrong dimension");
  if (x0_plus.norm() > prob.delta) throw InvalidArgument("apply_T: |x0_plus| exceeds delta");

  const Vector lam_plus = prob.split.eigenvalues.head(s);
  const Vector lam_minus = prob.split.eigenvalues.tail(ns);

  std::vector<Vector> eta(static_cast<std::size_t>(N + 1));
  for (std::int64_t k = 0; k <= N; ++k) eta[static_cast<std::size_t>(k)] = prob.eta(k, u.points[static_cast<std::size_t>(k)]);

  SequenceSpaceElement v{std::vector<Vector>(static_cast<std::size_t>(N + 1), Vector(prob.split.dimension()))};

  // Stable block, forward: v+_{k+1} = B_k v+_k + eta+(k, u_k) with v+_0 = x0+.
  Vector plus = x0_plus;
  v.points[0].head(s) = plus;
  for (std::int64_t k = 0; k < N; ++k) {
    const double a = prob.schedule.value(k);
    plus = (1.0 - a * lam_plus.array()).matrix().cwiseProduct(plus) + eta[static_cast<std::size_t>(k)].head(s);
    v.points[static_cast<std::size_t>(k + 1)].head(s) = plus;
  }

  // Unstable block, backward: W_m = C_m^{-1} (eta-(m, u_m) + W_{m+1}), W_{N+1} = 0,
  // v-_m = -W_m.
  Vector W = Vector::Zero(ns);
  for (std::int64_t m = N; m >= 0; --m) {
    const double a = prob.schedule.value(m);
    W = (eta[static_cast<std::size_t>(m)].tail(ns) + W).cwiseQuotient((1.0 - a * lam_minus.array()).matrix());
    v.points[static_cast<std::size_t>(m)].tail(ns) = -W;
  }

  const double limit = prob.delta * (1.0 + 1e-6);
  for (std::int64_t k = 0; k <= N; ++k) {
    const double n = v.points[static_cast<std::size_t>(k)].norm();
    if (!(n <= limit)) {
      throw DomainError("apply_T: entry " + std::to_string(k) + " has norm " + std::to_string(n) +
                        ", outside B(0, delta)");
    }
  }
  return v;
}

StablePoint solve_stable_point(const PerronProblem& prob, const ContractionCertificate& cert, const Vector& x0_plus,
                               const FixedPointOptions& opts) {
  if (!cert.valid) throw CertificationError("solve_stable_point: contraction certificate is not valid (K >= 1)");
  if (x0_plus.norm() > prob.delta) throw InvalidArgument("solve_stable_point: |x0_plus| exceeds delta");

  StablePoint out;
  SequenceSpaceElement u = zero_sequence(prob);
  for (int j = 0; j < opts.fp_budget; ++j) {
    SequenceSpaceElement next = apply_T(prob, x0_plus, u);
    const double r = sequence_distance(next, u);
    u = std::move(next);
    out.residual_history.push_back(r);
    out.iterations = j + 1;
    out.residual = r;
    if (r < opts.fp_tol) {
      out.x0_minus = u.points[0].tail(prob.split.unstable_dim());
      out.sequence = std::move(u);
      return out;
    }
  }
  throw NumericalError("solve_stable_point: Picard iteration did not reach fp_tol within " +
                       std::to_string(opts.fp_budget) + " iterations (residual " + std::to_string(out.residual) + ")");
}

double fixed_sequence_defect(const PerronProblem& prob, const SequenceSpaceElement& seq) {
  double defect = 0.0;
  for (std::size_t k = 0; k + 1 < seq.points.size(); ++k) {
    defect = std::max(defect, (seq.points[k + 1] - perron_step(prob, static_cast<std::int64_t>(k), seq.points[k])).norm());
  }
  return defect;
}

std::optional<std::int64_t> escape_step(const PerronProblem& prob, const Vector& z0, std::int64_t steps) {
  Vector z = z0;
  if (z.norm() > prob.delta) return 0;
  for (std::int64_t k = 0; k < steps; ++k) {
    z = perron_step(prob, k, z);
    if (!(z.norm() <= prob.delta)) return k + 1;
  }
  return std::nullopt;
}

double shooting_oracle(const PerronProblem& prob, const Vector& x0_plus, double bracket, std::int64_t steps) {
  if (prob.split.unstable_dim() != 1) throw InvalidArgument("shooting_oracle: needs a one-dimensional unstable block");
  if (x0_plus.size() != prob.split.stable_dim()) throw InvalidArgument("shooting_oracle: x0_plus has the wrong dimension");
  if (!(bracket > 0.0)) throw InvalidArgument("shooting_oracle: bracket must be > 0");
  const auto d = prob.split.dimension();

  struct Outcome {
    bool escaped;
    bool upper;
  };
  // Side of the exit (sign of the unstable coordinate when leaving B(0, delta),
  // or after `steps` iterations if the trajectory stays inside).
  auto shoot = [&](double x0_minus) {
    Vector z(d);
    z << x0_plus, x0_minus;
    bool escaped = z.norm() > prob.delta;
    for (std::int64_t k = 0; k < steps && !escaped; ++k) {
      z = perron_step(prob, k, z);
      escaped = !(z.norm() <= prob.delta);
    }
    return Outcome{escaped, z(d - 1) >= 0.0};
  };

  const Outcome lo_out = shoot(-bracket);
  const Outcome hi_out = shoot(bracket);
  if (!lo_out.escaped && !hi_out.escaped) {
    throw InvalidArgument("shooting_oracle: both bracket endpoints stay bounded (bracket too small)");
  }
  if (lo_out.upper == hi_out.upper) {
    throw InvalidArgument("shooting_oracle: both bracket endpoints escape on the same side (no stable point)");
  }
  double lo = -bracket, hi = bracket;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (shoot(mid).upper == lo_out.upper ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Matrix phi_derivative_at_zero(const PerronProblem& prob, const ContractionCertificate& cert, double h,
                              const FixedPointOptions& opts) {
  const auto s = prob.split.stable_dim();
  Matrix D(prob.split.unstable_dim(), s);
  for (Eigen::Index i = 0; i < s; ++i) {
    Vector e = Vector::Zero(s);
    e(i) = h;
    D.col(i) = (solve_stable_point(prob, cert, e, opts).x0_minus - solve_stable_point(prob, cert, -e, opts).x0_minus) /
               (2.0 * h);
  }
  return D;
}

ManifoldChart chart(const PerronProblem& prob, const ContractionCertificate& cert, const std::vector<Vector>& grid,
                    const ChartOptions& opts) {
  ManifoldChart out;
  out.samples.resize(grid.size());
  parallel_for(
      grid.size(),
      [&](std::size_t i) {
        ChartSample& sample = out.samples[i];
        sample.x0_plus = grid[i];
        try {
          StablePoint sp = solve_stable_point(prob, cert, grid[i], opts.fixed_point);
          sample.x0_minus = std::move(sp.x0_minus);
          sample.residual = sp.residual;
          sample.picard_iterations = sp.iterations;
          sample.ok = true;
        } catch (const Error& e) {
          sample.error = e.what();
        }
      },
      opts.workers == 0 ? worker_count() : opts.workers);

  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    if (!out.samples[i].ok) out.failed.push_back(i);
  }
  out.partial = !out.failed.empty();

  try {
    out.phi_at_zero_norm = solve_stable_point(prob, cert, Vector::Zero(prob.split.stable_dim()), opts.fixed_point).x0_minus.norm();
    out.derivative_at_zero = phi_derivative_at_zero(prob, cert, opts.tangency_h, opts.fixed_point);
    out.tangency_norm = out.derivative_at_zero.size() == 0
                            ? 0.0
                            : Eigen::JacobiSVD<Matrix>(out.derivative_at_zero).singularValues()(0);
    out.tangent = out.tangency_norm <= opts.tangency_tol && out.phi_at_zero_norm <= prob.tail_tol;
  } catch (const Error&) {
    out.tangent = false;
  }

  out.lipschitz_bound = cert.epsilon * cert.K2 / (1.0 - cert.K);
  const double slack = 10.0 * opts.fixed_point.fp_tol / (1.0 - cert.K);
  out.continuous = true;
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    for (std::size_t j = i + 1; j < out.samples.size(); ++j) {
      const auto& a = out.samples[i];
      const auto& b = out.samples[j];
      if (!a.ok || !b.ok) continue;
      const double lhs = (a.x0_minus - b.x0_minus).norm();
      const double rhs = out.lipschitz_bound * (1.0 + 1e-6) * (a.x0_plus - b.x0_plus).norm() + slack;
      if (lhs > rhs) out.continuous = false;
    }
  }
  return out;
}

std::vector<Vector> uniform_grid_1d(double lo, double hi, int points) {
  if (points < 2) throw InvalidArgument("uniform_grid_1d: needs at least two points");
  std::vector<Vector> grid;
  grid.reserve(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    Vector v(1);
    v(0) = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    grid.push_back(v);
  }
  return grid;
}

LinearizedProblem remainder_from_objective(const Objective& obj, const Vector& x_star, const StepSchedule& schedule,
                                           const RemainderOptions& opts) {
  if (x_star.size() != obj.dimension) throw InvalidArgument("remainder_from_objective: x_star dimension mismatch");
  const Vector g_star = obj.grad(x_star);
  if (g_star.norm() > 1e-8) throw InvalidArgument("remainder_from_objective: x_star is not a critical point");
  if (opts.method == MethodId::mirror_entropy || opts.method == MethodId::manifold_sphere) {
    throw InvalidArgument(std::string("remainder_from_objective: method '") + to_string(opts.method) +
                          "' acts on a constrained domain and is not supported");
  }

  const Matrix H = obj.hess(x_star);
  const auto d = H.rows();
  Matrix G = H;
  std::optional<RiemannianMetric> metric = opts.metric;
  if (opts.method == MethodId::manifold_intrinsic) {
    if (!metric) metric = identity_metric(static_cast<int>(d));
    G = metric->inverse_metric(x_star) * H;
  }

  LinearizedProblem lp{PerronProblem{SpectralSplit{}, schedule, zero_remainder(), opts.delta, 0.0, opts.horizon,
                                     opts.tail_tol},
                       split(G), x_star, "zero"};
  if (lp.frame.stable_dim() == 0 || lp.frame.eigenvalues.minCoeff() >= 0.0) {
    throw InvalidArgument(
        "remainder_from_objective: the linearization needs at least one positive and one negative eigenvalue");
  }

  const bool gradient_type = opts.method == MethodId::gd || opts.method == MethodId::mirror_euclidean;
  const bool at_origin = x_star.isZero(0.0);
  const bool frame_is_identity = (lp.frame.Q - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() == 0.0;

  Remainder eta;
  double epsilon = 0.0;
  if (gradient_type && std::holds_alternative<Objective::Quadratic>(obj.structure)) {
    eta = zero_remainder();
    epsilon = 0.0;
    lp.epsilon_source = "zero";
  } else if (const auto* cubic = std::get_if<Objective::CubicSaddle>(&obj.structure);
             cubic != nullptr && gradient_type && at_origin && frame_is_identity) {
    const double a = cubic->a;
    eta = [a, sched = schedule](std::int64_t k, const Vector& z) -> Vector {
      const double alpha = sched.value(k);
      Vector out(2);
      out << -alpha * 2.0 * a * z(0) * z(1), -alpha * a * z(0) * z(0);
      return out;
    };
    epsilon = 6.0 * std::abs(a) * opts.delta;
    lp.epsilon_source = "analytic";
  } else {
    const Method method = Method::from_id(to_string(opts.method), static_cast<int>(d), metric);
    const Matrix Q = lp.frame.Q;
    const Matrix Q_inv = lp.frame.Q_inv;
    eta = [obj, method, sched = schedule, G, Q, Q_inv, x_star](std::int64_t k, const Vector& z) -> Vector {
      const Vector y = Q_inv * z;
      const Vector x = y + x_star;
      const double alpha = sched.value(k);
      const Vector theta = method.step(obj, sched, k, x) - x_star - (y - alpha * (G * y));
      return Q * theta;
    };
    lp.epsilon_source = "sampled";
  }

  lp.problem = make_perron_problem(lp.frame.eigenvalues, schedule, eta, opts.delta, epsilon, opts.horizon,
                                   opts.tail_tol);
  if (lp.epsilon_source == "sampled") {
    const int per_k = std::max(1, opts.lipschitz_pairs / static_cast<int>(std::max<std::size_t>(1, opts.lipschitz_ks.size())));
    const RemainderCheck check = check_remainder(lp.problem, opts.lipschitz_ks, per_k, opts.seed);
    lp.problem.epsilon = opts.safety_factor * check.max_lipschitz_ratio;
  }
  return lp;
}

CertifiedProblem certify_radius(const Objective& obj, const Vector& x_star, const StepSchedule& schedule,
                                RemainderOptions opts, int max_halvings, const CertifyOptions& copts) {
  if (max_halvings < 0) throw InvalidArgument("certify_radius: max_halvings must be >= 0");
  LinearizedProblem lp = remainder_from_objective(obj, x_star, schedule, opts);
  const double K1 = certified_K1(lp.problem.split, schedule, std::max(copts.k_max, opts.horizon));
  std::optional<SeriesBound> K2;

  for (int halvings = 0;; ++halvings) {
    if (lp.problem.epsilon > 0.0 && !K2) K2 = bound_K2(lp.problem.split, schedule, copts.k_probe, opts.tail_tol);
    ContractionCertificate cert = certify_with_bounds(lp.problem, K1, K2.value_or(SeriesBound{}));
    if (cert.valid || halvings >= max_halvings) return {std::move(lp), cert, halvings};
    opts.delta *= 0.5;
    lp = remainder_from_objective(obj, x_star, schedule, opts);
  }
}

}  // namespace saddle
