#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "saddle/methods.hpp"
#include "saddle/objectives.hpp"
#include "saddle/schedules.hpp"
#include "saddle/spectral.hpp"

namespace saddle {

/// eta(k, z): the nonlinear remainder of x_{k+1} = (I - alpha_k H) x_k + eta(k, x_k),
/// expressed in the diagonal frame of H.
using Remainder = std::function<Vector(std::int64_t k, const Vector& z)>;

/// Data defining the Lyapunov-Perron operator T.
///
/// All sequence-space arithmetic happens in the diagonal frame: `split` is the
/// split of the diagonal matrix H itself, so its eigenvalues must already be
/// sorted in descending order (stable coordinates first).
struct PerronProblem {
  SpectralSplit split;
  StepSchedule schedule;
  Remainder eta;
  /// Radius of the neighborhood B(0, delta).
  double delta = 0.1;
  /// Lipschitz modulus: |eta(k,x) - eta(k,y)| <= alpha_k * epsilon * |x - y| on B(0, delta).
  double epsilon = 0.0;
  /// Sequences carry entries 0..horizon; the infinite tail of T is truncated there.
  std::int64_t horizon = 400;
  double tail_tol = 1e-10;
};

/// Validates the fields and builds the diagonal-frame split from the
/// descending eigenvalues of H.
[[nodiscard]] PerronProblem make_perron_problem(const Vector& eigenvalues, StepSchedule schedule, Remainder eta,
                                                double delta, double epsilon, std::int64_t horizon = 400,
                                                double tail_tol = 1e-10);

/// The zero remainder.
[[nodiscard]] Remainder zero_remainder();

/// (I - alpha_k H) z + eta(k, z): one step of the raw dynamics.
[[nodiscard]] Vector perron_step(const PerronProblem& prob, std::int64_t k, const Vector& z);

struct RemainderCheck {
  double max_eta_at_zero = 0.0;
  /// max over samples of |eta(k,x) - eta(k,y)| / (alpha_k |x - y|)
  double max_lipschitz_ratio = 0.0;
};

/// Samples the remainder's hypotheses on B(0, delta) for the given step
/// indices.
[[nodiscard]] RemainderCheck check_remainder(const PerronProblem& prob, const std::vector<std::int64_t>& ks,
                                             int pairs_per_k, std::uint64_t seed);

/// Result of a truncated series bound.
struct SeriesBound {
  double value = 0.0;
  /// Rigorous bound on the part of the series that was not summed.
  double tail = 0.0;
  std::int64_t terms = 0;
  /// tail < tail_tol was reached before the summand cap.
  bool tail_converged = false;
};

/// K1 = max_{k <= k_max} S_k with S_k = sum_{i<=k} alpha_i |B(k, i+1)|, computed
/// by S_{k+1} = (1 - alpha_{k+1} lambda) S_k + alpha_{k+1} for the least
/// positive eigenvalue. `first_index` starts the schedule at alpha_{first_index}.
/// Throws InvalidArgument when alpha_0 * lambda_max > 1 (the stable factors
/// must lie in [0, 1)) or when the split has no positive eigenvalue.
[[nodiscard]] double bound_K1(const SpectralSplit& split, const StepSchedule& schedule, std::int64_t k_max,
                              std::int64_t first_index = 0);

/// K2 = max over probes of R_k = sum_{i>=0} alpha_{k+1+i} |C(k+1+i, k+1)^{-1}|.
///
/// Summation stops once the remaining tail is certified below tail_tol. The
/// tail certificate is exact for the unstable factors: with
/// P_M = prod_{j=k+1}^{M} (1 - alpha_j lambda)^{-1}, every summand equals
/// (P_{m-1} - P_m) / |lambda|, so the unsummed tail is at most P_M / |lambda|.
/// A probe of -1 sums from index 0 (the series defining x0^-).
/// For summable schedules the tail is also bounded by P_M sum_{m>M} alpha_m.
/// Throws InvalidArgument without a strictly negative eigenvalue,
/// CertificationError when the terms stop decaying.
[[nodiscard]] SeriesBound bound_K2(const SpectralSplit& split, const StepSchedule& schedule,
                                   const std::vector<std::int64_t>& k_probe, double tail_tol,
                                   std::int64_t max_terms = 10'000'000);

struct ContractionCertificate {
  double K1 = 0.0;
  double K2 = 0.0;
  double K = 1.0;
  double lambda_stable = 0.0;
  double lambda_unstable = 0.0;
  double alpha0 = 0.0;
  double epsilon = 0.0;
  bool valid = false;
  /// alpha_0 lambda / (K1 + K2): the largest epsilon that certifies.
  double epsilon_star = 0.0;
  /// epsilon delta P_N / |lambda|: bound on the x0^- error from cutting the
  /// series at the horizon.
  double truncation_bound = 0.0;
  SeriesBound k2_detail;
};

struct CertifyOptions {
  std::int64_t k_max = 10'000;
  std::vector<std::int64_t> k_probe = {-1, 0, 1, 10, 100, 1000};
};

/// K = 1 - alpha_0 lambda + epsilon (K1 + K2), valid iff K < 1. K1 is
/// max(bound_K1, 1/lambda), the supremum of S_k over all k.
[[nodiscard]] ContractionCertificate contraction_constant(const PerronProblem& prob, const CertifyOptions& opts = {});

/// Same formula with precomputed K1/K2 (they do not depend on delta or epsilon).
[[nodiscard]] ContractionCertificate certify_with_bounds(const PerronProblem& prob, double K1,
                                                         const SeriesBound& K2);

/// Element of the truncated sequence space: entries 0..horizon, each in B(0, delta).
struct SequenceSpaceElement {
  std::vector<Vector> points;
};

[[nodiscard]] SequenceSpaceElement zero_sequence(const PerronProblem& prob);

/// sup_k |u_k - v_k|
[[nodiscard]] double sequence_distance(const SequenceSpaceElement& u, const SequenceSpaceElement& v);

/// (Tu)_{k+1} = ( B(k,0) x0+ + sum_{i<=k} B(k,i+1) eta+(i, u_i),
///               -sum_{m=k+1}^{N} C(m,k+1)^{-1} eta-(m, u_m) ),
/// (Tu)_0 = ( x0+, -sum_{m=0}^{N} C(m,0)^{-1} eta-(m, u_m) ).
/// Throws DomainError if an entry leaves B(0, delta (1 + 1e-6)).
[[nodiscard]] SequenceSpaceElement apply_T(const PerronProblem& prob, const Vector& x0_plus,
                                           const SequenceSpaceElement& u);

struct FixedPointOptions {
  double fp_tol = 1e-13;
  int fp_budget = 500;
};

struct StablePoint {
  Vector x0_minus;
  SequenceSpaceElement sequence;
  double residual = 0.0;
  int iterations = 0;
  /// d(u_{j+1}, u_j) for every Picard iterate.
  std::vector<double> residual_history;
};

/// Picard iteration of T from the zero sequence.
[[nodiscard]] StablePoint solve_stable_point(const PerronProblem& prob, const ContractionCertificate& cert,
                                             const Vector& x0_plus, const FixedPointOptions& opts = {});

/// max_k |seq_{k+1} - perron_step(k, seq_k)|: how well a sequence satisfies the
/// recursive form of the dynamics.
[[nodiscard]] double fixed_sequence_defect(const PerronProblem& prob, const SequenceSpaceElement& seq);

/// Step index at which the raw dynamics started from z0 leave B(0, delta), or
/// nullopt if they stay inside for `steps` iterations.
[[nodiscard]] std::optional<std::int64_t> escape_step(const PerronProblem& prob, const Vector& z0,
                                                      std::int64_t steps);

/// Independent check of phi for a one-dimensional unstable block: bisection on
/// the side through which the trajectory from (x0+, x0-) leaves B(0, delta).
[[nodiscard]] double shooting_oracle(const PerronProblem& prob, const Vector& x0_plus, double bracket,
                                     std::int64_t steps);

struct ChartOptions {
  FixedPointOptions fixed_point{};
  double tangency_h = 1e-3;
  double tangency_tol = 1e-3;
  unsigned workers = 0;  ///< 0: use worker_count()
};

struct ChartSample {
  Vector x0_plus;
  Vector x0_minus;
  double residual = 0.0;
  int picard_iterations = 0;
  bool ok = false;
  std::string error;
};

struct ManifoldChart {
  std::vector<ChartSample> samples;
  std::vector<std::size_t> failed;
  bool partial = false;
  double phi_at_zero_norm = 0.0;
  Matrix derivative_at_zero;
  double tangency_norm = 0.0;
  bool tangent = false;
  /// epsilon K2 / (1 - K): Lipschitz constant of phi implied by the certificate.
  double lipschitz_bound = 0.0;
  bool continuous = false;
};

/// Central-difference Dphi(0) (unstable_dim x stable_dim).
[[nodiscard]] Matrix phi_derivative_at_zero(const PerronProblem& prob, const ContractionCertificate& cert, double h,
                                            const FixedPointOptions& opts = {});

[[nodiscard]] ManifoldChart chart(const PerronProblem& prob, const ContractionCertificate& cert,
                                  const std::vector<Vector>& grid, const ChartOptions& opts = {});

/// Evenly spaced one-dimensional grid as stable-coordinate vectors.
[[nodiscard]] std::vector<Vector> uniform_grid_1d(double lo, double hi, int points);

struct RemainderOptions {
  MethodId method = MethodId::gd;
  std::optional<RiemannianMetric> metric;
  double delta = 0.1;
  std::int64_t horizon = 400;
  double tail_tol = 1e-10;
  int lipschitz_pairs = 10'000;
  std::vector<std::int64_t> lipschitz_ks = {0, 1, 10, 100};
  double safety_factor = 1.5;
  std::uint64_t seed = 0;
};

/// A PerronProblem built from an objective at one of its critical points,
/// through z = Q (x - x*).
struct LinearizedProblem {
  PerronProblem problem;
  SpectralSplit frame;
  Vector x_star;
  /// "zero", "analytic" or "sampled".
  std::string epsilon_source;

  [[nodiscard]] Vector to_frame(const Vector& x) const { return frame.to_diagonal(x - x_star); }
  [[nodiscard]] Vector from_frame(const Vector& z) const { return frame.from_diagonal(z) + x_star; }
};

/// Builds H from the method's linearization at x*, Q from its split, and
/// eta(k, z) = Q theta(k, Q^{-1} z + x*) with theta the Taylor remainder of
/// the update rule. epsilon is exact (0) for quadratics under gradient-type
/// steps, analytic (6 |a| delta) for the cubic fixture at the origin, and
/// otherwise the largest sampled Lipschitz quotient times the safety factor.
[[nodiscard]] LinearizedProblem remainder_from_objective(const Objective& obj, const Vector& x_star,
                                                         const StepSchedule& schedule,
                                                         const RemainderOptions& opts = {});

struct CertifiedProblem {
  LinearizedProblem linearized;
  ContractionCertificate certificate;
  int halvings = 0;
};

/// Starts at opts.delta and halves delta (rebuilding epsilon) until K < 1, at
/// most `max_halvings` times. With max_halvings = 0 the radius is fixed. The
/// returned certificate may be invalid; callers check `certificate.valid`.
[[nodiscard]] CertifiedProblem certify_radius(const Objective& obj, const Vector& x_star, const StepSchedule& schedule,
                                              RemainderOptions opts = {}, int max_halvings = 20,
                                              const CertifyOptions& copts = {});

}  // namespace saddle
