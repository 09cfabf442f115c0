#pragma once

#include "cgeom/core.hpp"
#include "cgeom/generator.hpp"
#include "cgeom/information.hpp"
#include "cgeom/mdp.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cgeom {

/// Tabular softmax policy: row s of the derived policy is softmax(logits.row(s)).
/// Parameter (s, a) has flat index s * num_actions + a.
class SoftmaxPolicy {
 public:
  explicit SoftmaxPolicy(Matrix logits);
  static SoftmaxPolicy uniform(Index states, Index actions);

  const Matrix& logits() const noexcept { return logits_; }
  Index num_states() const noexcept { return logits_.rows(); }
  Index num_actions() const noexcept { return logits_.cols(); }
  Index num_params() const noexcept { return logits_.size(); }
  Policy policy() const;

  Vector flat() const;
  static SoftmaxPolicy from_flat(const Vector& params, Index states, Index actions);

 private:
  Matrix logits_;
};

/// d x (d m) matrix of derivatives of the occupancy with respect to the logits,
/// by forward-mode differentiation of (1/(n+1)) sum_k mu^T M(theta)^k.
Matrix occupancy_jacobian(const FiniteMdp& mdp, const SoftmaxPolicy& policy);

/// Central differences of the occupancy with respect to each logit.
Matrix finite_difference_jacobian(const FiniteMdp& mdp, const SoftmaxPolicy& policy,
                                  double step = 1e-6);

/// max |J - J_fd| / max(max |J|, 1e-12).
double jacobian_relative_error(const FiniteMdp& mdp, const SoftmaxPolicy& policy,
                               double step = 1e-6);

/// eta J^T diag(1/p) J with eta = |f''(1)|. Throws on a zero occupancy entry.
Matrix pullback_metric(const FiniteMdp& mdp, const SoftmaxPolicy& policy, const Generator& f);

/// (n+1) sum_s p_s c_s with c = intrinsic_reward_vector(p, spec).
double occupancy_objective(const Distribution& p, const RewardSpec& spec, int horizon);

/// Gradient of occupancy_objective with respect to p:
/// (n+1) (r_s + beta [f(1/p_s) - f'(1/p_s) / p_s]), divided by eta when spec.adjust.
Vector occupancy_objective_gradient(const Distribution& p, const RewardSpec& spec, int horizon);

struct PolicyEvaluation {
  Distribution occupancy;
  double objective;
  Vector gradient;  ///< with respect to the flat logits
};

PolicyEvaluation evaluate_policy(const FiniteMdp& mdp, const SoftmaxPolicy& policy,
                                 const RewardSpec& spec);

struct OptimizerState {
  SoftmaxPolicy policy;
  std::int64_t iteration = 0;
  double objective = 0.0;
  double grad_norm = 0.0;
  double damping = 0.0;
  /// Step length accepted by the last update (0 when no step was taken).
  double step = 0.0;
};

OptimizerState initial_state(const FiniteMdp& mdp, const SoftmaxPolicy& policy,
                             const RewardSpec& spec);

/// Default Tikhonov damping 1e-6 trace(G) / dim.
double default_damping(const Matrix& metric);

/// (G + damping I)^+ grad via eigendecomposition, eigenvalues below 1e-12 of the
/// largest dropped. Throws InvalidArgument when damping is 0 and G is singular.
Vector natural_direction(const Matrix& metric, const Vector& gradient, double damping);

/// One natural occupancy-gradient ascent step with Armijo backtracking. The
/// step halves from `step` until the objective improves or it drops below 1e-12,
/// in which case the state is returned unchanged with step 0. A missing
/// `damping` uses default_damping.
OptimizerState natural_step(const FiniteMdp& mdp, const OptimizerState& state,
                            const RewardSpec& spec, double step,
                            std::optional<double> damping = std::nullopt);

/// Same as natural_step with the identity metric.
OptimizerState vanilla_policy_gradient_step(const FiniteMdp& mdp, const OptimizerState& state,
                                            const RewardSpec& spec, double step);

enum class AscentMethod { natural, vanilla };

struct TraceRow {
  std::int64_t iteration;
  double objective;
  double grad_norm;
  double step;
  double entropy_of_occupancy;
};

struct AscentResult {
  OptimizerState final_state;
  std::vector<TraceRow> trace;
  /// First iteration whose objective reached `target` (-1 if never).
  std::int64_t iterations_to_target = -1;
};

struct AscentOptions {
  AscentMethod method = AscentMethod::natural;
  std::int64_t max_iterations = 2000;
  double gradient_tolerance = 1e-10;
  double initial_step = 1.0;
  std::optional<double> damping;
  /// Stop once the objective reaches this value.
  std::optional<double> target;
};

/// Repeated steps; each step starts from twice the last accepted step length.
AscentResult run_ascent(const FiniteMdp& mdp, const SoftmaxPolicy& start, const RewardSpec& spec,
                        const AscentOptions& options);

/// CSV with header iteration,objective,grad_norm,step,entropy_of_occupancy.
std::string trace_csv(const std::vector<TraceRow>& trace);

struct TeleportOptimum {
  Vector next_state;      ///< q: common next-state distribution
  Distribution occupancy; ///< (u + n q) / (n + 1)
  double objective;
};

/// Maximizes occupancy_objective over the achievable occupancies of
/// teleport_mdp(d, n), which are exactly (u + n q)/(n+1) for q in the simplex.
TeleportOptimum teleport_optimum(const RewardSpec& spec, int horizon, double tol = 1e-12);

/// Largest positive second difference of R_{alpha,beta} along normalized
/// order-alpha geodesics between random interior points, sampled at
/// `grid_points` equally spaced times.
double geodesic_concavity_check(const Vector& reward, double alpha, double beta, int trials,
                                int grid_points, int horizon = 0, std::uint64_t seed = 0);

}  // namespace cgeom
