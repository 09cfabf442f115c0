#include "cgeom/policy_optim.hpp"

#include "cgeom/geometry.hpp"
#include "cgeom/io_util.hpp"
#include "cgeom/optima.hpp"
#include "cgeom/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cgeom {

namespace {

constexpr double kArmijo = 1e-4;
constexpr double kStepFloor = 1e-12;

void check_shape(const FiniteMdp& mdp, const SoftmaxPolicy& policy) {
  if (policy.num_states() != mdp.num_states() || policy.num_actions() != mdp.num_actions()) {
    throw InvalidArgument("softmax policy shape does not match the MDP");
  }
}

double objective_at(const FiniteMdp& mdp, const SoftmaxPolicy& policy, const RewardSpec& spec) {
  return occupancy_objective(occupancy(mdp, policy.policy()).dist, spec, mdp.horizon());
}

// Backtracking along `direction` from the state's logits.
OptimizerState line_search(const FiniteMdp& mdp, const OptimizerState& state,
                           const RewardSpec& spec, const Vector& gradient, const Vector& direction,
                           double step, double damping) {
  OptimizerState next = state;
  next.iteration = state.iteration + 1;
  next.damping = damping;
  next.step = 0.0;
  const double slope = gradient.dot(direction);
  if (!(slope > 0.0)) {
    return next;
  }
  const Index d = state.policy.num_states();
  const Index m = state.policy.num_actions();
  const Vector theta = state.policy.flat();
  for (double s = step; s >= kStepFloor; s *= 0.5) {
    const SoftmaxPolicy candidate = SoftmaxPolicy::from_flat(theta + s * direction, d, m);
    double value = -std::numeric_limits<double>::infinity();
    try {
      value = objective_at(mdp, candidate, spec);
    } catch (const InvalidArgument&) {
      // A step that starves a state of occupancy is rejected like any other bad step.
      continue;
    }
    if (value >= state.objective + kArmijo * s * slope) {
      const PolicyEvaluation eval = evaluate_policy(mdp, candidate, spec);
      next.policy = candidate;
      next.objective = eval.objective;
      next.grad_norm = eval.gradient.norm();
      next.step = s;
      return next;
    }
  }
  return next;
}

}  // namespace

SoftmaxPolicy::SoftmaxPolicy(Matrix logits) : logits_(std::move(logits)) {
  if (logits_.rows() < 1 || logits_.cols() < 1) {
    throw InvalidArgument("softmax policy needs at least one state and one action");
  }
  if (!logits_.allFinite()) {
    throw InvalidArgument("softmax logits must be finite");
  }
}

SoftmaxPolicy SoftmaxPolicy::uniform(Index states, Index actions) {
  return SoftmaxPolicy(Matrix::Zero(states, actions));
}

Policy SoftmaxPolicy::policy() const {
  Matrix table(logits_.rows(), logits_.cols());
  for (Index s = 0; s < logits_.rows(); ++s) {
    const Eigen::RowVectorXd shifted = logits_.row(s).array() - logits_.row(s).maxCoeff();
    const Eigen::RowVectorXd w = shifted.array().exp();
    table.row(s) = w / w.sum();
  }
  return Policy(std::move(table));
}

Vector SoftmaxPolicy::flat() const {
  Vector out(num_params());
  for (Index s = 0; s < num_states(); ++s) {
    out.segment(s * num_actions(), num_actions()) = logits_.row(s).transpose();
  }
  return out;
}

SoftmaxPolicy SoftmaxPolicy::from_flat(const Vector& params, Index states, Index actions) {
  if (params.size() != states * actions) {
    throw InvalidArgument("flat logits have the wrong length");
  }
  Matrix logits(states, actions);
  for (Index s = 0; s < states; ++s) {
    logits.row(s) = params.segment(s * actions, actions).transpose();
  }
  return SoftmaxPolicy(std::move(logits));
}

Matrix occupancy_jacobian(const FiniteMdp& mdp, const SoftmaxPolicy& policy) {
  check_shape(mdp, policy);
  const Index d = mdp.num_states();
  const Index m = mdp.num_actions();
  const Index params = d * m;
  const Policy pi = policy.policy();
  const Matrix kernel = agent_env_kernel(mdp, pi);

  // Row (s, a) of dM / d theta_{s a}: only row s of M moves, by pi(s, a) (T_a[s] - M[s]).
  Matrix kernel_rate(params, d);
  for (Index s = 0; s < d; ++s) {
    for (Index a = 0; a < m; ++a) {
      kernel_rate.row(s * m + a) =
          pi.table()(s, a) * (mdp.transition(a).row(s) - kernel.row(s));
    }
  }

  Eigen::RowVectorXd x = mdp.start().weights().transpose();
  Matrix dx = Matrix::Zero(params, d);
  Matrix acc = Matrix::Zero(params, d);
  for (int k = 0; k < mdp.horizon(); ++k) {
    Matrix next = dx * kernel;
    for (Index j = 0; j < params; ++j) {
      next.row(j) += x[j / m] * kernel_rate.row(j);
    }
    dx = std::move(next);
    x = x * kernel;
    acc += dx;
  }
  return acc.transpose() / static_cast<double>(mdp.horizon() + 1);
}

Matrix finite_difference_jacobian(const FiniteMdp& mdp, const SoftmaxPolicy& policy, double step) {
  check_shape(mdp, policy);
  const Index d = mdp.num_states();
  const Index m = mdp.num_actions();
  const Vector theta = policy.flat();
  Matrix out(d, theta.size());
  for (Index j = 0; j < theta.size(); ++j) {
    Vector up = theta;
    Vector down = theta;
    up[j] += step;
    down[j] -= step;
    const Vector pu = occupancy(mdp, SoftmaxPolicy::from_flat(up, d, m).policy()).dist.weights();
    const Vector pd = occupancy(mdp, SoftmaxPolicy::from_flat(down, d, m).policy()).dist.weights();
    out.col(j) = (pu - pd) / (2.0 * step);
  }
  return out;
}

double jacobian_relative_error(const FiniteMdp& mdp, const SoftmaxPolicy& policy, double step) {
  const Matrix exact = occupancy_jacobian(mdp, policy);
  const Matrix approx = finite_difference_jacobian(mdp, policy, step);
  const double scale = std::max(exact.cwiseAbs().maxCoeff(), 1e-12);
  return (exact - approx).cwiseAbs().maxCoeff() / scale;
}

Matrix pullback_metric(const FiniteMdp& mdp, const SoftmaxPolicy& policy, const Generator& f) {
  const Distribution p = occupancy(mdp, policy.policy()).dist;
  for (Index s = 0; s < p.size(); ++s) {
    if (!(p[s] > 0.0)) {
      std::ostringstream os;
      os << "pullback_metric: occupancy of state " << s << " is zero";
      throw InvalidArgument(os.str());
    }
  }
  const Matrix j = occupancy_jacobian(mdp, policy);
  const Vector inv = p.weights().cwiseInverse();
  Matrix g = f.metric_scale() * (j.transpose() * inv.asDiagonal() * j);
  return 0.5 * (g + g.transpose());
}

double occupancy_objective(const Distribution& p, const RewardSpec& spec, int horizon) {
  return static_cast<double>(horizon + 1) * p.weights().dot(intrinsic_reward_vector(p, spec));
}

Vector occupancy_objective_gradient(const Distribution& p, const RewardSpec& spec, int horizon) {
  spec.validate();
  if (spec.extrinsic.size() != p.size()) {
    throw InvalidArgument("occupancy_objective_gradient: dimension mismatch");
  }
  Vector g(p.size());
  for (Index s = 0; s < p.size(); ++s) {
    if (!(p[s] > 0.0)) {
      throw InvalidArgument("occupancy_objective_gradient: zero occupancy entry");
    }
    const double x = 1.0 / p[s];
    g[s] = spec.extrinsic[s];
    if (spec.beta != 0.0) {
      g[s] += spec.beta * (spec.generator(x) - spec.generator.derivative(x) * x);
    }
  }
  g *= static_cast<double>(horizon + 1);
  if (spec.adjust) {
    g /= spec.generator.metric_scale();
  }
  return g;
}

PolicyEvaluation evaluate_policy(const FiniteMdp& mdp, const SoftmaxPolicy& policy,
                                 const RewardSpec& spec) {
  check_shape(mdp, policy);
  Distribution p = occupancy(mdp, policy.policy()).dist;
  const double value = occupancy_objective(p, spec, mdp.horizon());
  const Vector grad = occupancy_jacobian(mdp, policy).transpose() *
                      occupancy_objective_gradient(p, spec, mdp.horizon());
  return {std::move(p), value, grad};
}

OptimizerState initial_state(const FiniteMdp& mdp, const SoftmaxPolicy& policy,
                             const RewardSpec& spec) {
  const PolicyEvaluation eval = evaluate_policy(mdp, policy, spec);
  return OptimizerState{policy, 0, eval.objective, eval.gradient.norm(), 0.0, 0.0};
}

double default_damping(const Matrix& metric) {
  if (metric.rows() == 0) {
    return 0.0;
  }
  return 1e-6 * metric.trace() / static_cast<double>(metric.rows());
}

Vector natural_direction(const Matrix& metric, const Vector& gradient, double damping) {
  if (!(damping >= 0.0) || !std::isfinite(damping)) {
    throw InvalidArgument("natural_direction: damping must be finite and >= 0");
  }
  const Index n = metric.rows();
  const Matrix damped = metric + damping * Matrix::Identity(n, n);
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(damped);
  const Vector values = eig.eigenvalues();
  const double top = values.cwiseAbs().maxCoeff();
  const double cutoff = 1e-12 * top;
  if (damping == 0.0 && (top == 0.0 || values.minCoeff() <= cutoff)) {
    throw InvalidArgument(
        "natural_direction: the pullback metric is singular (softmax logits are redundant per "
        "state); use a positive damping such as 1e-6 * trace / dim");
  }
  const Vector coeffs = eig.eigenvectors().transpose() * gradient;
  Vector scaled = Vector::Zero(n);
  for (Index i = 0; i < n; ++i) {
    if (values[i] > cutoff) {
      scaled[i] = coeffs[i] / values[i];
    }
  }
  return eig.eigenvectors() * scaled;
}

OptimizerState natural_step(const FiniteMdp& mdp, const OptimizerState& state,
                            const RewardSpec& spec, double step, std::optional<double> damping) {
  if (!(step > 0.0)) {
    throw InvalidArgument("natural_step: step must be > 0");
  }
  if (damping && !(*damping >= 0.0)) {
    throw InvalidArgument("natural_step: damping must be >= 0");
  }
  const PolicyEvaluation eval = evaluate_policy(mdp, state.policy, spec);
  if (eval.gradient.norm() == 0.0) {
    OptimizerState next = state;
    next.iteration += 1;
    next.step = 0.0;
    next.grad_norm = 0.0;
    return next;
  }
  const Matrix metric = pullback_metric(mdp, state.policy, spec.generator);
  const double used = damping.value_or(default_damping(metric));
  const Vector direction = natural_direction(metric, eval.gradient, used);
  return line_search(mdp, state, spec, eval.gradient, direction, step, used);
}

OptimizerState vanilla_policy_gradient_step(const FiniteMdp& mdp, const OptimizerState& state,
                                            const RewardSpec& spec, double step) {
  if (!(step > 0.0)) {
    throw InvalidArgument("vanilla_policy_gradient_step: step must be > 0");
  }
  const PolicyEvaluation eval = evaluate_policy(mdp, state.policy, spec);
  return line_search(mdp, state, spec, eval.gradient, eval.gradient, step, 0.0);
}

AscentResult run_ascent(const FiniteMdp& mdp, const SoftmaxPolicy& start, const RewardSpec& spec,
                        const AscentOptions& options) {
  AscentResult result{initial_state(mdp, start, spec), {}, -1};
  OptimizerState& state = result.final_state;
  auto record = [&] {
    const double h = shannon_entropy(occupancy(mdp, state.policy.policy()).dist);
    result.trace.push_back({state.iteration, state.objective, state.grad_norm, state.step, h});
    if (options.target && result.iterations_to_target < 0 && state.objective >= *options.target) {
      result.iterations_to_target = state.iteration;
    }
  };
  record();
  double step = options.initial_step;
  while (state.iteration < options.max_iterations && state.grad_norm > options.gradient_tolerance &&
         result.iterations_to_target < 0) {
    state = options.method == AscentMethod::natural
                ? natural_step(mdp, state, spec, step, options.damping)
                : vanilla_policy_gradient_step(mdp, state, spec, step);
    record();
    if (state.step == 0.0) {
      break;
    }
    step = 2.0 * state.step;
  }
  return result;
}

std::string trace_csv(const std::vector<TraceRow>& trace) {
  std::string out = "iteration,objective,grad_norm,step,entropy_of_occupancy\n";
  for (const TraceRow& row : trace) {
    out += std::to_string(row.iteration);
    out += ',';
    out += format_number(row.objective);
    out += ',';
    out += format_number(row.grad_norm);
    out += ',';
    out += format_number(row.step);
    out += ',';
    out += format_number(row.entropy_of_occupancy);
    out += '\n';
  }
  return out;
}

TeleportOptimum teleport_optimum(const RewardSpec& spec, int horizon, double tol) {
  spec.validate();
  const Index d = spec.extrinsic.size();
  if (d < 1 || horizon < 0) {
    throw InvalidArgument("teleport_optimum: need at least one state and horizon >= 0");
  }
  const double n = static_cast<double>(horizon);
  const Vector u = Vector::Constant(d, 1.0 / static_cast<double>(d));
  auto occ = [&](const Vector& q) { return Distribution((u + n * q) / (n + 1.0)); };
  auto value = [&](const Vector& q) { return occupancy_objective(occ(q), spec, horizon); };

  Vector q = u;
  double current = value(q);
  double step = 1.0;
  for (int it = 0; it < 100'000 && horizon > 0; ++it) {
    const Vector g = occupancy_objective_gradient(occ(q), spec, horizon) * (n / (n + 1.0));
    const double mean = q.dot(g);
    const double residual = std::sqrt((q.array() * (g.array() - mean).square()).sum()) /
                            std::max(1.0, g.cwiseAbs().maxCoeff());
    if (residual <= tol) {
      break;
    }
    bool accepted = false;
    for (; step >= kStepFloor; step *= 0.5) {
      Vector logits = q.array().log().matrix() + step * (g.array() - g.maxCoeff()).matrix();
      logits.array() -= logits.maxCoeff();
      Vector candidate = logits.array().exp().matrix();
      candidate /= candidate.sum();
      const double next = value(candidate);
      if (next >= current + kArmijo * g.dot(candidate - q)) {
        q = std::move(candidate);
        current = next;
        step *= 2.0;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      break;
    }
  }
  return {q, occ(q), current};
}

double geodesic_concavity_check(const Vector& reward, double alpha, double beta, int trials,
                                int grid_points, int horizon, std::uint64_t seed) {
  if (trials < 1 || grid_points < 5) {
    throw InvalidArgument("geodesic_concavity_check: need trials >= 1 and grid_points >= 5");
  }
  const OptimaProblem prob{reward, alpha, beta, horizon};
  prob.validate();
  const Index d = reward.size();
  const CounterRng root(seed);
  double worst = 0.0;
  std::vector<double> values(static_cast<std::size_t>(grid_points));
  for (int trial = 0; trial < trials; ++trial) {
    CounterRng rng = root.split(static_cast<std::uint64_t>(trial));
    const Vector p = interior_point(rng, d);
    const Vector q = interior_point(rng, d);
    const GeodesicSpec spec{p, q, alpha, true, false};
    for (int i = 0; i < grid_points; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(grid_points - 1);
      values[static_cast<std::size_t>(i)] =
          objective(Distribution::normalized(geodesic_eval(spec, t)), prob);
    }
    for (std::size_t i = 1; i + 1 < values.size(); ++i) {
      worst = std::max(worst, values[i - 1] - 2.0 * values[i] + values[i + 1]);
    }
  }
  return worst;
}

}  // namespace cgeom
