#include "cgeom/mdp.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace cgeom {

namespace {

void check_compatible(const FiniteMdp& mdp, const Policy& policy) {
  if (policy.num_states() != mdp.num_states() || policy.num_actions() != mdp.num_actions()) {
    std::ostringstream os;
    os << "policy shape " << policy.num_states() << "x" << policy.num_actions()
       << " does not match MDP with " << mdp.num_states() << " states and " << mdp.num_actions()
       << " actions";
    throw InvalidArgument(os.str());
  }
}

}  // namespace

FiniteMdp::FiniteMdp(std::vector<Matrix> transitions, Vector start, Vector reward, int horizon)
    : transitions_(std::move(transitions)),
      start_(std::move(start)),
      reward_(std::move(reward)),
      horizon_(horizon) {
  const Index d = start_.size();
  if (transitions_.empty()) {
    throw InvalidArgument("MDP needs at least one action");
  }
  if (horizon_ < 0) {
    throw InvalidArgument("MDP horizon must be >= 0");
  }
  if (reward_.size() != d) {
    throw InvalidArgument("MDP reward length does not match the number of states");
  }
  if (!reward_.allFinite()) {
    throw InvalidArgument("MDP reward must be finite");
  }
  for (std::size_t a = 0; a < transitions_.size(); ++a) {
    const Matrix& t = transitions_[a];
    if (t.rows() != d || t.cols() != d) {
      std::ostringstream os;
      os << "transition for action " << a << " must be " << d << "x" << d;
      throw InvalidArgument(os.str());
    }
    for (Index s = 0; s < d; ++s) {
      if (auto why = simplex_violation(t.row(s).transpose()); !why.empty()) {
        std::ostringstream os;
        os << "transition[" << s << "][" << a << "]: " << why;
        throw InvalidArgument(os.str());
      }
    }
  }
}

FiniteMdp FiniteMdp::with_reward(Vector reward) const {
  return FiniteMdp(transitions_, start_.weights(), std::move(reward), horizon_);
}

Policy::Policy(Matrix table) : table_(std::move(table)) {
  if (table_.rows() < 1 || table_.cols() < 1) {
    throw InvalidArgument("policy table must be non-empty");
  }
  for (Index s = 0; s < table_.rows(); ++s) {
    if (auto why = simplex_violation(table_.row(s).transpose()); !why.empty()) {
      std::ostringstream os;
      os << "policy row " << s << ": " << why;
      throw InvalidArgument(os.str());
    }
  }
}

Policy Policy::uniform(Index states, Index actions) {
  return Policy(Matrix::Constant(states, actions, 1.0 / static_cast<double>(actions)));
}

Matrix agent_env_kernel(const FiniteMdp& mdp, const Policy& policy) {
  check_compatible(mdp, policy);
  const Index d = mdp.num_states();
  Matrix m = Matrix::Zero(d, d);
  for (Index a = 0; a < mdp.num_actions(); ++a) {
    m += policy.table().col(a).asDiagonal() * mdp.transition(a);
  }
  return m;
}

Occupancy occupancy(const FiniteMdp& mdp, const Policy& policy) {
  const Matrix m = agent_env_kernel(mdp, policy);
  Eigen::RowVectorXd x = mdp.start().weights().transpose();
  Eigen::RowVectorXd acc = x;
  for (int k = 1; k <= mdp.horizon(); ++k) {
    x = x * m;
    acc += x;
  }
  acc /= static_cast<double>(mdp.horizon() + 1);
  // Renormalize away rounding drift so the result is a valid Distribution.
  return Occupancy{Distribution(acc.transpose() / acc.sum()), mdp.horizon(), "exact"};
}

namespace {

template <typename Visit>
void simulate_episode(const FiniteMdp& mdp, const Policy& policy, CounterRng rng, Visit&& visit) {
  Index s = rng.categorical(mdp.start().weights());
  visit(s);
  for (int i = 1; i <= mdp.horizon(); ++i) {
    const Index a = rng.categorical(policy.table().row(s).transpose());
    s = rng.categorical(mdp.transition(a).row(s).transpose());
    visit(s);
  }
}

}  // namespace

Distribution empirical_occupancy(const FiniteMdp& mdp, const Policy& policy, std::int64_t episodes,
                                 std::uint64_t seed) {
  check_compatible(mdp, policy);
  if (episodes < 1) {
    throw InvalidArgument("empirical_occupancy: episodes must be >= 1");
  }
  const CounterRng root(seed);
  Vector counts = Vector::Zero(mdp.num_states());
  for (std::int64_t e = 0; e < episodes; ++e) {
    simulate_episode(mdp, policy, root.split(static_cast<std::uint64_t>(e)),
                     [&](Index s) { counts[s] += 1.0; });
  }
  return Distribution(counts / counts.sum());
}

double occupancy_return(const Occupancy& occ, const Vector& reward) {
  if (reward.size() != occ.dist.size()) {
    throw InvalidArgument("occupancy_return: dimension mismatch");
  }
  return static_cast<double>(occ.horizon + 1) * occ.dist.weights().dot(reward);
}

ReturnEstimate rollout_return(const FiniteMdp& mdp, const Policy& policy, std::int64_t episodes,
                              std::uint64_t seed) {
  check_compatible(mdp, policy);
  if (episodes < 2) {
    throw InvalidArgument("rollout_return: episodes must be >= 2");
  }
  const CounterRng root(seed);
  // Welford accumulation.
  double mean = 0.0;
  double m2 = 0.0;
  for (std::int64_t e = 0; e < episodes; ++e) {
    double total = 0.0;
    simulate_episode(mdp, policy, root.split(static_cast<std::uint64_t>(e)),
                     [&](Index s) { total += mdp.reward()[s]; });
    const double delta = total - mean;
    mean += delta / static_cast<double>(e + 1);
    m2 += delta * (total - mean);
  }
  const double variance = m2 / static_cast<double>(episodes - 1);
  return {mean, std::sqrt(variance / static_cast<double>(episodes))};
}

Matrix augmented_kernel(const FiniteMdp& mdp, const Policy& policy) {
  const Matrix m = agent_env_kernel(mdp, policy);
  const Index d = mdp.num_states();
  const Index n = mdp.horizon();
  const Index size = d * (n + 1);
  Matrix k = Matrix::Zero(size, size);
  for (Index c = 0; c < n; ++c) {
    k.block(c * d, (c + 1) * d, d, d) = m;
  }
  const Eigen::RowVectorXd mu = mdp.start().weights().transpose();
  for (Index s = 0; s < d; ++s) {
    k.block(n * d + s, 0, 1, d) = mu;
  }
  return k;
}

StationaryResult augmented_stationary(const FiniteMdp& mdp, const Policy& policy,
                                      const std::optional<Vector>& initial, double tolerance,
                                      std::int64_t max_sweeps) {
  const Matrix k = augmented_kernel(mdp, policy);
  const Index size = k.rows();
  const Index d = mdp.num_states();
  Eigen::RowVectorXd x;
  if (initial) {
    if (initial->size() != size) {
      throw InvalidArgument("augmented_stationary: initial vector has the wrong dimension");
    }
    x = Distribution::normalized(*initial).weights().transpose();
  } else {
    x = Eigen::RowVectorXd::Constant(size, 1.0 / static_cast<double>(size));
  }
  double residual = 0.0;
  std::int64_t sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    const Eigen::RowVectorXd next = x * k;
    residual = (next - x).cwiseAbs().sum();
    if (residual <= tolerance) {
      break;
    }
    x = 0.5 * (x + next);
    x /= x.sum();
  }
  if (residual > tolerance) {
    std::ostringstream os;
    os << "augmented_stationary: power iteration did not converge in " << max_sweeps
       << " sweeps (residual " << residual << ")";
    throw ConvergenceError(os.str());
  }
  Vector marginal = Vector::Zero(d);
  for (Index c = 0; c * d < size; ++c) {
    marginal += x.segment(c * d, d).transpose();
  }
  return StationaryResult{x.transpose(), Distribution(marginal / marginal.sum()), residual, sweep};
}

FiniteMdp random_mdp(CounterRng& rng, Index states, Index actions, int horizon) {
  std::vector<Matrix> transitions;
  transitions.reserve(static_cast<std::size_t>(actions));
  for (Index a = 0; a < actions; ++a) {
    Matrix t(states, states);
    for (Index s = 0; s < states; ++s) {
      t.row(s) = rng.dirichlet(states).transpose();
    }
    transitions.push_back(std::move(t));
  }
  Vector reward(states);
  for (Index s = 0; s < states; ++s) {
    reward[s] = rng.uniform(-1.0, 1.0);
  }
  return FiniteMdp(std::move(transitions), rng.dirichlet(states), std::move(reward), horizon);
}

Policy random_policy(CounterRng& rng, Index states, Index actions) {
  Matrix table(states, actions);
  for (Index s = 0; s < states; ++s) {
    table.row(s) = rng.dirichlet(actions).transpose();
  }
  return Policy(std::move(table));
}

FiniteMdp teleport_mdp(Index states, int horizon) {
  std::vector<Matrix> transitions;
  for (Index a = 0; a < states; ++a) {
    Matrix t = Matrix::Zero(states, states);
    t.col(a).setOnes();
    transitions.push_back(std::move(t));
  }
  return FiniteMdp(std::move(transitions), Distribution::uniform(states).weights(),
                   Vector::Zero(states), horizon);
}

FiniteMdp swap_mdp() {
  Matrix t(2, 2);
  t << 0.0, 1.0, 1.0, 0.0;
  Vector start(2);
  start << 1.0, 0.0;
  Vector reward(2);
  reward << 1.0, 0.0;
  return FiniteMdp({t}, start, reward, 1);
}

}  // namespace cgeom
