#pragma once

#include "cgeom/core.hpp"
#include "cgeom/rng.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cgeom {

/// Episodic finite MDP with state-based rewards. An episode visits the n + 1
/// states s_0, ..., s_n, with s_0 drawn from the start distribution.
class FiniteMdp {
 public:
  /// `transitions[a]` is the d x d matrix whose row s is the next-state
  /// distribution after taking action a in state s.
  FiniteMdp(std::vector<Matrix> transitions, Vector start, Vector reward, int horizon);

  Index num_states() const noexcept { return start_.size(); }
  Index num_actions() const noexcept { return static_cast<Index>(transitions_.size()); }
  const Matrix& transition(Index action) const { return transitions_.at(static_cast<std::size_t>(action)); }
  const std::vector<Matrix>& transitions() const noexcept { return transitions_; }
  const Distribution& start() const noexcept { return start_; }
  const Vector& reward() const noexcept { return reward_; }
  int horizon() const noexcept { return horizon_; }

  FiniteMdp with_reward(Vector reward) const;

 private:
  std::vector<Matrix> transitions_;
  Distribution start_;
  Vector reward_;
  int horizon_;
};

/// Tabular stochastic policy; row s is the action distribution in state s.
class Policy {
 public:
  explicit Policy(Matrix table);
  static Policy uniform(Index states, Index actions);

  const Matrix& table() const noexcept { return table_; }
  Index num_states() const noexcept { return table_.rows(); }
  Index num_actions() const noexcept { return table_.cols(); }

 private:
  Matrix table_;
};

struct Occupancy {
  Distribution dist;
  int horizon = 0;
  std::string provenance;
};

struct ReturnEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

/// M[s][s'] = sum_a pi(s, a) delta(s, a, s').
Matrix agent_env_kernel(const FiniteMdp& mdp, const Policy& policy);

/// Exact occupancy (1/(n+1)) sum_{k=0}^{n} mu^T M^k.
Occupancy occupancy(const FiniteMdp& mdp, const Policy& policy);

/// Normalized visit counts over `episodes` sampled episodes. Episode i draws from
/// the stream CounterRng(seed).split(i), so results do not depend on scheduling.
Distribution empirical_occupancy(const FiniteMdp& mdp, const Policy& policy, std::int64_t episodes,
                                 std::uint64_t seed);

/// (n+1) sum_s p_s r_s.
double occupancy_return(const Occupancy& occ, const Vector& reward);

/// Sample mean and standard error of the undiscounted episode return.
ReturnEstimate rollout_return(const FiniteMdp& mdp, const Policy& policy, std::int64_t episodes,
                              std::uint64_t seed);

/// Kernel of the counter-augmented chain on S x {0..n}. Augmented state (s, c)
/// has index c * d + s; counter n resets to (mu, 0), otherwise (M(s, .), c + 1).
Matrix augmented_kernel(const FiniteMdp& mdp, const Policy& policy);

struct StationaryResult {
  Vector augmented;           ///< stationary distribution over d (n+1) augmented states
  Distribution marginal;      ///< state marginal (counter summed out)
  double residual = 0.0;      ///< || pi M - pi ||_1 under the augmented kernel
  std::int64_t sweeps = 0;
};

/// Stationary distribution of the augmented chain by power iteration on the
/// lazy kernel (I + M~)/2, which has the same fixed points but is aperiodic.
/// `initial` defaults to the uniform distribution over augmented states.
/// Throws ConvergenceError after `max_sweeps` sweeps without reaching `tolerance`.
StationaryResult augmented_stationary(const FiniteMdp& mdp, const Policy& policy,
                                      const std::optional<Vector>& initial = std::nullopt,
                                      double tolerance = 1e-12, std::int64_t max_sweeps = 1'000'000);

/// Random MDP with Dirichlet rows, start distribution and uniform rewards in [-1, 1].
FiniteMdp random_mdp(CounterRng& rng, Index states, Index actions, int horizon);
/// Random policy with Dirichlet rows.
Policy random_policy(CounterRng& rng, Index states, Index actions);

/// Actions select the next state directly; uniform start; zero reward.
FiniteMdp teleport_mdp(Index states, int horizon);

/// Two states, one action that swaps them, start in state 0, reward (1, 0), n = 1.
FiniteMdp swap_mdp();

}  // namespace cgeom
