#pragma once

#include "cgeom/core.hpp"
#include "cgeom/generator.hpp"

#include <cstdint>
#include <span>

namespace cgeom {

/// I_f(s; p) = f(1 / p_s). At p_s = 0 the value is f's limit at infinity
/// (+infinity when it diverges).
double f_information(const Distribution& p, Index state, const Generator& f);

/// I_alpha(s; p) = 4/(1-alpha^2) ([1/p_s]^((alpha+1)/2) - 1), with the exact
/// -log p_s branch at alpha = -1. Throws InvalidArgument at alpha = 1, where the
/// information diverges.
double alpha_information(const Distribution& p, Index state, double alpha);
double alpha_information(double probability, double alpha);

/// Shannon entropy in nats, with 0 log(1/0) = 0.
double shannon_entropy(const Distribution& p);

/// Extrinsic reward plus scaled information reward.
struct RewardSpec {
  Vector extrinsic;
  double beta = 0.0;
  Generator generator = Generator::alpha_information(0.0);
  /// Multiply the combined reward by 1 / eta with eta = |f''(1)|.
  bool adjust = false;

  /// Throws InvalidArgument unless beta >= 0, the reward is finite and the
  /// generator passes the sampled strict-concavity check.
  void validate() const;
};

/// Componentwise r_s + beta f(1/p_s), scaled by 1/|f''(1)| when `adjust` is set.
/// A zero occupancy entry is an error: smoothing is the caller's decision.
Vector intrinsic_reward_vector(const Distribution& p, const RewardSpec& spec);

struct CountBonus {
  Vector from_occupancy;  ///< I_0(s; n(s)/(n+1))
  Vector from_counts;     ///< sqrt(16 (n+1) / n(s)) - 4
};

/// Evaluates the 0-information of empirical counts two ways. `total` must equal
/// the sum of the counts and every count must be at least 1.
CountBonus count_bonus_identity(std::span<const std::int64_t> counts, std::int64_t total);

}  // namespace cgeom
