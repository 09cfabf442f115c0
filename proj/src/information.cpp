#include "cgeom/information.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace cgeom {

namespace {

void check_state(const Distribution& p, Index state) {
  if (state < 0 || state >= p.size()) {
    throw InvalidArgument("state index out of range");
  }
}

}  // namespace

double f_information(const Distribution& p, Index state, const Generator& f) {
  check_state(p, state);
  const double ps = p[state];
  if (ps == 0.0) {
    const double limit = f(std::numeric_limits<double>::infinity());
    return std::isnan(limit) ? std::numeric_limits<double>::infinity() : limit;
  }
  return f(1.0 / ps);
}

double alpha_information(double probability, double alpha) {
  if (alpha == 1.0) {
    throw InvalidArgument("alpha-information diverges at alpha = 1");
  }
  if (!(probability >= 0.0 && probability <= 1.0)) {
    throw InvalidArgument("alpha_information: probability must lie in [0, 1]");
  }
  if (probability == 0.0) {
    if (alpha >= -1.0) {
      return std::numeric_limits<double>::infinity();
    }
    return -4.0 / (1.0 - alpha * alpha);
  }
  if (alpha == -1.0) {
    return -std::log(probability);
  }
  const double c = 4.0 / (1.0 - alpha * alpha);
  return c * std::expm1(-0.5 * (alpha + 1.0) * std::log(probability));
}

double alpha_information(const Distribution& p, Index state, double alpha) {
  check_state(p, state);
  return alpha_information(p[state], alpha);
}

double shannon_entropy(const Distribution& p) {
  double h = 0.0;
  for (Index i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) {
      h -= p[i] * std::log(p[i]);
    }
  }
  return h;
}

void RewardSpec::validate() const {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw InvalidArgument("reward spec: beta must be finite and >= 0");
  }
  if (!extrinsic.allFinite()) {
    throw InvalidArgument("reward spec: extrinsic reward must be finite");
  }
  if (generator.curvature() != Curvature::concave ||
      !spot_check_curvature([this](double x) { return generator(x); }, Curvature::concave)) {
    throw InvalidArgument("reward spec: generator '" + generator.name() +
                          "' must be strictly concave");
  }
}

Vector intrinsic_reward_vector(const Distribution& p, const RewardSpec& spec) {
  spec.validate();
  if (spec.extrinsic.size() != p.size()) {
    throw InvalidArgument("intrinsic_reward_vector: reward and occupancy dimensions differ");
  }
  Vector out(p.size());
  for (Index s = 0; s < p.size(); ++s) {
    if (!(p[s] > 0.0)) {
      std::ostringstream os;
      os << "intrinsic_reward_vector: occupancy[" << s
         << "] is zero; smooth or clamp the occupancy before computing information rewards";
      throw InvalidArgument(os.str());
    }
    out[s] = spec.extrinsic[s] + (spec.beta == 0.0 ? 0.0 : spec.beta * spec.generator(1.0 / p[s]));
  }
  if (spec.adjust) {
    out /= spec.generator.metric_scale();
  }
  return out;
}

CountBonus count_bonus_identity(std::span<const std::int64_t> counts, std::int64_t total) {
  if (counts.empty()) {
    throw InvalidArgument("count_bonus_identity: empty count vector");
  }
  const std::int64_t sum = std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
  if (sum != total) {
    std::ostringstream os;
    os << "count_bonus_identity: counts sum to " << sum << " but total is " << total;
    throw InvalidArgument(os.str());
  }
  CountBonus out{Vector(static_cast<Index>(counts.size())),
                 Vector(static_cast<Index>(counts.size()))};
  for (std::size_t s = 0; s < counts.size(); ++s) {
    if (counts[s] < 1) {
      std::ostringstream os;
      os << "count_bonus_identity: count[" << s << "] is zero; information is undefined at p = 0";
      throw InvalidArgument(os.str());
    }
    const double occupancy = static_cast<double>(counts[s]) / static_cast<double>(total);
    const auto i = static_cast<Index>(s);
    out.from_occupancy[i] = alpha_information(occupancy, 0.0);
    out.from_counts[i] =
        std::sqrt(16.0 * static_cast<double>(total) / static_cast<double>(counts[s])) - 4.0;
  }
  return out;
}

}  // namespace cgeom
