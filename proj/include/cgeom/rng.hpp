#pragma once

#include "cgeom/core.hpp"

#include <cstdint>
#include <limits>

namespace cgeom {

/// Counter-based random stream. Output i is a pure function of (key, i), so a
/// stream can be split into independent child streams by index and replays are
/// bit-identical across runs and thread schedules.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed) noexcept : key_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  /// Independent child stream; `split(i)` is the same for every call with the same i.
  CounterRng split(std::uint64_t index) const noexcept {
    CounterRng child(0);
    child.key_ = mix(key_ ^ mix(index + 0xbb67ae8584caa73bULL));
    return child;
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1].
  double uniform_open_zero() noexcept { return 1.0 - uniform(); }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  double exponential() noexcept;
  double normal() noexcept;
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) noexcept;

  /// Draws from Dirichlet(1, ..., 1), i.e. uniformly on the simplex.
  Vector dirichlet(Index size);
  /// Draws an index from the categorical distribution with the given weights.
  Index categorical(const Vector& weights) noexcept;

  static std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Interior simplex draw: a Dirichlet(1) point mixed with `uniform_share` of the
/// uniform distribution, so every weight is at least uniform_share / size.
Vector interior_point(CounterRng& rng, Index size, double uniform_share = 0.2);

}  // namespace cgeom
