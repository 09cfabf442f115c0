#include "cgeom/rng.hpp"

#include <cmath>
#include <numbers>

namespace cgeom {

double CounterRng::exponential() noexcept { return -std::log(uniform_open_zero()); }

double CounterRng::normal() noexcept {
  // Box-Muller; one variate per call keeps the stream position predictable.
  const double u1 = uniform_open_zero();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t CounterRng::below(std::uint64_t n) noexcept {
  if (n <= 1) {
    return 0;
  }
  // Rejection to remove modulo bias.
  const std::uint64_t limit = max() - max() % n;
  std::uint64_t x = (*this)();
  while (x >= limit) {
    x = (*this)();
  }
  return x % n;
}

Vector CounterRng::dirichlet(Index size) {
  Vector w(size);
  for (Index i = 0; i < size; ++i) {
    w[i] = exponential();
  }
  return w / w.sum();
}

Index CounterRng::categorical(const Vector& weights) noexcept {
  const double target = uniform() * weights.sum();
  double acc = 0.0;
  Index last_positive = 0;
  for (Index i = 0; i < weights.size(); ++i) {
    if (weights[i] > 0.0) {
      acc += weights[i];
      last_positive = i;
      if (target < acc) {
        return i;
      }
    }
  }
  return last_positive;
}

Vector interior_point(CounterRng& rng, Index size, double uniform_share) {
  const Vector u = Vector::Constant(size, 1.0 / static_cast<double>(size));
  return (1.0 - uniform_share) * rng.dirichlet(size) + uniform_share * u;
}

}  // namespace cgeom
