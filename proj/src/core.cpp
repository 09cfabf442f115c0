#include "cgeom/core.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace cgeom {

std::string simplex_violation(const Vector& weights, double tolerance) {
  if (weights.size() == 0) {
    return "empty weight vector";
  }
  for (Index i = 0; i < weights.size(); ++i) {
    if (!std::isfinite(weights[i])) {
      std::ostringstream os;
      os << "entry " << i << " is not finite";
      return os.str();
    }
    if (weights[i] < 0.0) {
      std::ostringstream os;
      os << "entry " << i << " is negative (" << weights[i] << ")";
      return os.str();
    }
  }
  const double total = weights.sum();
  if (std::abs(total - 1.0) > tolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "entries sum to " << total << ", expected 1";
    return os.str();
  }
  return {};
}

Distribution::Distribution(Vector weights) : weights_(std::move(weights)) {
  if (auto why = simplex_violation(weights_); !why.empty()) {
    throw InvalidArgument("not a distribution: " + why);
  }
}

Distribution Distribution::uniform(Index size) {
  if (size < 1) {
    throw InvalidArgument("uniform distribution needs at least one state");
  }
  return Distribution(Vector::Constant(size, 1.0 / static_cast<double>(size)));
}

Distribution Distribution::point_mass(Index size, Index state) {
  if (state < 0 || state >= size) {
    throw InvalidArgument("point mass state out of range");
  }
  Vector w = Vector::Zero(size);
  w[state] = 1.0;
  return Distribution(std::move(w));
}

Distribution Distribution::normalized(const Vector& weights) {
  if (weights.size() == 0 || weights.minCoeff() < 0.0 || !weights.allFinite()) {
    throw InvalidArgument("cannot normalize: weights must be finite and non-negative");
  }
  const double total = weights.sum();
  if (!(total > 0.0)) {
    throw InvalidArgument("cannot normalize: weights sum to zero");
  }
  return Distribution(weights / total);
}

PositiveMeasure::PositiveMeasure(Vector weights) : weights_(std::move(weights)) {
  if (weights_.size() == 0) {
    throw InvalidArgument("positive measure needs at least one entry");
  }
  for (Index i = 0; i < weights_.size(); ++i) {
    if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i])) {
      std::ostringstream os;
      os << "positive measure entry " << i << " must be finite and > 0";
      throw InvalidArgument(os.str());
    }
  }
}

double l1_distance(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) {
    throw InvalidArgument("l1_distance: dimension mismatch");
  }
  return (a - b).cwiseAbs().sum();
}

}  // namespace cgeom
