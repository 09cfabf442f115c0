#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace cgeom {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An input violates a documented precondition or type invariant.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An iterative solver ran out of budget before meeting its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

inline constexpr double kSimplexTolerance = 1e-10;

/// A point on the probability simplex over a finite ground set.
class Distribution {
 public:
  explicit Distribution(Vector weights);

  static Distribution uniform(Index size);
  static Distribution point_mass(Index size, Index state);
  /// Rescales non-negative weights with a positive total onto the simplex.
  static Distribution normalized(const Vector& weights);

  const Vector& weights() const noexcept { return weights_; }
  Index size() const noexcept { return weights_.size(); }
  double operator[](Index i) const { return weights_[i]; }

  /// True when every weight is strictly positive.
  bool is_interior() const noexcept { return weights_.minCoeff() > 0.0; }

 private:
  Vector weights_;
};

/// A finite measure with strictly positive weights (not necessarily normalized).
class PositiveMeasure {
 public:
  explicit PositiveMeasure(Vector weights);

  const Vector& weights() const noexcept { return weights_; }
  Index size() const noexcept { return weights_.size(); }
  double operator[](Index i) const { return weights_[i]; }

 private:
  Vector weights_;
};

/// Checks the simplex invariants and returns a description of the first
/// violation, or an empty string when `weights` is a valid distribution.
std::string simplex_violation(const Vector& weights, double tolerance = kSimplexTolerance);

double l1_distance(const Vector& a, const Vector& b);

}  // namespace cgeom
