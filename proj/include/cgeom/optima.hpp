#pragma once

#include "cgeom/core.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cgeom {

/// Maximize (n+1) sum_s p_s (r_s + beta I_alpha(s; p)) over the full simplex.
struct OptimaProblem {
  Vector reward;
  double alpha = 0.0;
  double beta = 1.0;
  /// Enters only as the (n+1) factor of the objective.
  int horizon = 0;

  /// Throws InvalidArgument for non-finite rewards, beta < 0, alpha = 1 or horizon < 0.
  void validate() const;
  Index size() const noexcept { return reward.size(); }
};

/// (n+1) sum_s p_s (r_s + beta I_alpha(s; p)). Zero weights contribute their
/// limit (0 for alpha < 1).
double objective(const Distribution& p, const OptimaProblem& prob);

/// Euclidean gradient of sum_s p_s (r_s + beta I_alpha(s; p)) (without the n+1 factor).
Vector objective_gradient(const Vector& p, const OptimaProblem& prob);

/// Scaled projected-gradient residual sqrt(sum p (g - <p,g>)^2) / max(1, max |g|).
double kkt_residual(const Vector& p, const OptimaProblem& prob);

struct NumericalOptimum {
  Distribution point;
  double kkt_residual = 0.0;
  /// Largest L1 distance between the results of different starts.
  double start_spread = 0.0;
  std::int64_t iterations = 0;
};

/// Entropic mirror ascent with Armijo backtracking from `starts` random interior
/// points, keeping the best. Each run is finished by constrained Newton steps
/// once mirror ascent reaches a residual of 1e-6, since objective differences
/// stop resolving progress around 1e-8. Throws ConvergenceError if the best
/// start does not reach `tol`.
NumericalOptimum numerical_optimum(const OptimaProblem& prob, double tol, std::uint64_t seed = 0,
                                   int starts = 10, std::int64_t max_iterations = 100'000);

struct ClosedFormOptimum {
  Distribution point;
  /// Lagrange multiplier lambda of the stationarity system r_s + (2 beta/(1+alpha)) p_s^(-(1+alpha)/2) = lambda.
  /// NaN for the constant-reward, beta = 0 and alpha = -1 branches.
  double multiplier = 0.0;
};

/// Closed-form optimum p_s proportional to ((lambda - r_s)(1+alpha)/(2 beta))^(-2/(1+alpha)),
/// with lambda found by bisection on the log distance to the positivity boundary.
/// alpha = -1 is the Gibbs distribution softmax(r / beta); beta = 0 is the vertex on
/// the first maximal reward; constant r gives the uniform distribution.
/// Throws ConvergenceError when no real root exists in the positivity domain.
ClosedFormOptimum closed_form_optimum(const OptimaProblem& prob);

/// softmax(r / beta).
Distribution gibbs_distribution(const Vector& reward, double beta);

struct DivergenceMinReport {
  Distribution closed_form;
  Distribution constrained;
  double return_level = 0.0;  ///< sum_s p*_s r_s defining the isoreturn hyperplane
  double distance = 0.0;      ///< L1 between the two points
  int iterations = 0;
};

/// Minimizes D_alpha(p || u) over {p : sum p = 1, sum p r = <p*, r>} by a reduced
/// Newton method and compares the minimizer with the closed-form optimum p*.
DivergenceMinReport divergence_min_equivalence(const OptimaProblem& prob, double tol = 1e-13);

/// Orthonormal basis (columns) of {v : sum v = 0, sum v r = 0}.
Matrix isoreturn_tangent_basis(const Vector& reward);

/// Max over an isoreturn tangent basis v_k of |g(w, v_k)| / (|w| |v_k|) under the
/// Fisher-Rao metric at p*, where w is the velocity at p* of the order-(-alpha)
/// geodesic from u. Returns 0 for constant rewards.
double projection_orthogonality(const OptimaProblem& prob);

struct BetaSweep {
  std::vector<double> betas;
  std::vector<Distribution> optima;
  /// Min over t of the L1 distance from each optimum to the normalized
  /// order-(alpha+2) geodesic from the first optimum to u (0 for the first).
  std::vector<double> fit_residuals;
  std::vector<double> fit_times;
  double max_residual = 0.0;
};

/// Optima along ascending betas and their fit to the order-(alpha+2) geodesic.
/// Needs at least three strictly positive, strictly ascending betas.
BetaSweep beta_sweep(const OptimaProblem& base, const std::vector<double>& betas);

struct SweepRow {
  double alpha;
  double beta;
  Index state;
  double probability;
  double return_value;
  double divergence_to_uniform;
  double geodesic_residual;
};

/// One row per (alpha, beta, state) for every alpha and the given betas.
/// The geodesic residual is NaN when fewer than three betas are given.
std::vector<SweepRow> sweep_table(const Vector& reward, int horizon,
                                  const std::vector<double>& alphas,
                                  const std::vector<double>& betas);

/// CSV with header alpha,beta,state,probability,return_value,divergence_to_uniform,geodesic_residual.
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace cgeom
