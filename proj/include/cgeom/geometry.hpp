#pragma once

#include "cgeom/core.hpp"
#include "cgeom/generator.hpp"

#include <functional>

namespace cgeom {

// Divergences accept raw non-negative weight vectors so the same code path
// serves distributions and unnormalized positive measures. Mathematically
// divergent values are returned as +infinity rather than thrown.

/// Generalized Kullback-Leibler divergence sum p log(p/q) - p + q.
double kl_divergence(const Vector& p, const Vector& q);

/// Alpha-divergence on positive measures,
///   4/(1-alpha^2) * sum[(1-alpha)/2 p + (1+alpha)/2 q - p^((1-alpha)/2) q^((1+alpha)/2)],
/// which reduces to 4/(1-alpha^2)(1 - sum p^((1-alpha)/2) q^((1+alpha)/2)) on the
/// simplex. alpha = -1 gives KL(p||q), alpha = +1 gives KL(q||p).
double alpha_divergence(const Vector& p, const Vector& q, double alpha);
inline double alpha_divergence(const Distribution& p, const Distribution& q, double alpha) {
  return alpha_divergence(p.weights(), q.weights(), alpha);
}

/// sum_s p_s f(q_s / p_s) for a convex generator. Requires p_s > 0 wherever q_s > 0.
double f_divergence(const Vector& p, const Vector& q, const Generator& f);
inline double f_divergence(const Distribution& p, const Distribution& q, const Generator& f) {
  return f_divergence(p.weights(), q.weights(), f);
}

/// Renyi divergence 1/(lambda-1) log sum p^lambda q^(1-lambda); KL(p||q) at lambda = 1.
double renyi_divergence(const Vector& p, const Vector& q, double lambda);
inline double renyi_divergence(const Distribution& p, const Distribution& q, double lambda) {
  return renyi_divergence(p.weights(), q.weights(), lambda);
}

/// Alpha order whose divergence is monotonically related to the Renyi divergence
/// of order lambda under the conventions above: alpha = 1 - 2 lambda, for which
///   D_lambda = 1/(lambda-1) log[1 + lambda(lambda-1) D_alpha].
constexpr double renyi_matching_alpha(double lambda) noexcept { return 1.0 - 2.0 * lambda; }

/// Curve of constant connection order between two measures.
struct GeodesicSpec {
  Vector p;            ///< value at t = 0
  Vector q;            ///< value at t = 1
  double order = 0.0;  ///< connection parameter
  bool normalized = false;  ///< rescale each point onto the simplex
  bool clamp = false;  ///< lift weights below 1e-12 to 1e-12 instead of rejecting
};

/// Raw curve: ((1-t) p^k + t q^k)^(1/k) with k = (1 - order)/2; the mixture line at
/// order -1 and p^(1-t) q^t at order 1. Normalized mode divides by the total mass.
Vector geodesic_eval(const GeodesicSpec& spec, double t);

/// d/dt of geodesic_eval (raw or normalized per spec).
Vector geodesic_velocity(const GeodesicSpec& spec, double t);

/// Fisher-Rao inner product sum v_i w_i / q_i.
double fisher_rao_inner(const Vector& q, const Vector& v, const Vector& w);

/// Metric gradient of q -> D_f(p||q): components q_i f'(q_i / p_i).
Vector divergence_gradient(const Vector& p, const Vector& q, const Generator& f);

/// Central finite-difference gradient of `func` at q raised by the Fisher-Rao
/// metric (each component multiplied by q_i).
Vector numeric_metric_gradient(const std::function<double(const Vector&)>& func, const Vector& q,
                               double step = 1e-6);

/// Fisher-Rao cosine at q between a metric gradient and the initial velocity of
/// the raw order-alpha geodesic from q toward p. Both vectors are first
/// projected orthogonally to q, which removes the f -> f + c(x-1) gauge
/// direction. Throws InvalidArgument when p == q (zero velocity).
double geodetic_alignment(const Vector& p, const Vector& q, const Vector& gradient, double alpha);
double geodetic_alignment(const Vector& p, const Vector& q, const Generator& f, double alpha);

}  // namespace cgeom
