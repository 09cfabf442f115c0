#include "cgeom/optima.hpp"

#include "cgeom/geometry.hpp"
#include "cgeom/information.hpp"
#include "cgeom/io_util.hpp"
#include "cgeom/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace cgeom {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kEps = std::numeric_limits<double>::epsilon();

bool is_constant(const Vector& r) { return r.maxCoeff() == r.minCoeff(); }

Index first_argmax(const Vector& r) {
  Index best = 0;
  for (Index i = 1; i < r.size(); ++i) {
    if (r[i] > r[best]) {
      best = i;
    }
  }
  return best;
}

// p * I_alpha(p), continuous at p = 0.
double weighted_information(double p, double alpha) {
  if (p == 0.0) {
    return alpha < 1.0 ? 0.0 : -std::numeric_limits<double>::infinity();
  }
  return p * alpha_information(p, alpha);
}

// sum_s p_s (r_s + beta I_alpha(s; p)), the objective without the n+1 factor.
double per_step_objective(const Vector& p, const OptimaProblem& prob) {
  double total = p.dot(prob.reward);
  if (prob.beta != 0.0) {
    double info = 0.0;
    for (Index s = 0; s < p.size(); ++s) {
      info += weighted_information(p[s], prob.alpha);
    }
    total += prob.beta * info;
  }
  return total;
}

double log_sum_exp(const Vector& x) {
  const double m = x.maxCoeff();
  if (!std::isfinite(m)) {
    return m;
  }
  return m + std::log((x.array() - m).exp().sum());
}

Vector mirror_ascent(const OptimaProblem& prob, Vector p, double tol, std::int64_t max_iterations,
                     std::int64_t& iterations, double& residual) {
  constexpr double kArmijo = 1e-4;
  constexpr double kStepFloor = 1e-12;
  double step = 1.0;
  double value = per_step_objective(p, prob);
  iterations = 0;
  residual = kkt_residual(p, prob);
  while (residual > tol && iterations < max_iterations) {
    const Vector g = objective_gradient(p, prob);
    const Vector log_p = p.array().log().matrix();
    bool accepted = false;
    while (step >= kStepFloor) {
      Vector logits = log_p + step * (g.array() - g.maxCoeff()).matrix();
      logits.array() -= logits.maxCoeff();
      Vector candidate = logits.array().exp().matrix();
      candidate /= candidate.sum();
      const double next = per_step_objective(candidate, prob);
      const double slack = 4.0 * kEps * std::max(1.0, std::abs(value));
      if (std::isfinite(next) && candidate.minCoeff() > 0.0 &&
          next >= value + kArmijo * g.dot(candidate - p) - slack) {
        p = std::move(candidate);
        value = next;
        step *= 2.0;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    ++iterations;
    residual = kkt_residual(p, prob);
    if (!accepted) {
      break;
    }
  }
  return p;
}

// Equality-constrained Newton iterations on the simplex. The objective's
// Hessian is diagonal with entries -beta p^(-(3+alpha)/2). Near the optimum,
// objective differences drown in roundoff, so a step is also accepted when it
// keeps the objective within roundoff and lowers the KKT residual.
Vector newton_polish(const OptimaProblem& prob, Vector p, double tol, std::int64_t& iterations,
                     double& residual) {
  const double k = 0.5 * (1.0 + prob.alpha);
  double value = per_step_objective(p, prob);
  residual = kkt_residual(p, prob);
  for (int it = 0; it < 100 && residual > tol; ++it, ++iterations) {
    const Vector g = objective_gradient(p, prob);
    const Vector inv_curv = (p.array().pow(k + 1.0) / prob.beta).matrix();
    const double nu = g.dot(inv_curv) / inv_curv.sum();
    const Vector dir = ((g.array() - nu) * inv_curv.array()).matrix();
    double step = 1.0;
    bool accepted = false;
    while (step > 1e-12) {
      const Vector candidate = p + step * dir;
      if (candidate.minCoeff() > 0.0) {
        const double next = per_step_objective(candidate, prob);
        const double slack = 4.0 * kEps * std::max(1.0, std::abs(value));
        const double next_residual = kkt_residual(candidate, prob);
        if (next > value + slack || (next >= value - slack && next_residual < residual)) {
          p = candidate / candidate.sum();
          value = per_step_objective(p, prob);
          residual = kkt_residual(p, prob);
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) {
      break;
    }
  }
  return p;
}

}  // namespace

void OptimaProblem::validate() const {
  if (reward.size() < 1) {
    throw InvalidArgument("optima problem: reward vector is empty");
  }
  if (!reward.allFinite()) {
    throw InvalidArgument("optima problem: reward must be finite");
  }
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw InvalidArgument("optima problem: beta must be finite and >= 0");
  }
  if (!std::isfinite(alpha) || alpha == 1.0) {
    throw InvalidArgument("optima problem: alpha must be finite and != 1 (I_alpha diverges at 1)");
  }
  if (horizon < 0) {
    throw InvalidArgument("optima problem: horizon must be >= 0");
  }
}

double objective(const Distribution& p, const OptimaProblem& prob) {
  prob.validate();
  if (p.size() != prob.size()) {
    throw InvalidArgument("objective: dimension mismatch");
  }
  return static_cast<double>(prob.horizon + 1) * per_step_objective(p.weights(), prob);
}

Vector objective_gradient(const Vector& p, const OptimaProblem& prob) {
  Vector g = prob.reward;
  if (prob.beta == 0.0) {
    return g;
  }
  if (prob.alpha == -1.0) {
    return g - prob.beta * (p.array().log() + 1.0).matrix();
  }
  const double k = 0.5 * (1.0 + prob.alpha);
  const double c = 4.0 / (1.0 - prob.alpha * prob.alpha);
  const double a = 2.0 / (1.0 + prob.alpha);
  return g + prob.beta * (a * p.array().pow(-k) - c).matrix();
}

double kkt_residual(const Vector& p, const OptimaProblem& prob) {
  const Vector g = objective_gradient(p, prob);
  const double mean = p.dot(g);
  const double spread = std::sqrt((p.array() * (g.array() - mean).square()).sum());
  return spread / std::max(1.0, g.cwiseAbs().maxCoeff());
}

NumericalOptimum numerical_optimum(const OptimaProblem& prob, double tol, std::uint64_t seed,
                                   int starts, std::int64_t max_iterations) {
  prob.validate();
  if (!(tol > 0.0)) {
    throw InvalidArgument("numerical_optimum: tol must be > 0");
  }
  if (starts < 1) {
    throw InvalidArgument("numerical_optimum: need at least one start");
  }
  const Index d = prob.size();
  if (prob.beta == 0.0) {
    // Linear objective: the maximizer is a vertex, which mirror ascent never reaches.
    return {Distribution::point_mass(d, first_argmax(prob.reward)), 0.0, 0.0, 0};
  }
  const CounterRng root(seed);
  std::vector<Vector> results;
  std::vector<double> residuals;
  std::int64_t total_iterations = 0;
  Index best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < starts; ++i) {
    CounterRng rng = root.split(static_cast<std::uint64_t>(i));
    std::int64_t iterations = 0;
    double residual = 0.0;
    Vector p = mirror_ascent(prob, interior_point(rng, d), std::max(tol, 1e-6), max_iterations,
                             iterations, residual);
    if (residual > tol) {
      p = newton_polish(prob, std::move(p), tol, iterations, residual);
    }
    total_iterations += iterations;
    const double value = per_step_objective(p, prob);
    if (value > best_value) {
      best_value = value;
      best = static_cast<Index>(results.size());
    }
    results.push_back(std::move(p));
    residuals.push_back(residual);
  }
  const Vector& winner = results[static_cast<std::size_t>(best)];
  const double residual = residuals[static_cast<std::size_t>(best)];
  if (residual > tol) {
    std::ostringstream os;
    os << "numerical_optimum: KKT residual " << residual << " above tolerance " << tol << " after "
       << total_iterations << " iterations";
    throw ConvergenceError(os.str());
  }
  double spread = 0.0;
  for (const Vector& p : results) {
    spread = std::max(spread, l1_distance(p, winner));
  }
  return {Distribution(winner), residual, spread, total_iterations};
}

Distribution gibbs_distribution(const Vector& reward, double beta) {
  if (!(beta > 0.0)) {
    throw InvalidArgument("gibbs_distribution: beta must be > 0");
  }
  Vector logits = reward / beta;
  logits.array() -= logits.maxCoeff();
  Vector w = logits.array().exp().matrix();
  return Distribution(w / w.sum());
}

ClosedFormOptimum closed_form_optimum(const OptimaProblem& prob) {
  prob.validate();
  const Index d = prob.size();
  const Vector& r = prob.reward;
  if (is_constant(r)) {
    return {Distribution::uniform(d), kNaN};
  }
  if (prob.beta == 0.0) {
    return {Distribution::point_mass(d, first_argmax(r)), kNaN};
  }
  if (prob.alpha == -1.0) {
    return {gibbs_distribution(r, prob.beta), kNaN};
  }

  // Stationarity: p_s = [(lambda - r_s)(1+alpha)/(2 beta)]^(-1/k), k = (1+alpha)/2.
  // Write lambda = boundary +- t with t > 0 the distance to the positivity
  // boundary (max r for alpha > -1, min r for alpha < -1) and solve
  // log sum_s p_s(t) = 0 for log t.
  const double alpha = prob.alpha;
  const double k = 0.5 * (1.0 + alpha);
  const double exponent = -1.0 / k;
  const double log_scale = std::log(std::abs(1.0 + alpha) / (2.0 * prob.beta));
  const bool above = alpha > -1.0;
  const double boundary = above ? r.maxCoeff() : r.minCoeff();
  const Vector gaps = (r.array() - boundary).abs().matrix();

  auto log_weights = [&](double log_t) {
    const double t = std::exp(log_t);
    Vector out(d);
    for (Index s = 0; s < d; ++s) {
      out[s] = exponent * (log_t + std::log1p(gaps[s] / t) + log_scale);
    }
    return out;
  };
  auto excess = [&](double log_t) { return log_sum_exp(log_weights(log_t)); };

  double lo = -1.0;
  double hi = 1.0;
  double width = 2.0;
  constexpr double kLimit = 700.0;
  double f_lo = excess(lo);
  double f_hi = excess(hi);
  while ((f_lo > 0.0) == (f_hi > 0.0)) {
    if (lo <= -kLimit && hi >= kLimit) {
      std::ostringstream os;
      os << "closed_form_optimum: no real multiplier in the positivity domain; searched lambda "
         << (above ? "- max r" : "min r -") << " in [" << std::exp(-kLimit) << ", "
         << std::exp(kLimit) << "]";
      throw ConvergenceError(os.str());
    }
    lo = std::max(-kLimit, lo - width);
    hi = std::min(kLimit, hi + width);
    width *= 2.0;
    f_lo = excess(lo);
    f_hi = excess(hi);
  }
  for (int i = 0; i < 400; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) {
      break;
    }
    const double f_mid = excess(mid);
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  const double log_t = 0.5 * (lo + hi);
  Vector logs = log_weights(log_t);
  logs.array() -= logs.maxCoeff();
  Vector w = logs.array().exp().matrix();
  const double t = std::exp(log_t);
  return {Distribution(w / w.sum()), above ? boundary + t : boundary - t};
}

Matrix isoreturn_tangent_basis(const Vector& reward) {
  const Index d = reward.size();
  Matrix constraints(2, d);
  constraints.row(0).setOnes();
  constraints.row(1) = reward.transpose();
  Eigen::JacobiSVD<Matrix> svd(constraints, Eigen::ComputeFullV);
  const Vector sv = svd.singularValues();
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > 1e-12 * sv[0]) {
      ++rank;
    }
  }
  return svd.matrixV().rightCols(d - rank);
}

DivergenceMinReport divergence_min_equivalence(const OptimaProblem& prob, double tol) {
  const Distribution star = closed_form_optimum(prob).point;
  const Index d = prob.size();
  const Vector& r = prob.reward;
  const Vector u = Vector::Constant(d, 1.0 / static_cast<double>(d));
  const double level = star.weights().dot(r);
  DivergenceMinReport report{star, Distribution::uniform(d), level, 0.0, 0};
  if (is_constant(r)) {
    report.distance = l1_distance(star.weights(), u);
    return report;
  }
  if (!star.is_interior()) {
    throw InvalidArgument("divergence_min_equivalence: optimum is on the boundary (beta = 0?)");
  }

  // Feasible start on the segment from u toward the best vertex.
  const Index top = first_argmax(r);
  const double mean = u.dot(r);
  const double theta = std::clamp((level - mean) / (r[top] - mean), 0.0, 1.0 - 1e-9);
  Vector p = (1.0 - theta) * u;
  p[top] += theta;

  const Matrix basis = isoreturn_tangent_basis(r);
  const double alpha = prob.alpha;
  const double k = 0.5 * (1.0 + alpha);
  auto gradient = [&](const Vector& x) -> Vector {
    if (k == 0.0) {
      return (x.array() / u.array()).log().matrix();
    }
    return ((1.0 - (u.array() / x.array()).pow(k)) / k).matrix();
  };
  auto hessian_diag = [&](const Vector& x) -> Vector {
    return ((u.array() / x.array()).pow(k) / x.array()).matrix();
  };

  constexpr int kMaxIterations = 200;
  double reduced_norm = 0.0;
  if (basis.cols() > 0) {
    for (; report.iterations < kMaxIterations; ++report.iterations) {
      const Vector g = gradient(p);
      const Vector rg = basis.transpose() * g;
      reduced_norm = rg.norm();
      if (reduced_norm <= tol) {
        break;
      }
      const Matrix h = basis.transpose() * hessian_diag(p).asDiagonal() * basis;
      const Vector dir = -basis * h.ldlt().solve(rg);
      double step = 1.0;
      while ((p + step * dir).minCoeff() <= 0.0) {
        step *= 0.5;
      }
      const double current = alpha_divergence(p, u, alpha);
      const double slope = g.dot(dir);
      while (step > 1e-16) {
        const double next = alpha_divergence(Vector(p + step * dir), u, alpha);
        if (next <= current + 1e-4 * step * slope + 4.0 * kEps * std::abs(current)) {
          break;
        }
        step *= 0.5;
      }
      const Vector move = step * dir;
      p += move;
      if (move.cwiseAbs().maxCoeff() <= 4.0 * kEps) {
        reduced_norm = (basis.transpose() * gradient(p)).norm();
        break;
      }
    }
    if (reduced_norm > 1e-8) {
      std::ostringstream os;
      os << "divergence_min_equivalence: constrained solver stalled with reduced gradient "
         << reduced_norm;
      throw ConvergenceError(os.str());
    }
  }
  report.constrained = Distribution::normalized(p.cwiseMax(0.0));
  report.distance = l1_distance(report.constrained.weights(), star.weights());
  return report;
}

double projection_orthogonality(const OptimaProblem& prob) {
  if (is_constant(prob.reward)) {
    return 0.0;
  }
  const Distribution star = closed_form_optimum(prob).point;
  if (!star.is_interior()) {
    throw InvalidArgument("projection_orthogonality: optimum must be interior");
  }
  const Index d = prob.size();
  const Vector& p = star.weights();
  const Vector u = Vector::Constant(d, 1.0 / static_cast<double>(d));
  const Vector velocity = geodesic_velocity(GeodesicSpec{u, p, -prob.alpha, false, false}, 1.0);
  const double vnorm = std::sqrt(fisher_rao_inner(p, velocity, velocity));
  if (vnorm == 0.0) {
    return 0.0;
  }
  const Matrix basis = isoreturn_tangent_basis(prob.reward);
  double worst = 0.0;
  for (Index j = 0; j < basis.cols(); ++j) {
    const Vector v = basis.col(j);
    const double cos = fisher_rao_inner(p, velocity, v) /
                       (vnorm * std::sqrt(fisher_rao_inner(p, v, v)));
    worst = std::max(worst, std::abs(cos));
  }
  return worst;
}

namespace {

struct Fit {
  double time;
  double distance;
};

Fit fit_to_geodesic(const GeodesicSpec& spec, const Vector& target) {
  auto dist = [&](double t) { return l1_distance(geodesic_eval(spec, t), target); };
  constexpr int kGrid = 200;
  int best = 0;
  double best_value = dist(0.0);
  for (int i = 1; i <= kGrid; ++i) {
    const double v = dist(static_cast<double>(i) / kGrid);
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  double a = static_cast<double>(std::max(best - 1, 0)) / kGrid;
  double b = static_cast<double>(std::min(best + 1, kGrid)) / kGrid;
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - inv_phi * (b - a);
  double e = a + inv_phi * (b - a);
  double fc = dist(c);
  double fe = dist(e);
  while (b - a > 1e-10) {
    if (fc < fe) {
      b = e;
      e = c;
      fe = fc;
      c = b - inv_phi * (b - a);
      fc = dist(c);
    } else {
      a = c;
      c = e;
      fc = fe;
      e = a + inv_phi * (b - a);
      fe = dist(e);
    }
  }
  const double t = 0.5 * (a + b);
  Fit fit{t, dist(t)};
  if (best_value < fit.distance) {
    fit = {static_cast<double>(best) / kGrid, best_value};
  }
  return fit;
}

}  // namespace

BetaSweep beta_sweep(const OptimaProblem& base, const std::vector<double>& betas) {
  if (betas.size() < 3) {
    throw InvalidArgument("beta_sweep: need at least three betas");
  }
  for (std::size_t i = 0; i < betas.size(); ++i) {
    if (!(betas[i] > 0.0) || !std::isfinite(betas[i])) {
      throw InvalidArgument("beta_sweep: betas must be finite and > 0");
    }
    if (i > 0 && !(betas[i] > betas[i - 1])) {
      throw InvalidArgument("beta_sweep: betas must be strictly ascending");
    }
  }
  BetaSweep out;
  out.betas = betas;
  for (double beta : betas) {
    OptimaProblem prob = base;
    prob.beta = beta;
    out.optima.push_back(closed_form_optimum(prob).point);
  }
  const Index d = base.size();
  const GeodesicSpec spec{out.optima.front().weights(),
                          Vector::Constant(d, 1.0 / static_cast<double>(d)), base.alpha + 2.0, true,
                          false};
  out.fit_residuals.push_back(0.0);
  out.fit_times.push_back(0.0);
  for (std::size_t j = 1; j < out.optima.size(); ++j) {
    const Fit fit = fit_to_geodesic(spec, out.optima[j].weights());
    out.fit_residuals.push_back(fit.distance);
    out.fit_times.push_back(fit.time);
    out.max_residual = std::max(out.max_residual, fit.distance);
  }
  return out;
}

std::vector<SweepRow> sweep_table(const Vector& reward, int horizon,
                                  const std::vector<double>& alphas,
                                  const std::vector<double>& betas) {
  const Index d = reward.size();
  const Vector u = Vector::Constant(d, 1.0 / static_cast<double>(d));
  std::vector<double> sorted = betas;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  const bool fit = sorted.size() >= 3 && sorted.front() > 0.0;

  std::vector<SweepRow> rows;
  rows.reserve(alphas.size() * betas.size() * static_cast<std::size_t>(d));
  for (double alpha : alphas) {
    std::map<double, double> residual_of;
    if (fit) {
      const BetaSweep sweep = beta_sweep(OptimaProblem{reward, alpha, 1.0, horizon}, sorted);
      for (std::size_t i = 0; i < sorted.size(); ++i) {
        residual_of[sorted[i]] = sweep.fit_residuals[i];
      }
    }
    for (double beta : betas) {
      const OptimaProblem prob{reward, alpha, beta, horizon};
      const Distribution p = closed_form_optimum(prob).point;
      const double ret = static_cast<double>(horizon + 1) * p.weights().dot(reward);
      const double div = alpha_divergence(p.weights(), u, alpha);
      const double residual = fit ? residual_of.at(beta) : kNaN;
      for (Index s = 0; s < d; ++s) {
        rows.push_back({alpha, beta, s, p[s], ret, div, residual});
      }
    }
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out =
      "alpha,beta,state,probability,return_value,divergence_to_uniform,geodesic_residual\n";
  for (const SweepRow& row : rows) {
    out += format_number(row.alpha);
    out += ',';
    out += format_number(row.beta);
    out += ',';
    out += std::to_string(row.state);
    out += ',';
    out += format_number(row.probability);
    out += ',';
    out += format_number(row.return_value);
    out += ',';
    out += format_number(row.divergence_to_uniform);
    out += ',';
    out += format_number(row.geodesic_residual);
    out += '\n';
  }
  return out;
}

}  // namespace cgeom
