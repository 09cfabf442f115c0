#include "cgeom/geometry.hpp"
#include "cgeom/information.hpp"
#include "cgeom/optima.hpp"
#include "cgeom/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace cgeom;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

Vector random_reward(CounterRng& rng, Index d) {
  Vector r(d);
  for (Index s = 0; s < d; ++s) r[s] = rng.uniform(-1.0, 1.0);
  return r;
}

}  // namespace

TEST(Objective, ReducesToReturnAtZeroBeta) {
  const Distribution p(vec({0.2, 0.3, 0.5}));
  const OptimaProblem prob{vec({1.0, -2.0, 0.5}), 0.0, 0.0, 3};
  EXPECT_NEAR(objective(p, prob), 4.0 * (0.2 - 0.6 + 0.25), 1e-14);
}

TEST(Objective, ReducesToEntropyWithoutReward) {
  const Distribution p(vec({0.1, 0.6, 0.3}));
  const OptimaProblem prob{Vector::Zero(3), -1.0, 2.5, 2};
  EXPECT_NEAR(objective(p, prob), 3.0 * 2.5 * shannon_entropy(p), 1e-13);
}

TEST(Objective, UniformMaximizesPureInformation) {
  CounterRng rng(40);
  for (double alpha : {-1.0, -0.5, 0.0, 0.5}) {
    const OptimaProblem prob{Vector::Zero(4), alpha, 1.0, 0};
    const double at_uniform = objective(Distribution::uniform(4), prob);
    for (int i = 0; i < 10'000; ++i) {
      EXPECT_LE(objective(Distribution(rng.dirichlet(4)), prob), at_uniform + 1e-12);
    }
  }
}

TEST(Objective, GradientMatchesFiniteDifferences) {
  CounterRng rng(41);
  const OptimaProblem prob{random_reward(rng, 4), 0.3, 0.8, 0};
  const Vector p = interior_point(rng, 4);
  const Vector g = objective_gradient(p, prob);
  for (Index s = 0; s < 4; ++s) {
    Vector up = p, down = p;
    up[s] += 1e-6;
    down[s] -= 1e-6;
    auto raw = [&](const Vector& x) {
      double v = 0;
      for (Index i = 0; i < 4; ++i) v += x[i] * (prob.reward[i] + prob.beta * alpha_information(x[i], prob.alpha));
      return v;
    };
    EXPECT_NEAR((raw(up) - raw(down)) / 2e-6, g[s], 1e-7);
  }
}

TEST(ClosedForm, ConstantRewardIsUniform) {
  for (double alpha : {-1.0, 0.0, 0.5}) {
    const ClosedFormOptimum opt = closed_form_optimum({Vector::Constant(5, 0.3), alpha, 1.0, 0});
    EXPECT_LT((opt.point.weights().array() - 0.2).abs().maxCoeff(), 1e-8);
  }
}

TEST(ClosedForm, LargeBetaApproachesUniform) {
  const Vector r = vec({1.0, -0.3, 0.7, 0.0});
  for (double alpha : {-1.0, -0.5, 0.0, 0.5}) {
    const ClosedFormOptimum opt = closed_form_optimum({r, alpha, 1e6, 0});
    EXPECT_LT(l1_distance(opt.point.weights(), Vector::Constant(4, 0.25)), 1e-4) << alpha;
  }
}

TEST(ClosedForm, GibbsExample) {
  const ClosedFormOptimum opt = closed_form_optimum({vec({1.0, 0.0, 0.0}), -1.0, 1.0, 0});
  const double e = std::numbers::e;
  EXPECT_NEAR(opt.point[0], e / (e + 2), 1e-14);
  EXPECT_NEAR(opt.point[1], 1 / (e + 2), 1e-14);
  EXPECT_LT(l1_distance(opt.point.weights(), gibbs_distribution(vec({1.0, 0.0, 0.0}), 1.0).weights()),
            1e-15);
}

TEST(ClosedForm, ZeroBetaIsFirstMaximalVertex) {
  const ClosedFormOptimum opt = closed_form_optimum({vec({0.0, 2.0, 2.0, 1.0}), 0.0, 0.0, 0});
  EXPECT_EQ(opt.point[1], 1.0);
  EXPECT_EQ(opt.point[2], 0.0);
}

TEST(ClosedForm, SatisfiesStationarity) {
  CounterRng rng(42);
  for (double alpha : {-0.5, 0.0, 0.5, 3.0}) {
    const OptimaProblem prob{random_reward(rng, 6), alpha, 0.4, 0};
    const ClosedFormOptimum opt = closed_form_optimum(prob);
    EXPECT_LT(kkt_residual(opt.point.weights(), prob), 1e-10) << alpha;
    for (Index s = 0; s < 6; ++s) {
      const double lhs = prob.reward[s] + (2 * prob.beta / (1 + alpha)) *
                                              std::pow(opt.point[s], -(1 + alpha) / 2);
      EXPECT_NEAR(lhs, opt.multiplier, 1e-8 * std::max(1.0, std::abs(opt.multiplier)));
    }
  }
}

TEST(ClosedForm, RejectsInvalidProblems) {
  EXPECT_THROW(closed_form_optimum({vec({1.0, 0.0}), 1.0, 1.0, 0}), InvalidArgument);
  EXPECT_THROW(closed_form_optimum({vec({1.0, 0.0}), 0.0, -1.0, 0}), InvalidArgument);
  EXPECT_THROW(closed_form_optimum({vec({NAN, 0.0}), 0.0, 1.0, 0}), InvalidArgument);
}

TEST(NumericalOptimum, MatchesClosedFormExample) {
  const OptimaProblem prob{vec({1.0, 0.5, 0.25, 0.0}), 0.0, 1.0, 0};
  const NumericalOptimum num = numerical_optimum(prob, 1e-12);
  EXPECT_LT(l1_distance(num.point.weights(), closed_form_optimum(prob).point.weights()), 1e-6);
  EXPECT_LT(num.start_spread, 1e-6);
}

TEST(NumericalOptimum, OracleEquivalenceGrid) {
  CounterRng rng(43);
  for (double alpha : {-1.0, -0.5, 0.0, 0.5}) {
    for (double beta : {0.1, 1.0, 10.0}) {
      for (int i = 0; i < 10; ++i) {
        const Index d = 2 + static_cast<Index>(rng.below(7));
        const OptimaProblem prob{random_reward(rng, d), alpha, beta, 0};
        const Vector closed = closed_form_optimum(prob).point.weights();
        EXPECT_GT(closed.minCoeff(), 0.0);
        const Vector numeric = numerical_optimum(prob, 1e-12, rng()).point.weights();
        EXPECT_LT(l1_distance(closed, numeric), 1e-6) << alpha << ' ' << beta;
      }
    }
  }
}

TEST(NumericalOptimum, GibbsAtLogBranch) {
  CounterRng rng(44);
  for (int i = 0; i < 10; ++i) {
    const Vector r = random_reward(rng, 5);
    const double beta = rng.uniform(0.2, 5.0);
    const NumericalOptimum num = numerical_optimum({r, -1.0, beta, 0}, 1e-12, i);
    EXPECT_LT(l1_distance(num.point.weights(), gibbs_distribution(r, beta).weights()), 1e-8);
  }
}

TEST(NumericalOptimum, ReportsUnreachableTolerance) {
  const OptimaProblem prob{vec({1.0, 0.0, 0.5}), 0.0, 1.0, 0};
  EXPECT_THROW(numerical_optimum(prob, 1e-30, 0, 2, 5), ConvergenceError);
}

TEST(Optima, MonotoneInBeta) {
  CounterRng rng(45);
  for (double alpha : {-1.0, -0.5, 0.0, 0.5}) {
    const Vector r = random_reward(rng, 5);
    const Vector u = Vector::Constant(5, 0.2);
    double prev_div = INFINITY, prev_ret = INFINITY;
    for (double beta = 0.05; beta < 50; beta *= 1.5) {
      const Vector p = closed_form_optimum({r, alpha, beta, 0}).point.weights();
      const double div = alpha_divergence(p, u, alpha);
      const double ret = p.dot(r);
      EXPECT_LE(div, prev_div + 1e-12);
      EXPECT_LE(ret, prev_ret + 1e-12);
      prev_div = div;
      prev_ret = ret;
    }
  }
}

TEST(Optima, SmallBetaConcentratesOnArgmax) {
  const Vector r = vec({0.1, 0.9, 0.4, 0.9 - 0.5});
  for (double alpha : {-1.0, -0.5, 0.0, 0.5}) {
    const Vector p = closed_form_optimum({r, alpha, 1e-4, 0}).point.weights();
    EXPECT_GT(p[1], 0.99) << alpha;
  }
}

TEST(Optima, ContinuousInAlpha) {
  CounterRng rng(46);
  const Vector r = random_reward(rng, 5);
  Vector prev = closed_form_optimum({r, -1.0, 1.0, 0}).point.weights();
  double worst = 0;
  for (int j = 1; j <= 150; ++j) {
    const double alpha = -1.0 + j * 0.01;
    const Vector p = closed_form_optimum({r, alpha, 1.0, 0}).point.weights();
    worst = std::max(worst, l1_distance(p, prev) / 0.01);
    prev = p;
  }
  EXPECT_LT(worst, 5.0);
}

TEST(DivergenceMin, ConstantRewardBothUniform) {
  const DivergenceMinReport rep = divergence_min_equivalence({Vector::Constant(3, 1.0), 0.0, 1.0, 0});
  EXPECT_LT(l1_distance(rep.constrained.weights(), Vector::Constant(3, 1.0 / 3)), 1e-10);
  EXPECT_LT(rep.distance, 1e-10);
}

TEST(DivergenceMin, MatchesOptima) {
  CounterRng rng(47);
  for (double alpha : {-1.0, 0.0, 0.5}) {
    for (int i = 0; i < 10; ++i) {
      const DivergenceMinReport rep =
          divergence_min_equivalence({random_reward(rng, 4), alpha, rng.uniform(0.1, 10), 0});
      EXPECT_LT(rep.distance, 1e-6);
    }
  }
}

TEST(Projection, TangentBasisIsOrthonormal) {
  const Matrix b = isoreturn_tangent_basis(vec({1.0, 0.2, -0.5, 0.3}));
  EXPECT_EQ(b.cols(), 2);
  EXPECT_LT((b.transpose() * b - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((b.colwise().sum()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Projection, GeodesicFromUniformIsOrthogonal) {
  EXPECT_EQ(projection_orthogonality({Vector::Constant(4, 2.0), 0.0, 1.0, 0}), 0.0);
  CounterRng rng(48);
  for (double alpha : {-1.0, -0.5, 0.0, 0.5}) {
    for (int i = 0; i < 10; ++i) {
      EXPECT_LT(projection_orthogonality({random_reward(rng, 5), alpha, rng.uniform(0.1, 10), 0}),
                1e-6);
    }
  }
}

TEST(BetaSweep, ResidualsSmall) {
  EXPECT_EQ(beta_sweep({Vector::Constant(3, 1.0), 0.0, 1.0, 0}, {0.1, 1, 10}).max_residual, 0.0);
  const BetaSweep example =
      beta_sweep({vec({0.3, -0.8, 0.1, 0.9}), 0.0, 1.0, 0}, {0.1, 0.3, 1.0, 3.0, 10.0});
  EXPECT_LE(example.max_residual, 1e-5);
  CounterRng rng(49);
  for (double alpha : {-1.0, -0.5, 0.0, 0.5}) {
    const BetaSweep sweep =
        beta_sweep({random_reward(rng, 6), alpha, 1.0, 0}, {0.1, 0.3, 1.0, 3.0, 10.0});
    EXPECT_LE(sweep.max_residual, 1e-5) << alpha;
  }
}

TEST(BetaSweep, GibbsPathIsLogAffine) {
  const Vector r = vec({0.5, -0.2, 0.9});
  const BetaSweep sweep = beta_sweep({r, -1.0, 1.0, 0}, {0.5, 1.0, 2.0, 4.0});
  EXPECT_LE(sweep.max_residual, 1e-6);
}

TEST(BetaSweep, Validation) {
  const OptimaProblem base{vec({0.0, 1.0}), 0.0, 1.0, 0};
  EXPECT_THROW(beta_sweep(base, {0.1, 1.0}), InvalidArgument);
  EXPECT_THROW(beta_sweep(base, {0.1, 10.0, 1.0}), InvalidArgument);
  EXPECT_THROW(beta_sweep(base, {0.0, 1.0, 10.0}), InvalidArgument);
}

TEST(SweepTable, RowsAndHeader) {
  const auto rows = sweep_table(vec({0.0, 0.25, 0.5, 1.0}), 0, {-1.0, 0.0}, {0.1, 1.0, 10.0});
  EXPECT_EQ(rows.size(), 24u);
  const std::string csv = sweep_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "alpha,beta,state,probability,return_value,divergence_to_uniform,geodesic_residual");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 25);
  const auto two = sweep_table(vec({0.0, 1.0}), 0, {0.0}, {0.1, 1.0});
  EXPECT_TRUE(std::isnan(two.front().geodesic_residual));
}
