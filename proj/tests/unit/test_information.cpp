#include "cgeom/information.hpp"
#include "cgeom/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace cgeom;

namespace {

Distribution dist(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v[i++] = x;
  return Distribution(v);
}

}  // namespace

TEST(AlphaInformation, PointValues) {
  EXPECT_NEAR(alpha_information(0.25, 0.0), 4.0, 1e-15);
  EXPECT_NEAR(alpha_information(1.0, -1.0), 0.0, 0.0);
  EXPECT_NEAR(alpha_information(1.0 / std::numbers::e, -1.0), 1.0, 1e-15);
  EXPECT_NEAR(alpha_information(0.3, -1.0 + 1e-6), -std::log(0.3), 1e-5);
  const Distribution p = dist({0.25, 0.75});
  EXPECT_NEAR(alpha_information(p, 0, 0.0), 4.0, 1e-15);
  EXPECT_NEAR(f_information(p, 0, Generator::alpha_information(0.0)), 4.0, 1e-15);
}

TEST(AlphaInformation, RejectsAlphaOne) {
  EXPECT_THROW(alpha_information(0.5, 1.0), InvalidArgument);
}

TEST(AlphaInformation, ZeroProbabilityGivesLimit) {
  const Distribution p = dist({1.0, 0.0});
  EXPECT_TRUE(std::isinf(alpha_information(p, 1, 0.0)));
  // For alpha < -1 the information is bounded: 4 / (1 - alpha^2) (0 - 1).
  EXPECT_NEAR(alpha_information(p, 1, -3.0), 0.5, 1e-15);
}

TEST(AlphaInformation, StrictlyDecreasingInProbability) {
  for (double alpha : {-3.0, -1.0, -0.5, 0.0, 0.5, 0.9}) {
    double prev = INFINITY;
    for (int i = 1; i <= 100; ++i) {
      const double v = alpha_information(i / 100.0, alpha);
      EXPECT_LT(v, prev) << alpha;
      prev = v;
    }
  }
}

TEST(Entropy, Values) {
  EXPECT_NEAR(shannon_entropy(Distribution::uniform(7)), std::log(7.0), 1e-15);
  EXPECT_EQ(shannon_entropy(Distribution::point_mass(3, 2)), 0.0);
  EXPECT_NEAR(shannon_entropy(dist({0.9, 0.1})), 0.325082973391448, 1e-12);
  EXPECT_NEAR(shannon_entropy(dist({0.5, 0.5})), std::numbers::ln2, 1e-15);
}

TEST(Entropy, ExpectedLogInformationEqualsEntropy) {
  CounterRng rng(20);
  for (int i = 0; i < 200; ++i) {
    const Distribution p(rng.dirichlet(1 + static_cast<Index>(rng.below(9))));
    double mean = 0.0;
    for (Index s = 0; s < p.size(); ++s) {
      if (p[s] > 0) mean += p[s] * alpha_information(p, s, -1.0);
    }
    EXPECT_NEAR(mean, shannon_entropy(p), 1e-12);
  }
}

TEST(Entropy, NearLogBranchLimit) {
  CounterRng rng(21);
  for (int i = 0; i < 50; ++i) {
    const Distribution p(interior_point(rng, 6));
    double mean = 0.0;
    for (Index s = 0; s < p.size(); ++s) mean += p[s] * alpha_information(p, s, -1.0 + 1e-5);
    EXPECT_NEAR(mean, shannon_entropy(p), 1e-4);
  }
}

TEST(IntrinsicReward, ZeroBetaReturnsExtrinsic) {
  const Vector r = Vector::LinSpaced(4, -1.0, 2.0);
  const RewardSpec spec{r, 0.0, Generator::alpha_information(0.0), false};
  EXPECT_EQ(intrinsic_reward_vector(Distribution::uniform(4), spec), r);
}

TEST(IntrinsicReward, UniformOccupancyValue) {
  const RewardSpec spec{Vector::Zero(4), 1.0, Generator::alpha_information(0.0), false};
  const Vector c = intrinsic_reward_vector(Distribution::uniform(4), spec);
  EXPECT_LT((c.array() - 4.0).abs().maxCoeff(), 1e-14);
}

TEST(IntrinsicReward, AdjustmentIsNeutralForAlphaFamily) {
  CounterRng rng(22);
  const Distribution p(interior_point(rng, 5));
  const Vector r = rng.dirichlet(5);
  for (double alpha : {-1.0, 0.0, 0.5}) {
    RewardSpec spec{r, 0.7, Generator::alpha_information(alpha), false};
    const Vector plain = intrinsic_reward_vector(p, spec);
    spec.adjust = true;
    EXPECT_LT((intrinsic_reward_vector(p, spec) - plain).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(IntrinsicReward, ScaleAbsorbedByBeta) {
  CounterRng rng(23);
  for (int i = 0; i < 20; ++i) {
    const Distribution p(interior_point(rng, 4));
    const Vector r = rng.dirichlet(4);
    const double eta = rng.uniform(0.1, 10.0);
    const RewardSpec base{r, 1.3, Generator::alpha_information(0.3), false};
    const RewardSpec scaled{r, 1.3 / eta, Generator::alpha_information(0.3).scaled(eta), false};
    EXPECT_LT((intrinsic_reward_vector(p, base) - intrinsic_reward_vector(p, scaled))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-12);
  }
}

TEST(IntrinsicReward, Validation) {
  const Distribution u = Distribution::uniform(2);
  EXPECT_THROW(intrinsic_reward_vector(
                   u, RewardSpec{Vector::Zero(2), -1.0, Generator::alpha_information(0.0), false}),
               InvalidArgument);
  EXPECT_THROW(intrinsic_reward_vector(
                   u, RewardSpec{Vector::Zero(3), 1.0, Generator::alpha_information(0.0), false}),
               InvalidArgument);
  EXPECT_THROW(
      intrinsic_reward_vector(Distribution::point_mass(2, 0),
                              RewardSpec{Vector::Zero(2), 1.0, Generator::alpha_information(0.0), false}),
      InvalidArgument);
  // A convex generator is not an information generator.
  EXPECT_THROW(intrinsic_reward_vector(
                   u, RewardSpec{Vector::Zero(2), 1.0, Generator::alpha_divergence(0.0), false}),
               InvalidArgument);
}

TEST(CountBonus, WorkedExample) {
  const std::vector<std::int64_t> counts{4, 12};
  const CountBonus b = count_bonus_identity(counts, 16);
  EXPECT_NEAR(b.from_occupancy[0], 4.0, 1e-14);
  EXPECT_NEAR(b.from_counts[0], 4.0, 1e-14);
}

TEST(CountBonus, EqualCountsGiveConstantBonus) {
  const std::vector<std::int64_t> counts(5, 7);
  const CountBonus b = count_bonus_identity(counts, 35);
  EXPECT_LT((b.from_counts.array() - b.from_counts[0]).abs().maxCoeff(), 1e-15);
  EXPECT_LT((b.from_occupancy.array() - b.from_occupancy[0]).abs().maxCoeff(), 1e-15);
}

TEST(CountBonus, IdentityOnRandomCounts) {
  CounterRng rng(24);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::int64_t> counts(8, 1);
    for (int j = 0; j < 92; ++j) ++counts[rng.below(8)];
    const CountBonus b = count_bonus_identity(counts, 100);
    EXPECT_LT((b.from_occupancy - b.from_counts).cwiseAbs().maxCoeff(), 1e-12);
    Index a, c;
    b.from_occupancy.maxCoeff(&a);
    Eigen::Map<const Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>>(counts.data(), 8).minCoeff(&c);
    EXPECT_EQ(a, c);
  }
}

TEST(CountBonus, Validation) {
  const std::vector<std::int64_t> counts{3, 0};
  EXPECT_THROW(count_bonus_identity(counts, 3), InvalidArgument);
  const std::vector<std::int64_t> ok{3, 2};
  EXPECT_THROW(count_bonus_identity(ok, 6), InvalidArgument);
}
