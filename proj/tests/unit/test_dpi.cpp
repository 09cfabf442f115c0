#include "cgeom/dpi.hpp"
#include "cgeom/information.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

#include <cmath>

using namespace cgeom;

namespace {

Distribution dist(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v[i++] = x;
  return Distribution(v);
}

const Statistic kMergeTail({0, 1, 1});

}  // namespace

TEST(Statistic, Validation) {
  EXPECT_THROW(Statistic({0, 2}), InvalidArgument);
  EXPECT_THROW(Statistic({}), InvalidArgument);
  EXPECT_THROW(Statistic({0, -1}), InvalidArgument);
  EXPECT_EQ(kMergeTail.target_size(), 2);
  EXPECT_EQ(kMergeTail.fibers()[1], (std::vector<Index>{1, 2}));
}

TEST(Statistic, RandomIsSurjective) {
  CounterRng rng(50);
  for (int i = 0; i < 100; ++i) {
    const Statistic k = Statistic::random(rng, 8, 1 + static_cast<Index>(rng.below(8)));
    for (const auto& fiber : k.fibers()) EXPECT_FALSE(fiber.empty());
  }
  EXPECT_THROW(Statistic::random(rng, 3, 4), InvalidArgument);
}

TEST(Pushforward, Examples) {
  const Distribution p = dist({0.5, 0.25, 0.25});
  const Pushforward id = pushforward(p, Statistic::identity(3));
  EXPECT_EQ(id.weights.weights(), p.weights());
  EXPECT_EQ(id.sizes, Vector::Ones(3));
  const Pushforward all = pushforward(p, Statistic::merge_all(3));
  EXPECT_NEAR(all.weights[0], 1.0, 1e-15);
  EXPECT_EQ(all.sizes[0], 3.0);
  const Pushforward tail = pushforward(p, kMergeTail);
  EXPECT_NEAR(tail.weights[1], 0.5, 1e-15);
  EXPECT_EQ(tail.sizes[1], 2.0);
  EXPECT_THROW(pushforward(Distribution::uniform(4), kMergeTail), InvalidArgument);
}

TEST(IntrinsicReturn, Examples) {
  const Generator f0 = Generator::alpha_information(0.0);
  EXPECT_NEAR(intrinsic_return(Vector::Constant(4, 0.25), Vector::Ones(4), f0, 0), 4.0, 1e-14);
  EXPECT_NEAR(intrinsic_return(Vector::Ones(1), Vector::Constant(1, 5.0), f0, 3), 4.0 * f0(5.0),
              1e-13);
  CounterRng rng(51);
  const Distribution p(interior_point(rng, 5));
  double direct = 0;
  for (Index s = 0; s < 5; ++s) direct += p[s] * f0(1.0 / p[s]);
  EXPECT_NEAR(intrinsic_return(p.weights(), Vector::Ones(5), f0, 0), direct, 1e-13);
}

TEST(IntrinsicReturn, ZeroWeightUsesLimit) {
  Vector w(2);
  w << 1.0, 0.0;
  EXPECT_NEAR(intrinsic_return(w, Vector::Ones(2), Generator::alpha_information(0.0), 0), 0.0, 1e-100);
  EXPECT_NEAR(intrinsic_return(w, Vector::Ones(2), Generator::alpha_information(-1.0), 0), 0.0, 1e-100);
  EXPECT_TRUE(std::isinf(intrinsic_return(w, Vector::Ones(2), square_generator(), 0)));
}

TEST(DpiGap, Examples) {
  const Generator f0 = Generator::alpha_information(0.0);
  EXPECT_NEAR(dpi_gap(dist({0.5, 0.25, 0.25}), kMergeTail, f0, 0), 0.0, 1e-12);
  EXPECT_GT(dpi_gap(dist({0.5, 0.375, 0.125}), kMergeTail, f0, 0), 1e-6);
  CounterRng rng(52);
  EXPECT_NEAR(dpi_gap(Distribution(rng.dirichlet(5)), Statistic::identity(5), f0, 2), 0.0, 1e-14);
}

TEST(DpiGap, ConcaveGeneratorsNeverLose) {
  CounterRng rng(53);
  for (int i = 0; i < 1000; ++i) {
    const Index d = 3 + static_cast<Index>(rng.below(6));
    const Distribution p(interior_point(rng, d));
    const Statistic k = Statistic::random(rng, d, 1 + static_cast<Index>(rng.below(d)));
    for (double alpha : {-1.0, 0.0, 0.5}) {
      const double gap = dpi_gap(p, k, Generator::alpha_information(alpha), 0);
      EXPECT_GE(gap, -1e-12);
      EXPECT_EQ(gap <= 1e-10, sufficiency_check(p, k)) << gap;
    }
  }
}

TEST(DpiGap, CoarseningIncreasesGap) {
  CounterRng rng(54);
  for (int i = 0; i < 200; ++i) {
    const Index d = 4 + static_cast<Index>(rng.below(5));
    const Distribution p(interior_point(rng, d));
    const Index mid = 2 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(d - 2)));
    const Statistic first = Statistic::random(rng, d, mid);
    const Statistic second = Statistic::random(rng, mid, 1 + static_cast<Index>(rng.below(mid)));
    const Generator f = Generator::alpha_information(0.0);
    EXPECT_GE(dpi_gap(p, first.compose(second), f, 0), dpi_gap(p, first, f, 0) - 1e-12);
  }
}

TEST(Sufficiency, Examples) {
  CounterRng rng(55);
  EXPECT_TRUE(sufficiency_check(Distribution::uniform(6), Statistic::random(rng, 6, 3)));
  EXPECT_TRUE(sufficiency_check(dist({0.5, 0.25, 0.25}), kMergeTail));
  EXPECT_FALSE(sufficiency_check(dist({0.5, 0.375, 0.125}), kMergeTail));
}

TEST(Battery, DefaultRunPasses) {
  const DpiBatteryReport rep = dpi_battery(0);
  EXPECT_EQ(rep.trials - rep.constructed_cases, 1000);
  EXPECT_GE(rep.min_gap, -1e-12);
  EXPECT_EQ(rep.equality_mismatches, 0);
  EXPECT_GE(rep.equality_cases, rep.constructed_cases);
  EXPECT_FALSE(rep.counterexample.has_value());
  ASSERT_TRUE(rep.convex_witness.has_value());
  EXPECT_LT(rep.convex_witness->gap, -1e-6);
  EXPECT_EQ(rep.convex_witness->p.size(), rep.convex_witness->assignment.size());
}

TEST(Battery, JsonIsDeterministic) {
  DpiBatteryOptions opts;
  opts.trials = 100;
  const std::string a = dpi_report_json(dpi_battery(3, opts));
  EXPECT_EQ(a, dpi_report_json(dpi_battery(3, opts)));
  const auto doc = nlohmann::json::parse(a);
  EXPECT_TRUE(doc.contains("min_gap"));
  EXPECT_TRUE(doc["counterexample"].is_null());
}

TEST(Battery, ConvexGeneratorReversesInequality) {
  const Generator sq = square_generator();
  EXPECT_LT(dpi_gap(dist({0.5, 0.375, 0.125}), kMergeTail, sq, 0), -1e-6);
}
