#include "cgeom/density.hpp"
#include "cgeom/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

using namespace cgeom;

namespace {

SampleSet uniform_samples(CounterRng& rng, Index n, Index dim, double side = 1.0) {
  Matrix pts(n, dim);
  for (Index i = 0; i < pts.size(); ++i) pts.data()[i] = side * rng.uniform();
  return SampleSet(pts);
}

}  // namespace

TEST(BallVolume, KnownValues) {
  EXPECT_NEAR(ball_volume(1, 0.5), 1.0, 1e-15);
  EXPECT_NEAR(ball_volume(2, 1.0), std::numbers::pi, 1e-14);
  EXPECT_NEAR(ball_volume(3, 2.0), 4.0 / 3.0 * std::numbers::pi * 8, 1e-12);
}

TEST(DefaultNeighbours, SquareRootRule) {
  EXPECT_EQ(default_neighbours(10'000), 100);
  EXPECT_EQ(default_neighbours(10), 4);
  EXPECT_EQ(default_neighbours(2), 1);
}

TEST(Knn, UniformGridInterior) {
  const Index n = 10'000;
  Matrix grid(n, 1);
  for (Index i = 0; i < n; ++i) grid(i, 0) = (i + 0.5) / n;
  const SampleSet samples(grid);
  for (double x : {0.3, 0.5, 0.7}) {
    const double est = knn_density(samples, Vector::Constant(1, x), 100).density;
    EXPECT_NEAR(est, 1.0, 0.25);
  }
}

TEST(Knn, ScalingLaw) {
  CounterRng rng(80);
  for (Index dim : {1, 2, 3}) {
    const SampleSet s = uniform_samples(rng, 200, dim);
    const SampleSet doubled(2.0 * s.points());
    const Vector q = Vector::Constant(dim, 0.5);
    const double a = knn_density(s, q, 10).density;
    const double b = knn_density(doubled, 2.0 * q, 10).density;
    EXPECT_NEAR(b, a / std::pow(2.0, static_cast<double>(dim)), 1e-12 * a);
  }
}

TEST(Knn, FarQueryHasLowerDensity) {
  CounterRng rng(81);
  const SampleSet cluster(0.01 * uniform_samples(rng, 50, 2).points());
  const Vector centre = cluster.points().colwise().mean().transpose();
  const double near = knn_density(cluster, centre, 49).density;
  const double far = knn_density(cluster, Vector::Constant(2, 10.0), 49).density;
  EXPECT_LT(far, near);
  EXPECT_GT(estimated_information(cluster, Vector::Constant(2, 10.0), 49, 0.0),
            estimated_information(cluster, centre, 49, 0.0));
}

TEST(Knn, LogBranch) {
  CounterRng rng(82);
  const SampleSet s = uniform_samples(rng, 100, 2);
  const Vector q = Vector::Constant(2, 0.4);
  EXPECT_NEAR(estimated_information(s, q, 10, -1.0), -std::log(knn_density(s, q, 10).density),
              1e-14);
}

TEST(Knn, PositiveAndTranslationInvariant) {
  CounterRng rng(83);
  const SampleSet s = uniform_samples(rng, 300, 3);
  Eigen::RowVectorXd shift(3);
  shift << 5.0, -2.0, 0.25;
  const SampleSet moved(s.points().rowwise() + shift);
  for (int i = 0; i < 20; ++i) {
    const Vector q = uniform_samples(rng, 2, 3).points().row(0).transpose();
    const double a = knn_density(s, q, 17).density;
    EXPECT_GT(a, 0.0);
    EXPECT_NEAR(knn_density(moved, q + shift.transpose(), 17).density, a, 1e-9 * a);
  }
}

TEST(Knn, LargerNeighbourhoodsReduceVariance) {
  auto spread = [](Index k) {
    std::vector<double> est;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      CounterRng rng(seed);
      est.push_back(knn_density(uniform_samples(rng, 500, 1), Vector::Constant(1, 0.5), k).density);
    }
    double mean = 0, var = 0;
    for (double e : est) mean += e / est.size();
    for (double e : est) var += (e - mean) * (e - mean) / (est.size() - 1);
    return var;
  };
  EXPECT_GT(spread(4), spread(16));
  EXPECT_GT(spread(16), spread(64));
}

TEST(Knn, DuplicatePointsAreDegenerate) {
  Matrix pts = Matrix::Zero(5, 2);
  pts(4, 0) = 1.0;
  const DensityEstimate e = knn_density(SampleSet(pts), Vector::Zero(2), 3);
  EXPECT_TRUE(e.degenerate);
  EXPECT_TRUE(std::isinf(e.density));
}

TEST(Knn, Validation) {
  CounterRng rng(84);
  const SampleSet s = uniform_samples(rng, 10, 2);
  EXPECT_THROW(knn_density(s, Vector::Zero(2), 10), InvalidArgument);
  EXPECT_THROW(knn_density(s, Vector::Zero(2), 0), InvalidArgument);
  EXPECT_THROW(knn_density(s, Vector::Zero(3), 2), InvalidArgument);
  EXPECT_THROW(SampleSet(Matrix::Zero(1, 2)), InvalidArgument);
  EXPECT_NO_THROW(knn_density(s, s.points().row(0).transpose(), 8, 0));
}

TEST(Knn, EntropyEstimateConverges) {
  // Leave-one-out plug-in entropy of uniform samples on [0, 2]^2 tends to log 4.
  auto error = [](Index n) {
    double mean = 0;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      CounterRng rng(seed);
      const SampleSet s = uniform_samples(rng, n, 2, 2.0);
      const Index k = default_neighbours(n);
      for (Index i = 0; i < n; ++i) {
        const double p = knn_density(s, s.points().row(i).transpose(), k, i).density;
        mean += density_information(p, -1.0) / (3.0 * n);
      }
    }
    return std::abs(mean - std::log(4.0));
  };
  const double small = error(100), medium = error(800), large = error(4000);
  EXPECT_LT(medium, small);
  EXPECT_LT(large, medium);
}

TEST(Consistency, ErrorsDecrease) {
  const std::vector<Index> counts{100, 1000, 10'000};
  const ConsistencyReport box = estimator_consistency_report(SyntheticSource::uniform_box, 1, counts, 0);
  EXPECT_TRUE(box.decreasing);
  const ConsistencyReport gauss = estimator_consistency_report(SyntheticSource::gaussian, 2, counts, 0);
  EXPECT_TRUE(gauss.decreasing);
  EXPECT_EQ(consistency_report_json(box),
            consistency_report_json(
                estimator_consistency_report(SyntheticSource::uniform_box, 1, counts, 0)));
}

TEST(Consistency, InversionCounting) {
  EXPECT_TRUE(decreasing_with_inversions({3, 2, 1}, 0));
  EXPECT_FALSE(decreasing_with_inversions({3, 4, 1}, 0));
  EXPECT_TRUE(decreasing_with_inversions({3, 4, 1}, 1));
}

TEST(SamplesCsv, HeaderSkipped) {
  const auto path = std::filesystem::temp_directory_path() / "cgeom_samples_test.csv";
  std::ofstream(path) << "x,y\n0.1,0.2\n0.3,0.4\n0.5,0.6\n";
  const SampleSet s = read_samples_csv(path);
  EXPECT_EQ(s.size(), 3);
  EXPECT_EQ(s.dimension(), 2);
  EXPECT_DOUBLE_EQ(s.points()(2, 1), 0.6);
  std::ofstream(path) << "0.1,0.2\n0.3\n";
  EXPECT_THROW(read_samples_csv(path), InvalidArgument);
  std::filesystem::remove(path);
}
