#pragma once

#include "cgeom/core.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace cgeom {

/// N points in D-dimensional Euclidean space, one point per row.
class SampleSet {
 public:
  explicit SampleSet(Matrix points);

  const Matrix& points() const noexcept { return points_; }
  Index size() const noexcept { return points_.rows(); }
  Index dimension() const noexcept { return points_.cols(); }

 private:
  Matrix points_;
};

struct DensityEstimate {
  double density = 0.0;
  double radius = 0.0;
  /// True when the k-th neighbour coincides with the query (density reported as +inf).
  bool degenerate = false;
};

/// Volume of the Euclidean ball of the given radius in `dimension` dimensions.
double ball_volume(Index dimension, double radius);

/// ceil(sqrt(N)), clamped to [1, N - 1].
Index default_neighbours(Index sample_count);

/// k / (N V_D(r_k)) with r_k the distance from `query` to its k-th nearest sample
/// (ties count toward k). `exclude` drops one sample, e.g. the query itself, and
/// N becomes the number of remaining samples. Requires 1 <= k < N.
DensityEstimate knn_density(const SampleSet& samples, const Vector& query, Index k,
                            std::optional<Index> exclude = std::nullopt);

/// alpha-information of a density value: -log p at alpha = -1, otherwise
/// 4/(1-alpha^2) (p^(-(1+alpha)/2) - 1). Unlike probabilities, densities may exceed 1.
double density_information(double density, double alpha);

/// density_information of the k-NN estimate at `query`.
double estimated_information(const SampleSet& samples, const Vector& query, Index k, double alpha);

enum class SyntheticSource { uniform_box, gaussian };

struct ConsistencyRow {
  Index samples;
  Index neighbours;
  double mean_abs_log_error;
  double mean_relative_error;
};

struct ConsistencyReport {
  SyntheticSource source;
  Index dimension;
  std::uint64_t seed;
  std::vector<ConsistencyRow> rows;
  /// Errors decrease along `rows` with at most one inversion.
  bool decreasing;
};

/// Draws N samples from the source for each N, estimates the density at
/// `queries` interior points with k = default_neighbours(N) (or `fixed_k`), and
/// reports the mean absolute log error against the true density. Queries lie in
/// [0.25, 0.75]^D for the unit box and within radius 1 for the standard Gaussian.
ConsistencyReport estimator_consistency_report(SyntheticSource source, Index dimension,
                                               const std::vector<Index>& sample_counts,
                                               std::uint64_t seed, Index queries = 200,
                                               std::optional<Index> fixed_k = std::nullopt);

/// True when the sequence has at most `allowed_inversions` increases.
bool decreasing_with_inversions(const std::vector<double>& values, int allowed_inversions = 1);

std::string consistency_report_json(const ConsistencyReport& report);

/// Reads points from CSV, one row per point. A first line that does not parse
/// as numbers is treated as a header.
SampleSet read_samples_csv(const std::filesystem::path& path);

}  // namespace cgeom
