#include "cgeom/density.hpp"

#include "cgeom/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace cgeom {

namespace {

Vector draw_point(CounterRng& rng, SyntheticSource source, Index dimension) {
  Vector x(dimension);
  for (Index i = 0; i < dimension; ++i) {
    x[i] = source == SyntheticSource::uniform_box ? rng.uniform() : rng.normal();
  }
  return x;
}

Vector draw_query(CounterRng& rng, SyntheticSource source, Index dimension) {
  if (source == SyntheticSource::uniform_box) {
    Vector x(dimension);
    for (Index i = 0; i < dimension; ++i) {
      x[i] = rng.uniform(0.25, 0.75);
    }
    return x;
  }
  while (true) {
    Vector x = draw_point(rng, source, dimension);
    if (x.norm() <= 1.0) {
      return x;
    }
  }
}

double true_density(SyntheticSource source, const Vector& x) {
  if (source == SyntheticSource::uniform_box) {
    return 1.0;
  }
  const double d = static_cast<double>(x.size());
  return std::exp(-0.5 * x.squaredNorm() - 0.5 * d * std::log(2.0 * std::numbers::pi));
}

const char* source_name(SyntheticSource source) {
  return source == SyntheticSource::uniform_box ? "uniform_box" : "gaussian";
}

bool parse_row(const std::string& line, std::vector<double>& out) {
  out.clear();
  const char* p = line.data();
  const char* end = p + line.size();
  while (p < end) {
    while (p < end && (*p == ' ' || *p == '\t')) {
      ++p;
    }
    double v = 0.0;
    const auto res = std::from_chars(p, end, v);
    if (res.ec != std::errc()) {
      return false;
    }
    out.push_back(v);
    p = res.ptr;
    while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) {
      ++p;
    }
    if (p < end) {
      if (*p != ',') {
        return false;
      }
      ++p;
    }
  }
  return !out.empty();
}

}  // namespace

SampleSet::SampleSet(Matrix points) : points_(std::move(points)) {
  if (points_.rows() < 2) {
    throw InvalidArgument("sample set needs at least two points");
  }
  if (points_.cols() < 1) {
    throw InvalidArgument("sample points need at least one coordinate");
  }
  if (!points_.allFinite()) {
    throw InvalidArgument("sample coordinates must be finite");
  }
}

double ball_volume(Index dimension, double radius) {
  const double d = static_cast<double>(dimension);
  if (radius == 0.0) {
    return 0.0;
  }
  return std::exp(0.5 * d * std::log(std::numbers::pi) - std::lgamma(0.5 * d + 1.0) +
                  d * std::log(radius));
}

Index default_neighbours(Index sample_count) {
  const auto k = static_cast<Index>(std::ceil(std::sqrt(static_cast<double>(sample_count))));
  return std::clamp<Index>(k, 1, std::max<Index>(1, sample_count - 1));
}

DensityEstimate knn_density(const SampleSet& samples, const Vector& query, Index k,
                            std::optional<Index> exclude) {
  if (query.size() != samples.dimension()) {
    throw InvalidArgument("knn_density: query dimension does not match the samples");
  }
  if (exclude && (*exclude < 0 || *exclude >= samples.size())) {
    throw InvalidArgument("knn_density: excluded index out of range");
  }
  const Index n = samples.size() - (exclude ? 1 : 0);
  if (k < 1 || k >= n) {
    std::ostringstream os;
    os << "knn_density: need 1 <= k < N (k = " << k << ", N = " << n << ")";
    throw InvalidArgument(os.str());
  }
  std::vector<double> dist;
  dist.reserve(static_cast<std::size_t>(samples.size()));
  for (Index i = 0; i < samples.size(); ++i) {
    if (exclude && i == *exclude) {
      continue;
    }
    dist.push_back((samples.points().row(i).transpose() - query).squaredNorm());
  }
  const auto kth = dist.begin() + (k - 1);
  std::nth_element(dist.begin(), kth, dist.end());
  DensityEstimate out;
  out.radius = std::sqrt(*kth);
  if (out.radius == 0.0) {
    out.density = std::numeric_limits<double>::infinity();
    out.degenerate = true;
    return out;
  }
  const double d = static_cast<double>(samples.dimension());
  const double log_volume = 0.5 * d * std::log(std::numbers::pi) - std::lgamma(0.5 * d + 1.0) +
                            d * std::log(out.radius);
  out.density = std::exp(std::log(static_cast<double>(k) / static_cast<double>(n)) - log_volume);
  return out;
}

double density_information(double density, double alpha) {
  if (!(density >= 0.0)) {
    throw InvalidArgument("density_information: density must be >= 0");
  }
  if (alpha == 1.0) {
    throw InvalidArgument("alpha-information diverges at alpha = 1");
  }
  if (alpha == -1.0) {
    return -std::log(density);
  }
  const double c = 4.0 / (1.0 - alpha * alpha);
  if (density == 0.0) {
    return alpha > -1.0 ? std::numeric_limits<double>::infinity() : -c;
  }
  if (std::isinf(density)) {
    return alpha > -1.0 ? -c : std::numeric_limits<double>::infinity();
  }
  return c * std::expm1(-0.5 * (alpha + 1.0) * std::log(density));
}

double estimated_information(const SampleSet& samples, const Vector& query, Index k, double alpha) {
  return density_information(knn_density(samples, query, k).density, alpha);
}

bool decreasing_with_inversions(const std::vector<double>& values, int allowed_inversions) {
  int inversions = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] < values[i - 1])) {
      ++inversions;
    }
  }
  return inversions <= allowed_inversions;
}

ConsistencyReport estimator_consistency_report(SyntheticSource source, Index dimension,
                                               const std::vector<Index>& sample_counts,
                                               std::uint64_t seed, Index queries,
                                               std::optional<Index> fixed_k) {
  if (dimension < 1 || queries < 1 || sample_counts.empty()) {
    throw InvalidArgument("estimator_consistency_report: invalid arguments");
  }
  const CounterRng root(seed);
  CounterRng query_rng = root.split(0);
  Matrix query_points(queries, dimension);
  std::vector<double> truth(static_cast<std::size_t>(queries));
  for (Index q = 0; q < queries; ++q) {
    const Vector x = draw_query(query_rng, source, dimension);
    query_points.row(q) = x.transpose();
    truth[static_cast<std::size_t>(q)] = true_density(source, x);
  }

  ConsistencyReport report{source, dimension, seed, {}, true};
  std::vector<double> errors;
  for (std::size_t j = 0; j < sample_counts.size(); ++j) {
    const Index n = sample_counts[j];
    CounterRng rng = root.split(1 + j);
    Matrix points(n, dimension);
    for (Index i = 0; i < n; ++i) {
      points.row(i) = draw_point(rng, source, dimension).transpose();
    }
    const SampleSet samples(std::move(points));
    const Index k = fixed_k.value_or(default_neighbours(n));
    double log_error = 0.0;
    double rel_error = 0.0;
    for (Index q = 0; q < queries; ++q) {
      const double est = knn_density(samples, query_points.row(q).transpose(), k).density;
      const double t = truth[static_cast<std::size_t>(q)];
      log_error += std::abs(std::log(est / t));
      rel_error += std::abs(est - t) / t;
    }
    const double qn = static_cast<double>(queries);
    report.rows.push_back({n, k, log_error / qn, rel_error / qn});
    errors.push_back(log_error / qn);
  }
  report.decreasing = decreasing_with_inversions(errors, 1);
  return report;
}

std::string consistency_report_json(const ConsistencyReport& report) {
  nlohmann::ordered_json doc;
  doc["generator"] = source_name(report.source);
  doc["dimension"] = report.dimension;
  doc["seed"] = report.seed;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const ConsistencyRow& row : report.rows) {
    nlohmann::ordered_json r;
    r["samples"] = row.samples;
    r["k"] = row.neighbours;
    r["mean_abs_log_error"] = row.mean_abs_log_error;
    r["mean_relative_error"] = row.mean_relative_error;
    rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(rows);
  doc["decreasing"] = report.decreasing;
  return doc.dump(2) + "\n";
}

SampleSet read_samples_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw InvalidArgument("cannot open sample file '" + path.string() + "'");
  }
  std::vector<std::vector<double>> rows;
  std::vector<double> row;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    if (!parse_row(line, row)) {
      if (rows.empty() && line_no == 1) {
        continue;  // header
      }
      std::ostringstream os;
      os << path.string() << ":" << line_no << ": not a row of numbers";
      throw InvalidArgument(os.str());
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      std::ostringstream os;
      os << path.string() << ":" << line_no << ": expected " << rows.front().size()
         << " columns, found " << row.size();
      throw InvalidArgument(os.str());
    }
    rows.push_back(row);
  }
  if (rows.empty()) {
    throw InvalidArgument("sample file '" + path.string() + "' has no points");
  }
  Matrix points(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      points(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
  }
  return SampleSet(std::move(points));
}

}  // namespace cgeom
