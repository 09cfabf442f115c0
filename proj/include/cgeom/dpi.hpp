#pragma once

#include "cgeom/core.hpp"
#include "cgeom/generator.hpp"
#include "cgeom/rng.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cgeom {

/// Surjective aggregation of source states onto target states.
class Statistic {
 public:
  /// `assignment[s]` is the target of source state s. Targets are 0..max and
  /// every target must receive at least one source state.
  explicit Statistic(std::vector<Index> assignment);

  static Statistic identity(Index size);
  static Statistic merge_all(Index size);
  /// Uniformly random assignment conditioned on surjectivity onto `targets` cells.
  static Statistic random(CounterRng& rng, Index sources, Index targets);

  Index source_size() const noexcept { return static_cast<Index>(assignment_.size()); }
  Index target_size() const noexcept { return targets_; }
  Index operator()(Index source) const { return assignment_.at(static_cast<std::size_t>(source)); }
  const std::vector<Index>& assignment() const noexcept { return assignment_; }
  std::vector<std::vector<Index>> fibers() const;

  /// `then` applied after this statistic.
  Statistic compose(const Statistic& then) const;

 private:
  std::vector<Index> assignment_;
  Index targets_ = 0;
};

struct Pushforward {
  Distribution weights;  ///< fiber sums of p
  Vector sizes;          ///< fiber cardinalities (image of the counting measure)
};

Pushforward pushforward(const Distribution& p, const Statistic& kappa);

/// (n+1) sum_y p_y f(size_y / p_y). A zero weight contributes its limit
/// size_y * lim_{x->inf} f(x)/x.
double intrinsic_return(const Vector& weights, const Vector& sizes, const Generator& f, int horizon);

/// Return after aggregation minus return before it (unit sizes). Non-negative
/// for concave f; a convex f reverses the inequality.
double dpi_gap(const Distribution& p, const Statistic& kappa, const Generator& f, int horizon);

/// True iff p is constant on every fiber within `tol`.
bool sufficiency_check(const Distribution& p, const Statistic& kappa, double tol = 1e-9);

struct DpiCase {
  std::vector<double> p;
  std::vector<Index> assignment;
  std::string generator;
  double gap = 0.0;
};

struct DpiBatteryReport {
  std::int64_t trials = 0;
  double min_gap = 0.0;
  /// Cases with gap <= equality_tolerance.
  std::int64_t equality_cases = 0;
  /// Cases where "gap <= equality_tolerance" and sufficiency disagree.
  std::int64_t equality_mismatches = 0;
  std::int64_t constructed_cases = 0;
  /// First case with gap < -gap_tolerance, if any.
  std::optional<DpiCase> counterexample;
  /// Most negative gap found for the convex generator x^2 - 1.
  std::optional<DpiCase> convex_witness;
};

struct DpiBatteryOptions {
  std::int64_t trials = 1000;
  std::int64_t constructed = 100;
  std::int64_t convex_trials = 200;
  Index min_states = 3;
  Index max_states = 8;
  int horizon = 0;
  std::vector<double> alphas{-1.0, 0.0, 0.5};
  double gap_tolerance = 1e-12;
  double equality_tolerance = 1e-10;
  double sufficiency_tolerance = 1e-9;
};

/// Random (p, statistic, alpha-information generator) triples, fiber-constant
/// constructions, and a search for a DPI violation under the convex x^2 - 1.
DpiBatteryReport dpi_battery(std::uint64_t seed, const DpiBatteryOptions& options = {});

/// JSON with keys trials, min_gap, equality_cases, counterexample (null when
/// absent) plus the extra battery counters.
std::string dpi_report_json(const DpiBatteryReport& report);

/// The convex generator x^2 - 1, used to show that concavity is needed.
Generator square_generator();

}  // namespace cgeom
