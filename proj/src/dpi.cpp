#include "cgeom/dpi.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cgeom {

namespace {

void check_sizes(const Distribution& p, const Statistic& kappa) {
  if (p.size() != kappa.source_size()) {
    std::ostringstream os;
    os << "statistic expects " << kappa.source_size() << " source states, distribution has "
       << p.size();
    throw InvalidArgument(os.str());
  }
}

DpiCase make_case(const Distribution& p, const Statistic& kappa, const Generator& f, double gap) {
  DpiCase c;
  c.p.assign(p.weights().data(), p.weights().data() + p.size());
  c.assignment = kappa.assignment();
  c.generator = f.name();
  c.gap = gap;
  return c;
}

nlohmann::json case_json(const std::optional<DpiCase>& c) {
  if (!c) {
    return nullptr;
  }
  return {{"p", c->p}, {"assignment", c->assignment}, {"generator", c->generator}, {"gap", c->gap}};
}

}  // namespace

Statistic::Statistic(std::vector<Index> assignment) : assignment_(std::move(assignment)) {
  if (assignment_.empty()) {
    throw InvalidArgument("statistic needs at least one source state");
  }
  const Index top = *std::max_element(assignment_.begin(), assignment_.end());
  if (*std::min_element(assignment_.begin(), assignment_.end()) < 0) {
    throw InvalidArgument("statistic targets must be non-negative");
  }
  targets_ = top + 1;
  std::vector<bool> hit(static_cast<std::size_t>(targets_), false);
  for (Index t : assignment_) {
    hit[static_cast<std::size_t>(t)] = true;
  }
  for (std::size_t t = 0; t < hit.size(); ++t) {
    if (!hit[t]) {
      std::ostringstream os;
      os << "statistic target " << t << " has an empty fiber";
      throw InvalidArgument(os.str());
    }
  }
}

Statistic Statistic::identity(Index size) {
  std::vector<Index> a(static_cast<std::size_t>(size));
  for (Index i = 0; i < size; ++i) {
    a[static_cast<std::size_t>(i)] = i;
  }
  return Statistic(std::move(a));
}

Statistic Statistic::merge_all(Index size) {
  return Statistic(std::vector<Index>(static_cast<std::size_t>(size), 0));
}

Statistic Statistic::random(CounterRng& rng, Index sources, Index targets) {
  if (targets < 1 || targets > sources) {
    throw InvalidArgument("random statistic needs 1 <= targets <= sources");
  }
  std::vector<Index> order(static_cast<std::size_t>(sources));
  for (Index i = 0; i < sources; ++i) {
    order[static_cast<std::size_t>(i)] = i;
  }
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    std::swap(order[i], order[static_cast<std::size_t>(rng.below(i + 1))]);
  }
  std::vector<Index> a(static_cast<std::size_t>(sources));
  for (Index i = 0; i < sources; ++i) {
    const Index target = i < targets ? i : static_cast<Index>(rng.below(static_cast<std::uint64_t>(targets)));
    a[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = target;
  }
  return Statistic(std::move(a));
}

std::vector<std::vector<Index>> Statistic::fibers() const {
  std::vector<std::vector<Index>> out(static_cast<std::size_t>(targets_));
  for (std::size_t s = 0; s < assignment_.size(); ++s) {
    out[static_cast<std::size_t>(assignment_[s])].push_back(static_cast<Index>(s));
  }
  return out;
}

Statistic Statistic::compose(const Statistic& then) const {
  if (then.source_size() != targets_) {
    throw InvalidArgument("statistic composition: target and source sizes differ");
  }
  std::vector<Index> a(assignment_.size());
  for (std::size_t s = 0; s < a.size(); ++s) {
    a[s] = then(assignment_[s]);
  }
  return Statistic(std::move(a));
}

Pushforward pushforward(const Distribution& p, const Statistic& kappa) {
  check_sizes(p, kappa);
  Vector weights = Vector::Zero(kappa.target_size());
  Vector sizes = Vector::Zero(kappa.target_size());
  for (Index s = 0; s < p.size(); ++s) {
    weights[kappa(s)] += p[s];
    sizes[kappa(s)] += 1.0;
  }
  return {Distribution(weights), sizes};
}

double intrinsic_return(const Vector& weights, const Vector& sizes, const Generator& f, int horizon) {
  if (weights.size() != sizes.size()) {
    throw InvalidArgument("intrinsic_return: weights and sizes differ in length");
  }
  if (horizon < 0) {
    throw InvalidArgument("intrinsic_return: horizon must be >= 0");
  }
  double total = 0.0;
  for (Index y = 0; y < weights.size(); ++y) {
    if (weights[y] > 0.0) {
      total += weights[y] * f(sizes[y] / weights[y]);
    } else if (sizes[y] > 0.0) {
      constexpr double kFar = 1e300;
      const double slope = f(kFar) / kFar;
      total += std::isnan(slope) ? std::numeric_limits<double>::infinity() : sizes[y] * slope;
    }
  }
  return static_cast<double>(horizon + 1) * total;
}

double dpi_gap(const Distribution& p, const Statistic& kappa, const Generator& f, int horizon) {
  const Pushforward image = pushforward(p, kappa);
  const double after = intrinsic_return(image.weights.weights(), image.sizes, f, horizon);
  const double before = intrinsic_return(p.weights(), Vector::Ones(p.size()), f, horizon);
  return after - before;
}

bool sufficiency_check(const Distribution& p, const Statistic& kappa, double tol) {
  check_sizes(p, kappa);
  for (const auto& fiber : kappa.fibers()) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (Index s : fiber) {
      lo = std::min(lo, p[s]);
      hi = std::max(hi, p[s]);
    }
    if (hi - lo > tol) {
      return false;
    }
  }
  return true;
}

Generator square_generator() {
  return Generator::custom(
      "x^2 - 1", [](double x) { return x * x - 1.0; }, [](double x) { return 2.0 * x; }, 2.0,
      Curvature::convex);
}

DpiBatteryReport dpi_battery(std::uint64_t seed, const DpiBatteryOptions& options) {
  if (options.min_states < 1 || options.max_states < options.min_states || options.alphas.empty()) {
    throw InvalidArgument("dpi_battery: invalid options");
  }
  std::vector<Generator> generators;
  for (double a : options.alphas) {
    generators.push_back(Generator::alpha_information(a));
  }
  const CounterRng root(seed);
  DpiBatteryReport report;
  report.min_gap = std::numeric_limits<double>::infinity();
  const auto span = static_cast<std::uint64_t>(options.max_states - options.min_states + 1);

  auto record = [&](const Distribution& p, const Statistic& kappa, const Generator& f) {
    const double gap = dpi_gap(p, kappa, f, options.horizon);
    ++report.trials;
    report.min_gap = std::min(report.min_gap, gap);
    const bool equal = gap <= options.equality_tolerance;
    if (equal) {
      ++report.equality_cases;
    }
    if (equal != sufficiency_check(p, kappa, options.sufficiency_tolerance)) {
      ++report.equality_mismatches;
    }
    if (gap < -options.gap_tolerance && !report.counterexample) {
      report.counterexample = make_case(p, kappa, f, gap);
    }
  };

  for (std::int64_t i = 0; i < options.trials; ++i) {
    CounterRng rng = root.split(static_cast<std::uint64_t>(i));
    const Index d = options.min_states + static_cast<Index>(rng.below(span));
    const Index targets = 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(d)));
    const Statistic kappa = Statistic::random(rng, d, targets);
    const Distribution p(rng.dirichlet(d));
    record(p, kappa, generators[rng.below(generators.size())]);
  }

  // Fiber-constant constructions: the equality case.
  for (std::int64_t i = 0; i < options.constructed; ++i) {
    CounterRng rng = root.split(0x100000000ULL + static_cast<std::uint64_t>(i));
    const Index d = options.min_states + static_cast<Index>(rng.below(span));
    const Index targets = 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(d)));
    const Statistic kappa = Statistic::random(rng, d, targets);
    const Vector cell = rng.dirichlet(targets);
    const auto fibers = kappa.fibers();
    Vector w(d);
    for (Index s = 0; s < d; ++s) {
      w[s] = cell[kappa(s)] / static_cast<double>(fibers[static_cast<std::size_t>(kappa(s))].size());
    }
    record(Distribution::normalized(w), kappa, generators[rng.below(generators.size())]);
    ++report.constructed_cases;
  }

  const Generator square = square_generator();
  for (std::int64_t i = 0; i < options.convex_trials; ++i) {
    CounterRng rng = root.split(0x200000000ULL + static_cast<std::uint64_t>(i));
    const Index d = std::max<Index>(3, options.min_states) + static_cast<Index>(rng.below(span));
    const Index targets = 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(d - 1)));
    const Statistic kappa = Statistic::random(rng, d, targets);
    const Distribution p(rng.dirichlet(d));
    const double gap = dpi_gap(p, kappa, square, options.horizon);
    if (!report.convex_witness || gap < report.convex_witness->gap) {
      report.convex_witness = make_case(p, kappa, square, gap);
    }
  }
  return report;
}

std::string dpi_report_json(const DpiBatteryReport& report) {
  nlohmann::ordered_json doc;
  doc["trials"] = report.trials;
  doc["min_gap"] = report.min_gap;
  doc["equality_cases"] = report.equality_cases;
  doc["counterexample"] = case_json(report.counterexample);
  doc["equality_mismatches"] = report.equality_mismatches;
  doc["constructed_cases"] = report.constructed_cases;
  doc["convex_witness"] = case_json(report.convex_witness);
  return doc.dump(2) + "\n";
}

}  // namespace cgeom
