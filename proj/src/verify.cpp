#include "cgeom/density.hpp"
#include "cgeom/dpi.hpp"
#include "cgeom/experiment.hpp"
#include "cgeom/geometry.hpp"
#include "cgeom/information.hpp"
#include "cgeom/mdp.hpp"
#include "cgeom/mdp_io.hpp"
#include "cgeom/optima.hpp"
#include "cgeom/policy_optim.hpp"
#include "cgeom/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string_view>

namespace cgeom {

namespace {

struct Check {
  const char* name;
  const char* anchor;
  double (*tolerance)(const ExperimentConfig&);
  double (*residual)(const ExperimentConfig&, CounterRng&);
};

double fixed_1e_12(const ExperimentConfig&) { return 1e-12; }
double fixed_1e_10(const ExperimentConfig&) { return 1e-10; }
double fixed_1e_9(const ExperimentConfig&) { return 1e-9; }
double fixed_1e_8(const ExperimentConfig&) { return 1e-8; }
double fixed_1e_6(const ExperimentConfig&) { return 1e-6; }
double fixed_1e_5(const ExperimentConfig&) { return 1e-5; }
double fixed_1e_4(const ExperimentConfig&) { return 1e-4; }
double optimum_tol(const ExperimentConfig& c) { return c.tol_optimum; }
double geodesic_tol(const ExperimentConfig& c) { return c.tol_geodesic; }
double gradient_tol(const ExperimentConfig& c) { return c.tol_gradient; }

const Index kSizes[] = {3, 5, 8};

Vector random_reward(CounterRng& rng, Index d, double lo = -1.0, double hi = 1.0) {
  Vector r(d);
  for (Index s = 0; s < d; ++s) {
    r[s] = rng.uniform(lo, hi);
  }
  return r;
}

// The configured MDP (with its policy or the uniform one) followed by random MDPs.
std::vector<std::pair<FiniteMdp, Policy>> test_mdps(const ExperimentConfig& c, CounterRng& rng,
                                                    int random_count) {
  std::vector<std::pair<FiniteMdp, Policy>> out;
  if (c.mdp) {
    MdpDocument doc = load_mdp(*c.mdp);
    Policy pol = doc.policy ? *doc.policy
                            : Policy::uniform(doc.mdp.num_states(), doc.mdp.num_actions());
    out.emplace_back(std::move(doc.mdp), std::move(pol));
  }
  for (int i = 0; i < random_count; ++i) {
    const Index d = 2 + static_cast<Index>(rng.below(5));
    const Index m = 1 + static_cast<Index>(rng.below(3));
    const int n = static_cast<int>(rng.below(9));
    FiniteMdp mdp = random_mdp(rng, d, m, n);
    Policy pol = random_policy(rng, d, m);
    out.emplace_back(std::move(mdp), std::move(pol));
  }
  return out;
}

double alpha_limit(const ExperimentConfig&, CounterRng& rng) {
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Index d = kSizes[i % 3];
    const Vector p = rng.dirichlet(d);
    const Vector q = rng.dirichlet(d);
    const double kl = kl_divergence(p, q);
    const double near = alpha_divergence(p, q, -1.0 + 1e-7);
    worst = std::max(worst, std::abs(near - kl) / std::max(1.0, kl));
  }
  return worst;
}

double geodesic_velocity_check(const ExperimentConfig&, CounterRng& rng) {
  double worst = 0.0;
  for (int i = 0; i < 60; ++i) {
    const Index d = kSizes[i % 3];
    const double order = rng.uniform(-3.0, 3.0);
    const GeodesicSpec spec{interior_point(rng, d), interior_point(rng, d), order, i % 2 == 0,
                            false};
    const double t = rng.uniform(0.1, 0.9);
    constexpr double h = 1e-5;
    const Vector fd = (geodesic_eval(spec, t + h) - geodesic_eval(spec, t - h)) / (2.0 * h);
    const Vector v = geodesic_velocity(spec, t);
    worst = std::max(worst, (fd - v).cwiseAbs().maxCoeff() / std::max(1.0, v.cwiseAbs().maxCoeff()));
  }
  return worst;
}

double alignment_alpha(const ExperimentConfig&, CounterRng& rng) {
  const double alphas[] = {-3.0, -1.0, -0.5, 0.0, 0.5, 1.0, 3.0};
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Index d = kSizes[i % 3];
    const double alpha = alphas[i % 7];
    const Vector p = interior_point(rng, d);
    const Vector q = interior_point(rng, d);
    const double cos = geodetic_alignment(p, q, Generator::alpha_divergence(alpha), alpha);
    worst = std::max(worst, 1.0 - std::abs(cos));
  }
  return worst;
}

double alignment_renyi(const ExperimentConfig&, CounterRng& rng) {
  const double lambdas[] = {0.25, 0.5, 0.75, 2.0};
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Index d = kSizes[i % 3];
    const double lambda = lambdas[i % 4];
    const Vector p = interior_point(rng, d);
    const Vector q = interior_point(rng, d);
    const Vector grad = numeric_metric_gradient(
        [&](const Vector& x) { return renyi_divergence(p, x, lambda); }, q);
    const double cos = geodetic_alignment(p, q, grad, renyi_matching_alpha(lambda));
    worst = std::max(worst, 1.0 - std::abs(cos));
  }
  return worst;
}

double alignment_outside_family(const ExperimentConfig&, CounterRng& rng) {
  // e^(x-1) - x has f''(1) = 1 and f'''(1) = 1, so its own connection has order 5.
  const Generator f = Generator::custom(
      "exp(x-1) - x", [](double x) { return std::exp(x - 1.0) - x; },
      [](double x) { return std::exp(x - 1.0) - 1.0; }, 1.0, Curvature::convex);
  double best = 1.0;
  for (int i = 0; i < 100; ++i) {
    const Index d = kSizes[i % 3];
    const Vector p = rng.dirichlet(d) * 0.5 + Vector::Constant(d, 0.5 / static_cast<double>(d));
    const Vector q = rng.dirichlet(d) * 0.5 + Vector::Constant(d, 0.5 / static_cast<double>(d));
    best = std::min(best, std::abs(geodetic_alignment(p, q, f, 5.0)));
  }
  return best;
}

double entropy_exact(const ExperimentConfig&, CounterRng& rng) {
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Distribution p(rng.dirichlet(kSizes[i % 3]));
    double total = 0.0;
    for (Index s = 0; s < p.size(); ++s) {
      total += p[s] * alpha_information(p, s, -1.0);
    }
    worst = std::max(worst, std::abs(total - shannon_entropy(p)));
  }
  return worst;
}

double entropy_limit(const ExperimentConfig&, CounterRng& rng) {
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Distribution p(interior_point(rng, kSizes[i % 3]));
    double total = 0.0;
    for (Index s = 0; s < p.size(); ++s) {
      total += p[s] * alpha_information(p, s, -1.0 + 1e-5);
    }
    worst = std::max(worst, std::abs(total - shannon_entropy(p)));
  }
  return worst;
}

double count_identity(const ExperimentConfig&, CounterRng& rng) {
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Index d = 2 + static_cast<Index>(rng.below(8));
    std::vector<std::int64_t> counts(static_cast<std::size_t>(d));
    std::int64_t total = 0;
    for (auto& c : counts) {
      c = 1 + static_cast<std::int64_t>(rng.below(200));
      total += c;
    }
    const CountBonus b = count_bonus_identity(counts, total);
    worst = std::max(worst, (b.from_occupancy - b.from_counts).cwiseAbs().maxCoeff());
  }
  return worst;
}

double augmented_chain(const ExperimentConfig& c, CounterRng& rng) {
  double worst = 0.0;
  for (const auto& [mdp, pol] : test_mdps(c, rng, 20)) {
    const StationaryResult st = augmented_stationary(mdp, pol);
    const Occupancy occ = occupancy(mdp, pol);
    worst = std::max(worst, (st.marginal.weights() - occ.dist.weights()).cwiseAbs().maxCoeff());
    worst = std::max(worst, st.residual);
  }
  return worst;
}

double stationary_uniqueness(const ExperimentConfig& c, CounterRng& rng) {
  double worst = 0.0;
  for (const auto& [mdp, pol] : test_mdps(c, rng, 5)) {
    const Index size = mdp.num_states() * (mdp.horizon() + 1);
    const Vector reference = augmented_stationary(mdp, pol).augmented;
    for (int i = 0; i < 10; ++i) {
      const Vector other = augmented_stationary(mdp, pol, rng.dirichlet(size)).augmented;
      worst = std::max(worst, l1_distance(reference, other));
    }
  }
  return worst;
}

double return_identity(const ExperimentConfig& c, CounterRng& rng) {
  double worst = 0.0;
  int index = 0;
  for (const auto& [mdp, pol] : test_mdps(c, rng, 20)) {
    const double exact = occupancy_return(occupancy(mdp, pol), mdp.reward());
    const ReturnEstimate est = rollout_return(mdp, pol, c.episodes, rng.split(index++)());
    const double diff = std::abs(exact - est.mean);
    worst = std::max(worst, est.standard_error > 0.0 ? diff / est.standard_error
                                                     : (diff > 1e-9 ? 1e300 : 0.0));
  }
  return worst;
}

double three(const ExperimentConfig&) { return 3.0; }

DpiBatteryReport battery(const ExperimentConfig& c, CounterRng& rng) {
  DpiBatteryOptions options;
  options.trials = c.trials;
  return dpi_battery(rng(), options);
}

double dpi_min_gap(const ExperimentConfig& c, CounterRng& rng) {
  return std::max(0.0, -battery(c, rng).min_gap);
}

double dpi_equality(const ExperimentConfig& c, CounterRng& rng) {
  return static_cast<double>(battery(c, rng).equality_mismatches);
}

double zero(const ExperimentConfig&) { return 0.0; }

double dpi_convex(const ExperimentConfig& c, CounterRng& rng) {
  const auto report = battery(c, rng);
  return report.convex_witness ? report.convex_witness->gap
                               : std::numeric_limits<double>::infinity();
}

double minus_1e_6(const ExperimentConfig&) { return -1e-6; }

std::vector<OptimaProblem> optima_grid(CounterRng& rng) {
  std::vector<OptimaProblem> out;
  for (double alpha : {-1.0, -0.5, 0.0, 0.5}) {
    for (double beta : {0.1, 1.0, 10.0}) {
      for (int i = 0; i < 10; ++i) {
        const Index d = 2 + static_cast<Index>(rng.below(7));
        out.push_back({random_reward(rng, d), alpha, beta, 0});
      }
    }
  }
  return out;
}

double optima_equivalence(const ExperimentConfig& c, CounterRng& rng) {
  double worst = 0.0;
  for (const OptimaProblem& prob : optima_grid(rng)) {
    const Distribution closed = closed_form_optimum(prob).point;
    const Distribution numeric = numerical_optimum(prob, 1e-12, rng()).point;
    worst = std::max(worst, l1_distance(closed.weights(), numeric.weights()));
  }
  (void)c;
  return worst;
}

double optima_gibbs(const ExperimentConfig&, CounterRng& rng) {
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const Index d = 2 + static_cast<Index>(rng.below(7));
    const OptimaProblem prob{random_reward(rng, d), -1.0, rng.uniform(0.1, 10.0), 0};
    Vector gibbs = (prob.reward / prob.beta).array().exp().matrix();
    gibbs /= gibbs.sum();
    const Distribution numeric = numerical_optimum(prob, 1e-12, rng()).point;
    worst = std::max(worst, l1_distance(numeric.weights(), gibbs));
  }
  return worst;
}

double optima_divergence_min(const ExperimentConfig&, CounterRng& rng) {
  double worst = 0.0;
  for (const OptimaProblem& prob : optima_grid(rng)) {
    worst = std::max(worst, divergence_min_equivalence(prob).distance);
  }
  return worst;
}

double optima_orthogonality(const ExperimentConfig&, CounterRng& rng) {
  double worst = 0.0;
  for (const OptimaProblem& prob : optima_grid(rng)) {
    worst = std::max(worst, projection_orthogonality(prob));
  }
  return worst;
}

double optima_beta_geodesic(const ExperimentConfig&, CounterRng& rng) {
  double worst = 0.0;
  for (double alpha : {-1.0, -0.5, 0.0, 0.5}) {
    for (int i = 0; i < 5; ++i) {
      const Index d = 2 + static_cast<Index>(rng.below(5));
      const BetaSweep sweep =
          beta_sweep({random_reward(rng, d), alpha, 1.0, 0}, {0.1, 0.3, 1.0, 3.0, 10.0});
      worst = std::max(worst, sweep.max_residual);
    }
  }
  return worst;
}

double concavity_mixture(const ExperimentConfig&, CounterRng& rng) {
  double worst = 0.0;
  for (double beta : {0.0, 0.1, 1.0, 10.0, 1000.0}) {
    const Index d = 3 + static_cast<Index>(rng.below(4));
    worst = std::max(worst,
                     geodesic_concavity_check(random_reward(rng, d), -1.0, beta, 50, 21, 0, rng()));
  }
  return worst;
}

double concavity_large_beta(const ExperimentConfig&, CounterRng& rng) {
  double worst = 0.0;
  for (double alpha : {-0.5, 0.0, 0.5}) {
    const Index d = 3 + static_cast<Index>(rng.below(4));
    const int n = static_cast<int>(rng.below(4));
    const Vector r = random_reward(rng, d);
    const double beta = 1e3 * r.cwiseAbs().maxCoeff() * (n + 1);
    worst = std::max(worst, geodesic_concavity_check(r, alpha, beta, 100, 21, n, rng()));
  }
  return worst;
}

SoftmaxPolicy random_logits(CounterRng& rng, Index d, Index m) {
  Matrix logits(d, m);
  for (Index s = 0; s < d; ++s) {
    for (Index a = 0; a < m; ++a) {
      logits(s, a) = rng.normal();
    }
  }
  return SoftmaxPolicy(std::move(logits));
}

double policy_jacobian(const ExperimentConfig&, CounterRng& rng) {
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const Index d = 2 + static_cast<Index>(rng.below(5));
    const Index m = 1 + static_cast<Index>(rng.below(3));
    const FiniteMdp mdp = random_mdp(rng, d, m, 1 + static_cast<int>(rng.below(8)));
    worst = std::max(worst, jacobian_relative_error(mdp, random_logits(rng, d, m)));
  }
  return worst;
}

double policy_metric_psd(const ExperimentConfig&, CounterRng& rng) {
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const Index d = 2 + static_cast<Index>(rng.below(5));
    const Index m = 1 + static_cast<Index>(rng.below(3));
    const FiniteMdp mdp = random_mdp(rng, d, m, 1 + static_cast<int>(rng.below(8)));
    const Matrix g = pullback_metric(mdp, random_logits(rng, d, m), Generator::alpha_information(0.0));
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(g);
    worst = std::max(worst, std::max(0.0, -eig.eigenvalues().minCoeff()));
    worst = std::max(worst, (g - g.transpose()).cwiseAbs().maxCoeff());
  }
  return worst;
}

double policy_teleport(const ExperimentConfig&, CounterRng& rng) {
  constexpr Index d = 6;
  constexpr int n = 8;
  const Vector r = random_reward(rng, d, 0.0, 1.0);
  const RewardSpec spec{r, 1.0, Generator::alpha_information(-1.0), false};
  const TeleportOptimum oracle = teleport_optimum(spec, n);
  AscentOptions options;
  options.max_iterations = 2000;
  options.target = oracle.objective - 1e-4;
  const AscentResult result =
      run_ascent(teleport_mdp(d, n).with_reward(r), random_logits(rng, d, d), spec, options);
  return std::max(0.0, oracle.objective - result.final_state.objective);
}

double knn_consistency(const ExperimentConfig& c, CounterRng& rng) {
  std::vector<Index> counts{100, 1000, 10'000};
  const auto report =
      estimator_consistency_report(SyntheticSource::uniform_box, 1, counts, rng());
  int inversions = 0;
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    if (!(report.rows[i].mean_abs_log_error < report.rows[i - 1].mean_abs_log_error)) {
      ++inversions;
    }
  }
  (void)c;
  return inversions;
}

double one(const ExperimentConfig&) { return 1.0; }

double knn_interior(const ExperimentConfig&, CounterRng&) {
  constexpr Index n = 10'000;
  Matrix grid(n, 1);
  for (Index i = 0; i < n; ++i) {
    grid(i, 0) = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
  }
  const SampleSet samples(std::move(grid));
  double worst = 0.0;
  for (int i = 1; i < 20; ++i) {
    const Vector query = Vector::Constant(1, 0.2 + 0.6 * i / 20.0);
    const double est = knn_density(samples, query, default_neighbours(n)).density;
    worst = std::max(worst, std::abs(est - 1.0));
  }
  return worst;
}

double quarter(const ExperimentConfig&) { return 0.25; }
double just_below_one(const ExperimentConfig&) { return 1.0 - 1e-3; }

const Check kChecks[] = {
    {"concavity.large_beta", "the regularized objective is alpha-concave for alpha in (-1, 1) and large beta",
     fixed_1e_9, concavity_large_beta},
    {"concavity.mixture", "the regularized objective is concave along mixtures for alpha = -1", fixed_1e_9,
     concavity_mixture},
    {"dpi.convex_witness", "dropping concavity breaks the data processing inequality", minus_1e_6,
     dpi_convex},
    {"dpi.equality", "equality holds iff the statistic is sufficient", zero, dpi_equality},
    {"dpi.min_gap", "invariant rewards satisfy the data processing inequality", fixed_1e_12,
     dpi_min_gap},
    {"geometry.alignment_alpha", "alpha-divergences are geodetic", fixed_1e_8, alignment_alpha},
    {"geometry.alignment_outside_family", "no generator outside the alpha family is geodetic",
     just_below_one, alignment_outside_family},
    {"geometry.alignment_renyi", "Renyi divergences are geodetic", fixed_1e_8, alignment_renyi},
    {"geometry.alpha_limit", "alpha-divergence interpolates KL at alpha = -1", fixed_1e_5,
     alpha_limit},
    {"geometry.geodesic_velocity", "alpha-geodesics are affine in power coordinates", fixed_1e_6,
     geodesic_velocity_check},
    {"information.count_identity", "0-information of visit counts is a square-root count bonus",
     fixed_1e_12, count_identity},
    {"information.entropy_exact", "expected (-1)-information is the Shannon entropy", fixed_1e_12,
     entropy_exact},
    {"information.entropy_limit", "alpha-information recovers entropy as alpha -> -1", fixed_1e_4,
     entropy_limit},
    {"knn.consistency", "k-nearest-neighbour occupancy estimates are consistent", one,
     knn_consistency},
    {"knn.interior_accuracy", "k-nearest-neighbour density estimates are accurate in the interior", quarter,
     knn_interior},
    {"occupancy.augmented_chain", "occupancy is the invariant measure of the counter chain",
     fixed_1e_10, augmented_chain},
    {"occupancy.return_identity", "return equals (n+1) times the occupancy-weighted reward", three,
     return_identity},
    {"occupancy.uniqueness", "occupancy converges to a unique probability measure", fixed_1e_8,
     stationary_uniqueness},
    {"optima.beta_geodesic", "optima trace an (alpha+2)-geodesic as beta varies", geodesic_tol,
     optima_beta_geodesic},
    {"optima.divergence_min", "optima minimize the divergence to uniform at fixed return",
     optimum_tol, optima_divergence_min},
    {"optima.gibbs", "alpha = -1 optima are Gibbs distributions", fixed_1e_8, optima_gibbs},
    {"optima.oracle_equivalence", "optima have a closed form", optimum_tol,
     optima_equivalence},
    {"optima.projection_orthogonality", "alpha-projections from the uniform occupancy",
     fixed_1e_6, optima_orthogonality},
    {"policy.jacobian", "the occupancy map of the policy is smooth", gradient_tol,
     policy_jacobian},
    {"policy.metric_psd", "pullback of the Fisher-Rao tensor to policy space", fixed_1e_10,
     policy_metric_psd},
    {"policy.teleport_ascent", "natural occupancy gradient ascent", fixed_1e_4, policy_teleport},
};

// FNV-1a, so a check's stream survives edits to the registry.
std::uint64_t name_key(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : name) {
    h = (h ^ ch) * 0x100000001b3ULL;
  }
  return h;
}

bool selected(const std::string& name, const std::string& only) {
  if (only.empty() || name == only) {
    return true;
  }
  return name.compare(0, name.find('.'), only) == 0 && name.find('.') == only.size();
}

}  // namespace

std::vector<std::string> verify_check_names() {
  std::vector<std::string> out;
  for (const Check& c : kChecks) {
    out.emplace_back(c.name);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<CheckResult> verify_suite(const ExperimentConfig& config) {
  std::vector<std::size_t> chosen;
  for (std::size_t i = 0; i < std::size(kChecks); ++i) {
    if (selected(kChecks[i].name, config.only)) {
      chosen.push_back(i);
    }
  }
  std::vector<CheckResult> results(chosen.size());
  const CounterRng root(config.seed);
  parallel_for(chosen.size(), [&](std::size_t j) {
    const Check& check = kChecks[chosen[j]];
    CheckResult& out = results[j];
    out.name = check.name;
    out.paper_anchor = check.anchor;
    out.tolerance = check.tolerance(config);
    // Streams are keyed by check name, so results do not depend on filtering,
    // scheduling or registry order.
    CounterRng rng = root.split(name_key(check.name));
    try {
      out.residual = check.residual(config, rng);
      out.pass = out.residual <= out.tolerance;
    } catch (const std::exception& e) {
      out.residual = std::numeric_limits<double>::quiet_NaN();
      out.pass = false;
      out.error = e.what();
    }
  });
  std::sort(results.begin(), results.end(),
            [](const CheckResult& a, const CheckResult& b) { return a.name < b.name; });
  return results;
}

std::string verify_report_json(std::uint64_t seed, const std::vector<CheckResult>& results) {
  nlohmann::ordered_json doc;
  doc["seed"] = seed;
  std::size_t passed = 0;
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const CheckResult& r : results) {
    nlohmann::ordered_json entry;
    entry["name"] = r.name;
    entry["paper_anchor"] = r.paper_anchor;
    entry["residual"] = r.residual;
    entry["tolerance"] = r.tolerance;
    entry["pass"] = r.pass;
    if (!r.error.empty()) {
      entry["error"] = r.error;
    }
    checks.push_back(std::move(entry));
    passed += r.pass ? 1 : 0;
  }
  doc["passed"] = passed;
  doc["failed"] = results.size() - passed;
  doc["checks"] = std::move(checks);
  return doc.dump(2) + "\n";
}

}  // namespace cgeom
