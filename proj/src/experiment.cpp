#include "cgeom/experiment.hpp"

#include "cgeom/density.hpp"
#include "cgeom/dpi.hpp"
#include "cgeom/io_util.hpp"
#include "cgeom/mdp.hpp"
#include "cgeom/mdp_io.hpp"
#include "cgeom/optima.hpp"
#include "cgeom/policy_optim.hpp"
#include "cgeom/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace cgeom {

unsigned worker_count(std::size_t tasks) {
  unsigned n = 0;
  if (const char* env = std::getenv("CURIOSITY_GEOM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) {
      n = static_cast<unsigned>(v);
    }
  }
  if (n == 0) {
    n = std::max(1u, std::thread::hardware_concurrency());
  }
  return static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(n, tasks)));
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& task) {
  if (n == 0) {
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned workers = worker_count(n);
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) {
    pool.emplace_back(worker);
  }
  worker();
  for (auto& t : pool) {
    t.join();
  }
  for (const auto& e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
}

namespace {

struct Tally {
  std::vector<std::string> failures;
  std::size_t passed = 0;
  double max_residual = 0.0;

  void check(const std::string& name, double residual, double tolerance) {
    max_residual = std::max(max_residual, residual);
    if (residual <= tolerance) {
      ++passed;
    } else {
      failures.push_back(name + ": residual " + format_number(residual) + " > " +
                         format_number(tolerance));
    }
  }
};

std::filesystem::path output_path(const ExperimentConfig& c, const char* ext) {
  return c.out / (mode_name(c.mode) + "_" + std::to_string(c.seed) + ext);
}

struct LoadedMdp {
  FiniteMdp mdp;
  Policy policy;
};

LoadedMdp load_configured_mdp(const ExperimentConfig& c) {
  MdpDocument doc = load_mdp(*c.mdp);
  Policy pol = doc.policy ? *doc.policy
                          : Policy::uniform(doc.mdp.num_states(), doc.mdp.num_actions());
  FiniteMdp mdp = std::move(doc.mdp);
  if (c.reward) {
    if (static_cast<Index>(c.reward->size()) != mdp.num_states()) {
      throw ConfigError("config field 'reward': length " + std::to_string(c.reward->size()) +
                        " does not match the MDP's " + std::to_string(mdp.num_states()) +
                        " states");
    }
    mdp = mdp.with_reward(Eigen::Map<const Vector>(c.reward->data(), mdp.num_states()));
  }
  return {std::move(mdp), std::move(pol)};
}

// Reward and horizon for the occupancy-space modes.
std::pair<Vector, int> reward_and_horizon(const ExperimentConfig& c) {
  if (c.reward) {
    const Vector r = Eigen::Map<const Vector>(c.reward->data(), static_cast<Index>(c.reward->size()));
    int n = c.horizon.value_or(0);
    if (c.mdp && !c.horizon) {
      n = load_configured_mdp(c).mdp.horizon();
    }
    return {r, n};
  }
  const LoadedMdp loaded = load_configured_mdp(c);
  return {loaded.mdp.reward(), c.horizon.value_or(loaded.mdp.horizon())};
}

RunOutcome run_occupancy(const ExperimentConfig& c, Tally& tally) {
  const LoadedMdp m = load_configured_mdp(c);
  const Occupancy occ = occupancy(m.mdp, m.policy);
  const StationaryResult st = augmented_stationary(m.mdp, m.policy);
  const double exact = occupancy_return(occ, m.mdp.reward());
  const ReturnEstimate est = rollout_return(m.mdp, m.policy, c.episodes, c.seed);

  const double chain_gap = (st.marginal.weights() - occ.dist.weights()).cwiseAbs().maxCoeff();
  tally.check("augmented chain marginal", chain_gap, 1e-10);
  const double z = est.standard_error > 0.0 ? std::abs(exact - est.mean) / est.standard_error
                                            : (std::abs(exact - est.mean) > 1e-9 ? 1e300 : 0.0);
  tally.check("return identity (standard errors)", z, 3.0);

  nlohmann::ordered_json doc;
  doc["seed"] = c.seed;
  doc["states"] = m.mdp.num_states();
  doc["horizon"] = m.mdp.horizon();
  doc["occupancy"] = std::vector<double>(occ.dist.weights().begin(), occ.dist.weights().end());
  doc["augmented_marginal"] =
      std::vector<double>(st.marginal.weights().begin(), st.marginal.weights().end());
  doc["augmented_residual"] = st.residual;
  doc["marginal_gap"] = chain_gap;
  doc["occupancy_return"] = exact;
  doc["rollout_mean"] = est.mean;
  doc["rollout_standard_error"] = est.standard_error;
  doc["episodes"] = c.episodes;
  const auto path = output_path(c, ".json");
  write_atomically(path, doc.dump(2) + "\n");
  return {0, "", {}, {path}};
}

RunOutcome run_optima(const ExperimentConfig& c, Tally& tally) {
  const auto [reward, horizon] = reward_and_horizon(c);
  struct Cell {
    double alpha, beta;
    Vector closed, numeric;
    double distance = 0.0;
  };
  std::vector<Cell> cells;
  for (double a : c.alphas) {
    for (double b : c.betas) {
      cells.push_back({a, b, {}, {}});
    }
  }
  parallel_for(cells.size(), [&](std::size_t i) {
    Cell& cell = cells[i];
    const OptimaProblem prob{reward, cell.alpha, cell.beta, horizon};
    cell.closed = closed_form_optimum(prob).point.weights();
    cell.numeric = numerical_optimum(prob, 1e-12, CounterRng(c.seed).split(i)()).point.weights();
    cell.distance = l1_distance(cell.closed, cell.numeric);
  });
  std::ostringstream csv;
  csv << "alpha,beta,state,closed_form,numerical,l1_distance\n";
  for (const Cell& cell : cells) {
    tally.check("optimum alpha=" + format_number(cell.alpha) + " beta=" + format_number(cell.beta),
                cell.distance, c.tol_optimum);
    for (Index s = 0; s < cell.closed.size(); ++s) {
      csv << format_number(cell.alpha) << ',' << format_number(cell.beta) << ',' << s << ','
          << format_number(cell.closed[s]) << ',' << format_number(cell.numeric[s]) << ','
          << format_number(cell.distance) << '\n';
    }
  }
  const auto path = output_path(c, ".csv");
  write_atomically(path, csv.str());
  return {0, "", {}, {path}};
}

RunOutcome run_sweep(const ExperimentConfig& c, Tally& tally) {
  const auto [reward, horizon] = reward_and_horizon(c);
  const std::vector<SweepRow> rows = sweep_table(reward, horizon, c.alphas, c.betas);
  for (const SweepRow& row : rows) {
    if (!std::isnan(row.geodesic_residual) && row.state == 0) {
      tally.check("beta geodesic alpha=" + format_number(row.alpha) + " beta=" +
                      format_number(row.beta),
                  row.geodesic_residual, c.tol_geodesic);
    }
  }
  const auto path = output_path(c, ".csv");
  write_atomically(path, sweep_csv(rows));
  return {0, "", {}, {path}};
}

RunOutcome run_natgrad(const ExperimentConfig& c, Tally& tally) {
  const bool teleport = c.teleport_states > 0;
  FiniteMdp mdp = teleport ? teleport_mdp(c.teleport_states, c.horizon.value_or(0)).with_reward(
                                 Eigen::Map<const Vector>(c.reward->data(), c.teleport_states))
                           : load_configured_mdp(c).mdp;
  const RewardSpec spec{mdp.reward(), c.betas.front(),
                        Generator::alpha_information(c.alphas.front()), false};
  spec.validate();

  CounterRng rng(c.seed);
  Matrix logits(mdp.num_states(), mdp.num_actions());
  for (Index s = 0; s < logits.rows(); ++s) {
    for (Index a = 0; a < logits.cols(); ++a) {
      logits(s, a) = rng.normal();
    }
  }
  const SoftmaxPolicy start(std::move(logits));
  tally.check("occupancy jacobian", jacobian_relative_error(mdp, start), c.tol_gradient);

  AscentOptions options;
  options.method = c.method == "vanilla" ? AscentMethod::vanilla : AscentMethod::natural;
  options.max_iterations = c.iterations;
  options.damping = c.damping;
  const AscentResult result = run_ascent(mdp, start, spec, options);

  double worst_drop = 0.0;
  for (std::size_t i = 1; i < result.trace.size(); ++i) {
    const double prev = result.trace[i - 1].objective;
    const double drop = prev - result.trace[i].objective;
    worst_drop = std::max(worst_drop, drop / std::max(1.0, std::abs(prev)));
  }
  tally.check("monotone objective", worst_drop, 1e-12);
  if (teleport) {
    const TeleportOptimum oracle = teleport_optimum(spec, mdp.horizon());
    tally.check("teleport oracle gap",
                std::max(0.0, oracle.objective - result.final_state.objective), 1e-4);
  }
  const auto path = output_path(c, ".csv");
  write_atomically(path, trace_csv(result.trace));
  return {0, "", {}, {path}};
}

RunOutcome run_dpi(const ExperimentConfig& c, Tally& tally) {
  DpiBatteryOptions options;
  options.trials = c.trials;
  const DpiBatteryReport report = dpi_battery(c.seed, options);
  tally.check("minimum gap", std::max(0.0, -report.min_gap), options.gap_tolerance);
  tally.check("equality mismatches", static_cast<double>(report.equality_mismatches), 0.0);
  tally.check("convex witness",
              report.convex_witness ? report.convex_witness->gap
                                    : std::numeric_limits<double>::infinity(),
              -1e-6);
  const auto path = output_path(c, ".json");
  write_atomically(path, dpi_report_json(report));
  return {0, "", {}, {path}};
}

RunOutcome run_knn(const ExperimentConfig& c, Tally& tally) {
  if (c.samples_csv) {
    const SampleSet samples = read_samples_csv(*c.samples_csv);
    const Index k = default_neighbours(samples.size());
    std::vector<DensityEstimate> estimates(static_cast<std::size_t>(samples.size()));
    parallel_for(estimates.size(), [&](std::size_t i) {
      const Index row = static_cast<Index>(i);
      estimates[i] = knn_density(samples, samples.points().row(row).transpose(), k, row);
    });
    std::ostringstream csv;
    csv << "index,neighbours,density,radius,degenerate\n";
    for (std::size_t i = 0; i < estimates.size(); ++i) {
      csv << i << ',' << k << ',' << format_number(estimates[i].density) << ','
          << format_number(estimates[i].radius) << ',' << (estimates[i].degenerate ? 1 : 0)
          << '\n';
    }
    const auto path = output_path(c, ".csv");
    write_atomically(path, csv.str());
    return {0, "", {}, {path}};
  }
  const SyntheticSource source =
      c.generator == "gaussian" ? SyntheticSource::gaussian : SyntheticSource::uniform_box;
  const std::vector<Index> counts(c.samples.begin(), c.samples.end());
  const ConsistencyReport report =
      estimator_consistency_report(source, c.dimension, counts, c.seed);
  std::vector<double> errors;
  for (const ConsistencyRow& row : report.rows) {
    errors.push_back(row.mean_abs_log_error);
  }
  tally.check("error decreases with sample size", decreasing_with_inversions(errors, 1) ? 0.0 : 1.0,
              0.0);
  const auto path = output_path(c, ".json");
  write_atomically(path, consistency_report_json(report));
  return {0, "", {}, {path}};
}

RunOutcome run_verify(const ExperimentConfig& c, Tally& tally) {
  const std::vector<CheckResult> results = verify_suite(c);
  for (const CheckResult& r : results) {
    tally.max_residual = std::max(tally.max_residual, std::isnan(r.residual) ? 0.0 : r.residual);
    if (r.pass) {
      ++tally.passed;
    } else {
      tally.failures.push_back(r.name + ": " +
                               (r.error.empty() ? "residual " + format_number(r.residual) + " vs " +
                                                      format_number(r.tolerance)
                                                : r.error));
    }
  }
  const auto path = output_path(c, ".json");
  write_atomically(path, verify_report_json(c.seed, results));
  return {0, "", {}, {path}};
}

}  // namespace

RunOutcome run(const ExperimentConfig& config) {
  validate_config(config);
  if (config.mdp) {
    load_mdp(*config.mdp);  // reject a malformed MDP before any work or output
  }
  Tally tally;
  RunOutcome outcome;
  switch (config.mode) {
    case Mode::occupancy: outcome = run_occupancy(config, tally); break;
    case Mode::optima: outcome = run_optima(config, tally); break;
    case Mode::sweep: outcome = run_sweep(config, tally); break;
    case Mode::natgrad: outcome = run_natgrad(config, tally); break;
    case Mode::dpi: outcome = run_dpi(config, tally); break;
    case Mode::knn: outcome = run_knn(config, tally); break;
    case Mode::verify: outcome = run_verify(config, tally); break;
  }
  outcome.failures = tally.failures;
  outcome.status = tally.failures.empty() ? 0 : 1;
  std::ostringstream summary;
  summary << mode_name(config.mode) << " seed=" << config.seed << " passed=" << tally.passed
          << " failed=" << tally.failures.size()
          << " max_residual=" << format_number(tally.max_residual);
  outcome.summary = summary.str();
  return outcome;
}

}  // namespace cgeom
