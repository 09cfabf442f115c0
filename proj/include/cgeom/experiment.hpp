#pragma once

#include "cgeom/core.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace cgeom {

/// Invalid configuration, reported with the offending field name.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

enum class Mode { occupancy, optima, sweep, natgrad, dpi, knn, verify };

Mode parse_mode(const std::string& name);
std::string mode_name(Mode mode);

struct ExperimentConfig {
  Mode mode = Mode::verify;
  std::uint64_t seed = 0;
  /// MDP document; relative paths in a config file resolve against the file's directory.
  std::optional<std::filesystem::path> mdp;
  /// Inline reward vector, used when no MDP is given (or to override its reward).
  std::optional<std::vector<double>> reward;
  std::optional<int> horizon;
  std::vector<double> alphas;
  std::vector<double> betas;
  double tol_optimum = 1e-6;
  double tol_geodesic = 1e-5;
  double tol_gradient = 1e-5;
  std::filesystem::path out = ".";
  std::int64_t episodes = 50'000;
  std::int64_t trials = 1000;
  std::vector<std::int64_t> samples{100, 1000, 10'000};
  std::int64_t dimension = 1;
  std::string generator = "uniform_box";
  std::optional<std::filesystem::path> samples_csv;
  /// natgrad: run on teleport_mdp(teleport_states, horizon) instead of an MDP file.
  std::int64_t teleport_states = 0;
  std::int64_t iterations = 2000;
  std::string method = "natural";
  std::optional<double> damping;
  /// verify: keep only checks whose group (text before the first '.') or full name matches.
  std::string only;
};

/// Reads a flat YAML mapping of the ExperimentConfig fields into `config`
/// (keys: mode, seed, mdp, reward, horizon, alpha, beta, tol_optimum,
/// tol_geodesic, tol_gradient, out, episodes, trials, samples, dimension,
/// generator, samples_csv, teleport_states, iterations, method, damping, only).
/// Unknown keys and ill-typed values raise ConfigError.
void merge_config_file(ExperimentConfig& config, const std::filesystem::path& path);

/// Checks that the fields required by the mode are present and in range.
void validate_config(const ExperimentConfig& config);

struct RunOutcome {
  /// 0 when every assertion of the mode passed, 1 otherwise.
  int status = 0;
  std::string summary;
  std::vector<std::string> failures;
  std::vector<std::filesystem::path> files;
};

/// Validates, runs the mode and writes `<mode>_<seed>.csv|json` into `config.out`.
/// Throws ConfigError (or InvalidArgument for a bad MDP file) before any output is written.
RunOutcome run(const ExperimentConfig& config);

struct CheckResult {
  std::string name;
  std::string paper_anchor;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string error;
};

/// Runs the verification checks on a worker pool and returns them sorted by name.
/// A check that throws is recorded as failed with the exception text.
std::vector<CheckResult> verify_suite(const ExperimentConfig& config);

/// Names of all verification checks, sorted.
std::vector<std::string> verify_check_names();

std::string verify_report_json(std::uint64_t seed, const std::vector<CheckResult>& results);

/// Worker count: CURIOSITY_GEOM_THREADS when set to a positive integer, else the
/// hardware concurrency, never more than `tasks`.
unsigned worker_count(std::size_t tasks);

/// Runs tasks[0..n) on worker_count(n) threads. Exceptions propagate from the
/// lowest failing index after all tasks finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& task);

}  // namespace cgeom
