#include "cgeom/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Information-geometric curiosity experiments"};
  app.name("curiosity-geom");

  std::string mode;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::vector<double> alphas;
  std::vector<double> betas;
  std::string out;
  std::string only;
  std::optional<std::int64_t> threads;

  app.add_option("mode", mode, "occupancy, optima, sweep, natgrad, dpi, knn or verify")
      ->required();
  app.add_option("--config", config_path, "YAML config file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Root seed");
  app.add_option("--alpha", alphas, "Alpha values (replace the config list)")->delimiter(',');
  app.add_option("--beta", betas, "Beta values (replace the config list)")->delimiter(',');
  app.add_option("--out", out, "Output directory");
  app.add_option("--only", only, "verify: run one check or check group");
  app.add_option("--threads", threads, "Worker threads (sets CURIOSITY_GEOM_THREADS)")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    cgeom::ExperimentConfig config;
    if (!config_path.empty()) {
      cgeom::merge_config_file(config, config_path);
    }
    config.mode = cgeom::parse_mode(mode);
    if (seed) config.seed = *seed;
    if (!alphas.empty()) config.alphas = alphas;
    if (!betas.empty()) config.betas = betas;
    if (!out.empty()) config.out = out;
    if (!only.empty()) config.only = only;
    if (threads) setenv("CURIOSITY_GEOM_THREADS", std::to_string(*threads).c_str(), 1);

    const cgeom::RunOutcome outcome = cgeom::run(config);
    for (const auto& file : outcome.files) {
      std::cout << "wrote " << file.string() << '\n';
    }
    for (const auto& failure : outcome.failures) {
      std::cerr << "FAIL " << failure << '\n';
    }
    std::cout << outcome.summary << '\n';
    return outcome.status;
  } catch (const cgeom::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
