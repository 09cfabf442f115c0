#include "cgeom/experiment.hpp"
#include "cgeom/io_util.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace cgeom;
namespace fs = std::filesystem;

#ifndef CGEOM_SOURCE_DIR
#error "CGEOM_SOURCE_DIR must point at the project root"
#endif

namespace {

const fs::path kRoot = CGEOM_SOURCE_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class ScratchDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("cgeom_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

}  // namespace

TEST(FormatNumber, RoundTripsAndSpecials) {
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
  EXPECT_EQ(format_number(NAN), "nan");
  EXPECT_EQ(format_number(-INFINITY), "-inf");
  EXPECT_EQ(format_number(2.0), "2");
}

TEST(Mode, NamesRoundTrip) {
  for (const char* name : {"occupancy", "optima", "sweep", "natgrad", "dpi", "knn", "verify"}) {
    EXPECT_EQ(mode_name(parse_mode(name)), name);
  }
  EXPECT_THROW(parse_mode("train"), ConfigError);
}

TEST_F(ScratchDir, ConfigFileFieldsAndRelativePaths) {
  std::ofstream(dir_ / "c.yaml") << "mode: sweep\nseed: 9\nreward: [0, 1]\nalpha: -1\n"
                                    "beta: [0.1, 1]\nmdp: sub/m.json\nout: results\n";
  ExperimentConfig c;
  merge_config_file(c, dir_ / "c.yaml");
  EXPECT_EQ(c.mode, Mode::sweep);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.alphas, std::vector<double>{-1.0});
  EXPECT_EQ(c.betas.size(), 2u);
  EXPECT_EQ(*c.mdp, dir_ / "sub/m.json");
  EXPECT_EQ(c.out, dir_ / "results");
}

TEST_F(ScratchDir, ConfigErrorsNameTheField) {
  auto message = [&](const std::string& text) {
    std::ofstream(dir_ / "c.yaml") << text;
    try {
      ExperimentConfig c;
      merge_config_file(c, dir_ / "c.yaml");
      validate_config(c);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(message("colour: red\n").find("'colour'"), std::string::npos);
  EXPECT_NE(message("seed: abc\n").find("'seed'"), std::string::npos);
  EXPECT_NE(message("mode: optima\nreward: [1, 0]\nbeta: 1\n").find("'alpha'"), std::string::npos);
  EXPECT_NE(message("mode: optima\nalpha: 0\nbeta: 1\n").find("'reward'"), std::string::npos);
  EXPECT_NE(message("mode: occupancy\n").find("'mdp'"), std::string::npos);
  EXPECT_NE(message("mode: sweep\nreward: [1]\nalpha: 1\nbeta: 1\n").find("'alpha'"),
            std::string::npos);
  EXPECT_NE(message("mode: verify\nonly: nothing\n").find("'only'"), std::string::npos);
  EXPECT_NE(message("tol_optimum: -1\n").find("'tol_optimum'"), std::string::npos);
  EXPECT_NE(message("[1, 2]\n").find("mapping"), std::string::npos);
  EXPECT_EQ(message("mode: verify\nonly: dpi\n"), "");
}

TEST_F(ScratchDir, SweepWritesOneRowPerCell) {
  ExperimentConfig c;
  c.mode = Mode::sweep;
  c.reward = std::vector<double>{0.0, 0.25, 0.5, 1.0};
  c.alphas = {-1.0, 0.0};
  c.betas = {0.1, 1.0, 10.0};
  c.out = dir_;
  const RunOutcome out = run(c);
  EXPECT_EQ(out.status, 0);
  const std::string csv = slurp(dir_ / "sweep_0.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 25);
  EXPECT_EQ(csv.find('\r'), std::string::npos);
  EXPECT_NE(out.summary.find("failed=0"), std::string::npos);
}

TEST_F(ScratchDir, OutputsAreByteIdentical) {
  ExperimentConfig c;
  c.mode = Mode::optima;
  c.reward = std::vector<double>{0.3, -0.2, 0.9};
  c.alphas = {-1.0, 0.5};
  c.betas = {0.5, 2.0};
  c.seed = 4;
  c.out = dir_ / "a";
  run(c);
  c.out = dir_ / "b";
  run(c);
  EXPECT_EQ(slurp(dir_ / "a/optima_4.csv"), slurp(dir_ / "b/optima_4.csv"));

  c.mode = Mode::dpi;
  c.trials = 200;
  c.out = dir_ / "a";
  run(c);
  c.out = dir_ / "b";
  run(c);
  EXPECT_EQ(slurp(dir_ / "a/dpi_4.json"), slurp(dir_ / "b/dpi_4.json"));
}

TEST_F(ScratchDir, ThreadCountDoesNotChangeOutput) {
  ExperimentConfig c;
  c.mode = Mode::verify;
  c.only = "optima";
  c.out = dir_ / "one";
  setenv("CURIOSITY_GEOM_THREADS", "1", 1);
  run(c);
  c.out = dir_ / "four";
  setenv("CURIOSITY_GEOM_THREADS", "4", 1);
  run(c);
  unsetenv("CURIOSITY_GEOM_THREADS");
  EXPECT_EQ(slurp(dir_ / "one/verify_0.json"), slurp(dir_ / "four/verify_0.json"));
}

TEST_F(ScratchDir, VerifyFilterKeepsGroup) {
  ExperimentConfig c;
  c.mode = Mode::verify;
  c.only = "dpi";
  c.out = dir_;
  EXPECT_EQ(run(c).status, 0);
  const auto doc = nlohmann::json::parse(slurp(dir_ / "verify_0.json"));
  ASSERT_EQ(doc["checks"].size(), 3u);
  for (const auto& check : doc["checks"]) {
    EXPECT_EQ(check["name"].get<std::string>().rfind("dpi.", 0), 0u);
    EXPECT_TRUE(check.contains("paper_anchor"));
    EXPECT_TRUE(check["pass"].get<bool>());
  }
}

TEST_F(ScratchDir, VerifyOnBundledSwapMdp) {
  ExperimentConfig c;
  merge_config_file(c, kRoot / "configs/verify_swap.yaml");
  c.out = dir_;
  const RunOutcome out = run(c);
  for (const auto& f : out.failures) ADD_FAILURE() << f;
  EXPECT_EQ(out.status, 0);
  const auto names = verify_check_names();
  const auto doc = nlohmann::json::parse(slurp(dir_ / "verify_0.json"));
  ASSERT_EQ(doc["checks"].size(), names.size());
  for (std::size_t i = 0; i < names.size(); ++i) EXPECT_EQ(doc["checks"][i]["name"], names[i]);
}

TEST_F(ScratchDir, CorruptedMdpRejectedBeforeOutput) {
  ExperimentConfig c;
  c.mode = Mode::verify;
  c.mdp = kRoot / "data/corrupted_mdp.json";
  c.out = dir_;
  EXPECT_THROW(
      {
        try {
          run(c);
        } catch (const InvalidArgument& e) {
          EXPECT_NE(std::string(e.what()).find("transition[1][0]"), std::string::npos);
          throw;
        }
      },
      InvalidArgument);
  EXPECT_TRUE(fs::is_empty(dir_));
}

TEST_F(ScratchDir, AssertionFailureNamesCheck) {
  ExperimentConfig c;
  c.mode = Mode::optima;
  c.reward = std::vector<double>{0.3, -0.2, 0.9};
  c.alphas = {0.0};
  c.betas = {1.0};
  c.tol_optimum = 1e-300;
  c.out = dir_;
  const RunOutcome out = run(c);
  // Exact agreement is possible, so only check the failure shape when it occurs.
  if (out.status == 1) {
    ASSERT_FALSE(out.failures.empty());
    EXPECT_NE(out.failures[0].find("optimum alpha=0"), std::string::npos);
  }
  c.mode = Mode::natgrad;
  c.teleport_states = 3;
  c.horizon = 2;
  c.iterations = 5;
  c.tol_optimum = 1e-6;
  c.tol_gradient = 1e-300;
  const RunOutcome ng = run(c);
  EXPECT_EQ(ng.status, 1);
  EXPECT_NE(ng.failures.at(0).find("occupancy jacobian"), std::string::npos);
}

TEST_F(ScratchDir, AtomicWriteLeavesNoTemporary) {
  write_atomically(dir_ / "nested/out.txt", "hello\n");
  EXPECT_EQ(slurp(dir_ / "nested/out.txt"), "hello\n");
  EXPECT_EQ(std::distance(fs::directory_iterator(dir_ / "nested"), fs::directory_iterator()), 1);
}

TEST(Pool, RunsEveryTaskAndPropagatesErrors) {
  std::vector<int> hits(100, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  EXPECT_EQ(std::count(hits.begin(), hits.end(), 1), 100);
  EXPECT_THROW(parallel_for(10, [](std::size_t i) {
                 if (i == 7) throw std::runtime_error("boom");
               }),
               std::runtime_error);
  EXPECT_EQ(worker_count(1), 1u);
}
