#include "cgeom/experiment.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <set>
#include <sstream>

namespace cgeom {

namespace {

[[noreturn]] void field_error(const std::string& field, const std::string& message) {
  throw ConfigError("config field '" + field + "': " + message);
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& field) {
  if (!node.IsScalar()) {
    field_error(field, "expected a single value");
  }
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    field_error(field, "cannot parse '" + node.Scalar() + "'");
  }
}

template <typename T>
std::vector<T> list(const YAML::Node& node, const std::string& field) {
  std::vector<T> out;
  if (node.IsScalar()) {
    out.push_back(scalar<T>(node, field));
    return out;
  }
  if (!node.IsSequence()) {
    field_error(field, "expected a value or a list");
  }
  for (const auto& item : node) {
    out.push_back(scalar<T>(item, field));
  }
  return out;
}

std::filesystem::path relative_to(const std::filesystem::path& base, const std::string& value) {
  std::filesystem::path p(value);
  return p.is_absolute() ? p : base / p;
}

}  // namespace

Mode parse_mode(const std::string& name) {
  static const std::pair<const char*, Mode> kModes[] = {
      {"occupancy", Mode::occupancy}, {"optima", Mode::optima}, {"sweep", Mode::sweep},
      {"natgrad", Mode::natgrad},     {"dpi", Mode::dpi},       {"knn", Mode::knn},
      {"verify", Mode::verify}};
  for (const auto& [key, mode] : kModes) {
    if (name == key) {
      return mode;
    }
  }
  field_error("mode", "unknown mode '" + name +
                          "' (expected occupancy, optima, sweep, natgrad, dpi, knn or verify)");
}

std::string mode_name(Mode mode) {
  switch (mode) {
    case Mode::occupancy: return "occupancy";
    case Mode::optima: return "optima";
    case Mode::sweep: return "sweep";
    case Mode::natgrad: return "natgrad";
    case Mode::dpi: return "dpi";
    case Mode::knn: return "knn";
    case Mode::verify: return "verify";
  }
  return "unknown";
}

void merge_config_file(ExperimentConfig& config, const std::filesystem::path& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path.string());
  } catch (const YAML::BadFile&) {
    throw ConfigError("cannot read config file '" + path.string() + "'");
  } catch (const YAML::Exception& e) {
    throw ConfigError("config file '" + path.string() + "' is not valid YAML: " + e.what());
  }
  if (root.IsNull()) {
    return;
  }
  if (!root.IsMap()) {
    throw ConfigError("config file '" + path.string() + "' must be a key-value mapping");
  }
  const std::filesystem::path base = path.parent_path();
  for (const auto& entry : root) {
    const auto key = entry.first.as<std::string>();
    const YAML::Node& v = entry.second;
    if (key == "mode") {
      config.mode = parse_mode(scalar<std::string>(v, key));
    } else if (key == "seed") {
      config.seed = scalar<std::uint64_t>(v, key);
    } else if (key == "mdp") {
      config.mdp = relative_to(base, scalar<std::string>(v, key));
    } else if (key == "reward") {
      config.reward = list<double>(v, key);
    } else if (key == "horizon") {
      config.horizon = scalar<int>(v, key);
    } else if (key == "alpha") {
      config.alphas = list<double>(v, key);
    } else if (key == "beta") {
      config.betas = list<double>(v, key);
    } else if (key == "tol_optimum") {
      config.tol_optimum = scalar<double>(v, key);
    } else if (key == "tol_geodesic") {
      config.tol_geodesic = scalar<double>(v, key);
    } else if (key == "tol_gradient") {
      config.tol_gradient = scalar<double>(v, key);
    } else if (key == "out") {
      config.out = relative_to(base, scalar<std::string>(v, key));
    } else if (key == "episodes") {
      config.episodes = scalar<std::int64_t>(v, key);
    } else if (key == "trials") {
      config.trials = scalar<std::int64_t>(v, key);
    } else if (key == "samples") {
      config.samples = list<std::int64_t>(v, key);
    } else if (key == "dimension") {
      config.dimension = scalar<std::int64_t>(v, key);
    } else if (key == "generator") {
      config.generator = scalar<std::string>(v, key);
    } else if (key == "samples_csv") {
      config.samples_csv = relative_to(base, scalar<std::string>(v, key));
    } else if (key == "teleport_states") {
      config.teleport_states = scalar<std::int64_t>(v, key);
    } else if (key == "iterations") {
      config.iterations = scalar<std::int64_t>(v, key);
    } else if (key == "method") {
      config.method = scalar<std::string>(v, key);
    } else if (key == "damping") {
      config.damping = scalar<double>(v, key);
    } else if (key == "only") {
      config.only = scalar<std::string>(v, key);
    } else {
      field_error(key, "unknown field");
    }
  }
}

void validate_config(const ExperimentConfig& c) {
  auto positive = [](const char* field, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      field_error(field, "must be a finite positive number");
    }
  };
  positive("tol_optimum", c.tol_optimum);
  positive("tol_geodesic", c.tol_geodesic);
  positive("tol_gradient", c.tol_gradient);
  if (c.horizon && *c.horizon < 0) {
    field_error("horizon", "must be >= 0");
  }
  for (double a : c.alphas) {
    if (!std::isfinite(a)) {
      field_error("alpha", "values must be finite");
    }
  }
  for (double b : c.betas) {
    if (!(b >= 0.0) || !std::isfinite(b)) {
      field_error("beta", "values must be finite and >= 0");
    }
  }
  if (c.reward) {
    if (c.reward->empty()) {
      field_error("reward", "must not be empty");
    }
    for (double r : *c.reward) {
      if (!std::isfinite(r)) {
        field_error("reward", "values must be finite");
      }
    }
  }
  if (c.damping && !(*c.damping >= 0.0)) {
    field_error("damping", "must be >= 0");
  }

  auto need_alpha_beta = [&] {
    if (c.alphas.empty()) {
      field_error("alpha", "required for mode " + mode_name(c.mode));
    }
    if (c.betas.empty()) {
      field_error("beta", "required for mode " + mode_name(c.mode));
    }
  };
  switch (c.mode) {
    case Mode::occupancy:
      if (!c.mdp) {
        field_error("mdp", "required for mode occupancy");
      }
      if (c.episodes < 2) {
        field_error("episodes", "must be >= 2");
      }
      break;
    case Mode::optima:
    case Mode::sweep:
      need_alpha_beta();
      if (!c.mdp && !c.reward) {
        field_error("reward", "mode " + mode_name(c.mode) + " needs a reward vector or an mdp");
      }
      for (double a : c.alphas) {
        if (a == 1.0) {
          field_error("alpha", "alpha = 1 is outside the information family");
        }
      }
      break;
    case Mode::natgrad:
      need_alpha_beta();
      if (c.alphas.size() != 1 || c.betas.size() != 1) {
        field_error(c.alphas.size() != 1 ? "alpha" : "beta", "mode natgrad takes a single value");
      }
      if (!c.mdp && c.teleport_states < 1) {
        field_error("mdp", "mode natgrad needs an mdp or teleport_states >= 1");
      }
      if (c.teleport_states > 0 && !c.reward) {
        field_error("reward", "teleport natgrad needs a reward vector");
      }
      if (c.teleport_states > 0 && c.reward &&
          static_cast<std::int64_t>(c.reward->size()) != c.teleport_states) {
        field_error("reward", "length must equal teleport_states");
      }
      if (c.iterations < 1) {
        field_error("iterations", "must be >= 1");
      }
      if (c.method != "natural" && c.method != "vanilla") {
        field_error("method", "must be 'natural' or 'vanilla'");
      }
      break;
    case Mode::dpi:
      if (c.trials < 1) {
        field_error("trials", "must be >= 1");
      }
      break;
    case Mode::knn:
      if (c.generator != "uniform_box" && c.generator != "gaussian") {
        field_error("generator", "must be 'uniform_box' or 'gaussian'");
      }
      if (c.dimension < 1) {
        field_error("dimension", "must be >= 1");
      }
      if (c.samples.empty()) {
        field_error("samples", "needs at least one sample size");
      }
      for (auto n : c.samples) {
        if (n < 3) {
          field_error("samples", "sample sizes must be >= 3");
        }
      }
      break;
    case Mode::verify:
      if (!c.only.empty()) {
        const auto names = verify_check_names();
        std::set<std::string> groups;
        for (const auto& n : names) {
          groups.insert(n.substr(0, n.find('.')));
          groups.insert(n);
        }
        if (!groups.count(c.only)) {
          field_error("only", "no check or group named '" + c.only + "'");
        }
      }
      break;
  }
}

}  // namespace cgeom
