#include "cgeom/mdp_io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace cgeom {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& message) { throw InvalidArgument("MDP file: " + message); }

Index read_count(const json& doc, const char* key) {
  if (!doc.contains(key)) {
    fail(std::string("missing field '") + key + "'");
  }
  const json& v = doc.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 1) {
    fail(std::string("'") + key + "' must be a positive integer");
  }
  return static_cast<Index>(v.get<std::int64_t>());
}

Vector read_vector(const json& v, Index expected, const std::string& where) {
  if (!v.is_array()) {
    fail(where + " must be a list");
  }
  if (static_cast<Index>(v.size()) != expected) {
    std::ostringstream os;
    os << where << " has " << v.size() << " entries, expected " << expected;
    fail(os.str());
  }
  Vector out(expected);
  for (Index i = 0; i < expected; ++i) {
    const json& x = v[static_cast<std::size_t>(i)];
    if (!x.is_number()) {
      std::ostringstream os;
      os << where << "[" << i << "] is not a number";
      fail(os.str());
    }
    out[i] = x.get<double>();
  }
  return out;
}

Vector read_distribution(const json& v, Index expected, const std::string& where) {
  Vector out = read_vector(v, expected, where);
  if (auto why = simplex_violation(out); !why.empty()) {
    fail(where + ": " + why);
  }
  return out;
}

}  // namespace

MdpDocument parse_mdp(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("not valid JSON (") + e.what() + ")");
  }
  if (!doc.is_object()) {
    fail("top level must be an object");
  }
  const Index d = read_count(doc, "states");
  const Index m = read_count(doc, "actions");
  if (!doc.contains("horizon")) {
    fail("missing field 'horizon'");
  }
  const json& h = doc.at("horizon");
  if (!h.is_number_integer()) {
    fail("'horizon' must be a single non-negative integer; variable-length episodes are not supported");
  }
  const auto horizon = h.get<std::int64_t>();
  if (horizon < 0 || horizon > 1'000'000) {
    fail("'horizon' must lie in [0, 1000000]");
  }
  for (const char* key : {"start", "reward", "transition"}) {
    if (!doc.contains(key)) {
      fail(std::string("missing field '") + key + "'");
    }
  }
  Vector start = read_distribution(doc.at("start"), d, "start");
  Vector reward = read_vector(doc.at("reward"), d, "reward");
  if (!reward.allFinite()) {
    fail("reward must be finite");
  }

  const json& tr = doc.at("transition");
  if (!tr.is_array() || static_cast<Index>(tr.size()) != d) {
    fail("transition must be a list with one entry per state");
  }
  std::vector<Matrix> transitions(static_cast<std::size_t>(m), Matrix(d, d));
  for (Index s = 0; s < d; ++s) {
    const json& row = tr[static_cast<std::size_t>(s)];
    std::ostringstream where;
    where << "transition[" << s << "]";
    if (!row.is_array() || static_cast<Index>(row.size()) != m) {
      fail(where.str() + " must be a list with one entry per action");
    }
    for (Index a = 0; a < m; ++a) {
      std::ostringstream cell;
      cell << "transition[" << s << "][" << a << "]";
      transitions[static_cast<std::size_t>(a)].row(s) =
          read_distribution(row[static_cast<std::size_t>(a)], d, cell.str()).transpose();
    }
  }

  std::optional<Policy> policy;
  if (doc.contains("policy")) {
    const json& pol = doc.at("policy");
    if (!pol.is_array() || static_cast<Index>(pol.size()) != d) {
      fail("policy must be a list with one entry per state");
    }
    Matrix table(d, m);
    for (Index s = 0; s < d; ++s) {
      std::ostringstream where;
      where << "policy[" << s << "]";
      table.row(s) = read_distribution(pol[static_cast<std::size_t>(s)], m, where.str()).transpose();
    }
    policy.emplace(std::move(table));
  }
  return MdpDocument{FiniteMdp(std::move(transitions), std::move(start), std::move(reward),
                               static_cast<int>(horizon)),
                     std::move(policy)};
}

MdpDocument load_mdp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InvalidArgument("cannot open MDP file '" + path.string() + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_mdp(buffer.str());
}

std::string dump_mdp(const FiniteMdp& mdp, const Policy* policy) {
  const Index d = mdp.num_states();
  const Index m = mdp.num_actions();
  auto to_list = [](const auto& v) {
    json out = json::array();
    for (Index i = 0; i < v.size(); ++i) {
      out.push_back(v[i]);
    }
    return out;
  };
  json doc;
  doc["states"] = d;
  doc["actions"] = m;
  doc["horizon"] = mdp.horizon();
  doc["start"] = to_list(mdp.start().weights());
  doc["reward"] = to_list(mdp.reward());
  json tr = json::array();
  for (Index s = 0; s < d; ++s) {
    json row = json::array();
    for (Index a = 0; a < m; ++a) {
      row.push_back(to_list(Vector(mdp.transition(a).row(s).transpose())));
    }
    tr.push_back(std::move(row));
  }
  doc["transition"] = std::move(tr);
  if (policy != nullptr) {
    json pol = json::array();
    for (Index s = 0; s < d; ++s) {
      pol.push_back(to_list(Vector(policy->table().row(s).transpose())));
    }
    doc["policy"] = std::move(pol);
  }
  return doc.dump(2) + "\n";
}

}  // namespace cgeom
