#pragma once

#include "cgeom/mdp.hpp"

#include <filesystem>
#include <optional>
#include <string_view>

namespace cgeom {

/// An MDP document together with the optional policy table it carries.
struct MdpDocument {
  FiniteMdp mdp;
  std::optional<Policy> policy;
};

/// Parses the JSON MDP format
///   {"states": d, "actions": m, "horizon": n, "start": [...], "reward": [...],
///    "transition": [[[...d...] x m] x d], "policy": [[...m...] x d]}
/// where transition[s][a] is the next-state distribution and "policy" is optional.
/// Throws InvalidArgument naming the offending field and index.
MdpDocument parse_mdp(std::string_view text);
MdpDocument load_mdp(const std::filesystem::path& path);

/// Serializes back to the same format (17 significant digits).
std::string dump_mdp(const FiniteMdp& mdp, const Policy* policy = nullptr);

}  // namespace cgeom
