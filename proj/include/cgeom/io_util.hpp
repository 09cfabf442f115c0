#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace cgeom {

/// Shortest round-trip text for a double ("%.17g"-equivalent, locale independent).
/// Non-finite values print as "nan", "inf" or "-inf".
std::string format_number(double value);

/// Writes `content` to a sibling temporary file and renames it over `path`, so
/// readers never observe a partially written file.
void write_atomically(const std::filesystem::path& path, std::string_view content);

}  // namespace cgeom
