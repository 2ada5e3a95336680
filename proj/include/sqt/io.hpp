#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace sqt {

// Shortest-safe round-trip text for a double (17 significant digits).
std::string fmt17(double v);

// Writes via a sibling temporary file and rename, so readers never see a partial file.
void write_atomic(const std::filesystem::path& path, std::string_view content);

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

}  // namespace sqt
