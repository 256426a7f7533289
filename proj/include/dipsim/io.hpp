#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace dipsim::io {

// Writes via a temp file in the target directory plus rename, so readers
// never observe a partial file; creates parent directories as needed.
void atomic_write(const std::filesystem::path& path,
                  const std::string& content);

std::string read_file(const std::filesystem::path& path);

// FNV-1a 64-bit checksum (offset basis 0xcbf29ce484222325).
std::uint64_t fnv1a64(std::string_view data);

// Round-trippable formats for data files: doubles as %.17g, 64-bit seeds as
// decimal strings (JSON-safe beyond 2^53).
std::string format_double(double v);
std::string format_u64(std::uint64_t v);

}  // namespace dipsim::io
