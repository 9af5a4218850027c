#pragma once

#include <filesystem>
#include <optional>

#include "colforth/columnar.hpp"

namespace colforth::formats {

/// Writes `manifest.json` plus one raw little-endian `<name>.bin` file per
/// column into `dir` (created if needed). Returns the manifest path.
std::filesystem::path write_result(const std::filesystem::path& dir,
                                   const ColumnarResult& result);

/// Loads a manifest and its column files back into memory.
ColumnarResult read_result(const std::filesystem::path& manifest_file);

/// Byte-exact comparison; returns a description of the first difference.
std::optional<std::string> results_difference(const ColumnarResult& a,
                                              const ColumnarResult& b);

}  // namespace colforth::formats
