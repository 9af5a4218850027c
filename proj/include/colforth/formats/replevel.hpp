#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "colforth/columnar.hpp"
#include "colforth/formats/oracle.hpp"

namespace colforth::formats {

/// Repetition levels for nested lists: one level per leaf value, giving the
/// nesting depth at which that value starts a new list (0 = new record).
/// Lists must be non-empty; empty lists are not representable without
/// definition levels.
std::vector<std::uint8_t> levels_from_nested(const Json& records, int depth);

/// Reference RLE / bit-packed hybrid encoder with the 4-byte little-endian
/// length prefix. Runs of 8 or more equal values become run-length runs;
/// other stretches are bit-packed in whole groups of 8 (never padded), and
/// a short tail falls back to run-length runs.
std::vector<std::uint8_t> hybrid_encode(const std::vector<std::uint8_t>& levels,
                                        int bit_width);

/// Reference decoder for the same stream (length prefix included).
std::vector<std::uint8_t> hybrid_decode(std::span<const std::uint8_t> stream,
                                        int bit_width);

struct ReplevelPipelineResult {
  ColumnarResult offsets;               // offsets0..offsets{depth-1}
  std::vector<std::uint8_t> replevels;  // stage-one output
};

/// Two generated programs end to end: hybrid stream -> repetition levels ->
/// offsets columns. Runtime faults carry a decode/convert stage label.
ReplevelPipelineResult decode_replevel_pipeline(std::span<const std::uint8_t> stream,
                                                int depth);

}  // namespace colforth::formats
