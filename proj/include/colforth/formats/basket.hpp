#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "colforth/columnar.hpp"
#include "colforth/formats/oracle.hpp"

namespace colforth::formats {

/// A nested-vector payload plus the byte offsets of each entry: `data` holds
/// one serialized entry after another (6 filler header bytes, then big-endian
/// u32 sizes and big-endian leaf values, recursively); `byte_offsets` holds
/// little-endian int32 entry start positions plus the final end position.
struct SyntheticBasket {
  std::vector<std::uint8_t> data;
  std::vector<std::uint8_t> byte_offsets;
};

SyntheticBasket write_synthetic_baskets(const Json& entries, int depth, Dtype leaf);

/// Streaming variant for large corpora.
class BasketWriter {
 public:
  BasketWriter(int depth, Dtype leaf) : depth_(depth), leaf_(leaf) {}
  void add(const Json& entry);
  SyntheticBasket finish();

 private:
  int depth_;
  Dtype leaf_;
  SyntheticBasket basket_;
};

/// Runs the generated nested-vector program over the payload. A complete
/// run ends in seek-beyond (the final byte offset seeks past the payload);
/// anything else, or leftover byte offsets, raises TruncatedBasket.
ColumnarResult read_synthetic_baskets(std::span<const std::uint8_t> data,
                                      std::span<const std::uint8_t> byte_offsets,
                                      int depth, Dtype leaf);

}  // namespace colforth::formats
