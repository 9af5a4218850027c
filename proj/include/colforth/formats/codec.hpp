#pragma once

#include <cstdint>
#include <vector>

namespace colforth::formats {

inline void varint_encode(std::uint64_t value, std::vector<std::uint8_t>& out) {
  while (value >= 0x80) {
    out.push_back(static_cast<std::uint8_t>(value) | 0x80);
    value >>= 7;
  }
  out.push_back(static_cast<std::uint8_t>(value));
}

inline std::uint64_t zigzag_encode(std::int64_t value) {
  return (static_cast<std::uint64_t>(value) << 1) ^
         static_cast<std::uint64_t>(value >> 63);
}

inline std::int64_t zigzag_decode(std::uint64_t value) {
  return static_cast<std::int64_t>(value >> 1) ^ -static_cast<std::int64_t>(value & 1);
}

inline void zigzag_varint_encode(std::int64_t value, std::vector<std::uint8_t>& out) {
  varint_encode(zigzag_encode(value), out);
}

/// LSB-first bit packing, the layout the <n>bit-> words consume.
inline void bit_pack(const std::vector<std::uint32_t>& values, int nbits,
                     std::vector<std::uint8_t>& out) {
  std::uint64_t acc = 0;
  int have = 0;
  for (std::uint32_t v : values) {
    acc |= static_cast<std::uint64_t>(v & ((nbits == 32 ? 0xFFFFFFFFull : (1ull << nbits) - 1)))
           << have;
    have += nbits;
    while (have >= 8) {
      out.push_back(static_cast<std::uint8_t>(acc));
      acc >>= 8;
      have -= 8;
    }
  }
  if (have > 0) out.push_back(static_cast<std::uint8_t>(acc));
}

}  // namespace colforth::formats
