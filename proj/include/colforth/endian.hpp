#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <type_traits>

namespace colforth {

namespace detail {

inline std::uint8_t bswap(std::uint8_t v) { return v; }
inline std::uint16_t bswap(std::uint16_t v) { return __builtin_bswap16(v); }
inline std::uint32_t bswap(std::uint32_t v) { return __builtin_bswap32(v); }
inline std::uint64_t bswap(std::uint64_t v) { return __builtin_bswap64(v); }

template <class T>
T byteswap_value(T v) {
  if constexpr (sizeof(T) == 1) {
    return v;
  } else if constexpr (sizeof(T) == 2) {
    return std::bit_cast<T>(bswap(std::bit_cast<std::uint16_t>(v)));
  } else if constexpr (sizeof(T) == 4) {
    return std::bit_cast<T>(bswap(std::bit_cast<std::uint32_t>(v)));
  } else {
    static_assert(sizeof(T) == 8);
    return std::bit_cast<T>(bswap(std::bit_cast<std::uint64_t>(v)));
  }
}

}  // namespace detail

template <class T>
inline T load_le(const std::uint8_t* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) v = detail::byteswap_value(v);
  return v;
}

template <class T>
inline T load_be(const std::uint8_t* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::little) v = detail::byteswap_value(v);
  return v;
}

template <class T>
inline void store_le(std::uint8_t* p, T v) {
  if constexpr (std::endian::native == std::endian::big) v = detail::byteswap_value(v);
  std::memcpy(p, &v, sizeof(T));
}

template <class T>
inline void store_be(std::uint8_t* p, T v) {
  if constexpr (std::endian::native == std::endian::little) v = detail::byteswap_value(v);
  std::memcpy(p, &v, sizeof(T));
}

}  // namespace colforth
