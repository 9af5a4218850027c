#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace colforth {

/// Element type of an output column.
enum class Dtype : std::uint8_t {
  Bool,
  Int8,
  Int16,
  Int32,
  Int64,
  UInt8,
  UInt16,
  UInt32,
  UInt64,
  Float32,
  Float64,
};

constexpr std::size_t dtype_width(Dtype t) {
  switch (t) {
    case Dtype::Bool:
    case Dtype::Int8:
    case Dtype::UInt8: return 1;
    case Dtype::Int16:
    case Dtype::UInt16: return 2;
    case Dtype::Int32:
    case Dtype::UInt32:
    case Dtype::Float32: return 4;
    case Dtype::Int64:
    case Dtype::UInt64:
    case Dtype::Float64: return 8;
  }
  return 0;
}

constexpr bool dtype_is_float(Dtype t) {
  return t == Dtype::Float32 || t == Dtype::Float64;
}

constexpr std::string_view dtype_name(Dtype t) {
  switch (t) {
    case Dtype::Bool: return "bool";
    case Dtype::Int8: return "int8";
    case Dtype::Int16: return "int16";
    case Dtype::Int32: return "int32";
    case Dtype::Int64: return "int64";
    case Dtype::UInt8: return "uint8";
    case Dtype::UInt16: return "uint16";
    case Dtype::UInt32: return "uint32";
    case Dtype::UInt64: return "uint64";
    case Dtype::Float32: return "float32";
    case Dtype::Float64: return "float64";
  }
  return "?";
}

std::optional<Dtype> parse_dtype(std::string_view name);

}  // namespace colforth
