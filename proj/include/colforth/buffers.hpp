#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "colforth/bytecode.hpp"
#include "colforth/dtype.hpp"
#include "colforth/errors.hpp"

namespace colforth {

/// A finished column: length values of dtype, packed little-endian.
struct ColumnSnapshot {
  std::string name;
  Dtype dtype = Dtype::Int64;
  std::int64_t length = 0;
  std::vector<std::uint8_t> bytes;
  bool operator==(const ColumnSnapshot&) const = default;
};

/// Named, fixed-size view of raw bytes with a seekable read position.
/// The viewed bytes must stay alive for the lifetime of the buffer.
class InputBuffer {
 public:
  InputBuffer() = default;
  InputBuffer(std::string name, std::span<const std::uint8_t> bytes)
      : name_(std::move(name)), bytes_(bytes) {}

  const std::string& name() const { return name_; }
  std::size_t size() const { return bytes_.size(); }
  std::size_t position() const { return position_; }
  std::size_t remaining() const { return bytes_.size() - position_; }
  bool at_end() const { return position_ == bytes_.size(); }
  const std::uint8_t* cursor() const { return bytes_.data() + position_; }

  RuntimeErrorKind seek(std::int64_t to) {
    if (to < 0 || static_cast<std::uint64_t>(to) > bytes_.size())
      return RuntimeErrorKind::SeekBeyond;
    position_ = static_cast<std::size_t>(to);
    return RuntimeErrorKind::None;
  }

  RuntimeErrorKind skip(std::int64_t by) {
    if (by < 0 || static_cast<std::uint64_t>(by) > remaining())
      return RuntimeErrorKind::SkipBeyond;
    position_ += static_cast<std::size_t>(by);
    return RuntimeErrorKind::None;
  }

  RuntimeErrorKind rewind(std::int64_t by) {
    if (by < 0 || static_cast<std::uint64_t>(by) > position_)
      return RuntimeErrorKind::RewindBeyond;
    position_ -= static_cast<std::size_t>(by);
    return RuntimeErrorKind::None;
  }

  void advance(std::size_t by) { position_ += by; }

  /// Fixed-width integer codes (b B h H i I q Q); unsigned 8-byte values wrap
  /// into the signed cell.
  RuntimeErrorKind read_int(ReadCode code, bool big_endian, std::int64_t& out);

  /// f and d codes.
  RuntimeErrorKind read_float(ReadCode code, bool big_endian, double& out);

  /// Base-128 varint, at most 10 bytes / 64 bits of payload.
  RuntimeErrorKind read_varint(std::uint64_t& out);

  /// Zig-zag encoded signed integer on top of a varint.
  RuntimeErrorKind read_zigzag(std::int64_t& out);

 private:
  std::string name_;
  std::span<const std::uint8_t> bytes_;
  std::size_t position_ = 0;
};

/// Named, typed, append-only column.
class OutputBuffer {
 public:
  OutputBuffer() = default;
  OutputBuffer(std::string name, Dtype dtype)
      : name_(std::move(name)), dtype_(dtype), width_(dtype_width(dtype)) {}

  const std::string& name() const { return name_; }
  Dtype dtype() const { return dtype_; }
  std::size_t size() const { return raw_.size() / width_; }
  bool empty() const { return raw_.empty(); }
  const std::vector<std::uint8_t>& raw() const { return raw_; }

  void append_int(std::int64_t value);
  void append_float(double value);

  /// `+<-`: appends last + value; an empty column has last = 0.
  void append_add_last(std::int64_t value);

  /// `name dup`: appends the last value count more times; count <= 0 appends
  /// nothing; on an empty column the duplicated value is 0.
  void dup_last(std::int64_t count);

  /// Most recently appended value as an integer cell (0 when empty).
  std::int64_t last_int() const;
  double last_float() const;

  ColumnSnapshot snapshot() const {
    return {name_, dtype_, static_cast<std::int64_t>(size()), raw_};
  }

  // bulk helpers used by the transfer loops
  std::uint8_t* grow(std::size_t values) {
    std::size_t old = raw_.size();
    raw_.resize(old + values * width_);
    return raw_.data() + old;
  }
  std::size_t width() const { return width_; }
  std::size_t raw_size() const { return raw_.size(); }
  void rollback(std::size_t raw_size) { raw_.resize(raw_size); }

 private:
  std::string name_;
  Dtype dtype_ = Dtype::Int64;
  std::size_t width_ = 8;
  std::vector<std::uint8_t> raw_;
};

/// Executes one parse word with an output destination: decodes `count`
/// values described by `kind` and appends them. Consumes no input and
/// appends nothing on error. `count` is 1 for the non-# forms.
RuntimeErrorKind transfer_to_output(InputBuffer& in, OutputBuffer& out,
                                    ReadKind kind, std::int64_t count);

/// Streams LSB-first n-bit unsigned values out of a byte run. The caller
/// checks bounds: ceil(nbits*count/8) bytes are consumed for count values.
class BitUnpacker {
 public:
  BitUnpacker(const std::uint8_t* bytes, int nbits)
      : p_(bytes), nbits_(nbits), mask_((nbits == 64 ? ~0ull : (1ull << nbits) - 1)) {}

  std::uint32_t next() {
    while (have_ < nbits_) {
      acc_ |= static_cast<std::uint64_t>(*p_++) << have_;
      have_ += 8;
    }
    auto v = static_cast<std::uint32_t>(acc_ & mask_);
    acc_ >>= nbits_;
    have_ -= nbits_;
    return v;
  }

 private:
  const std::uint8_t* p_;
  std::uint64_t acc_ = 0;
  int have_ = 0;
  int nbits_;
  std::uint64_t mask_;
};

constexpr std::size_t nbit_bytes(int nbits, std::int64_t count) {
  return static_cast<std::size_t>((static_cast<std::uint64_t>(count) * nbits + 7) / 8);
}

/// Truncate-toward-zero conversion used when float data is routed into an
/// integer cell: NaN becomes 0, out-of-range saturates.
inline std::int64_t float_to_cell(double v) {
  if (!(v == v)) return 0;
  if (v >= 9223372036854775808.0) return INT64_MAX;
  if (v < -9223372036854775808.0) return INT64_MIN;
  return static_cast<std::int64_t>(v);
}

}  // namespace colforth
