#include "colforth/buffers.hpp"

#include <cstring>

#include "colforth/endian.hpp"

namespace colforth {

namespace {

template <class T>
T load(const std::uint8_t* p, bool big_endian) {
  return big_endian ? load_be<T>(p) : load_le<T>(p);
}

template <class Dst, class Src>
Dst convert_value(Src s) {
  if constexpr (std::is_integral_v<Dst> && std::is_floating_point_v<Src>) {
    return static_cast<Dst>(float_to_cell(static_cast<double>(s)));
  } else {
    return static_cast<Dst>(s);
  }
}

// One parse word worth of values from a bounds-checked source run into the
// column's raw storage.
template <class Src, class Dst, bool BigEndian, bool ToBool = false>
void copy_convert(const std::uint8_t* src, std::uint8_t* dst, std::size_t n) {
  if constexpr (std::is_same_v<Src, Dst> && !BigEndian && !ToBool) {
    std::memcpy(dst, src, n * sizeof(Src));
    return;
  }
  for (std::size_t k = 0; k < n; ++k) {
    Src s = BigEndian ? load_be<Src>(src) : load_le<Src>(src);
    if constexpr (ToBool) {
      dst[0] = s != Src{} ? 1 : 0;
      dst += 1;
    } else {
      store_le<Dst>(dst, convert_value<Dst>(s));
      dst += sizeof(Dst);
    }
    src += sizeof(Src);
  }
}

template <class Src, bool BigEndian>
void bulk_append(const std::uint8_t* src, OutputBuffer& out, std::size_t n) {
  std::uint8_t* dst = out.grow(n);
  switch (out.dtype()) {
    case Dtype::Bool: copy_convert<Src, std::uint8_t, BigEndian, true>(src, dst, n); break;
    case Dtype::Int8: copy_convert<Src, std::int8_t, BigEndian>(src, dst, n); break;
    case Dtype::Int16: copy_convert<Src, std::int16_t, BigEndian>(src, dst, n); break;
    case Dtype::Int32: copy_convert<Src, std::int32_t, BigEndian>(src, dst, n); break;
    case Dtype::Int64: copy_convert<Src, std::int64_t, BigEndian>(src, dst, n); break;
    case Dtype::UInt8: copy_convert<Src, std::uint8_t, BigEndian>(src, dst, n); break;
    case Dtype::UInt16: copy_convert<Src, std::uint16_t, BigEndian>(src, dst, n); break;
    case Dtype::UInt32: copy_convert<Src, std::uint32_t, BigEndian>(src, dst, n); break;
    case Dtype::UInt64: copy_convert<Src, std::uint64_t, BigEndian>(src, dst, n); break;
    case Dtype::Float32: copy_convert<Src, float, BigEndian>(src, dst, n); break;
    case Dtype::Float64: copy_convert<Src, double, BigEndian>(src, dst, n); break;
  }
}

template <class Src>
void bulk_append(const std::uint8_t* src, OutputBuffer& out, std::size_t n, bool big_endian) {
  if (big_endian)
    bulk_append<Src, true>(src, out, n);
  else
    bulk_append<Src, false>(src, out, n);
}

}  // namespace

RuntimeErrorKind InputBuffer::read_int(ReadCode code, bool big_endian, std::int64_t& out) {
  const std::uint8_t* p = cursor();
  switch (code) {
    case ReadCode::I8:
      if (remaining() < 1) return RuntimeErrorKind::ReadBeyond;
      out = static_cast<std::int8_t>(*p);
      position_ += 1;
      return RuntimeErrorKind::None;
    case ReadCode::U8:
      if (remaining() < 1) return RuntimeErrorKind::ReadBeyond;
      out = *p;
      position_ += 1;
      return RuntimeErrorKind::None;
    case ReadCode::I16:
      if (remaining() < 2) return RuntimeErrorKind::ReadBeyond;
      out = load<std::int16_t>(p, big_endian);
      position_ += 2;
      return RuntimeErrorKind::None;
    case ReadCode::U16:
      if (remaining() < 2) return RuntimeErrorKind::ReadBeyond;
      out = load<std::uint16_t>(p, big_endian);
      position_ += 2;
      return RuntimeErrorKind::None;
    case ReadCode::I32:
      if (remaining() < 4) return RuntimeErrorKind::ReadBeyond;
      out = load<std::int32_t>(p, big_endian);
      position_ += 4;
      return RuntimeErrorKind::None;
    case ReadCode::U32:
      if (remaining() < 4) return RuntimeErrorKind::ReadBeyond;
      out = load<std::uint32_t>(p, big_endian);
      position_ += 4;
      return RuntimeErrorKind::None;
    case ReadCode::I64:
      if (remaining() < 8) return RuntimeErrorKind::ReadBeyond;
      out = load<std::int64_t>(p, big_endian);
      position_ += 8;
      return RuntimeErrorKind::None;
    case ReadCode::U64:
      // values >= 2^63 wrap into the signed cell
      if (remaining() < 8) return RuntimeErrorKind::ReadBeyond;
      out = static_cast<std::int64_t>(load<std::uint64_t>(p, big_endian));
      position_ += 8;
      return RuntimeErrorKind::None;
    default: return RuntimeErrorKind::ReadBeyond;
  }
}

RuntimeErrorKind InputBuffer::read_float(ReadCode code, bool big_endian, double& out) {
  const std::uint8_t* p = cursor();
  if (code == ReadCode::F32) {
    if (remaining() < 4) return RuntimeErrorKind::ReadBeyond;
    out = load<float>(p, big_endian);
    position_ += 4;
    return RuntimeErrorKind::None;
  }
  if (remaining() < 8) return RuntimeErrorKind::ReadBeyond;
  out = load<double>(p, big_endian);
  position_ += 8;
  return RuntimeErrorKind::None;
}

RuntimeErrorKind InputBuffer::read_varint(std::uint64_t& out) {
  std::uint64_t result = 0;
  int shift = 0;
  std::size_t pos = position_;
  for (;;) {
    if (pos == bytes_.size()) return RuntimeErrorKind::ReadBeyond;
    std::uint8_t byte = bytes_[pos++];
    std::uint64_t payload = byte & 0x7F;
    if (shift > 63 || (shift == 63 && payload > 1))
      return RuntimeErrorKind::VarintTooBig;
    result |= payload << shift;
    if (!(byte & 0x80)) break;
    shift += 7;
  }
  position_ = pos;
  out = result;
  return RuntimeErrorKind::None;
}

RuntimeErrorKind InputBuffer::read_zigzag(std::int64_t& out) {
  std::uint64_t raw = 0;
  if (auto err = read_varint(raw); err != RuntimeErrorKind::None) return err;
  out = static_cast<std::int64_t>(raw >> 1) ^ -static_cast<std::int64_t>(raw & 1);
  return RuntimeErrorKind::None;
}

void OutputBuffer::append_int(std::int64_t value) {
  std::uint8_t* dst = grow(1);
  switch (dtype_) {
    case Dtype::Bool: *dst = value != 0 ? 1 : 0; break;
    case Dtype::Int8: store_le<std::int8_t>(dst, static_cast<std::int8_t>(value)); break;
    case Dtype::Int16: store_le<std::int16_t>(dst, static_cast<std::int16_t>(value)); break;
    case Dtype::Int32: store_le<std::int32_t>(dst, static_cast<std::int32_t>(value)); break;
    case Dtype::Int64: store_le<std::int64_t>(dst, value); break;
    case Dtype::UInt8: store_le<std::uint8_t>(dst, static_cast<std::uint8_t>(value)); break;
    case Dtype::UInt16: store_le<std::uint16_t>(dst, static_cast<std::uint16_t>(value)); break;
    case Dtype::UInt32: store_le<std::uint32_t>(dst, static_cast<std::uint32_t>(value)); break;
    case Dtype::UInt64: store_le<std::uint64_t>(dst, static_cast<std::uint64_t>(value)); break;
    case Dtype::Float32: store_le<float>(dst, static_cast<float>(value)); break;
    case Dtype::Float64: store_le<double>(dst, static_cast<double>(value)); break;
  }
}

void OutputBuffer::append_float(double value) {
  if (dtype_ == Dtype::Float32) {
    store_le<float>(grow(1), static_cast<float>(value));
  } else if (dtype_ == Dtype::Float64) {
    store_le<double>(grow(1), value);
  } else {
    append_int(float_to_cell(value));
  }
}

void OutputBuffer::append_add_last(std::int64_t value) {
  if (dtype_ == Dtype::Float32 || dtype_ == Dtype::Float64) {
    append_float(last_float() + static_cast<double>(value));
  } else {
    append_int(static_cast<std::int64_t>(
        static_cast<std::uint64_t>(last_int()) + static_cast<std::uint64_t>(value)));
  }
}

void OutputBuffer::dup_last(std::int64_t count) {
  if (count <= 0) return;
  std::size_t n = static_cast<std::size_t>(count);
  if (raw_.empty()) {
    raw_.resize(n * width_, 0);
    return;
  }
  std::size_t tail = raw_.size() - width_;
  std::uint8_t* dst = grow(n);
  for (std::size_t k = 0; k < n; ++k, dst += width_)
    std::memcpy(dst, raw_.data() + tail, width_);
}

std::int64_t OutputBuffer::last_int() const {
  if (raw_.empty()) return 0;
  const std::uint8_t* p = raw_.data() + raw_.size() - width_;
  switch (dtype_) {
    case Dtype::Bool:
    case Dtype::UInt8: return *p;
    case Dtype::Int8: return static_cast<std::int8_t>(*p);
    case Dtype::Int16: return load_le<std::int16_t>(p);
    case Dtype::Int32: return load_le<std::int32_t>(p);
    case Dtype::Int64: return load_le<std::int64_t>(p);
    case Dtype::UInt16: return load_le<std::uint16_t>(p);
    case Dtype::UInt32: return load_le<std::uint32_t>(p);
    case Dtype::UInt64: return static_cast<std::int64_t>(load_le<std::uint64_t>(p));
    case Dtype::Float32: return float_to_cell(load_le<float>(p));
    case Dtype::Float64: return float_to_cell(load_le<double>(p));
  }
  return 0;
}

double OutputBuffer::last_float() const {
  if (raw_.empty()) return 0.0;
  const std::uint8_t* p = raw_.data() + raw_.size() - width_;
  if (dtype_ == Dtype::Float32) return load_le<float>(p);
  if (dtype_ == Dtype::Float64) return load_le<double>(p);
  return static_cast<double>(last_int());
}

RuntimeErrorKind transfer_to_output(InputBuffer& in, OutputBuffer& out,
                                    ReadKind kind, std::int64_t count) {
  if (count < 0) return RuntimeErrorKind::ReadBeyond;
  std::size_t n = static_cast<std::size_t>(count);

  switch (kind.code) {
    case ReadCode::Varint:
    case ReadCode::Zigzag: {
      std::size_t checkpoint = out.raw_size();
      std::size_t start = in.position();
      for (std::size_t k = 0; k < n; ++k) {
        RuntimeErrorKind err;
        std::int64_t value;
        if (kind.code == ReadCode::Varint) {
          std::uint64_t raw = 0;
          err = in.read_varint(raw);
          value = static_cast<std::int64_t>(raw);
        } else {
          err = in.read_zigzag(value);
        }
        if (err != RuntimeErrorKind::None) {
          out.rollback(checkpoint);
          in.seek(static_cast<std::int64_t>(start));
          return err;
        }
        out.append_int(value);
      }
      return RuntimeErrorKind::None;
    }
    case ReadCode::NBit: {
      std::size_t bytes = nbit_bytes(kind.nbits, count);
      if (in.remaining() < bytes) return RuntimeErrorKind::ReadBeyond;
      BitUnpacker bits(in.cursor(), kind.nbits);
      for (std::size_t k = 0; k < n; ++k) out.append_int(bits.next());
      in.advance(bytes);
      return RuntimeErrorKind::None;
    }
    default: break;
  }

  static constexpr std::size_t kWidths[] = {1, 1, 2, 2, 4, 4, 8, 8, 4, 8};
  std::size_t width = kWidths[static_cast<int>(kind.code)];
  if (in.remaining() / width < n) return RuntimeErrorKind::ReadBeyond;
  const std::uint8_t* src = in.cursor();
  switch (kind.code) {
    case ReadCode::I8: bulk_append<std::int8_t>(src, out, n, kind.big_endian); break;
    case ReadCode::U8: bulk_append<std::uint8_t>(src, out, n, kind.big_endian); break;
    case ReadCode::I16: bulk_append<std::int16_t>(src, out, n, kind.big_endian); break;
    case ReadCode::U16: bulk_append<std::uint16_t>(src, out, n, kind.big_endian); break;
    case ReadCode::I32: bulk_append<std::int32_t>(src, out, n, kind.big_endian); break;
    case ReadCode::U32: bulk_append<std::uint32_t>(src, out, n, kind.big_endian); break;
    case ReadCode::I64: bulk_append<std::int64_t>(src, out, n, kind.big_endian); break;
    case ReadCode::U64: bulk_append<std::uint64_t>(src, out, n, kind.big_endian); break;
    case ReadCode::F32: bulk_append<float>(src, out, n, kind.big_endian); break;
    case ReadCode::F64: bulk_append<double>(src, out, n, kind.big_endian); break;
    default: return RuntimeErrorKind::ReadBeyond;
  }
  in.advance(width * n);
  return RuntimeErrorKind::None;
}

}  // namespace colforth
