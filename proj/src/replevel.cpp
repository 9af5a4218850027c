#include "colforth/formats/replevel.hpp"

#include <bit>

#include "colforth/compiler.hpp"
#include "colforth/endian.hpp"
#include "colforth/errors.hpp"
#include "colforth/formats/codec.hpp"
#include "colforth/generators.hpp"
#include "colforth/machine.hpp"

namespace colforth::formats {

namespace {

void emit_levels(const Json& node, int remaining, int list_level, int pending,
                 std::vector<std::uint8_t>& out) {
  if (remaining == 0) {
    out.push_back(static_cast<std::uint8_t>(pending));
    return;
  }
  if (!node.is_array() || node.empty())
    throw FormatError(FormatErrorKind::SchemaMismatch,
                      "repetition levels need non-empty, depth-uniform lists");
  for (std::size_t k = 0; k < node.size(); ++k)
    emit_levels(node[k], remaining - 1, list_level + 1,
                k == 0 ? pending : list_level, out);
}

}  // namespace

std::vector<std::uint8_t> levels_from_nested(const Json& records, int depth) {
  std::vector<std::uint8_t> out;
  for (const auto& record : records) emit_levels(record, depth, 1, 0, out);
  return out;
}

std::vector<std::uint8_t> hybrid_encode(const std::vector<std::uint8_t>& levels,
                                        int bit_width) {
  std::vector<std::uint8_t> payload;
  std::size_t i = 0;
  const std::size_t n = levels.size();
  auto rle = [&](std::uint8_t value, std::size_t count) {
    varint_encode(static_cast<std::uint64_t>(count) << 1, payload);
    payload.push_back(value);
  };
  while (i < n) {
    std::size_t run = 1;
    while (i + run < n && levels[i + run] == levels[i]) ++run;
    if (run >= 8) {
      rle(levels[i], run);
      i += run;
    } else if (n - i >= 8) {
      // one bit-packed group of 8; groups are never padded
      varint_encode((1ull << 1) | 1, payload);
      std::vector<std::uint32_t> group(levels.begin() + static_cast<std::ptrdiff_t>(i),
                                       levels.begin() + static_cast<std::ptrdiff_t>(i + 8));
      bit_pack(group, bit_width, payload);
      i += 8;
    } else {
      rle(levels[i], run);
      i += run;
    }
  }
  std::vector<std::uint8_t> out(4);
  store_le<std::uint32_t>(out.data(), static_cast<std::uint32_t>(payload.size()));
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

std::vector<std::uint8_t> hybrid_decode(std::span<const std::uint8_t> stream,
                                        int bit_width) {
  if (stream.size() < 4)
    throw FormatError(FormatErrorKind::TruncatedFile, "missing length prefix");
  std::size_t length = load_le<std::uint32_t>(stream.data());
  if (stream.size() < 4 + length)
    throw FormatError(FormatErrorKind::TruncatedFile, "stream shorter than its prefix");
  const std::uint8_t* p = stream.data() + 4;
  const std::uint8_t* end = p + length;
  std::vector<std::uint8_t> out;
  while (p < end) {
    std::uint64_t header = 0;
    int shift = 0;
    for (;;) {
      if (p == end) throw FormatError(FormatErrorKind::TruncatedFile, "header cut short");
      std::uint8_t b = *p++;
      header |= static_cast<std::uint64_t>(b & 0x7F) << shift;
      if (!(b & 0x80)) break;
      shift += 7;
    }
    if ((header & 1) == 0) {
      if (p == end) throw FormatError(FormatErrorKind::TruncatedFile, "run cut short");
      std::uint8_t value = *p++;
      out.insert(out.end(), static_cast<std::size_t>(header >> 1), value);
    } else {
      std::size_t values = static_cast<std::size_t>(header >> 1) * 8;
      std::size_t bytes = (values * static_cast<std::size_t>(bit_width) + 7) / 8;
      if (static_cast<std::size_t>(end - p) < bytes)
        throw FormatError(FormatErrorKind::TruncatedFile, "group cut short");
      BitUnpacker bits(p, bit_width);
      for (std::size_t k = 0; k < values; ++k)
        out.push_back(static_cast<std::uint8_t>(bits.next()));
      p += bytes;
    }
  }
  return out;
}

ReplevelPipelineResult decode_replevel_pipeline(std::span<const std::uint8_t> stream,
                                                int depth) {
  if (stream.size() < 4)
    throw FormatError(FormatErrorKind::TruncatedFile, "missing length prefix");
  ReplevelPipelineResult out;

  const std::size_t payload = load_le<std::uint32_t>(stream.data());
  if (payload > 0) {
    gen::GeneratedProgram decoder = gen::replevel_decoder(depth);
    Machine machine(compile(decoder.source));
    std::map<std::string, std::span<const std::uint8_t>> inputs{{"data", stream}};
    machine.begin_run(inputs);
    if (machine.resume() != StopReason::Done)
      throw FormatError(FormatErrorKind::RuntimeFault,
                        "decode stage: " + machine.stop_text());
    out.replevels = machine.output("replevels").raw();
  }

  gen::GeneratedProgram converter = gen::replevel_to_offsets(depth);
  Machine machine(compile(converter.source));
  std::map<std::string, std::span<const std::uint8_t>> inputs{{"replevels", out.replevels}};
  machine.begin_run(inputs);
  if (machine.resume() != StopReason::Done)
    throw FormatError(FormatErrorKind::RuntimeFault,
                      "convert stage: " + machine.stop_text());
  out.offsets.plan = converter.plan;
  for (const auto& column : machine.outputs())
    out.offsets.columns.push_back(column.snapshot());

  if (auto why = offsets_violation(out.offsets,
                                   TypeDescriptor::nested_lists(depth, Dtype::UInt8), {},
                                   static_cast<std::int64_t>(out.replevels.size())))
    throw FormatError(FormatErrorKind::OffsetsInvalid, *why);
  return out;
}

}  // namespace colforth::formats
