#include "colforth/formats/basket.hpp"

#include "colforth/compiler.hpp"
#include "colforth/endian.hpp"
#include "colforth/errors.hpp"
#include "colforth/generators.hpp"
#include "colforth/machine.hpp"

namespace colforth::formats {

namespace {

void append_be_leaf(std::vector<std::uint8_t>& out, const Json& v, Dtype leaf) {
  auto put = [&](auto value) {
    out.resize(out.size() + sizeof(value));
    store_be(out.data() + out.size() - sizeof(value), value);
  };
  switch (leaf) {
    case Dtype::Int8: put(static_cast<std::int8_t>(v.get<std::int64_t>())); break;
    case Dtype::UInt8: put(static_cast<std::uint8_t>(v.get<std::int64_t>())); break;
    case Dtype::Int16: put(static_cast<std::int16_t>(v.get<std::int64_t>())); break;
    case Dtype::UInt16: put(static_cast<std::uint16_t>(v.get<std::int64_t>())); break;
    case Dtype::Int32: put(static_cast<std::int32_t>(v.get<std::int64_t>())); break;
    case Dtype::UInt32: put(static_cast<std::uint32_t>(v.get<std::int64_t>())); break;
    case Dtype::Int64: put(v.get<std::int64_t>()); break;
    case Dtype::UInt64: put(static_cast<std::uint64_t>(v.get<std::int64_t>())); break;
    case Dtype::Float32: put(static_cast<float>(v.get<double>())); break;
    case Dtype::Float64: put(v.get<double>()); break;
    default:
      throw FormatError(FormatErrorKind::SchemaMismatch, "unsupported basket leaf type");
  }
}

void encode_level(std::vector<std::uint8_t>& out, const Json& v, int levels_left,
                  Dtype leaf) {
  if (levels_left == 0) {
    append_be_leaf(out, v, leaf);
    return;
  }
  if (!v.is_array())
    throw FormatError(FormatErrorKind::SchemaMismatch, "entry nesting is shallower than depth");
  out.resize(out.size() + 4);
  store_be<std::uint32_t>(out.data() + out.size() - 4,
                          static_cast<std::uint32_t>(v.size()));
  // the innermost level stores its values inline after the size
  for (const auto& item : v) encode_level(out, item, levels_left - 1, leaf);
}

}  // namespace

void BasketWriter::add(const Json& entry) {
  basket_.byte_offsets.resize(basket_.byte_offsets.size() + 4);
  store_le<std::int32_t>(basket_.byte_offsets.data() + basket_.byte_offsets.size() - 4,
                         static_cast<std::int32_t>(basket_.data.size()));
  basket_.data.insert(basket_.data.end(), 6, 0xFF);  // header, never read
  encode_level(basket_.data, entry, depth_, leaf_);
}

SyntheticBasket BasketWriter::finish() {
  basket_.byte_offsets.resize(basket_.byte_offsets.size() + 4);
  store_le<std::int32_t>(basket_.byte_offsets.data() + basket_.byte_offsets.size() - 4,
                         static_cast<std::int32_t>(basket_.data.size()));
  return std::move(basket_);
}

SyntheticBasket write_synthetic_baskets(const Json& entries, int depth, Dtype leaf) {
  BasketWriter writer(depth, leaf);
  for (const auto& entry : entries) writer.add(entry);
  return writer.finish();
}

ColumnarResult read_synthetic_baskets(std::span<const std::uint8_t> data,
                                      std::span<const std::uint8_t> byte_offsets,
                                      int depth, Dtype leaf) {
  if (byte_offsets.size() < 4 || byte_offsets.size() % 4 != 0)
    throw FormatError(FormatErrorKind::TruncatedBasket,
                      "byte offsets must hold at least the end position");
  std::int64_t declared_end =
      load_le<std::int32_t>(byte_offsets.data() + byte_offsets.size() - 4);
  if (declared_end != static_cast<std::int64_t>(data.size()))
    throw FormatError(FormatErrorKind::TruncatedBasket,
                      "final byte offset " + std::to_string(declared_end) +
                          " does not match the payload size " +
                          std::to_string(data.size()));
  std::int64_t entries = static_cast<std::int64_t>(byte_offsets.size()) / 4 - 1;

  gen::GeneratedProgram generated = gen::tbasket_program(depth, leaf);
  Machine machine(compile(generated.source));
  std::map<std::string, std::span<const std::uint8_t>> inputs{
      {"data", data}, {"byte_offsets", byte_offsets}};
  machine.begin_run(inputs);
  StopReason stop = machine.resume();

  // the final byte offset equals the payload size, so the entry loop always
  // terminates by seeking past the end
  if (stop != StopReason::Error || machine.error() != RuntimeErrorKind::SeekBeyond)
    throw FormatError(FormatErrorKind::RuntimeFault,
                      "expected the seek-beyond stop, got " + machine.stop_text());
  if (machine.input_position("byte_offsets") != byte_offsets.size())
    throw FormatError(FormatErrorKind::TruncatedBasket,
                      "stopped after " +
                          std::to_string(machine.input_position("byte_offsets") / 4) +
                          " of " + std::to_string(entries) + " entries");

  ColumnarResult result;
  result.plan = generated.plan;
  for (const auto& column : machine.outputs()) result.columns.push_back(column.snapshot());
  if (auto why = offsets_violation(result, TypeDescriptor::nested_lists(depth, leaf), entries))
    throw FormatError(FormatErrorKind::OffsetsInvalid, *why);
  return result;
}

}  // namespace colforth::formats
