#include "colforth/formats/avro.hpp"

#include <cstring>
#include <ostream>
#include <sstream>
#include <thread>

#include "colforth/compiler.hpp"
#include "colforth/endian.hpp"
#include "colforth/errors.hpp"
#include "colforth/formats/codec.hpp"
#include "colforth/machine.hpp"

namespace colforth::formats {

namespace {

constexpr std::uint8_t kMagic[4] = {'O', 'b', 'j', 1};

TypeDescriptor schema_from(const Json& j);

TypeDescriptor schema_from_name(const std::string& name, const Json& full) {
  if (name == "int") return TypeDescriptor::primitive(Dtype::Int32);
  if (name == "long") return TypeDescriptor::primitive(Dtype::Int64);
  if (name == "float") return TypeDescriptor::primitive(Dtype::Float32);
  if (name == "double") return TypeDescriptor::primitive(Dtype::Float64);
  if (name == "boolean") return TypeDescriptor::primitive(Dtype::Bool);
  if (name == "string") return TypeDescriptor::string();
  if (name == "bytes") return TypeDescriptor::bytes();
  if (name == "array") {
    if (!full.contains("items"))
      throw FormatError(FormatErrorKind::UnsupportedSchema, "array without items");
    return TypeDescriptor::list(schema_from(full.at("items")));
  }
  if (name == "record") {
    if (!full.contains("fields"))
      throw FormatError(FormatErrorKind::UnsupportedSchema, "record without fields");
    std::vector<std::pair<std::string, TypeDescriptor>> fields;
    for (const auto& f : full.at("fields"))
      fields.emplace_back(f.at("name").get<std::string>(), schema_from(f.at("type")));
    if (fields.empty())
      throw FormatError(FormatErrorKind::UnsupportedSchema, "record with no fields");
    return TypeDescriptor::record(std::move(fields));
  }
  throw FormatError(FormatErrorKind::UnsupportedSchema, "unsupported type `" + name + "`");
}

TypeDescriptor schema_from(const Json& j) {
  if (j.is_string()) return schema_from_name(j.get<std::string>(), j);
  if (j.is_object()) {
    const Json& type = j.at("type");
    if (type.is_string()) return schema_from_name(type.get<std::string>(), j);
    return schema_from(type);
  }
  throw FormatError(FormatErrorKind::UnsupportedSchema,
                    "unions and other non-structural schemas are unsupported");
}

void schema_to(const TypeDescriptor& t, Json& out, int& record_counter) {
  switch (t.kind) {
    case TypeDescriptor::Kind::Primitive:
      switch (t.dtype) {
        case Dtype::Int32: out = "int"; return;
        case Dtype::Int64: out = "long"; return;
        case Dtype::Float32: out = "float"; return;
        case Dtype::Float64: out = "double"; return;
        case Dtype::Bool: out = "boolean"; return;
        default:
          throw FormatError(
              FormatErrorKind::UnsupportedSchema,
              "no Avro type for dtype `" + std::string(dtype_name(t.dtype)) + "`");
      }
    case TypeDescriptor::Kind::String: out = "string"; return;
    case TypeDescriptor::Kind::Bytes: out = "bytes"; return;
    case TypeDescriptor::Kind::List: {
      Json items;
      schema_to(t.children.front(), items, record_counter);
      out = Json{{"type", "array"}, {"items", items}};
      return;
    }
    case TypeDescriptor::Kind::Record: {
      Json fields = Json::array();
      for (std::size_t k = 0; k < t.children.size(); ++k) {
        Json ft;
        schema_to(t.children[k], ft, record_counter);
        fields.push_back(Json{{"name", t.field_names[k]}, {"type", ft}});
      }
      out = Json{{"type", "record"},
                 {"name", "r" + std::to_string(record_counter++)},
                 {"fields", fields}};
      return;
    }
  }
}

// independent byte cursor used by the container frame and the reference
// decoder (the virtual machine never sees it)
struct Cursor {
  const std::uint8_t* p;
  const std::uint8_t* end;

  std::size_t left() const { return static_cast<std::size_t>(end - p); }

  void need(std::size_t n) const {
    if (left() < n)
      throw FormatError(FormatErrorKind::TruncatedFile, "container ends mid-value");
  }

  std::uint64_t varint() {
    std::uint64_t out = 0;
    int shift = 0;
    for (;;) {
      need(1);
      std::uint8_t b = *p++;
      if (shift > 63)
        throw FormatError(FormatErrorKind::TruncatedFile, "varint too long");
      out |= static_cast<std::uint64_t>(b & 0x7F) << shift;
      if (!(b & 0x80)) return out;
      shift += 7;
    }
  }

  std::int64_t zigzag() { return zigzag_decode(varint()); }

  std::span<const std::uint8_t> take(std::size_t n) {
    need(n);
    std::span<const std::uint8_t> out{p, n};
    p += n;
    return out;
  }
};

Json decode_datum(Cursor& cur, const TypeDescriptor& t) {
  switch (t.kind) {
    case TypeDescriptor::Kind::Primitive:
      switch (t.dtype) {
        case Dtype::Int32:
        case Dtype::Int64: return cur.zigzag();
        case Dtype::Float32: return static_cast<double>(load_le<float>(cur.take(4).data()));
        case Dtype::Float64: return load_le<double>(cur.take(8).data());
        case Dtype::Bool: return cur.take(1)[0] != 0;
        default:
          throw FormatError(FormatErrorKind::UnsupportedSchema, "non-Avro primitive");
      }
    case TypeDescriptor::Kind::String:
    case TypeDescriptor::Kind::Bytes: {
      std::int64_t n = cur.zigzag();
      if (n < 0) throw FormatError(FormatErrorKind::TruncatedFile, "negative length");
      auto bytes = cur.take(static_cast<std::size_t>(n));
      return std::string(bytes.begin(), bytes.end());
    }
    case TypeDescriptor::Kind::List: {
      Json out = Json::array();
      for (;;) {
        std::int64_t count = cur.zigzag();
        if (count == 0) break;
        if (count < 0) {
          cur.zigzag();  // byte size of the run, unused here
          count = -count;
        }
        for (std::int64_t k = 0; k < count; ++k)
          out.push_back(decode_datum(cur, t.children.front()));
      }
      return out;
    }
    case TypeDescriptor::Kind::Record: {
      Json out = Json::array();
      for (const auto& child : t.children) out.push_back(decode_datum(cur, child));
      return out;
    }
  }
  return {};
}

void encode_datum(const Json& v, const TypeDescriptor& t, std::vector<std::uint8_t>& out) {
  switch (t.kind) {
    case TypeDescriptor::Kind::Primitive:
      switch (t.dtype) {
        case Dtype::Int32:
        case Dtype::Int64: zigzag_varint_encode(v.get<std::int64_t>(), out); return;
        case Dtype::Float32: {
          out.resize(out.size() + 4);
          store_le<float>(out.data() + out.size() - 4, static_cast<float>(v.get<double>()));
          return;
        }
        case Dtype::Float64: {
          out.resize(out.size() + 8);
          store_le<double>(out.data() + out.size() - 8, v.get<double>());
          return;
        }
        case Dtype::Bool: out.push_back(v.get<bool>() ? 1 : 0); return;
        default: throw FormatError(FormatErrorKind::SchemaMismatch, "non-Avro primitive");
      }
    case TypeDescriptor::Kind::String:
    case TypeDescriptor::Kind::Bytes: {
      const std::string text = v.get<std::string>();
      zigzag_varint_encode(static_cast<std::int64_t>(text.size()), out);
      out.insert(out.end(), text.begin(), text.end());
      return;
    }
    case TypeDescriptor::Kind::List: {
      if (!v.is_array())
        throw FormatError(FormatErrorKind::SchemaMismatch, "expected a list");
      if (!v.empty()) {
        zigzag_varint_encode(static_cast<std::int64_t>(v.size()), out);
        for (const auto& item : v) encode_datum(item, t.children.front(), out);
      }
      out.push_back(0);  // lists end with a zero byte
      return;
    }
    case TypeDescriptor::Kind::Record: {
      if (!v.is_array() || v.size() != t.children.size())
        throw FormatError(FormatErrorKind::SchemaMismatch,
                          "record values are positional arrays");
      for (std::size_t k = 0; k < t.children.size(); ++k)
        encode_datum(v[k], t.children[k], out);
      return;
    }
  }
}

std::array<std::uint8_t, 16> make_sync(std::uint64_t seed) {
  std::array<std::uint8_t, 16> sync{};
  std::uint64_t x = seed * 0x9E3779B97F4A7C15ull + 1;
  for (auto& b : sync) {
    x ^= x << 13;
    x ^= x >> 7;
    x ^= x << 17;
    b = static_cast<std::uint8_t>(x);
  }
  return sync;
}

void write_long(std::vector<std::uint8_t>& out, std::int64_t v) {
  zigzag_varint_encode(v, out);
}

void write_string(std::vector<std::uint8_t>& out, std::string_view s) {
  write_long(out, static_cast<std::int64_t>(s.size()));
  out.insert(out.end(), s.begin(), s.end());
}

std::vector<ColumnSnapshot> decode_block(Machine& machine, const AvroBlock& block,
                                         std::size_t index) {
  std::map<std::string, std::span<const std::uint8_t>> inputs{{"data", block.payload}};
  machine.begin_run(inputs);
  machine.push(block.entries);
  StopReason stop = machine.resume();
  if (stop != StopReason::Done)
    throw FormatError(FormatErrorKind::RuntimeFault,
                      "block " + std::to_string(index) + ": " + machine.stop_text());
  std::vector<ColumnSnapshot> out;
  out.reserve(machine.outputs().size());
  for (const auto& column : machine.outputs()) out.push_back(column.snapshot());
  return out;
}

}  // namespace

TypeDescriptor avro_schema_to_type(const std::string& schema_json) {
  Json j = Json::parse(schema_json, nullptr, false);
  if (j.is_discarded())
    throw FormatError(FormatErrorKind::UnsupportedSchema, "schema is not valid JSON");
  return schema_from(j);
}

std::string type_to_avro_schema(const TypeDescriptor& type) {
  Json j;
  int counter = 0;
  schema_to(type, j, counter);
  return j.dump();
}

AvroContainer parse_avro_container(std::span<const std::uint8_t> file) {
  Cursor cur{file.data(), file.data() + file.size()};
  cur.need(4);
  if (std::memcmp(cur.p, kMagic, 4) != 0)
    throw FormatError(FormatErrorKind::BadMagic, "not an Avro object container");
  cur.p += 4;

  AvroContainer out;
  std::string codec;
  for (;;) {
    std::int64_t count = cur.zigzag();
    if (count == 0) break;
    if (count < 0) {
      cur.zigzag();  // byte size, unused
      count = -count;
    }
    for (std::int64_t k = 0; k < count; ++k) {
      std::int64_t key_len = cur.zigzag();
      auto key = cur.take(static_cast<std::size_t>(key_len));
      std::int64_t val_len = cur.zigzag();
      auto val = cur.take(static_cast<std::size_t>(val_len));
      std::string key_text(key.begin(), key.end());
      if (key_text == "avro.schema") out.schema_json.assign(val.begin(), val.end());
      if (key_text == "avro.codec") codec.assign(val.begin(), val.end());
    }
  }
  if (!codec.empty() && codec != "null")
    throw FormatError(FormatErrorKind::UnsupportedCodec,
                      "codec `" + codec + "` (only null is supported)");
  if (out.schema_json.empty())
    throw FormatError(FormatErrorKind::UnsupportedSchema, "missing avro.schema");
  out.schema = avro_schema_to_type(out.schema_json);

  auto sync = cur.take(16);
  std::copy(sync.begin(), sync.end(), out.sync.begin());

  while (cur.left() > 0) {
    std::int64_t entries = cur.zigzag();
    std::int64_t size = cur.zigzag();
    if (entries < 0 || size < 0)
      throw FormatError(FormatErrorKind::TruncatedFile, "negative block framing");
    AvroBlock block;
    block.entries = entries;
    block.payload = cur.take(static_cast<std::size_t>(size));
    auto block_sync = cur.take(16);
    if (!std::equal(block_sync.begin(), block_sync.end(), out.sync.begin()))
      throw FormatError(FormatErrorKind::SyncMismatch,
                        "block " + std::to_string(out.blocks.size()) +
                            " sync marker differs from the header");
    out.blocks.push_back(block);
  }
  return out;
}

ColumnarResult read_avro(std::span<const std::uint8_t> file, const AvroReadOptions& options) {
  AvroContainer container = parse_avro_container(file);
  const TypeDescriptor& type =
      options.schema_override ? *options.schema_override : container.schema;
  gen::GeneratedProgram generated = gen::avro_program(type, options.list_mode);
  auto program = std::make_shared<const Program>(compile(generated.source));

  std::vector<AvroBlock> blocks = container.blocks;
  if (blocks.empty()) blocks.push_back({0, {}});

  std::vector<std::vector<ColumnSnapshot>> per_block(blocks.size());
  int workers = std::max(1, options.threads);
  if (workers == 1) {
    Machine machine(program);
    for (std::size_t k = 0; k < blocks.size(); ++k)
      per_block[k] = decode_block(machine, blocks[k], k);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> failures(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&per_block, &blocks, &failures, &program, w, workers] {
        try {
          Machine machine(program);
          for (std::size_t k = static_cast<std::size_t>(w); k < blocks.size();
               k += static_cast<std::size_t>(workers))
            per_block[k] = decode_block(machine, blocks[k], k);
        } catch (...) {
          failures[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& failure : failures)
      if (failure) std::rethrow_exception(failure);
  }

  ColumnarResult result;
  result.plan = generated.plan;
  std::int64_t total_entries = 0;
  for (const auto& b : container.blocks) total_entries += b.entries;
  for (const auto& col : generated.plan) result.columns.push_back({col.name, col.dtype, 0, {}});
  for (auto& block_columns : per_block) {
    for (std::size_t c = 0; c < result.columns.size(); ++c)
      append_rebased(result.columns[c], block_columns[c], generated.plan[c].role);
    block_columns.clear();
    block_columns.shrink_to_fit();
  }

  if (auto why = offsets_violation(result, type, total_entries))
    throw FormatError(FormatErrorKind::OffsetsInvalid, *why);
  return result;
}

AvroCorpusWriter::AvroCorpusWriter(std::ostream& out, const TypeDescriptor& schema,
                                   const AvroWriteOptions& options)
    : out_(out), schema_(schema), options_(options), sync_(make_sync(options.sync_seed)) {
  std::vector<std::uint8_t> header;
  header.insert(header.end(), std::begin(kMagic), std::end(kMagic));
  write_long(header, 2);
  write_string(header, "avro.schema");
  write_string(header, type_to_avro_schema(schema));
  write_string(header, "avro.codec");
  write_string(header, "null");
  header.push_back(0);  // end of the metadata map
  header.insert(header.end(), sync_.begin(), sync_.end());
  out_.write(reinterpret_cast<const char*>(header.data()),
             static_cast<std::streamsize>(header.size()));
}

void AvroCorpusWriter::add(const Json& record) {
  encode_datum(record, schema_, block_);
  if (++block_records_ >= options_.block_entries) flush_block();
}

void AvroCorpusWriter::flush_block() {
  if (block_records_ == 0) return;
  std::vector<std::uint8_t> frame;
  write_long(frame, block_records_);
  write_long(frame, static_cast<std::int64_t>(block_.size()));
  out_.write(reinterpret_cast<const char*>(frame.data()),
             static_cast<std::streamsize>(frame.size()));
  out_.write(reinterpret_cast<const char*>(block_.data()),
             static_cast<std::streamsize>(block_.size()));
  out_.write(reinterpret_cast<const char*>(sync_.data()),
             static_cast<std::streamsize>(sync_.size()));
  block_.clear();
  block_records_ = 0;
}

void AvroCorpusWriter::finish() {
  flush_block();
  out_.flush();
}

std::vector<std::uint8_t> write_avro_oracle(const Json& records, const TypeDescriptor& schema,
                                            const AvroWriteOptions& options) {
  std::ostringstream out;
  AvroCorpusWriter writer(out, schema, options);
  for (const auto& r : records) writer.add(r);
  writer.finish();
  const std::string text = out.str();
  return {text.begin(), text.end()};
}

ColumnarResult oracle_decode_avro(std::span<const std::uint8_t> file) {
  AvroContainer container = parse_avro_container(file);
  OracleBuilder builder(container.schema);
  for (const auto& block : container.blocks) {
    Cursor cur{block.payload.data(), block.payload.data() + block.payload.size()};
    for (std::int64_t k = 0; k < block.entries; ++k)
      builder.add(decode_datum(cur, container.schema));
    if (cur.left() != 0)
      throw FormatError(FormatErrorKind::TruncatedFile, "block has trailing bytes");
  }
  return builder.finish();
}

}  // namespace colforth::formats
