#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "colforth/columnar.hpp"
#include "colforth/formats/oracle.hpp"
#include "colforth/generators.hpp"
#include "colforth/typedesc.hpp"

namespace colforth::formats {

/// Maps an Avro schema (JSON text) onto a TypeDescriptor. Exactly the
/// structural subset is accepted: primitives int/long/float/double/boolean,
/// string, bytes, arrays, and records; anything else raises
/// FormatError(UnsupportedSchema).
TypeDescriptor avro_schema_to_type(const std::string& schema_json);

/// Canonical schema JSON for a descriptor (records get synthesized names).
std::string type_to_avro_schema(const TypeDescriptor& type);

struct AvroBlock {
  std::int64_t entries = 0;
  std::span<const std::uint8_t> payload;
};

struct AvroContainer {
  std::string schema_json;
  TypeDescriptor schema;
  std::array<std::uint8_t, 16> sync{};
  std::vector<AvroBlock> blocks;  // views into the file bytes
};

/// Parses header, metadata, and block framing (codec must be null/absent).
AvroContainer parse_avro_container(std::span<const std::uint8_t> file);

struct AvroReadOptions {
  int threads = 1;
  gen::AvroListMode list_mode = gen::AvroListMode::General;
  /// Decode with this type instead of the embedded schema.
  std::optional<TypeDescriptor> schema_override;
};

/// Decodes a container through the generated program, one machine per
/// worker over disjoint blocks, offsets re-based into one global result.
ColumnarResult read_avro(std::span<const std::uint8_t> file,
                         const AvroReadOptions& options = {});

struct AvroWriteOptions {
  std::int64_t block_entries = 1000;
  std::uint64_t sync_seed = 0x5EED;
};

/// Container writer used to build test corpora: codec null, lists encoded
/// as a single block run (count, items, zero terminator).
std::vector<std::uint8_t> write_avro_oracle(const Json& records,
                                            const TypeDescriptor& schema,
                                            const AvroWriteOptions& options = {});

/// Byte-level reference decoder: same container, no virtual machine.
ColumnarResult oracle_decode_avro(std::span<const std::uint8_t> file);

/// Streaming writer for large corpora: records are encoded one at a time
/// and flushed in blocks.
class AvroCorpusWriter {
 public:
  AvroCorpusWriter(std::ostream& out, const TypeDescriptor& schema,
                   const AvroWriteOptions& options = {});
  void add(const Json& record);
  void finish();

 private:
  void flush_block();

  std::ostream& out_;
  TypeDescriptor schema_;
  AvroWriteOptions options_;
  std::array<std::uint8_t, 16> sync_{};
  std::vector<std::uint8_t> block_;
  std::int64_t block_records_ = 0;
};

}  // namespace colforth::formats
