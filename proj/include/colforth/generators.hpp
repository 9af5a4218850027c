#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "colforth/columnar.hpp"
#include "colforth/typedesc.hpp"

namespace colforth::gen {

/// Source text plus the column plan it declares. Builder templates also
/// report the command integers that were substituted in.
struct GeneratedProgram {
  std::string source;
  std::vector<ColumnPlanEntry> plan;
  std::map<std::string, std::int64_t> placeholders;
};

/// How generated Avro list decoders treat array block runs.
enum class AvroListMode {
  /// Loop over successive blocks until the zero count; negative counts
  /// consume the byte-size long and decode |count| items.
  General,
  /// Single block plus terminating zero byte, consumed unchecked.
  SingleBlock,
};

/// Nested-vector payload reader: inputs `data` and `byte_offsets`, one
/// int32 offsets column per nesting level plus a leaf content column. The
/// outer loop runs until the final byte offset seeks past the payload end,
/// so a complete run stops with the seek-beyond error.
GeneratedProgram tbasket_program(int depth, Dtype leaf);

/// Avro datum decoder for one container block; the host pushes the block's
/// entry count before resuming.
GeneratedProgram avro_program(const TypeDescriptor& schema,
                              AvroListMode mode = AvroListMode::General);

/// Stage one of the repetition-level pipeline: unpacks a length-prefixed
/// RLE / bit-packed hybrid stream into a uint8 `replevels` column. Values
/// are max_level+1 wide: ceil(log2(max_level+1)) bits each.
GeneratedProgram replevel_decoder(int max_level);

/// Stage two: folds a `replevels` input into one int32 offsets column per
/// nesting level.
GeneratedProgram replevel_to_offsets(int depth);

struct BuilderCommandIds {
  std::int64_t begin_list = 0;
  std::int64_t end_list = 1;
  std::int64_t append = 2;
};

/// Command-driven builder template over nested lists of one float leaf:
/// one word per list node plus a leaf word reading the 8-byte value the
/// host placed at the start of input `data`; the main body pauses forever.
GeneratedProgram builder_program(const TypeDescriptor& descriptor,
                                 BuilderCommandIds ids = {});

}  // namespace colforth::gen
