#pragma once

#include <json.hpp>
#include <span>

#include "colforth/columnar.hpp"
#include "colforth/typedesc.hpp"

namespace colforth::formats {

using Json = nlohmann::json;

/// Builds the expected columns for nested values directly, without the
/// virtual machine: the reference the generated-program pipelines are
/// checked against. Records are positional JSON arrays (one element per
/// schema field); strings/bytes are JSON strings.
class OracleBuilder {
 public:
  explicit OracleBuilder(const TypeDescriptor& type);

  void add(const Json& record);
  std::int64_t records() const { return records_; }

  /// Columns in plan order; the builder stays usable afterwards.
  ColumnarResult finish() const;

 private:
  struct Acc {
    Dtype dtype;
    std::vector<std::uint8_t> bytes;
    std::int64_t length = 0;
    std::int64_t total = 0;  // running count for offsets columns
  };

  void walk(const Json& value, const TypeDescriptor& t, std::size_t& at);
  void append_leaf(const Json& value, Dtype dtype, Acc& acc);

  TypeDescriptor type_;
  std::vector<ColumnPlanEntry> plan_;
  std::vector<Acc> accs_;
  std::int64_t records_ = 0;
};

/// One-shot convenience over OracleBuilder.
ColumnarResult columns_from_nested(const Json& records, const TypeDescriptor& type);

}  // namespace colforth::formats
