#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "colforth/buffers.hpp"
#include "colforth/typedesc.hpp"

namespace colforth {

enum class ColumnRole : std::uint8_t { Offsets, Content };

/// One entry of the column plan a generator commits to: which output name
/// plays which structural role. `path` is the dotted record-field prefix
/// ("" at the top level); offsets levels restart at 0 inside each field.
struct ColumnPlanEntry {
  std::string name;
  std::string path;
  ColumnRole role = ColumnRole::Content;
  int level = -1;  // offsets columns only
  Dtype dtype = Dtype::Int32;
  bool operator==(const ColumnPlanEntry&) const = default;
};

/// Offsets columns over content columns, as produced by a decode run.
struct ColumnarResult {
  std::vector<ColumnSnapshot> columns;
  std::vector<ColumnPlanEntry> plan;

  const ColumnSnapshot* find(std::string_view name) const {
    for (const auto& c : columns)
      if (c.name == name) return &c;
    return nullptr;
  }

  bool operator==(const ColumnarResult&) const = default;
};

/// Decodes a column into 64-bit cells (used for offsets math and tests).
std::vector<std::int64_t> column_values(const ColumnSnapshot& column);
std::vector<double> column_floats(const ColumnSnapshot& column);

/// Column names used by every generator: `<path>offsets<level>` and
/// `<path>content`.
std::string offsets_column_name(const std::string& path, int level);
std::string content_column_name(const std::string& path);

/// Builds the plan a generator declares for `type` (the names and roles of
/// every output, in declaration order).
std::vector<ColumnPlanEntry> build_column_plan(const TypeDescriptor& type,
                                               Dtype offsets_dtype = Dtype::Int32);

/// Checks the offsets validity invariant on every column of the result:
/// first element 0, non-decreasing, last element equal to the next-deeper
/// column's length. `root_count` is the expected number of top-level values
/// when the caller knows it; `leaf_count` substitutes for content length in
/// offsets-only results (no content column, e.g. the repetition-level
/// pipeline). Returns a violation description, or nullopt when valid.
std::optional<std::string> offsets_violation(const ColumnarResult& result,
                                             const TypeDescriptor& type,
                                             std::optional<std::int64_t> root_count = {},
                                             std::optional<std::int64_t> leaf_count = {});

/// Appends one block's column to a growing global column, re-basing offsets:
/// a non-initial block drops its leading 0 and is shifted by the running
/// last offset.
void append_rebased(ColumnSnapshot& acc, const ColumnSnapshot& block, ColumnRole role);

}  // namespace colforth
