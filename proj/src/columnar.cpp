#include "colforth/columnar.hpp"

#include "colforth/endian.hpp"

namespace colforth {

std::vector<std::int64_t> column_values(const ColumnSnapshot& column) {
  std::vector<std::int64_t> out;
  out.reserve(static_cast<std::size_t>(column.length));
  const std::uint8_t* p = column.bytes.data();
  for (std::int64_t k = 0; k < column.length; ++k) {
    switch (column.dtype) {
      case Dtype::Bool:
      case Dtype::UInt8: out.push_back(p[k]); break;
      case Dtype::Int8: out.push_back(static_cast<std::int8_t>(p[k])); break;
      case Dtype::Int16: out.push_back(load_le<std::int16_t>(p + 2 * k)); break;
      case Dtype::UInt16: out.push_back(load_le<std::uint16_t>(p + 2 * k)); break;
      case Dtype::Int32: out.push_back(load_le<std::int32_t>(p + 4 * k)); break;
      case Dtype::UInt32: out.push_back(load_le<std::uint32_t>(p + 4 * k)); break;
      case Dtype::Int64: out.push_back(load_le<std::int64_t>(p + 8 * k)); break;
      case Dtype::UInt64:
        out.push_back(static_cast<std::int64_t>(load_le<std::uint64_t>(p + 8 * k)));
        break;
      case Dtype::Float32: out.push_back(float_to_cell(load_le<float>(p + 4 * k))); break;
      case Dtype::Float64: out.push_back(float_to_cell(load_le<double>(p + 8 * k))); break;
    }
  }
  return out;
}

std::vector<double> column_floats(const ColumnSnapshot& column) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(column.length));
  const std::uint8_t* p = column.bytes.data();
  for (std::int64_t k = 0; k < column.length; ++k) {
    if (column.dtype == Dtype::Float32)
      out.push_back(load_le<float>(p + 4 * k));
    else if (column.dtype == Dtype::Float64)
      out.push_back(load_le<double>(p + 8 * k));
    else
      out.push_back(static_cast<double>(column_values(column)[static_cast<std::size_t>(k)]));
  }
  return out;
}

std::string offsets_column_name(const std::string& path, int level) {
  return path + "offsets" + std::to_string(level);
}

std::string content_column_name(const std::string& path) { return path + "content"; }

namespace {

void plan_walk(const TypeDescriptor& t, const std::string& path, int level,
               Dtype offsets_dtype, std::vector<ColumnPlanEntry>& out) {
  switch (t.kind) {
    case TypeDescriptor::Kind::Primitive:
      out.push_back({content_column_name(path), path, ColumnRole::Content, -1, t.dtype});
      break;
    case TypeDescriptor::Kind::List:
      out.push_back({offsets_column_name(path, level), path, ColumnRole::Offsets, level,
                     offsets_dtype});
      plan_walk(t.children.front(), path, level + 1, offsets_dtype, out);
      break;
    case TypeDescriptor::Kind::String:
    case TypeDescriptor::Kind::Bytes:
      out.push_back({offsets_column_name(path, level), path, ColumnRole::Offsets, level,
                     offsets_dtype});
      out.push_back({content_column_name(path), path, ColumnRole::Content, -1, Dtype::UInt8});
      break;
    case TypeDescriptor::Kind::Record:
      for (std::size_t k = 0; k < t.children.size(); ++k)
        plan_walk(t.children[k], path + t.field_names[k] + ".", 0, offsets_dtype, out);
      break;
  }
}

struct Validator {
  const ColumnarResult& result;
  std::optional<std::int64_t> leaf_count;
  std::string violation;

  bool check(const TypeDescriptor& t, const std::string& path, int level,
             std::optional<std::int64_t> expect) {
    switch (t.kind) {
      case TypeDescriptor::Kind::Primitive: {
        const ColumnSnapshot* col = result.find(content_column_name(path));
        std::int64_t have;
        if (col) {
          have = col->length;
        } else if (leaf_count) {
          have = *leaf_count;
        } else {
          violation = "missing content column `" + content_column_name(path) + "`";
          return false;
        }
        if (expect && have != *expect) {
          violation = "content `" + content_column_name(path) + "` has " +
                      std::to_string(have) + " values, expected " + std::to_string(*expect);
          return false;
        }
        return true;
      }
      case TypeDescriptor::Kind::List:
      case TypeDescriptor::Kind::String:
      case TypeDescriptor::Kind::Bytes: {
        std::string name = offsets_column_name(path, level);
        const ColumnSnapshot* col = result.find(name);
        if (!col) {
          violation = "missing offsets column `" + name + "`";
          return false;
        }
        auto vals = column_values(*col);
        if (vals.empty() || vals.front() != 0) {
          violation = "offsets `" + name + "` must start with 0";
          return false;
        }
        if (expect && static_cast<std::int64_t>(vals.size()) != *expect + 1) {
          violation = "offsets `" + name + "` has " + std::to_string(vals.size()) +
                      " entries, expected " + std::to_string(*expect + 1);
          return false;
        }
        for (std::size_t k = 1; k < vals.size(); ++k)
          if (vals[k] < vals[k - 1]) {
            violation = "offsets `" + name + "` decreases at entry " + std::to_string(k);
            return false;
          }
        std::int64_t deeper = vals.back();
        if (t.kind == TypeDescriptor::Kind::List)
          return check(t.children.front(), path, level + 1, deeper);
        // strings/bytes wrap a uint8 content column
        TypeDescriptor leaf = TypeDescriptor::primitive(Dtype::UInt8);
        return check(leaf, path, 0, deeper);
      }
      case TypeDescriptor::Kind::Record: {
        for (std::size_t k = 0; k < t.children.size(); ++k)
          if (!check(t.children[k], path + t.field_names[k] + ".", 0, expect)) return false;
        return true;
      }
    }
    return true;
  }
};

}  // namespace

std::vector<ColumnPlanEntry> build_column_plan(const TypeDescriptor& type,
                                               Dtype offsets_dtype) {
  std::vector<ColumnPlanEntry> out;
  plan_walk(type, "", 0, offsets_dtype, out);
  return out;
}

std::optional<std::string> offsets_violation(const ColumnarResult& result,
                                             const TypeDescriptor& type,
                                             std::optional<std::int64_t> root_count,
                                             std::optional<std::int64_t> leaf_count) {
  Validator v{result, leaf_count, {}};
  if (!v.check(type, "", 0, root_count)) return v.violation;
  return std::nullopt;
}

void append_rebased(ColumnSnapshot& acc, const ColumnSnapshot& block, ColumnRole role) {
  if (role == ColumnRole::Content) {
    acc.bytes.insert(acc.bytes.end(), block.bytes.begin(), block.bytes.end());
    acc.length += block.length;
    return;
  }
  auto vals = column_values(block);
  std::size_t first = 0;
  std::int64_t base = 0;
  std::size_t width = dtype_width(acc.dtype);
  if (acc.length > 0) {
    const std::uint8_t* tail = acc.bytes.data() + acc.bytes.size() - width;
    base = acc.dtype == Dtype::Int64 ? load_le<std::int64_t>(tail)
                                     : load_le<std::int32_t>(tail);
    first = 1;  // drop the block's leading 0
  }
  if (vals.size() > first) {
    std::uint8_t* dst = acc.bytes.data() + acc.bytes.size();
    acc.bytes.resize(acc.bytes.size() + (vals.size() - first) * width);
    dst = acc.bytes.data() + acc.bytes.size() - (vals.size() - first) * width;
    for (std::size_t k = first; k < vals.size(); ++k, dst += width) {
      std::int64_t v = vals[k] + base;
      if (acc.dtype == Dtype::Int64)
        store_le<std::int64_t>(dst, v);
      else
        store_le<std::int32_t>(dst, static_cast<std::int32_t>(v));
    }
    acc.length += static_cast<std::int64_t>(vals.size() - first);
  }
}

}  // namespace colforth
