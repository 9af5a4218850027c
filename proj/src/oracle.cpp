#include "colforth/formats/oracle.hpp"

#include "colforth/endian.hpp"

namespace colforth::formats {

namespace {

std::size_t plan_width(const TypeDescriptor& t) {
  switch (t.kind) {
    case TypeDescriptor::Kind::Primitive: return 1;
    case TypeDescriptor::Kind::List: return 1 + plan_width(t.children.front());
    case TypeDescriptor::Kind::String:
    case TypeDescriptor::Kind::Bytes: return 2;
    case TypeDescriptor::Kind::Record: {
      std::size_t n = 0;
      for (const auto& c : t.children) n += plan_width(c);
      return n;
    }
  }
  return 0;
}

}  // namespace

OracleBuilder::OracleBuilder(const TypeDescriptor& type)
    : type_(type), plan_(build_column_plan(type)) {
  accs_.resize(plan_.size());
  for (std::size_t k = 0; k < plan_.size(); ++k) {
    accs_[k].dtype = plan_[k].dtype;
    if (plan_[k].role == ColumnRole::Offsets) {
      accs_[k].bytes.resize(4, 0);  // offsets start at zero
      accs_[k].length = 1;
    }
  }
}

void OracleBuilder::append_leaf(const Json& value, Dtype dtype, Acc& acc) {
  auto put = [&](auto v) {
    acc.bytes.resize(acc.bytes.size() + sizeof(v));
    store_le(acc.bytes.data() + acc.bytes.size() - sizeof(v), v);
    ++acc.length;
  };
  switch (dtype) {
    case Dtype::Bool:
      put(static_cast<std::uint8_t>(value.get<bool>() ? 1 : 0));
      break;
    case Dtype::Int32: put(static_cast<std::int32_t>(value.get<std::int64_t>())); break;
    case Dtype::Int64: put(value.get<std::int64_t>()); break;
    case Dtype::Float32: put(static_cast<float>(value.get<double>())); break;
    case Dtype::Float64: put(value.get<double>()); break;
    default: put(static_cast<std::int64_t>(value.get<std::int64_t>())); break;
  }
}

void OracleBuilder::walk(const Json& value, const TypeDescriptor& t, std::size_t& at) {
  switch (t.kind) {
    case TypeDescriptor::Kind::Primitive:
      append_leaf(value, plan_[at].dtype, accs_[at]);
      ++at;
      break;
    case TypeDescriptor::Kind::List: {
      Acc& offsets = accs_[at];
      offsets.total += static_cast<std::int64_t>(value.size());
      offsets.bytes.resize(offsets.bytes.size() + 4);
      store_le<std::int32_t>(offsets.bytes.data() + offsets.bytes.size() - 4,
                             static_cast<std::int32_t>(offsets.total));
      ++offsets.length;
      std::size_t child_at = at + 1;
      for (const auto& item : value) {
        child_at = at + 1;
        walk(item, t.children.front(), child_at);
      }
      at += plan_width(t);
      break;
    }
    case TypeDescriptor::Kind::String:
    case TypeDescriptor::Kind::Bytes: {
      const std::string text = value.get<std::string>();
      Acc& offsets = accs_[at];
      offsets.total += static_cast<std::int64_t>(text.size());
      offsets.bytes.resize(offsets.bytes.size() + 4);
      store_le<std::int32_t>(offsets.bytes.data() + offsets.bytes.size() - 4,
                             static_cast<std::int32_t>(offsets.total));
      ++offsets.length;
      Acc& content = accs_[at + 1];
      content.bytes.insert(content.bytes.end(), text.begin(), text.end());
      content.length += static_cast<std::int64_t>(text.size());
      at += 2;
      break;
    }
    case TypeDescriptor::Kind::Record: {
      for (std::size_t k = 0; k < t.children.size(); ++k) walk(value[k], t.children[k], at);
      break;
    }
  }
}

void OracleBuilder::add(const Json& record) {
  std::size_t at = 0;
  walk(record, type_, at);
  ++records_;
}

ColumnarResult OracleBuilder::finish() const {
  ColumnarResult out;
  out.plan = plan_;
  for (std::size_t k = 0; k < plan_.size(); ++k)
    out.columns.push_back({plan_[k].name, accs_[k].dtype, accs_[k].length, accs_[k].bytes});
  return out;
}

ColumnarResult columns_from_nested(const Json& records, const TypeDescriptor& type) {
  OracleBuilder builder(type);
  for (const auto& r : records) builder.add(r);
  return builder.finish();
}

}  // namespace colforth::formats
