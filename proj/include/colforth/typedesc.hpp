#pragma once

#include <string>
#include <utility>
#include <vector>

#include "colforth/dtype.hpp"

namespace colforth {

/// Shape of the data a program is generated for: a finite tree of lists,
/// records, strings/bytes, and numeric leaves.
struct TypeDescriptor {
  enum class Kind : std::uint8_t { Primitive, List, Record, String, Bytes };

  Kind kind = Kind::Primitive;
  Dtype dtype = Dtype::Float64;             // Primitive only
  std::vector<TypeDescriptor> children;     // List: exactly one; Record: one per field
  std::vector<std::string> field_names;     // Record only

  static TypeDescriptor primitive(Dtype dt) {
    TypeDescriptor t;
    t.kind = Kind::Primitive;
    t.dtype = dt;
    return t;
  }

  static TypeDescriptor list(TypeDescriptor child) {
    TypeDescriptor t;
    t.kind = Kind::List;
    t.children.push_back(std::move(child));
    return t;
  }

  static TypeDescriptor record(std::vector<std::pair<std::string, TypeDescriptor>> fields) {
    TypeDescriptor t;
    t.kind = Kind::Record;
    for (auto& [name, child] : fields) {
      t.field_names.push_back(std::move(name));
      t.children.push_back(std::move(child));
    }
    return t;
  }

  static TypeDescriptor string() {
    TypeDescriptor t;
    t.kind = Kind::String;
    return t;
  }

  static TypeDescriptor bytes() {
    TypeDescriptor t;
    t.kind = Kind::Bytes;
    return t;
  }

  /// Nested lists of a single numeric leaf, `depth` levels deep.
  static TypeDescriptor nested_lists(int depth, Dtype leaf) {
    TypeDescriptor t = primitive(leaf);
    for (int k = 0; k < depth; ++k) t = list(std::move(t));
    return t;
  }

  /// Deepest count of list levels along any path.
  int depth() const {
    int best = 0;
    if (kind == Kind::List) {
      best = 1 + children.front().depth();
    } else if (kind == Kind::Record) {
      for (const auto& c : children) best = std::max(best, c.depth());
    }
    return best;
  }

  bool operator==(const TypeDescriptor&) const = default;
};

}  // namespace colforth
