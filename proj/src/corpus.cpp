#include "colforth/formats/corpus.hpp"

#include <cmath>

namespace colforth::formats {

namespace {

Json random_leaf(Rng& rng, Dtype dtype) {
  switch (dtype) {
    case Dtype::Bool: return rng.bits() % 2 == 0;
    case Dtype::Int32: return static_cast<std::int64_t>(static_cast<std::int32_t>(rng.bits()));
    case Dtype::Int64:
      // keep a spread of varint lengths, signs included
      return static_cast<std::int64_t>(rng.bits() >> rng.below(64)) *
             (rng.bits() % 2 ? 1 : -1);
    case Dtype::Float32:
      return static_cast<double>(static_cast<float>((rng.uniform() - 0.5) * 2000.0));
    case Dtype::Float64: return (rng.uniform() - 0.5) * 2000.0;
    default: return static_cast<std::int64_t>(rng.bits() & 0xFFFF);
  }
}

std::string random_text(Rng& rng, int max_len) {
  static constexpr char kAlphabet[] =
      "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_";
  std::string out;
  std::int64_t n = rng.below(max_len + 1);
  out.reserve(static_cast<std::size_t>(n));
  for (std::int64_t k = 0; k < n; ++k)
    out.push_back(kAlphabet[rng.below(static_cast<std::int64_t>(sizeof(kAlphabet) - 1))]);
  return out;
}

}  // namespace

Json random_value(Rng& rng, const TypeDescriptor& type, const CorpusOptions& options) {
  switch (type.kind) {
    case TypeDescriptor::Kind::Primitive: return random_leaf(rng, type.dtype);
    case TypeDescriptor::Kind::String:
    case TypeDescriptor::Kind::Bytes: return random_text(rng, 12);
    case TypeDescriptor::Kind::List: {
      int n = options.nonempty_lists ? rng.poisson_nonzero(options.mean_length)
                                     : rng.poisson(options.mean_length);
      Json out = Json::array();
      for (int k = 0; k < n; ++k)
        out.push_back(random_value(rng, type.children.front(), options));
      return out;
    }
    case TypeDescriptor::Kind::Record: {
      Json out = Json::array();
      for (const auto& child : type.children)
        out.push_back(random_value(rng, child, options));
      return out;
    }
  }
  return {};
}

namespace {

TypeDescriptor random_schema_node(Rng& rng, int list_budget, int depth_left) {
  static const Dtype kPrimitives[] = {Dtype::Bool, Dtype::Int32, Dtype::Int64,
                                      Dtype::Float32, Dtype::Float64};
  if (depth_left == 0 || list_budget == 0) {
    if (rng.below(5) == 0) return TypeDescriptor::string();
    return TypeDescriptor::primitive(kPrimitives[rng.below(5)]);
  }
  switch (rng.below(8)) {
    case 0:
    case 1:
    case 2:
      return TypeDescriptor::list(random_schema_node(rng, list_budget - 1, depth_left - 1));
    case 3: {
      std::vector<std::pair<std::string, TypeDescriptor>> fields;
      std::int64_t n = 1 + rng.below(3);
      for (std::int64_t k = 0; k < n; ++k)
        fields.emplace_back("f" + std::to_string(k),
                            random_schema_node(rng, list_budget - 1, depth_left - 1));
      return TypeDescriptor::record(std::move(fields));
    }
    case 4: return TypeDescriptor::string();
    default: return TypeDescriptor::primitive(kPrimitives[rng.below(5)]);
  }
}

}  // namespace

TypeDescriptor random_schema(Rng& rng, int max_depth) {
  // bias the root toward structure so the schemas exercise nesting
  if (rng.below(4) == 0)
    return random_schema_node(rng, max_depth, max_depth);
  if (rng.below(2) == 0)
    return TypeDescriptor::list(random_schema_node(rng, max_depth - 1, max_depth - 1));
  std::vector<std::pair<std::string, TypeDescriptor>> fields;
  std::int64_t n = 1 + rng.below(3);
  for (std::int64_t k = 0; k < n; ++k)
    fields.emplace_back("f" + std::to_string(k),
                        random_schema_node(rng, max_depth - 1, max_depth - 1));
  return TypeDescriptor::record(std::move(fields));
}

}  // namespace colforth::formats
