#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "colforth/dtype.hpp"

namespace colforth {

struct OutputSpec {
  std::string name;
  Dtype dtype;
  bool operator==(const OutputSpec&) const = default;
};

/// A compiled program: bytecode dictionary plus the declarations needed to
/// bind buffers at run time. Immutable once compiled; shareable across
/// threads.
struct Program {
  /// Entry 0 is the main body; user-defined words and the unnamed bodies of
  /// control structures follow in source order.
  std::vector<std::vector<std::int32_t>> dictionary;

  /// Parallel to `dictionary`: the word name for user definitions, empty for
  /// the main body and synthesized entries.
  std::vector<std::string> entry_names;

  /// User-defined word name -> dictionary entry.
  std::unordered_map<std::string, std::int32_t> word_names;

  std::vector<std::string> variables;
  std::vector<std::string> inputs;
  std::vector<OutputSpec> outputs;

  std::int32_t input_index(std::string_view name) const {
    for (std::size_t k = 0; k < inputs.size(); ++k)
      if (inputs[k] == name) return static_cast<std::int32_t>(k);
    return -1;
  }

  std::int32_t output_index(std::string_view name) const {
    for (std::size_t k = 0; k < outputs.size(); ++k)
      if (outputs[k].name == name) return static_cast<std::int32_t>(k);
    return -1;
  }

  bool operator==(const Program&) const = default;
};

}  // namespace colforth
