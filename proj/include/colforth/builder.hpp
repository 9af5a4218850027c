#pragma once

#include <array>
#include <cstdint>

#include "colforth/columnar.hpp"
#include "colforth/errors.hpp"
#include "colforth/generators.hpp"
#include "colforth/machine.hpp"
#include "colforth/typedesc.hpp"

namespace colforth {

struct UnsupportedDescriptorError : Error {
  using Error::Error;
};

struct BuilderPoisonedError : Error {
  BuilderPoisonedError() : Error("builder rejected a command; reset before continuing") {}
};

struct UnbalancedListsError : Error {
  using Error::Error;
};

enum class SendOutcome : std::uint8_t { Accepted, Rejected };

/// Command-driven append-only array builder: a paused machine running a
/// generated program, "wired" to commands by the integers pushed on its
/// stack. One builder = one machine; not shareable across threads.
class Builder {
 public:
  explicit Builder(const TypeDescriptor& descriptor, gen::BuilderCommandIds ids = {});

  Builder(const Builder&) = delete;
  Builder& operator=(const Builder&) = delete;

  SendOutcome begin_list() { return send(ids_.begin_list, {}); }
  SendOutcome end_list() { return send(ids_.end_list, {}); }
  SendOutcome append(double value) { return send(ids_.append, value); }

  /// Pushes an arbitrary command id (with the append payload when given)
  /// and resumes. Rejection poisons the builder until reset().
  SendOutcome send(std::int64_t command, std::optional<double> value);

  bool poisoned() const { return poisoned_; }
  int open_lists() const { return open_; }
  const gen::GeneratedProgram& generated() const { return generated_; }

  /// Snapshot of the columns built so far; requires balanced begin/end.
  ColumnarResult finish() const;

  /// Raw column view without the balance requirement.
  std::vector<ColumnSnapshot> snapshot_columns() const;

  /// Fresh run of the same program: columns are discarded, commands are
  /// accepted again.
  void reset();

 private:
  TypeDescriptor descriptor_;
  gen::BuilderCommandIds ids_;
  gen::GeneratedProgram generated_;
  Machine machine_;
  std::array<std::uint8_t, 8> scratch_{};
  int open_ = 0;
  bool poisoned_ = false;
};

}  // namespace colforth
