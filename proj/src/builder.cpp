#include "colforth/builder.hpp"

#include "colforth/compiler.hpp"
#include "colforth/endian.hpp"

namespace colforth {

namespace {

gen::GeneratedProgram generate_checked(const TypeDescriptor& descriptor,
                                       gen::BuilderCommandIds ids) {
  const TypeDescriptor* leaf = &descriptor;
  int depth = 0;
  while (leaf->kind == TypeDescriptor::Kind::List) {
    leaf = &leaf->children.front();
    ++depth;
  }
  if (depth < 1 || leaf->kind != TypeDescriptor::Kind::Primitive ||
      !dtype_is_float(leaf->dtype))
    throw UnsupportedDescriptorError(
        "builder descriptors are nested lists of one float leaf");
  return gen::builder_program(descriptor, ids);
}

}  // namespace

Builder::Builder(const TypeDescriptor& descriptor, gen::BuilderCommandIds ids)
    : descriptor_(descriptor),
      ids_(ids),
      generated_(generate_checked(descriptor, ids)),
      machine_(compile(generated_.source)) {
  reset();
}

void Builder::reset() {
  machine_.reset();
  scratch_.fill(0);
  std::map<std::string, std::span<const std::uint8_t>> inputs{{"data", scratch_}};
  machine_.begin_run(inputs);
  if (machine_.resume() != StopReason::Paused)
    throw Error("builder program failed to reach its first pause: " + machine_.stop_text());
  open_ = 0;
  poisoned_ = false;
}

SendOutcome Builder::send(std::int64_t command, std::optional<double> value) {
  if (poisoned_) throw BuilderPoisonedError();
  if (value) store_le<double>(scratch_.data(), *value);
  machine_.push(command);
  StopReason stop = machine_.resume();
  if (stop == StopReason::Paused) {
    if (command == ids_.begin_list) ++open_;
    if (command == ids_.end_list) --open_;
    return SendOutcome::Accepted;
  }
  if (stop == StopReason::Error && machine_.error() == RuntimeErrorKind::UserHalt) {
    poisoned_ = true;
    return SendOutcome::Rejected;
  }
  throw Error("builder program stopped unexpectedly: " + machine_.stop_text());
}

std::vector<ColumnSnapshot> Builder::snapshot_columns() const {
  std::vector<ColumnSnapshot> out;
  out.reserve(machine_.outputs().size());
  for (const auto& column : machine_.outputs()) out.push_back(column.snapshot());
  return out;
}

ColumnarResult Builder::finish() const {
  if (poisoned_) throw BuilderPoisonedError();
  if (open_ != 0)
    throw UnbalancedListsError(std::to_string(open_) + " list(s) still open");
  ColumnarResult result;
  result.plan = generated_.plan;
  result.columns = snapshot_columns();
  return result;
}

}  // namespace colforth
