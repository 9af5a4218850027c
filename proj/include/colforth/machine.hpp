#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "colforth/buffers.hpp"
#include "colforth/errors.hpp"
#include "colforth/program.hpp"

namespace colforth {

enum class StopReason : std::uint8_t { NotStarted, Paused, Done, Error };

constexpr std::string_view stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::NotStarted: return "not started";
    case StopReason::Paused: return "paused";
    case StopReason::Done: return "done";
    case StopReason::Error: return "error";
  }
  return "?";
}

struct MachineLimits {
  std::size_t stack_depth = 2048;
  std::size_t call_depth = 1024;
};

struct TraceStep {
  std::string word;
  std::vector<std::int64_t> stack;
};

/// Executes a compiled Program. Single-threaded while resumed; distinct
/// machines share nothing but the (immutable) program.
class Machine {
 public:
  explicit Machine(std::shared_ptr<const Program> program, MachineLimits limits = {});
  explicit Machine(Program program, MachineLimits limits = {});

  const Program& program() const { return *program_; }

  /// Binds input bytes (one span per declared input; the bytes must stay
  /// alive until reset or the next begin_run), creates fresh outputs, zeroes
  /// variables, clears the stack, and parks the cursor at the start of the
  /// main body. Throws MissingInputError for an absent declared input.
  void begin_run(const std::map<std::string, std::span<const std::uint8_t>>& inputs);

  /// Runs until pause, halt, the end of the main body, or a runtime error.
  /// Runtime errors never throw; they are reported in stop()/error().
  /// Resuming a machine already done or in error is a no-op returning the
  /// same stop reason.
  StopReason resume();

  /// Executes up to max_words words, recording each word and the stack
  /// after it. Shares all semantics with resume().
  std::vector<TraceStep> step_trace(std::size_t max_words);

  /// Back to the pre-begin_run state; the program is retained, buffers are
  /// released. Idempotent.
  void reset();

  StopReason stop() const { return stop_; }
  RuntimeErrorKind error() const { return error_; }

  /// "not started", "paused", "done", or the error name ("seek beyond", ...).
  std::string stop_text() const {
    return stop_ == StopReason::Error ? std::string(runtime_error_name(error_))
                                      : std::string(stop_reason_name(stop_));
  }

  // Host-side stack access, valid between resumes.
  void push(std::int64_t value);
  std::int64_t pop();
  std::vector<std::int64_t> stack() const {
    return {stack_.begin(), stack_.begin() + static_cast<std::ptrdiff_t>(sp_)};
  }
  std::size_t stack_depth() const { return sp_; }

  const std::vector<OutputBuffer>& outputs() const { return outputs_; }
  const OutputBuffer& output(std::string_view name) const;
  OutputBuffer& output(std::string_view name);

  std::size_t input_position(std::string_view name) const;
  std::int64_t variable(std::string_view name) const;

  /// Words dispatched since begin_run.
  std::uint64_t words_executed() const { return words_; }

 private:
  enum FrameKind : std::uint8_t {
    FrameMain,
    FrameWord,
    FrameCond,
    FrameDo,
    FrameDoStep,
    FrameAgain,
    FrameUntil,
    FrameWhileCond,
    FrameWhileBody,
  };

  struct Frame {
    std::int32_t entry;
    std::uint32_t ip;
    FrameKind kind;
    std::int32_t cond_entry;  // while loops only
    std::int32_t body_entry;
  };

  struct LoopFrame {
    std::int64_t index;
    std::int64_t limit;
  };

  template <class Tracer>
  void run_loop(Tracer& tracer, std::uint64_t budget);

  void require_ready() const;

  std::shared_ptr<const Program> program_;
  MachineLimits limits_;
  bool ready_ = false;
  StopReason stop_ = StopReason::NotStarted;
  RuntimeErrorKind error_ = RuntimeErrorKind::None;

  std::vector<std::int64_t> stack_;
  std::size_t sp_ = 0;
  std::vector<std::int64_t> variables_;
  std::vector<Frame> frames_;
  std::vector<LoopFrame> loops_;
  std::vector<InputBuffer> inputs_;
  std::vector<OutputBuffer> outputs_;
  std::uint64_t words_ = 0;
};

}  // namespace colforth
