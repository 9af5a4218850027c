#include "colforth/machine.hpp"

#include <cassert>
#include <stdexcept>

#include "colforth/bytecode.hpp"
#include "colforth/compiler.hpp"

namespace colforth {

namespace {

struct NullTracer {
  static constexpr bool enabled = false;
  void record(const Program&, const std::int32_t*, const std::int64_t*, std::size_t) {}
};

struct RecordingTracer {
  static constexpr bool enabled = true;
  std::vector<TraceStep>& steps;
  void record(const Program& p, const std::int32_t* insn, const std::int64_t* stack,
              std::size_t depth) {
    steps.push_back({instruction_word(p, insn), {stack, stack + depth}});
  }
};

inline std::int64_t wrap_add(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) +
                                   static_cast<std::uint64_t>(b));
}

}  // namespace

Machine::Machine(std::shared_ptr<const Program> program, MachineLimits limits)
    : program_(std::move(program)), limits_(limits) {
  if (!program_) throw std::invalid_argument("machine needs a program");
  stack_.resize(limits_.stack_depth);
  variables_.resize(program_->variables.size(), 0);
  frames_.reserve(limits_.call_depth + 1);
}

Machine::Machine(Program program, MachineLimits limits)
    : Machine(std::make_shared<const Program>(std::move(program)), limits) {}

void Machine::begin_run(const std::map<std::string, std::span<const std::uint8_t>>& inputs) {
  for (const auto& [name, bytes] : inputs) {
    (void)bytes;
    if (program_->input_index(name) < 0)
      throw std::invalid_argument("input `" + name + "` is not declared by the program");
  }
  inputs_.clear();
  for (const auto& name : program_->inputs) {
    auto at = inputs.find(name);
    if (at == inputs.end())
      throw MissingInputError("no bytes supplied for input `" + name + "`");
    inputs_.emplace_back(name, at->second);
  }
  outputs_.clear();
  for (const auto& spec : program_->outputs) outputs_.emplace_back(spec.name, spec.dtype);
  std::fill(variables_.begin(), variables_.end(), 0);
  sp_ = 0;
  loops_.clear();
  frames_.clear();
  frames_.push_back({0, 0, FrameMain, -1, -1});
  words_ = 0;
  error_ = RuntimeErrorKind::None;
  stop_ = StopReason::NotStarted;
  ready_ = true;
}

void Machine::reset() {
  ready_ = false;
  stop_ = StopReason::NotStarted;
  error_ = RuntimeErrorKind::None;
  sp_ = 0;
  words_ = 0;
  frames_.clear();
  loops_.clear();
  inputs_.clear();
  outputs_.clear();
}

void Machine::require_ready() const {
  if (!ready_) throw std::logic_error("begin_run must be called before resuming");
}

StopReason Machine::resume() {
  require_ready();
  if (stop_ == StopReason::Done || stop_ == StopReason::Error) return stop_;
  NullTracer tracer;
  run_loop(tracer, 0);
  return stop_;
}

std::vector<TraceStep> Machine::step_trace(std::size_t max_words) {
  require_ready();
  std::vector<TraceStep> steps;
  if (max_words == 0 || stop_ == StopReason::Done || stop_ == StopReason::Error)
    return steps;
  RecordingTracer tracer{steps};
  run_loop(tracer, max_words);
  return steps;
}

void Machine::push(std::int64_t value) {
  if (sp_ == limits_.stack_depth) throw std::length_error("machine stack is full");
  stack_[sp_++] = value;
}

std::int64_t Machine::pop() {
  if (sp_ == 0) throw StackEmptyError();
  return stack_[--sp_];
}

const OutputBuffer& Machine::output(std::string_view name) const {
  std::int32_t at = program_->output_index(name);
  if (at < 0) throw std::invalid_argument("no output named `" + std::string(name) + "`");
  return outputs_[static_cast<std::size_t>(at)];
}

OutputBuffer& Machine::output(std::string_view name) {
  return const_cast<OutputBuffer&>(std::as_const(*this).output(name));
}

std::size_t Machine::input_position(std::string_view name) const {
  std::int32_t at = program_->input_index(name);
  if (at < 0) throw std::invalid_argument("no input named `" + std::string(name) + "`");
  return inputs_[static_cast<std::size_t>(at)].position();
}

std::int64_t Machine::variable(std::string_view name) const {
  for (std::size_t k = 0; k < program_->variables.size(); ++k)
    if (program_->variables[k] == name) return variables_[k];
  throw std::invalid_argument("no variable named `" + std::string(name) + "`");
}

// The interpreter. Runtime failures set stop_/error_ and return; nothing in
// here throws except allocation growth in the output columns.
template <class Tracer>
void Machine::run_loop(Tracer& tracer, std::uint64_t budget) {
  const auto& dict = program_->dictionary;
  Frame* fr = &frames_.back();
  const std::int32_t* code = dict[fr->entry].data();
  std::uint32_t ip = fr->ip;
  std::uint32_t end = static_cast<std::uint32_t>(dict[fr->entry].size());

  auto reload = [&] {
    fr = &frames_.back();
    code = dict[fr->entry].data();
    ip = fr->ip;
    end = static_cast<std::uint32_t>(dict[fr->entry].size());
  };
  auto switch_entry = [&](std::int32_t entry) {
    fr->entry = entry;
    fr->ip = 0;
    code = dict[entry].data();
    ip = 0;
    end = static_cast<std::uint32_t>(dict[entry].size());
  };

#define COLFORTH_FAIL(kind)                \
  do {                                     \
    fr->ip = ip;                           \
    stop_ = StopReason::Error;             \
    error_ = (kind);                       \
    return;                                \
  } while (0)
#define NEED(n) \
  if (sp_ < (n)) COLFORTH_FAIL(RuntimeErrorKind::StackUnderflow)
#define ROOM(n)                            \
  if (limits_.stack_depth - sp_ < (n))     \
  COLFORTH_FAIL(RuntimeErrorKind::StackOverflow)

  // enter a new frame for `entry`, resuming the current frame at `ip`
#define ENTER(frame_kind, entry, cond_e, body_e)                          \
  do {                                                                    \
    if (frames_.size() > limits_.call_depth)                              \
      COLFORTH_FAIL(RuntimeErrorKind::RecursionDepthExceeded);            \
    fr->ip = ip;                                                          \
    frames_.push_back({(entry), 0, (frame_kind), (cond_e), (body_e)});    \
    reload();                                                             \
  } while (0)

  for (;;) {
    while (ip == end) {
      // end of an entry: run the owning construct's epilogue
      switch (fr->kind) {
        case FrameMain:
          fr->ip = ip;
          stop_ = StopReason::Done;
          return;
        case FrameWord:
        case FrameCond:
          frames_.pop_back();
          reload();
          break;
        case FrameDo: {
          LoopFrame& lf = loops_.back();
          ++lf.index;
          if (lf.index < lf.limit) {
            ip = 0;
          } else {
            loops_.pop_back();
            frames_.pop_back();
            reload();
          }
          break;
        }
        case FrameDoStep: {
          NEED(1);
          std::int64_t step = stack_[--sp_];
          LoopFrame& lf = loops_.back();
          lf.index = wrap_add(lf.index, step);
          bool more = step >= 0 ? lf.index < lf.limit : lf.index > lf.limit;
          if (more) {
            ip = 0;
          } else {
            loops_.pop_back();
            frames_.pop_back();
            reload();
          }
          break;
        }
        case FrameAgain: ip = 0; break;
        case FrameUntil: {
          NEED(1);
          std::int64_t flag = stack_[--sp_];
          if (flag != 0) {
            frames_.pop_back();
            reload();
          } else {
            ip = 0;
          }
          break;
        }
        case FrameWhileCond: {
          NEED(1);
          std::int64_t flag = stack_[--sp_];
          if (flag != 0) {
            fr->kind = FrameWhileBody;
            switch_entry(fr->body_entry);
          } else {
            frames_.pop_back();
            reload();
          }
          break;
        }
        case FrameWhileBody:
          fr->kind = FrameWhileCond;
          switch_entry(fr->cond_entry);
          break;
      }
      if constexpr (Tracer::enabled) {
        // loop-backs burn trace budget so that empty infinite loops cannot
        // wedge a trace call
        if (budget == 0 || --budget == 0) {
          fr->ip = ip;
          if (stop_ != StopReason::Done) stop_ = StopReason::Paused;
          return;
        }
      }
    }

    const std::int32_t* insn = code + ip;
    std::int32_t op = insn[0];
    switch (op) {
      case OpLiteral:
        ROOM(1);
        stack_[sp_++] = literal_value(insn[1], insn[2]);
        ip += 3;
        break;
      case OpCall:
        ip += 2;
        ENTER(FrameWord, insn[1], -1, -1);
        break;
      case OpBranch: {
        NEED(1);
        std::int64_t flag = stack_[--sp_];
        std::int32_t target = flag != 0 ? insn[1] : insn[2];
        ip += 3;
        if (target >= 0) ENTER(FrameCond, target, -1, -1);
        break;
      }
      case OpDo:
      case OpDoStep: {
        NEED(2);
        std::int64_t start = stack_[--sp_];
        std::int64_t limit = stack_[--sp_];
        ip += 2;
        if (start < limit) {
          loops_.push_back({start, limit});
          ENTER(op == OpDo ? FrameDo : FrameDoStep, insn[1], -1, -1);
        }
        break;
      }
      case OpAgain:
        ip += 2;
        ENTER(FrameAgain, insn[1], -1, -1);
        break;
      case OpUntil:
        ip += 2;
        ENTER(FrameUntil, insn[1], -1, -1);
        break;
      case OpWhile:
        ip += 3;
        ENTER(FrameWhileCond, insn[1], insn[1], insn[2]);
        break;
      case OpExit: {
        // return from the enclosing user word; in the main body, finish
        bool done = false;
        for (;;) {
          FrameKind kind = frames_.back().kind;
          if (kind == FrameMain) {
            done = true;
            break;
          }
          if (kind == FrameDo || kind == FrameDoStep) loops_.pop_back();
          frames_.pop_back();
          if (kind == FrameWord) break;
        }
        if (done) {
          frames_.back().ip =
              static_cast<std::uint32_t>(dict[frames_.back().entry].size());
          stop_ = StopReason::Done;
          return;
        }
        reload();
        break;
      }
      case OpPause:
        ++ip;
        fr->ip = ip;
        stop_ = StopReason::Paused;
        ++words_;
        if constexpr (Tracer::enabled)
          tracer.record(*program_, insn, stack_.data(), sp_);
        return;
      case OpHalt: COLFORTH_FAIL(RuntimeErrorKind::UserHalt);

      case OpDup:
        NEED(1);
        ROOM(1);
        stack_[sp_] = stack_[sp_ - 1];
        ++sp_;
        ++ip;
        break;
      case OpDrop:
        NEED(1);
        --sp_;
        ++ip;
        break;
      case OpSwap:
        NEED(2);
        std::swap(stack_[sp_ - 1], stack_[sp_ - 2]);
        ++ip;
        break;
      case OpOver:
        NEED(2);
        ROOM(1);
        stack_[sp_] = stack_[sp_ - 2];
        ++sp_;
        ++ip;
        break;
      case OpRot: {
        NEED(3);
        std::int64_t a = stack_[sp_ - 3];
        stack_[sp_ - 3] = stack_[sp_ - 2];
        stack_[sp_ - 2] = stack_[sp_ - 1];
        stack_[sp_ - 1] = a;
        ++ip;
        break;
      }
      case OpInc:
        NEED(1);
        stack_[sp_ - 1] = wrap_add(stack_[sp_ - 1], 1);
        ++ip;
        break;
      case OpDec:
        NEED(1);
        stack_[sp_ - 1] = wrap_add(stack_[sp_ - 1], -1);
        ++ip;
        break;
      case OpAdd:
        NEED(2);
        --sp_;
        stack_[sp_ - 1] = wrap_add(stack_[sp_ - 1], stack_[sp_]);
        ++ip;
        break;
      case OpSub:
        NEED(2);
        --sp_;
        stack_[sp_ - 1] = static_cast<std::int64_t>(
            static_cast<std::uint64_t>(stack_[sp_ - 1]) -
            static_cast<std::uint64_t>(stack_[sp_]));
        ++ip;
        break;
      case OpMul:
        NEED(2);
        --sp_;
        stack_[sp_ - 1] = static_cast<std::int64_t>(
            static_cast<std::uint64_t>(stack_[sp_ - 1]) *
            static_cast<std::uint64_t>(stack_[sp_]));
        ++ip;
        break;
      case OpDiv: {
        NEED(2);
        std::int64_t b = stack_[--sp_];
        std::int64_t a = stack_[sp_ - 1];
        if (b == 0) COLFORTH_FAIL(RuntimeErrorKind::DivisionByZero);
        std::int64_t q;
        if (b == -1) {
          q = static_cast<std::int64_t>(0 - static_cast<std::uint64_t>(a));
        } else {
          q = a / b;
          if (a % b != 0 && (a < 0) != (b < 0)) --q;  // floored division
        }
        stack_[sp_ - 1] = q;
        ++ip;
        break;
      }
      case OpMod: {
        NEED(2);
        std::int64_t b = stack_[--sp_];
        std::int64_t a = stack_[sp_ - 1];
        if (b == 0) COLFORTH_FAIL(RuntimeErrorKind::DivisionByZero);
        std::int64_t r;
        if (b == -1) {
          r = 0;
        } else {
          r = a % b;
          if (r != 0 && (r < 0) != (b < 0)) r += b;  // sign follows the divisor
        }
        stack_[sp_ - 1] = r;
        ++ip;
        break;
      }
      case OpNegate:
        NEED(1);
        stack_[sp_ - 1] =
            static_cast<std::int64_t>(0 - static_cast<std::uint64_t>(stack_[sp_ - 1]));
        ++ip;
        break;
      case OpAbs:
        NEED(1);
        if (stack_[sp_ - 1] < 0)
          stack_[sp_ - 1] =
              static_cast<std::int64_t>(0 - static_cast<std::uint64_t>(stack_[sp_ - 1]));
        ++ip;
        break;
      case OpMin:
        NEED(2);
        --sp_;
        if (stack_[sp_] < stack_[sp_ - 1]) stack_[sp_ - 1] = stack_[sp_];
        ++ip;
        break;
      case OpMax:
        NEED(2);
        --sp_;
        if (stack_[sp_] > stack_[sp_ - 1]) stack_[sp_ - 1] = stack_[sp_];
        ++ip;
        break;
      case OpAnd:
        NEED(2);
        --sp_;
        stack_[sp_ - 1] &= stack_[sp_];
        ++ip;
        break;
      case OpOr:
        NEED(2);
        --sp_;
        stack_[sp_ - 1] |= stack_[sp_];
        ++ip;
        break;
      case OpXor:
        NEED(2);
        --sp_;
        stack_[sp_ - 1] ^= stack_[sp_];
        ++ip;
        break;
      case OpInvert:
        NEED(1);
        stack_[sp_ - 1] = ~stack_[sp_ - 1];
        ++ip;
        break;
      case OpLshift: {
        NEED(2);
        std::int64_t n = stack_[--sp_];
        std::uint64_t a = static_cast<std::uint64_t>(stack_[sp_ - 1]);
        stack_[sp_ - 1] =
            (n < 0 || n > 63) ? 0 : static_cast<std::int64_t>(a << n);
        ++ip;
        break;
      }
      case OpRshift: {
        // logical shift: the cell is treated as unsigned
        NEED(2);
        std::int64_t n = stack_[--sp_];
        std::uint64_t a = static_cast<std::uint64_t>(stack_[sp_ - 1]);
        stack_[sp_ - 1] =
            (n < 0 || n > 63) ? 0 : static_cast<std::int64_t>(a >> n);
        ++ip;
        break;
      }
      case OpEq:
        NEED(2);
        --sp_;
        stack_[sp_ - 1] = stack_[sp_ - 1] == stack_[sp_] ? -1 : 0;
        ++ip;
        break;
      case OpNe:
        NEED(2);
        --sp_;
        stack_[sp_ - 1] = stack_[sp_ - 1] != stack_[sp_] ? -1 : 0;
        ++ip;
        break;
      case OpGt:
        NEED(2);
        --sp_;
        stack_[sp_ - 1] = stack_[sp_ - 1] > stack_[sp_] ? -1 : 0;
        ++ip;
        break;
      case OpLt:
        NEED(2);
        --sp_;
        stack_[sp_ - 1] = stack_[sp_ - 1] < stack_[sp_] ? -1 : 0;
        ++ip;
        break;
      case OpGe:
        NEED(2);
        --sp_;
        stack_[sp_ - 1] = stack_[sp_ - 1] >= stack_[sp_] ? -1 : 0;
        ++ip;
        break;
      case OpLe:
        NEED(2);
        --sp_;
        stack_[sp_ - 1] = stack_[sp_ - 1] <= stack_[sp_] ? -1 : 0;
        ++ip;
        break;
      case OpZeroEq:
        NEED(1);
        stack_[sp_ - 1] = stack_[sp_ - 1] == 0 ? -1 : 0;
        ++ip;
        break;
      case OpI:
        if (loops_.empty()) COLFORTH_FAIL(RuntimeErrorKind::StackUnderflow);
        ROOM(1);
        stack_[sp_++] = loops_.back().index;
        ++ip;
        break;
      case OpJ:
        if (loops_.size() < 2) COLFORTH_FAIL(RuntimeErrorKind::StackUnderflow);
        ROOM(1);
        stack_[sp_++] = loops_[loops_.size() - 2].index;
        ++ip;
        break;

      case OpVarGet:
        ROOM(1);
        stack_[sp_++] = variables_[insn[1]];
        ip += 2;
        break;
      case OpVarSet:
        NEED(1);
        variables_[insn[1]] = stack_[--sp_];
        ip += 2;
        break;
      case OpVarAdd:
        NEED(1);
        variables_[insn[1]] = wrap_add(variables_[insn[1]], stack_[--sp_]);
        ip += 2;
        break;

      case OpSeek: {
        NEED(1);
        auto err = inputs_[insn[1]].seek(stack_[--sp_]);
        if (err != RuntimeErrorKind::None) COLFORTH_FAIL(err);
        ip += 2;
        break;
      }
      case OpSkip: {
        NEED(1);
        auto err = inputs_[insn[1]].skip(stack_[--sp_]);
        if (err != RuntimeErrorKind::None) COLFORTH_FAIL(err);
        ip += 2;
        break;
      }
      case OpRewind: {
        NEED(1);
        auto err = inputs_[insn[1]].rewind(stack_[--sp_]);
        if (err != RuntimeErrorKind::None) COLFORTH_FAIL(err);
        ip += 2;
        break;
      }
      case OpPos:
        ROOM(1);
        stack_[sp_++] = static_cast<std::int64_t>(inputs_[insn[1]].position());
        ip += 2;
        break;
      case OpEnd:
        ROOM(1);
        stack_[sp_++] = inputs_[insn[1]].at_end() ? -1 : 0;
        ip += 2;
        break;
      case OpLen:
        ROOM(1);
        stack_[sp_++] = static_cast<std::int64_t>(inputs_[insn[1]].size());
        ip += 2;
        break;

      case OpWrite:
        NEED(1);
        outputs_[insn[1]].append_int(stack_[--sp_]);
        ip += 2;
        break;
      case OpWriteAdd:
        NEED(1);
        outputs_[insn[1]].append_add_last(stack_[--sp_]);
        ip += 2;
        break;
      case OpOutDup:
        NEED(1);
        outputs_[insn[1]].dup_last(stack_[--sp_]);
        ip += 2;
        break;

      default: {
        // parse words
        assert(is_read_op(op));
        ReadKind kind = unpack_read_kind(op - kReadOp);
        InputBuffer& in = inputs_[insn[1]];
        std::int32_t dest = insn[2];
        std::int64_t count = 1;
        if (kind.repeated) {
          NEED(1);
          count = stack_[--sp_];
        }
        if (dest >= 0) {
          auto err = transfer_to_output(in, outputs_[dest], kind, count);
          if (err != RuntimeErrorKind::None) COLFORTH_FAIL(err);
        } else {
          if (count < 0) COLFORTH_FAIL(RuntimeErrorKind::ReadBeyond);
          ROOM(static_cast<std::size_t>(count));
          switch (kind.code) {
            case ReadCode::Varint:
              for (std::int64_t k = 0; k < count; ++k) {
                std::uint64_t v = 0;
                auto err = in.read_varint(v);
                if (err != RuntimeErrorKind::None) COLFORTH_FAIL(err);
                stack_[sp_++] = static_cast<std::int64_t>(v);
              }
              break;
            case ReadCode::Zigzag:
              for (std::int64_t k = 0; k < count; ++k) {
                std::int64_t v = 0;
                auto err = in.read_zigzag(v);
                if (err != RuntimeErrorKind::None) COLFORTH_FAIL(err);
                stack_[sp_++] = v;
              }
              break;
            case ReadCode::NBit: {
              std::size_t bytes = nbit_bytes(kind.nbits, count);
              if (in.remaining() < bytes) COLFORTH_FAIL(RuntimeErrorKind::ReadBeyond);
              BitUnpacker bits(in.cursor(), kind.nbits);
              for (std::int64_t k = 0; k < count; ++k) stack_[sp_++] = bits.next();
              in.advance(bytes);
              break;
            }
            case ReadCode::F32:
            case ReadCode::F64:
              for (std::int64_t k = 0; k < count; ++k) {
                double v = 0;
                auto err = in.read_float(kind.code, kind.big_endian, v);
                if (err != RuntimeErrorKind::None) COLFORTH_FAIL(err);
                // floats never transit the stack as floats: truncate
                stack_[sp_++] = float_to_cell(v);
              }
              break;
            default:
              for (std::int64_t k = 0; k < count; ++k) {
                std::int64_t v = 0;
                auto err = in.read_int(kind.code, kind.big_endian, v);
                if (err != RuntimeErrorKind::None) COLFORTH_FAIL(err);
                stack_[sp_++] = v;
              }
              break;
          }
        }
        ip += 3;
        break;
      }
    }

    ++words_;
    if constexpr (Tracer::enabled) {
      tracer.record(*program_, insn, stack_.data(), sp_);
      if (--budget == 0) {
        fr->ip = ip;
        stop_ = StopReason::Paused;
        return;
      }
    }
  }

#undef ENTER
#undef ROOM
#undef NEED
#undef COLFORTH_FAIL
}

template void Machine::run_loop<NullTracer>(NullTracer&, std::uint64_t);
template void Machine::run_loop<RecordingTracer>(RecordingTracer&, std::uint64_t);

}  // namespace colforth
