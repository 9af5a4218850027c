#pragma once

#include <cstdint>

namespace colforth {

// Compiled code is a jagged collection of 32-bit integer sequences: entry 0 is
// the main body, further entries are user-defined words and the synthesized
// bodies of control structures. Each word compiles to 1-3 integers: an opcode
// followed by 0-2 arguments.
enum Op : std::int32_t {
  OpLiteral = 0,  // args: value low 32 bits, value high 32 bits
  OpCall,         // arg: dictionary entry
  OpBranch,       // args: taken entry, not-taken entry (-1 = none); pops flag
  OpDo,           // arg: body entry; pops start (top) and limit
  OpDoStep,       // arg: body entry; body leaves the step on the stack
  OpAgain,        // arg: body entry
  OpUntil,        // arg: body entry; body leaves the exit flag on the stack
  OpWhile,        // args: condition entry, body entry
  OpExit,
  OpPause,
  OpHalt,

  OpDup,
  OpDrop,
  OpSwap,
  OpOver,
  OpRot,
  OpInc,
  OpDec,
  OpAdd,
  OpSub,
  OpMul,
  OpDiv,
  OpMod,
  OpNegate,
  OpAbs,
  OpMin,
  OpMax,
  OpAnd,
  OpOr,
  OpXor,
  OpInvert,
  OpLshift,
  OpRshift,
  OpEq,
  OpNe,
  OpGt,
  OpLt,
  OpGe,
  OpLe,
  OpZeroEq,
  OpI,
  OpJ,

  OpVarGet,  // arg: variable index
  OpVarSet,
  OpVarAdd,

  OpSeek,  // arg: input index; pops the target position
  OpSkip,
  OpRewind,
  OpPos,
  OpEnd,
  OpLen,

  OpWrite,     // arg: output index; pops the value
  OpWriteAdd,  // arg: output index; pops the increment
  OpOutDup,    // arg: output index; pops the repeat count

  OpCount_,
};

// Parse words occupy a separate opcode range: kReadOp | packed kind, with
// args (input index, destination): destination -1 is the stack, otherwise an
// output index.
inline constexpr std::int32_t kReadOp = 0x1000;

enum class ReadCode : std::int32_t {
  I8 = 0,   // b
  U8,       // B
  I16,      // h
  U16,      // H
  I32,      // i
  U32,      // I
  I64,      // q
  U64,      // Q
  F32,      // f
  F64,      // d
  Varint,   // varint->
  Zigzag,   // zigzag->
  NBit,     // <n>bit->
};

struct ReadKind {
  ReadCode code = ReadCode::I8;
  bool big_endian = false;
  bool repeated = false;  // '#' form: pops the repeat count
  int nbits = 0;          // 1..32, NBit only
};

constexpr std::int32_t pack_read_kind(ReadKind k) {
  std::int32_t v = static_cast<std::int32_t>(k.code);
  if (k.big_endian) v |= 1 << 4;
  if (k.repeated) v |= 1 << 5;
  if (k.code == ReadCode::NBit) v |= (k.nbits - 1) << 6;
  return v;
}

constexpr ReadKind unpack_read_kind(std::int32_t v) {
  ReadKind k;
  k.code = static_cast<ReadCode>(v & 0xF);
  k.big_endian = (v >> 4) & 1;
  k.repeated = (v >> 5) & 1;
  k.nbits = k.code == ReadCode::NBit ? ((v >> 6) & 0x1F) + 1 : 0;
  return k;
}

constexpr bool is_read_op(std::int32_t op) { return op >= kReadOp; }

/// Number of instruction integers (opcode + args) at this opcode.
constexpr std::size_t instruction_width(std::int32_t op) {
  if (is_read_op(op)) return 3;
  switch (op) {
    case OpLiteral:
    case OpBranch:
    case OpWhile: return 3;
    case OpCall:
    case OpDo:
    case OpDoStep:
    case OpAgain:
    case OpUntil:
    case OpVarGet:
    case OpVarSet:
    case OpVarAdd:
    case OpSeek:
    case OpSkip:
    case OpRewind:
    case OpPos:
    case OpEnd:
    case OpLen:
    case OpWrite:
    case OpWriteAdd:
    case OpOutDup: return 2;
    default: return 1;
  }
}

constexpr std::int64_t literal_value(std::int32_t lo, std::int32_t hi) {
  return static_cast<std::int64_t>(static_cast<std::uint32_t>(lo)) |
         (static_cast<std::int64_t>(hi) << 32);
}

constexpr std::int32_t literal_low(std::int64_t v) {
  return static_cast<std::int32_t>(static_cast<std::uint64_t>(v) & 0xFFFFFFFFu);
}

constexpr std::int32_t literal_high(std::int64_t v) {
  return static_cast<std::int32_t>(static_cast<std::uint64_t>(v) >> 32);
}

}  // namespace colforth
