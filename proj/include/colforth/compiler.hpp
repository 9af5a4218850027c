#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "colforth/program.hpp"

namespace colforth {

struct Token {
  std::string text;
  std::size_t position = 0;  // byte offset into the source, for error messages
  bool operator==(const Token&) const = default;
};

/// Strips `( ... )` and `\ ...` comments, then splits on whitespace.
/// Throws CompileError(UnclosedComment) if a `(` has no closing `)`.
std::vector<Token> tokenize(std::string_view source);

/// Compiles source text to bytecode. All static errors are reported here;
/// the only failures left for run time are the ten RuntimeErrorKind values.
Program compile(std::string_view source);

/// Human-readable listing of a compiled program (not round-trippable source).
std::string decompile(const Program& program);

/// The source word at one instruction, e.g. "15", "!i->", "fibonacci".
/// Used by the decompiler and the machine's tracing mode.
std::string instruction_word(const Program& program, const std::int32_t* insn);

/// True if the token is claimed by the fixed vocabulary (including the read
/// word patterns and `stack`), and so cannot be used as a declared name.
bool is_reserved_word(std::string_view token);

}  // namespace colforth
