#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace colforth {

/// The closed set of runtime error conditions. Everything else is caught at
/// compile time or is a host-side usage error (thrown as an exception).
enum class RuntimeErrorKind : std::uint8_t {
  None,
  UserHalt,
  RecursionDepthExceeded,
  StackUnderflow,
  StackOverflow,
  DivisionByZero,
  ReadBeyond,
  SeekBeyond,
  SkipBeyond,
  RewindBeyond,
  VarintTooBig,
};

constexpr std::string_view runtime_error_name(RuntimeErrorKind k) {
  switch (k) {
    case RuntimeErrorKind::None: return "none";
    case RuntimeErrorKind::UserHalt: return "user halt";
    case RuntimeErrorKind::RecursionDepthExceeded: return "recursion depth exceeded";
    case RuntimeErrorKind::StackUnderflow: return "stack underflow";
    case RuntimeErrorKind::StackOverflow: return "stack overflow";
    case RuntimeErrorKind::DivisionByZero: return "division by zero";
    case RuntimeErrorKind::ReadBeyond: return "read beyond";
    case RuntimeErrorKind::SeekBeyond: return "seek beyond";
    case RuntimeErrorKind::SkipBeyond: return "skip beyond";
    case RuntimeErrorKind::RewindBeyond: return "rewind beyond";
    case RuntimeErrorKind::VarintTooBig: return "varint too big";
  }
  return "?";
}

/// Base class for all colforth exceptions.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class CompileErrorKind : std::uint8_t {
  UnknownWord,
  UnbalancedControlFlow,
  DuplicateName,
  BadDeclaration,
  NestedDefinition,
  MisplacedWord,
  LiteralOutOfRange,
  UnclosedComment,
};

std::string_view compile_error_kind_name(CompileErrorKind k);

/// Static error in source text; `position` is a byte offset into the source.
class CompileError : public Error {
 public:
  CompileError(CompileErrorKind kind, std::size_t position, const std::string& message);
  CompileErrorKind kind() const { return kind_; }
  std::size_t position() const { return position_; }

 private:
  CompileErrorKind kind_;
  std::size_t position_;
};

/// Host-side pop from an empty stack (distinct from the in-run
/// stack-underflow runtime error).
struct StackEmptyError : Error {
  StackEmptyError() : Error("pop from empty machine stack") {}
};

/// begin_run did not receive bytes for a declared input.
struct MissingInputError : Error {
  using Error::Error;
};

enum class FormatErrorKind : std::uint8_t {
  BadMagic,
  UnsupportedCodec,
  SyncMismatch,
  UnsupportedSchema,
  SchemaMismatch,
  TruncatedBasket,
  TruncatedFile,
  RuntimeFault,   // a RuntimeErrorKind surfaced while driving a program
  OffsetsInvalid,
  BadManifest,
};

std::string_view format_error_kind_name(FormatErrorKind k);

/// Error raised by the container/stream drivers (Avro, baskets, replevels).
class FormatError : public Error {
 public:
  FormatError(FormatErrorKind kind, const std::string& message);
  FormatErrorKind kind() const { return kind_; }

 private:
  FormatErrorKind kind_;
};

}  // namespace colforth
