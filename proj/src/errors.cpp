#include "colforth/errors.hpp"

#include "colforth/dtype.hpp"

namespace colforth {

std::string_view compile_error_kind_name(CompileErrorKind k) {
  switch (k) {
    case CompileErrorKind::UnknownWord: return "unknown word";
    case CompileErrorKind::UnbalancedControlFlow: return "unbalanced control flow";
    case CompileErrorKind::DuplicateName: return "duplicate name";
    case CompileErrorKind::BadDeclaration: return "bad declaration";
    case CompileErrorKind::NestedDefinition: return "nested definition";
    case CompileErrorKind::MisplacedWord: return "misplaced word";
    case CompileErrorKind::LiteralOutOfRange: return "literal out of range";
    case CompileErrorKind::UnclosedComment: return "unclosed comment";
  }
  return "?";
}

CompileError::CompileError(CompileErrorKind kind, std::size_t position,
                           const std::string& message)
    : Error(std::string(compile_error_kind_name(kind)) + " at offset " +
            std::to_string(position) + ": " + message),
      kind_(kind),
      position_(position) {}

std::string_view format_error_kind_name(FormatErrorKind k) {
  switch (k) {
    case FormatErrorKind::BadMagic: return "bad magic";
    case FormatErrorKind::UnsupportedCodec: return "unsupported codec";
    case FormatErrorKind::SyncMismatch: return "sync mismatch";
    case FormatErrorKind::UnsupportedSchema: return "unsupported schema";
    case FormatErrorKind::SchemaMismatch: return "schema mismatch";
    case FormatErrorKind::TruncatedBasket: return "truncated basket";
    case FormatErrorKind::TruncatedFile: return "truncated file";
    case FormatErrorKind::RuntimeFault: return "runtime fault";
    case FormatErrorKind::OffsetsInvalid: return "offsets invalid";
    case FormatErrorKind::BadManifest: return "bad manifest";
  }
  return "?";
}

FormatError::FormatError(FormatErrorKind kind, const std::string& message)
    : Error(std::string(format_error_kind_name(kind)) + ": " + message), kind_(kind) {}

std::optional<Dtype> parse_dtype(std::string_view name) {
  if (name == "bool") return Dtype::Bool;
  if (name == "int8") return Dtype::Int8;
  if (name == "int16") return Dtype::Int16;
  if (name == "int32") return Dtype::Int32;
  if (name == "int64") return Dtype::Int64;
  if (name == "uint8") return Dtype::UInt8;
  if (name == "uint16") return Dtype::UInt16;
  if (name == "uint32") return Dtype::UInt32;
  if (name == "uint64") return Dtype::UInt64;
  if (name == "float32") return Dtype::Float32;
  if (name == "float64") return Dtype::Float64;
  return std::nullopt;
}

}  // namespace colforth
