#include "colforth/compiler.hpp"

#include <charconv>
#include <cstdint>
#include <optional>
#include <sstream>
#include <unordered_map>

#include "colforth/bytecode.hpp"
#include "colforth/errors.hpp"

namespace colforth {

namespace {

constexpr bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

const std::unordered_map<std::string_view, Op>& plain_words() {
  static const std::unordered_map<std::string_view, Op> table = {
      {"dup", OpDup},     {"drop", OpDrop},   {"swap", OpSwap},
      {"over", OpOver},   {"rot", OpRot},     {"1+", OpInc},
      {"1-", OpDec},      {"+", OpAdd},       {"-", OpSub},
      {"*", OpMul},       {"/", OpDiv},       {"mod", OpMod},
      {"negate", OpNegate}, {"abs", OpAbs},   {"min", OpMin},
      {"max", OpMax},     {"and", OpAnd},     {"or", OpOr},
      {"xor", OpXor},     {"invert", OpInvert}, {"lshift", OpLshift},
      {"rshift", OpRshift}, {"=", OpEq},      {"<>", OpNe},
      {">", OpGt},        {"<", OpLt},        {">=", OpGe},
      {"<=", OpLe},       {"0=", OpZeroEq},   {"i", OpI},
      {"j", OpJ},         {"exit", OpExit},   {"pause", OpPause},
      {"halt", OpHalt},
  };
  return table;
}

const std::unordered_map<std::string_view, Op>& input_words() {
  static const std::unordered_map<std::string_view, Op> table = {
      {"seek", OpSeek}, {"skip", OpSkip}, {"rewind", OpRewind},
      {"pos", OpPos},   {"end", OpEnd},   {"len", OpLen},
  };
  return table;
}

constexpr std::string_view kFixedCodes = "bBhHiIqQfd";

std::optional<ReadKind> parse_read_word(std::string_view t) {
  ReadKind kind;
  if (!t.empty() && t.front() == '#') {
    kind.repeated = true;
    t.remove_prefix(1);
  }
  if (t == "varint->") {
    kind.code = ReadCode::Varint;
    return kind;
  }
  if (t == "zigzag->") {
    kind.code = ReadCode::Zigzag;
    return kind;
  }
  if (!t.empty() && t.front() == '!') {
    kind.big_endian = true;
    t.remove_prefix(1);
  }
  if (t.size() == 3 && t.substr(1) == "->") {
    auto at = kFixedCodes.find(t.front());
    if (at != std::string_view::npos) {
      kind.code = static_cast<ReadCode>(at);
      return kind;
    }
    return std::nullopt;
  }
  // <n>bit-> with n in 1..32 (no endianness variant)
  if (!kind.big_endian && t.size() >= 6 && t.substr(t.size() - 5) == "bit->") {
    std::string_view digits = t.substr(0, t.size() - 5);
    if (digits.empty() || digits.size() > 2) return std::nullopt;
    int n = 0;
    for (char c : digits) {
      if (c < '0' || c > '9') return std::nullopt;
      n = n * 10 + (c - '0');
    }
    if (n < 1 || n > 32) return std::nullopt;
    kind.code = ReadCode::NBit;
    kind.nbits = n;
    return kind;
  }
  return std::nullopt;
}

// Full-token decimal integer with optional leading '-'. The bool is false
// when the token is shaped like a number but does not fit in 64 bits.
std::optional<std::pair<std::int64_t, bool>> parse_number(std::string_view t) {
  if (t.empty()) return std::nullopt;
  std::string_view digits = t.front() == '-' ? t.substr(1) : t;
  if (digits.empty()) return std::nullopt;
  for (char c : digits)
    if (c < '0' || c > '9') return std::nullopt;
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value, 10);
  if (ptr != t.data() + t.size()) return std::nullopt;
  if (ec == std::errc::result_out_of_range) return std::make_pair(std::int64_t{0}, false);
  if (ec != std::errc{}) return std::nullopt;
  return std::make_pair(value, true);
}

bool is_control_or_declaration(std::string_view t) {
  return t == ":" || t == ";" || t == "if" || t == "else" || t == "then" ||
         t == "do" || t == "loop" || t == "+loop" || t == "begin" ||
         t == "again" || t == "until" || t == "while" || t == "repeat" ||
         t == "variable" || t == "input" || t == "output";
}

class Compiler {
 public:
  explicit Compiler(std::string_view source) : tokens_(tokenize(source)) {}

  Program run() {
    prog_.dictionary.emplace_back();
    prog_.entry_names.emplace_back();
    ctx_.push_back({Context::Main, 0, -1, "", 0});
    while (cursor_ < tokens_.size()) step();
    if (ctx_.size() > 1) {
      const Context& open = ctx_.back();
      fail(CompileErrorKind::UnbalancedControlFlow, open.opener_pos,
           "`" + open.opener + "` is never closed");
    }
    return std::move(prog_);
  }

 private:
  struct Context {
    enum Kind { Main, Word, IfTrue, IfElse, DoBody, BeginBody, WhileBody } kind;
    std::int32_t entry;     // entry currently receiving code
    std::int32_t aux;       // IfElse: taken entry; WhileBody: condition entry
    std::string opener;     // word that opened this context, for messages
    std::size_t opener_pos;
  };

  struct NameInfo {
    enum Kind { Word, Variable, Input, Output } kind;
    std::int32_t index;
  };

  [[noreturn]] void fail(CompileErrorKind kind, std::size_t pos, const std::string& msg) {
    throw CompileError(kind, pos, msg);
  }

  const Token& tok() const { return tokens_[cursor_]; }

  const Token& expect_next(const std::string& what) {
    if (cursor_ + 1 >= tokens_.size())
      fail(CompileErrorKind::BadDeclaration, tok().position,
           "`" + tok().text + "` expects " + what);
    return tokens_[cursor_ + 1];
  }

  std::vector<std::int32_t>& body() { return prog_.dictionary[ctx_.back().entry]; }

  void emit(std::int32_t a) { body().push_back(a); }
  void emit(std::int32_t a, std::int32_t b) {
    body().push_back(a);
    body().push_back(b);
  }
  void emit(std::int32_t a, std::int32_t b, std::int32_t c) {
    body().push_back(a);
    body().push_back(b);
    body().push_back(c);
  }

  std::int32_t new_entry(const std::string& name = {}) {
    prog_.dictionary.emplace_back();
    prog_.entry_names.push_back(name);
    return static_cast<std::int32_t>(prog_.dictionary.size() - 1);
  }

  void declare_name(const Token& t, NameInfo::Kind kind, std::int32_t index) {
    if (is_reserved_word(t.text))
      fail(CompileErrorKind::BadDeclaration, t.position,
           "`" + t.text + "` is a built-in word and cannot be a name");
    if (parse_number(t.text))
      fail(CompileErrorKind::BadDeclaration, t.position,
           "`" + t.text + "` is a number and cannot be a name");
    if (names_.count(t.text))
      fail(CompileErrorKind::DuplicateName, t.position,
           "`" + t.text + "` is already defined");
    names_.emplace(t.text, NameInfo{kind, index});
  }

  void open(Context::Kind kind, std::int32_t entry, std::int32_t aux = -1) {
    ctx_.push_back({kind, entry, aux, tok().text, tok().position});
  }

  void require_top(Context::Kind kind, const char* opener) {
    if (ctx_.back().kind != kind)
      fail(CompileErrorKind::UnbalancedControlFlow, tok().position,
           "`" + tok().text + "` without a matching `" + opener + "`");
  }

  void step() {
    const Token& t = tok();
    const std::string& w = t.text;

    if (w == ":") {
      for (const Context& c : ctx_)
        if (c.kind == Context::Word)
          fail(CompileErrorKind::NestedDefinition, t.position,
               "`:` inside another definition");
      if (ctx_.back().kind != Context::Main)
        fail(CompileErrorKind::UnbalancedControlFlow, t.position,
             "`:` inside an open control structure");
      const Token& name = expect_next("a word name");
      std::int32_t entry = new_entry(name.text);
      declare_name(name, NameInfo::Word, entry);
      prog_.word_names.emplace(name.text, entry);
      cursor_ += 2;
      open(Context::Word, entry);
      return;
    }
    if (w == ";") {
      require_top(Context::Word, ":");
      ctx_.pop_back();
      ++cursor_;
      return;
    }
    if (w == "if") {
      std::int32_t entry = new_entry();
      ++cursor_;
      open(Context::IfTrue, entry);
      return;
    }
    if (w == "else") {
      require_top(Context::IfTrue, "if");
      std::int32_t taken = ctx_.back().entry;
      std::int32_t entry = new_entry();
      ctx_.back() = {Context::IfElse, entry, taken, ctx_.back().opener, ctx_.back().opener_pos};
      ++cursor_;
      return;
    }
    if (w == "then") {
      Context top = ctx_.back();
      if (top.kind == Context::IfTrue) {
        ctx_.pop_back();
        emit(OpBranch, top.entry, -1);
      } else if (top.kind == Context::IfElse) {
        ctx_.pop_back();
        emit(OpBranch, top.aux, top.entry);
      } else {
        fail(CompileErrorKind::UnbalancedControlFlow, t.position,
             "`then` without a matching `if`");
      }
      ++cursor_;
      return;
    }
    if (w == "do") {
      std::int32_t entry = new_entry();
      ++cursor_;
      open(Context::DoBody, entry);
      return;
    }
    if (w == "loop" || w == "+loop") {
      require_top(Context::DoBody, "do");
      std::int32_t entry = ctx_.back().entry;
      ctx_.pop_back();
      emit(w == "loop" ? OpDo : OpDoStep, entry);
      ++cursor_;
      return;
    }
    if (w == "begin") {
      std::int32_t entry = new_entry();
      ++cursor_;
      open(Context::BeginBody, entry);
      return;
    }
    if (w == "again" || w == "until") {
      require_top(Context::BeginBody, "begin");
      std::int32_t entry = ctx_.back().entry;
      ctx_.pop_back();
      emit(w == "again" ? OpAgain : OpUntil, entry);
      ++cursor_;
      return;
    }
    if (w == "while") {
      require_top(Context::BeginBody, "begin");
      std::int32_t cond = ctx_.back().entry;
      std::int32_t entry = new_entry();
      ctx_.back() = {Context::WhileBody, entry, cond, ctx_.back().opener, ctx_.back().opener_pos};
      ++cursor_;
      return;
    }
    if (w == "repeat") {
      require_top(Context::WhileBody, "while");
      Context top = ctx_.back();
      ctx_.pop_back();
      emit(OpWhile, top.aux, top.entry);
      ++cursor_;
      return;
    }

    if (w == "variable" || w == "input" || w == "output") {
      if (ctx_.size() != 1)
        fail(CompileErrorKind::BadDeclaration, t.position,
             "declarations must appear at the top level");
      const Token& name = expect_next("a name");
      if (w == "variable") {
        declare_name(name, NameInfo::Variable,
                     static_cast<std::int32_t>(prog_.variables.size()));
        prog_.variables.push_back(name.text);
        cursor_ += 2;
      } else if (w == "input") {
        declare_name(name, NameInfo::Input,
                     static_cast<std::int32_t>(prog_.inputs.size()));
        prog_.inputs.push_back(name.text);
        cursor_ += 2;
      } else {
        if (cursor_ + 2 >= tokens_.size())
          fail(CompileErrorKind::BadDeclaration, t.position,
               "`output` expects a name and a type");
        const Token& dtype_tok = tokens_[cursor_ + 2];
        auto dtype = parse_dtype(dtype_tok.text);
        if (!dtype)
          fail(CompileErrorKind::BadDeclaration, dtype_tok.position,
               "`" + dtype_tok.text + "` is not an output type");
        declare_name(name, NameInfo::Output,
                     static_cast<std::int32_t>(prog_.outputs.size()));
        prog_.outputs.push_back({name.text, *dtype});
        cursor_ += 3;
      }
      return;
    }

    if (auto at = plain_words().find(w); at != plain_words().end()) {
      emit(at->second);
      ++cursor_;
      return;
    }

    if (auto info = names_.find(w); info != names_.end()) {
      switch (info->second.kind) {
        case NameInfo::Word:
          emit(OpCall, info->second.index);
          ++cursor_;
          return;
        case NameInfo::Variable: compile_variable_access(info->second.index); return;
        case NameInfo::Input: compile_input_access(info->second.index); return;
        case NameInfo::Output: compile_output_access(info->second.index); return;
      }
    }

    if (auto num = parse_number(w)) {
      if (!num->second)
        fail(CompileErrorKind::LiteralOutOfRange, t.position,
             "`" + w + "` does not fit in a 64-bit cell");
      emit(OpLiteral, literal_low(num->first), literal_high(num->first));
      ++cursor_;
      return;
    }

    if (parse_read_word(w))
      fail(CompileErrorKind::MisplacedWord, t.position,
           "`" + w + "` must be preceded by an input name");
    if (w == "stack" || w == "<-" || w == "+<-" || w == "@" || w == "!" || w == "+!")
      fail(CompileErrorKind::MisplacedWord, t.position,
           "`" + w + "` is only valid after a buffer or variable name");

    fail(CompileErrorKind::UnknownWord, t.position, "unknown word `" + w + "`");
  }

  void compile_variable_access(std::int32_t index) {
    const Token& t = tok();
    if (cursor_ + 1 < tokens_.size()) {
      const std::string& next = tokens_[cursor_ + 1].text;
      if (next == "@") { emit(OpVarGet, index); cursor_ += 2; return; }
      if (next == "!") { emit(OpVarSet, index); cursor_ += 2; return; }
      if (next == "+!") { emit(OpVarAdd, index); cursor_ += 2; return; }
    }
    fail(CompileErrorKind::MisplacedWord, t.position,
         "variable `" + t.text + "` must be followed by `@`, `!`, or `+!`");
  }

  void compile_input_access(std::int32_t index) {
    const Token& t = tok();
    if (cursor_ + 1 < tokens_.size()) {
      const Token& next = tokens_[cursor_ + 1];
      if (auto at = input_words().find(next.text); at != input_words().end()) {
        emit(at->second, index);
        cursor_ += 2;
        return;
      }
      if (auto kind = parse_read_word(next.text)) {
        if (cursor_ + 2 >= tokens_.size())
          fail(CompileErrorKind::MisplacedWord, next.position,
               "`" + next.text + "` expects a destination (`stack` or an output)");
        const Token& dest = tokens_[cursor_ + 2];
        std::int32_t dest_index = -1;
        if (dest.text != "stack") {
          auto info = names_.find(dest.text);
          if (info == names_.end() || info->second.kind != NameInfo::Output)
            fail(CompileErrorKind::MisplacedWord, dest.position,
                 "`" + dest.text + "` is not `stack` or a declared output");
          dest_index = info->second.index;
        }
        emit(kReadOp | pack_read_kind(*kind), index, dest_index);
        cursor_ += 3;
        return;
      }
    }
    fail(CompileErrorKind::MisplacedWord, t.position,
         "input `" + t.text + "` must be followed by a read or position word");
  }

  void compile_output_access(std::int32_t index) {
    const Token& t = tok();
    if (cursor_ + 1 < tokens_.size()) {
      const Token& next = tokens_[cursor_ + 1];
      if (next.text == "<-" || next.text == "+<-") {
        if (cursor_ + 2 >= tokens_.size() || tokens_[cursor_ + 2].text != "stack")
          fail(CompileErrorKind::MisplacedWord, next.position,
               "`" + next.text + "` expects `stack` as its source");
        emit(next.text == "<-" ? OpWrite : OpWriteAdd, index);
        cursor_ += 3;
        return;
      }
      if (next.text == "dup") {
        emit(OpOutDup, index);
        cursor_ += 2;
        return;
      }
    }
    fail(CompileErrorKind::MisplacedWord, t.position,
         "output `" + t.text + "` must be followed by `<-`, `+<-`, or `dup`");
  }

  std::vector<Token> tokens_;
  std::size_t cursor_ = 0;
  Program prog_;
  std::vector<Context> ctx_;
  std::unordered_map<std::string, NameInfo> names_;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = source.size();
  while (i < n) {
    if (is_space(source[i])) {
      ++i;
      continue;
    }
    // comments open only at a token boundary
    if (source[i] == '(' && (i + 1 == n || is_space(source[i + 1]))) {
      std::size_t close = source.find(')', i + 1);
      if (close == std::string_view::npos)
        throw CompileError(CompileErrorKind::UnclosedComment, i,
                           "`(` has no matching `)`");
      i = close + 1;
      continue;
    }
    if (source[i] == '\\' && (i + 1 == n || is_space(source[i + 1]))) {
      std::size_t eol = source.find('\n', i + 1);
      i = eol == std::string_view::npos ? n : eol + 1;
      continue;
    }
    std::size_t start = i;
    while (i < n && !is_space(source[i])) ++i;
    out.push_back({std::string(source.substr(start, i - start)), start});
  }
  return out;
}

Program compile(std::string_view source) { return Compiler(source).run(); }

bool is_reserved_word(std::string_view token) {
  return plain_words().count(token) || input_words().count(token) ||
         is_control_or_declaration(token) || token == "stack" ||
         token == "<-" || token == "+<-" || token == "@" || token == "!" ||
         token == "+!" || parse_read_word(token).has_value();
}

namespace {

std::string entry_label(const Program& p, std::int32_t entry) {
  if (entry >= 0 && static_cast<std::size_t>(entry) < p.entry_names.size() &&
      !p.entry_names[entry].empty())
    return p.entry_names[entry];
  return "w" + std::to_string(entry);
}

std::string read_word_text(ReadKind k) {
  std::string w;
  if (k.repeated) w += '#';
  switch (k.code) {
    case ReadCode::Varint: return w + "varint->";
    case ReadCode::Zigzag: return w + "zigzag->";
    case ReadCode::NBit: return w + std::to_string(k.nbits) + "bit->";
    default:
      if (k.big_endian) w += '!';
      w += kFixedCodes[static_cast<std::size_t>(k.code)];
      return w + "->";
  }
}

}  // namespace

std::string instruction_word(const Program& p, const std::int32_t* insn) {
  std::int32_t op = insn[0];
  if (is_read_op(op)) return read_word_text(unpack_read_kind(op - kReadOp));
  switch (op) {
    case OpLiteral: return std::to_string(literal_value(insn[1], insn[2]));
    case OpCall: return entry_label(p, insn[1]);
    case OpBranch: return "if";
    case OpDo:
    case OpDoStep: return "do";
    case OpAgain:
    case OpUntil:
    case OpWhile: return "begin";
    case OpExit: return "exit";
    case OpPause: return "pause";
    case OpHalt: return "halt";
    case OpVarGet: return "@";
    case OpVarSet: return "!";
    case OpVarAdd: return "+!";
    case OpSeek: return "seek";
    case OpSkip: return "skip";
    case OpRewind: return "rewind";
    case OpPos: return "pos";
    case OpEnd: return "end";
    case OpLen: return "len";
    case OpWrite: return "<-";
    case OpWriteAdd: return "+<-";
    case OpOutDup: return "dup";
    default:
      for (const auto& [text, code] : plain_words())
        if (code == op) return std::string(text);
      return "?op" + std::to_string(op);
  }
}

std::string decompile(const Program& p) {
  std::ostringstream out;
  if (!p.inputs.empty()) {
    out << "inputs:";
    for (const auto& name : p.inputs) out << ' ' << name;
    out << '\n';
  }
  if (!p.outputs.empty()) {
    out << "outputs:";
    for (const auto& o : p.outputs) out << ' ' << o.name << ':' << dtype_name(o.dtype);
    out << '\n';
  }
  if (!p.variables.empty()) {
    out << "variables:";
    for (const auto& name : p.variables) out << ' ' << name;
    out << '\n';
  }
  for (std::size_t entry = 0; entry < p.dictionary.size(); ++entry) {
    out << (entry == 0 ? "main" : entry_label(p, static_cast<std::int32_t>(entry)));
    out << ":\n";
    const auto& code = p.dictionary[entry];
    for (std::size_t at = 0; at < code.size();) {
      const std::int32_t* insn = code.data() + at;
      out << "  " << at << " | ";
      std::int32_t op = insn[0];
      if (is_read_op(op)) {
        out << "read " << p.inputs[insn[1]] << ' '
            << read_word_text(unpack_read_kind(op - kReadOp)) << ' '
            << (insn[2] < 0 ? "stack" : p.outputs[insn[2]].name);
      } else {
        switch (op) {
          case OpLiteral: out << "push " << literal_value(insn[1], insn[2]); break;
          case OpCall: out << "call " << entry_label(p, insn[1]); break;
          case OpBranch:
            out << "if -> " << entry_label(p, insn[1]);
            if (insn[2] >= 0) out << " else -> " << entry_label(p, insn[2]);
            break;
          case OpDo: out << "do -> " << entry_label(p, insn[1]); break;
          case OpDoStep: out << "do(+loop) -> " << entry_label(p, insn[1]); break;
          case OpAgain: out << "again -> " << entry_label(p, insn[1]); break;
          case OpUntil: out << "until -> " << entry_label(p, insn[1]); break;
          case OpWhile:
            out << "while " << entry_label(p, insn[1]) << " -> "
                << entry_label(p, insn[2]);
            break;
          case OpAdd: out << "add"; break;
          case OpSub: out << "sub"; break;
          case OpMul: out << "mul"; break;
          case OpDiv: out << "div"; break;
          case OpVarGet: out << "var " << p.variables[insn[1]] << " @"; break;
          case OpVarSet: out << "var " << p.variables[insn[1]] << " !"; break;
          case OpVarAdd: out << "var " << p.variables[insn[1]] << " +!"; break;
          case OpSeek:
          case OpSkip:
          case OpRewind:
          case OpPos:
          case OpEnd:
          case OpLen:
            out << "input " << p.inputs[insn[1]] << ' ' << instruction_word(p, insn);
            break;
          case OpWrite: out << "write " << p.outputs[insn[1]].name << " <- stack"; break;
          case OpWriteAdd: out << "write " << p.outputs[insn[1]].name << " +<- stack"; break;
          case OpOutDup: out << "dup-last " << p.outputs[insn[1]].name; break;
          default: out << instruction_word(p, insn); break;
        }
      }
      out << '\n';
      at += instruction_width(op);
    }
  }
  return out.str();
}

}  // namespace colforth
