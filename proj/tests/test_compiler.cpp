#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "colforth/compiler.hpp"
#include "colforth/errors.hpp"
#include "colforth/generators.hpp"
#include "colforth/machine.hpp"

using namespace colforth;

namespace {

std::vector<std::string> words(const std::string& source) {
  std::vector<std::string> out;
  for (const auto& t : tokenize(source)) out.push_back(t.text);
  return out;
}

CompileErrorKind kind_of(const std::string& source) {
  try {
    compile(source);
  } catch (const CompileError& e) {
    return e.kind();
  }
  FAIL("expected a compile error for: " << source);
  return CompileErrorKind::UnknownWord;
}

}  // namespace

TEST_CASE("tokenizer splits on whitespace") {
  CHECK(words("3 4 +") == std::vector<std::string>{"3", "4", "+"});
  CHECK(words("dup\n  drop") == std::vector<std::string>{"dup", "drop"});
  CHECK(words("  a\tb\r\nc ") == std::vector<std::string>{"a", "b", "c"});
  CHECK(words("") == std::vector<std::string>{});
}

TEST_CASE("tokenizer strips comments") {
  CHECK(words("1 ( note ) 2") == std::vector<std::string>{"1", "2"});
  CHECK(words("1 \\ to end of line\n2") == std::vector<std::string>{"1", "2"});
  CHECK(words("( leading ) x") == std::vector<std::string>{"x"});
  // '(' glued to other characters is an ordinary token character
  CHECK(words("a(b c") == std::vector<std::string>{"a(b", "c"});
  CHECK_THROWS_AS(tokenize("1 ( never closed"), CompileError);
}

TEST_CASE("token positions point into the source") {
  auto toks = tokenize("3  4");
  REQUIRE(toks.size() == 2);
  CHECK(toks[0].position == 0);
  CHECK(toks[1].position == 3);
}

TEST_CASE("definitions become dictionary entries") {
  Program p = compile(": f 3 + ;  2 f");
  REQUIRE(p.word_names.count("f") == 1);
  Machine m(p);
  m.begin_run({});
  CHECK(m.resume() == StopReason::Done);
  CHECK(m.stack() == std::vector<std::int64_t>{5});
}

TEST_CASE("declarations emit no runtime code") {
  Program p = compile("output x int32");
  REQUIRE(p.outputs.size() == 1);
  CHECK(p.outputs[0].name == "x");
  CHECK(p.outputs[0].dtype == Dtype::Int32);
  CHECK(p.dictionary[0].empty());

  Program q = compile("variable v input data");
  CHECK(q.variables == std::vector<std::string>{"v"});
  CHECK(q.inputs == std::vector<std::string>{"data"});
  CHECK(q.dictionary[0].empty());
}

TEST_CASE("control flow compiles in the main body") {
  // runs into stack underflow only at run time
  Program p = compile("if then");
  Machine m(p);
  m.begin_run({});
  CHECK(m.resume() == StopReason::Error);
  CHECK(m.error() == RuntimeErrorKind::StackUnderflow);
}

TEST_CASE("loop bodies are unnamed dictionary entries") {
  Program p = compile("10 0 do i loop");
  CHECK(p.dictionary.size() == 2);
  std::string listing = decompile(p);
  CHECK(listing.find("do -> w1") != std::string::npos);
}

TEST_CASE("decompile names the basics") {
  std::string listing = decompile(compile("1 2 +"));
  CHECK(listing.find("push 1") != std::string::npos);
  CHECK(listing.find("push 2") != std::string::npos);
  CHECK(listing.find("add") != std::string::npos);

  std::string empty_word = decompile(compile(": f ;"));
  CHECK(empty_word.find("f:") != std::string::npos);
}

TEST_CASE("static errors") {
  CHECK(kind_of("bogus") == CompileErrorKind::UnknownWord);
  CHECK(kind_of("3.25") == CompileErrorKind::UnknownWord);
  CHECK(kind_of("if 1") == CompileErrorKind::UnbalancedControlFlow);
  CHECK(kind_of("then") == CompileErrorKind::UnbalancedControlFlow);
  CHECK(kind_of("; ") == CompileErrorKind::UnbalancedControlFlow);
  CHECK(kind_of(": f begin ;") == CompileErrorKind::UnbalancedControlFlow);
  CHECK(kind_of("loop") == CompileErrorKind::UnbalancedControlFlow);
  CHECK(kind_of("begin repeat") == CompileErrorKind::UnbalancedControlFlow);
  CHECK(kind_of(": f : g ; ;") == CompileErrorKind::NestedDefinition);
  CHECK(kind_of("variable v variable v") == CompileErrorKind::DuplicateName);
  CHECK(kind_of(": v ; input v") == CompileErrorKind::DuplicateName);
  CHECK(kind_of("variable dup") == CompileErrorKind::BadDeclaration);
  CHECK(kind_of("output x int13") == CompileErrorKind::BadDeclaration);
  CHECK(kind_of("output x") == CompileErrorKind::BadDeclaration);
  CHECK(kind_of("variable") == CompileErrorKind::BadDeclaration);
  CHECK(kind_of(": f variable v ;") == CompileErrorKind::BadDeclaration);
  CHECK(kind_of("variable v v") == CompileErrorKind::MisplacedWord);
  CHECK(kind_of("input d d") == CompileErrorKind::MisplacedWord);
  CHECK(kind_of("input d d i->") == CompileErrorKind::MisplacedWord);
  CHECK(kind_of("output x int32 x <-") == CompileErrorKind::MisplacedWord);
  CHECK(kind_of("i->") == CompileErrorKind::MisplacedWord);
  CHECK(kind_of("stack") == CompileErrorKind::MisplacedWord);
  CHECK(kind_of("9223372036854775808") == CompileErrorKind::LiteralOutOfRange);
}

TEST_CASE("literals cover the 64-bit range") {
  Program p = compile("9223372036854775807 -9223372036854775808");
  Machine m(p);
  m.begin_run({});
  CHECK(m.resume() == StopReason::Done);
  CHECK(m.stack() == std::vector<std::int64_t>{INT64_MAX, INT64_MIN});
}

TEST_CASE("compilation is deterministic") {
  const std::string source =
      "variable v input data output x int32 "
      ": f dup 1 > if 1- f then ; "
      "5 0 do i f v @ + v ! loop v @ x <- stack";
  CHECK(compile(source) == compile(source));
}

TEST_CASE("read word shapes") {
  CHECK(compile("input d d b-> stack").dictionary[0].size() == 3);
  for (std::string w : {"b->", "!q->", "#h->", "#!d->", "varint->", "#zigzag->",
                        "2bit->", "#13bit->", "32bit->", "1bit->"})
    CHECK_NOTHROW(compile("input d d " + w + " stack"));
  for (std::string w : {"0bit->", "33bit->", "!varint->", "!2bit->", "x->", "#e->"})
    CHECK_THROWS_AS(compile("input d d " + w + " stack"), CompileError);
}

TEST_CASE("generated programs compile") {
  for (int depth = 1; depth <= 5; ++depth) {
    CHECK_NOTHROW(compile(gen::tbasket_program(depth, Dtype::Float32).source));
    CHECK_NOTHROW(compile(gen::replevel_to_offsets(depth).source));
    CHECK_NOTHROW(compile(gen::replevel_decoder(depth).source));
    CHECK_NOTHROW(compile(gen::builder_program(
        TypeDescriptor::nested_lists(depth, Dtype::Float32)).source));
  }
  auto nested = TypeDescriptor::list(TypeDescriptor::list(
      TypeDescriptor::list(TypeDescriptor::primitive(Dtype::Float32))));
  CHECK_NOTHROW(compile(gen::avro_program(nested).source));
  CHECK_NOTHROW(compile(gen::avro_program(nested, gen::AvroListMode::SingleBlock).source));
}
