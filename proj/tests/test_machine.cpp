#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace colforth;
using colforth::test::Run;

using I64s = std::vector<std::int64_t>;

namespace {

const std::string kFibonacci =
    ": fibonacci dup 1 > if 1- dup 1- fibonacci swap fibonacci + then ; "
    "15 0 do i fibonacci loop";

const I64s kFibonacciStack = {0, 1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233, 377};

RuntimeErrorKind error_of(const std::string& source, colforth::test::InputMap inputs = {}) {
  Run r(source, std::move(inputs));
  REQUIRE(r.resume() == StopReason::Error);
  return r.machine.error();
}

}  // namespace

TEST_CASE("reverse polish arithmetic") {
  Run r("3 4 +");
  CHECK(r.resume() == StopReason::Done);
  CHECK(r.machine.stack() == I64s{7});
}

TEST_CASE("fibonacci conformance") {
  Run r(kFibonacci);
  CHECK(r.resume() == StopReason::Done);
  CHECK(r.machine.stack() == kFibonacciStack);
}

TEST_CASE("stack words") {
  auto stack_after = [](const std::string& src) {
    Run r(src);
    REQUIRE(r.resume() == StopReason::Done);
    return r.machine.stack();
  };
  CHECK(stack_after("1 2 swap") == I64s{2, 1});
  CHECK(stack_after("1 2 over") == I64s{1, 2, 1});
  CHECK(stack_after("1 2 3 rot") == I64s{2, 3, 1});
  CHECK(stack_after("5 dup") == I64s{5, 5});
  CHECK(stack_after("5 6 drop") == I64s{5});
  CHECK(stack_after("5 1+ 5 1-") == I64s{6, 4});
  CHECK(stack_after("7 negate 7 abs -7 abs") == I64s{-7, 7, 7});
  CHECK(stack_after("3 9 min 3 9 max") == I64s{3, 9});
  CHECK(stack_after("6 3 and 6 3 or 6 3 xor 0 invert") == I64s{2, 7, 5, -1});
  CHECK(stack_after("1 4 lshift 16 2 rshift") == I64s{16, 4});
  CHECK(stack_after("-1 1 rshift") == I64s{INT64_MAX});  // logical shift
  CHECK(stack_after("1 64 lshift 1 -1 lshift") == I64s{0, 0});
}

TEST_CASE("comparisons push -1 and 0") {
  Run r("1 2 < 1 2 > 2 2 = 2 2 <> 2 2 >= 3 2 <= 0 0= 5 0=");
  REQUIRE(r.resume() == StopReason::Done);
  CHECK(r.machine.stack() == I64s{-1, 0, -1, 0, -1, 0, -1, 0});
}

TEST_CASE("arithmetic wraps and divides floored") {
  auto top = [](const std::string& src) {
    Run r(src);
    REQUIRE(r.resume() == StopReason::Done);
    return r.machine.pop();
  };
  CHECK(top("9223372036854775807 1 +") == INT64_MIN);
  CHECK(top("-9223372036854775808 negate") == INT64_MIN);
  CHECK(top("-9223372036854775808 abs") == INT64_MIN);
  CHECK(top("7 2 /") == 3);
  CHECK(top("-7 2 /") == -4);
  CHECK(top("7 -2 /") == -4);
  CHECK(top("-7 -2 /") == 3);
  CHECK(top("7 2 mod") == 1);
  CHECK(top("-7 2 mod") == 1);
  CHECK(top("7 -2 mod") == -1);
  CHECK(top("-9223372036854775808 -1 /") == INT64_MIN);
  CHECK(top("-9223372036854775808 -1 mod") == 0);
}

TEST_CASE("division by zero") {
  CHECK(error_of("1 0 /") == RuntimeErrorKind::DivisionByZero);
  CHECK(error_of("1 0 mod") == RuntimeErrorKind::DivisionByZero);
}

TEST_CASE("do loops") {
  Run r("4 0 do i loop");
  REQUIRE(r.resume() == StopReason::Done);
  CHECK(r.machine.stack() == I64s{0, 1, 2, 3});

  Run zero("0 0 do 9 loop");
  REQUIRE(zero.resume() == StopReason::Done);
  CHECK(zero.machine.stack().empty());

  Run backwards("0 5 do 9 loop");  // start >= limit: no iterations
  REQUIRE(backwards.resume() == StopReason::Done);
  CHECK(backwards.machine.stack().empty());

  Run nested("2 0 do 2 0 do j i loop loop");
  REQUIRE(nested.resume() == StopReason::Done);
  CHECK(nested.machine.stack() == I64s{0, 0, 0, 1, 1, 0, 1, 1});

  Run step("10 0 do i 2 +loop");
  REQUIRE(step.resume() == StopReason::Done);
  CHECK(step.machine.stack() == I64s{0, 2, 4, 6, 8});
}

TEST_CASE("begin loops") {
  Run until("5 begin 1- dup 0= until");
  REQUIRE(until.resume() == StopReason::Done);
  CHECK(until.machine.stack() == I64s{0});

  Run wh("10 begin dup 0 > while 1- repeat");
  REQUIRE(wh.resume() == StopReason::Done);
  CHECK(wh.machine.stack() == I64s{0});

  Run skip("0 begin dup 0 > while 99 repeat");
  REQUIRE(skip.resume() == StopReason::Done);
  CHECK(skip.machine.stack() == I64s{0});
}

TEST_CASE("if takes non-zero as true") {
  Run r("7 if 1 else 2 then  0 if 3 else 4 then  -1 if 5 then");
  REQUIRE(r.resume() == StopReason::Done);
  CHECK(r.machine.stack() == I64s{1, 4, 5});
}

TEST_CASE("exit returns from the current word") {
  Run r(": f 1 begin pause exit again 9 ; f 2");
  CHECK(r.resume() == StopReason::Paused);
  CHECK(r.resume() == StopReason::Done);
  CHECK(r.machine.stack() == I64s{1, 2});

  Run top_level("1 exit 2");
  REQUIRE(top_level.resume() == StopReason::Done);
  CHECK(top_level.machine.stack() == I64s{1});

  Run in_loop(": f 10 0 do i exit loop 99 ; f f");
  REQUIRE(in_loop.resume() == StopReason::Done);
  CHECK(in_loop.machine.stack() == I64s{0, 0});
}

TEST_CASE("variables") {
  Run r("variable a variable b 5 a ! 3 a +! a @ b @");
  REQUIRE(r.resume() == StopReason::Done);
  CHECK(r.machine.stack() == I64s{8, 0});  // variables start at zero
  CHECK(r.machine.variable("a") == 8);
}

TEST_CASE("pause splits execution") {
  Run r("pause 1 2");
  CHECK(r.resume() == StopReason::Paused);
  CHECK(r.machine.stack().empty());
  CHECK(r.resume() == StopReason::Done);
  CHECK(r.machine.stack() == I64s{1, 2});
}

TEST_CASE("host stack access between pauses") {
  Run r("pause dup +");
  REQUIRE(r.resume() == StopReason::Paused);
  r.machine.push(7);
  REQUIRE(r.resume() == StopReason::Done);
  CHECK(r.machine.stack() == I64s{14});
}

TEST_CASE("host pop order and StackEmpty") {
  Run r("1 2");
  REQUIRE(r.resume() == StopReason::Done);
  CHECK(r.machine.pop() == 2);
  CHECK(r.machine.pop() == 1);
  CHECK_THROWS_AS(r.machine.pop(), StackEmptyError);

  Machine fresh(compile("1"));
  CHECK_THROWS_AS(fresh.pop(), StackEmptyError);
}

TEST_CASE("user halt") { CHECK(error_of("halt") == RuntimeErrorKind::UserHalt); }

TEST_CASE("stack underflow and overflow") {
  CHECK(error_of("drop") == RuntimeErrorKind::StackUnderflow);
  CHECK(error_of("1 +") == RuntimeErrorKind::StackUnderflow);
  CHECK(error_of("i") == RuntimeErrorKind::StackUnderflow);

  Run tiny("1 2 3 4 5", {}, MachineLimits{.stack_depth = 4});
  REQUIRE(tiny.resume() == StopReason::Error);
  CHECK(tiny.machine.error() == RuntimeErrorKind::StackOverflow);
}

TEST_CASE("recursion depth") {
  CHECK(error_of(": r r ; r") == RuntimeErrorKind::RecursionDepthExceeded);
  // the fibonacci recursion stays well inside the default limit
  Run fib(kFibonacci);
  CHECK(fib.resume() == StopReason::Done);
}

TEST_CASE("errors freeze the machine until reset") {
  Run r("1 0 /");
  REQUIRE(r.resume() == StopReason::Error);
  CHECK(r.machine.resume() == StopReason::Error);
  CHECK(r.machine.error() == RuntimeErrorKind::DivisionByZero);
  CHECK(r.machine.stop_text() == "division by zero");

  r.machine.reset();
  CHECK(r.machine.stop() == StopReason::NotStarted);
  r.machine.reset();  // idempotent
  r.machine.begin_run({});
  REQUIRE(r.machine.resume() == StopReason::Error);  // same program, same error
}

TEST_CASE("begin_run validates inputs") {
  Machine m(compile("input data"));
  CHECK_THROWS_AS(m.begin_run({}), MissingInputError);
  std::vector<std::uint8_t> one{0x01};
  std::map<std::string, std::span<const std::uint8_t>> views{{"data", one}};
  m.begin_run(views);
  CHECK(m.input_position("data") == 0);
  CHECK(m.resume() == StopReason::Done);
}

TEST_CASE("outputs are created per run") {
  Run r("output x int32");
  CHECK(r.machine.output("x").size() == 0);
  CHECK(r.resume() == StopReason::Done);
}

TEST_CASE("step_trace records words and stacks") {
  Run r("1 2 swap");
  auto steps = r.machine.step_trace(3);
  REQUIRE(steps.size() == 3);
  CHECK(steps[0].word == "1");
  CHECK(steps[0].stack == I64s{1});
  CHECK(steps[1].word == "2");
  CHECK(steps[1].stack == I64s{1, 2});
  CHECK(steps[2].word == "swap");
  CHECK(steps[2].stack == I64s{2, 1});
  CHECK(r.machine.resume() == StopReason::Done);

  Run loop("1 0 do i loop");
  auto loop_steps = loop.machine.step_trace(16);
  bool saw_index = false;
  for (const auto& s : loop_steps)
    if (s.word == "i" && s.stack == I64s{0}) saw_index = true;
  CHECK(saw_index);

  Run untouched("1 2 3");
  CHECK(untouched.machine.step_trace(0).empty());
  CHECK(untouched.machine.stack().empty());

  Run spin("begin again");  // trace budget must still terminate
  CHECK(spin.machine.step_trace(10).size() <= 10);
}

TEST_CASE("trace calls a word by name") {
  Run r(": f 3 ; f");
  auto steps = r.machine.step_trace(2);
  REQUIRE(steps.size() == 2);
  CHECK(steps[0].word == "f");
  CHECK(steps[1].word == "3");
}

TEST_CASE("pause equivalence") {
  // inserting pause between any two top-level words leaves the final state
  // unchanged once resumed to completion
  const std::string definition =
      ": fibonacci dup 1 > if 1- dup 1- fibonacci swap fibonacci + then ; ";
  const std::vector<std::string> tail = {"15", "0", "do", "i", "fibonacci", "loop"};
  for (std::size_t cut = 0; cut <= tail.size(); ++cut) {
    std::string source = definition;
    for (std::size_t k = 0; k < tail.size(); ++k) {
      if (k == cut) source += " pause";
      source += " " + tail[k];
    }
    if (cut == tail.size()) source += " pause";
    Run r(source);
    colforth::test::run_to_stop(r);
    CHECK(r.machine.stop() == StopReason::Done);
    CHECK(r.machine.stack() == kFibonacciStack);
  }
}

TEST_CASE("resume before begin_run is a usage error") {
  Machine m(compile("1"));
  CHECK_THROWS_AS(m.resume(), std::logic_error);
}

TEST_CASE("words executed counts dispatches") {
  Run r("3 4 +");
  REQUIRE(r.resume() == StopReason::Done);
  CHECK(r.machine.words_executed() == 3);
}
