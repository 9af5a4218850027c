#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <random>

#include "colforth/columnar.hpp"
#include "colforth/formats/codec.hpp"
#include "support.hpp"

using namespace colforth;
using colforth::test::Bytes;
using colforth::test::Run;

using I64s = std::vector<std::int64_t>;

namespace {

I64s run_reads(const std::string& body, Bytes data) {
  Run r("input data " + body, {{"data", std::move(data)}});
  REQUIRE(r.resume() == StopReason::Done);
  return r.machine.stack();
}

RuntimeErrorKind read_error(const std::string& body, Bytes data) {
  Run r("input data " + body, {{"data", std::move(data)}});
  REQUIRE(r.resume() == StopReason::Error);
  return r.machine.error();
}

}  // namespace

TEST_CASE("fixed-width reads to the stack") {
  CHECK(run_reads("data !i-> stack", {0x00, 0x00, 0x00, 0x07}) == I64s{7});
  CHECK(run_reads("data h-> stack", {0x01, 0x00}) == I64s{1});
  CHECK(run_reads("data b-> stack", {0xFF}) == I64s{-1});
  CHECK(run_reads("data B-> stack", {0xFF}) == I64s{255});
  CHECK(run_reads("data !H-> stack", {0x01, 0x02}) == I64s{0x0102});
  CHECK(run_reads("data q-> stack", {1, 0, 0, 0, 0, 0, 0, 0}) == I64s{1});
  // unsigned 8-byte values beyond the signed range wrap
  CHECK(run_reads("data Q-> stack",
                  {0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0xFF}) == I64s{-1});
  CHECK(run_reads("data i-> stack data pos", {5, 0, 0, 0}) == I64s{5, 4});
}

TEST_CASE("float reads truncate when pushed") {
  Bytes big_endian_1_5 = {0x3F, 0xF8, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00};
  CHECK(run_reads("data !d-> stack", big_endian_1_5) == I64s{1});
}

TEST_CASE("counted reads") {
  Bytes hundred;
  for (std::uint32_t k = 0; k < 100; ++k) {
    hundred.push_back(static_cast<std::uint8_t>(k));
    hundred.push_back(0);
    hundred.push_back(0);
    hundred.push_back(0);
  }
  Run r("input data output x uint32 100 data #I-> x", {{"data", hundred}});
  REQUIRE(r.resume() == StopReason::Done);
  CHECK(r.machine.output("x").size() == 100);
  CHECK(r.machine.output("x").last_int() == 99);

  CHECK(run_reads("0 data #i-> stack", {}) == I64s{});
  CHECK(read_error("-1 data #i-> stack", {}) == RuntimeErrorKind::ReadBeyond);
}

TEST_CASE("reads past the end fail without consuming") {
  CHECK(read_error("data i-> stack", {1, 2, 3}) == RuntimeErrorKind::ReadBeyond);
  Run r("input data data i-> stack", {{"data", {1, 2, 3}}});
  REQUIRE(r.resume() == StopReason::Error);
  CHECK(r.machine.input_position("data") == 0);
}

TEST_CASE("varint decoding") {
  CHECK(run_reads("data varint-> stack", {0x00}) == I64s{0});
  CHECK(run_reads("data varint-> stack", {0x96, 0x01}) == I64s{150});
  CHECK(run_reads("data varint-> stack data pos", {0xAC, 0x02, 0x07}) == I64s{300, 2});
  // all 64 bits set
  CHECK(run_reads("data varint-> stack",
                  {0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0x01}) ==
        I64s{-1});
  CHECK(read_error("data varint-> stack", Bytes(11, 0xFF)) ==
        RuntimeErrorKind::VarintTooBig);
  CHECK(read_error("data varint-> stack", {0x80}) == RuntimeErrorKind::ReadBeyond);
}

TEST_CASE("zigzag decoding") {
  CHECK(run_reads("data zigzag-> stack", {0x03}) == I64s{-2});
  CHECK(run_reads("data zigzag-> stack", {0x04}) == I64s{2});
  CHECK(run_reads("data zigzag-> stack", {0x00}) == I64s{0});
  CHECK(run_reads("data zigzag-> stack", {0x01}) == I64s{-1});
}

TEST_CASE("varint round trip") {
  std::mt19937_64 rng(20240817);
  for (int trial = 0; trial < 2000; ++trial) {
    std::uint64_t value = rng() >> (rng() % 64);
    Bytes encoded;
    formats::varint_encode(value, encoded);
    CHECK(run_reads("data varint-> stack", encoded) ==
          I64s{static_cast<std::int64_t>(value)});

    std::int64_t s = static_cast<std::int64_t>(value) * (trial % 2 ? -1 : 1);
    Bytes zz;
    formats::zigzag_varint_encode(s, zz);
    CHECK(run_reads("data zigzag-> stack", zz) == I64s{s});
    CHECK(formats::zigzag_decode(formats::zigzag_encode(s)) == s);
  }
}

TEST_CASE("n-bit reads") {
  CHECK(run_reads("4 data #2bit-> stack", {0b11100100}) == I64s{0, 1, 2, 3});
  CHECK(run_reads("0 data #2bit-> stack data pos", {0xFF}) == I64s{0});
  CHECK(read_error("5 data #2bit-> stack", {0xFF}) == RuntimeErrorKind::ReadBeyond);

  Run out("input data output x uint8 4 data #2bit-> x", {{"data", {0b11100100}}});
  REQUIRE(out.resume() == StopReason::Done);
  CHECK(column_values(out.machine.output("x").snapshot()) == I64s{0, 1, 2, 3});
}

TEST_CASE("n-bit round trip") {
  std::mt19937_64 rng(7);
  for (int nbits = 1; nbits <= 32; ++nbits) {
    std::vector<std::uint32_t> values(40);
    for (auto& v : values)
      v = static_cast<std::uint32_t>(rng() & ((nbits == 32 ? ~0u : (1u << nbits) - 1)));
    Bytes packed;
    formats::bit_pack(values, nbits, packed);
    auto got = run_reads(std::to_string(values.size()) + " data #" +
                             std::to_string(nbits) + "bit-> stack",
                         packed);
    I64s expected(values.begin(), values.end());
    REQUIRE(got == expected);
  }
}

TEST_CASE("eight-bit n-bit reads match byte reads") {
  Bytes data = {9, 8, 7, 6};
  CHECK(run_reads("4 data #8bit-> stack", data) == run_reads("4 data #B-> stack", data));
}

TEST_CASE("seek skip rewind pos end len") {
  Bytes ten(10, 0);
  CHECK(run_reads("10 data seek data pos", ten) == I64s{10});
  CHECK(read_error("11 data seek", ten) == RuntimeErrorKind::SeekBeyond);
  CHECK(read_error("-1 data seek", ten) == RuntimeErrorKind::SeekBeyond);
  CHECK(run_reads("4 data skip data pos", ten) == I64s{4});
  CHECK(read_error("11 data skip", ten) == RuntimeErrorKind::SkipBeyond);
  CHECK(read_error("-1 data skip", ten) == RuntimeErrorKind::SkipBeyond);
  CHECK(run_reads("4 data skip 3 data rewind data pos", ten) == I64s{1});
  CHECK(read_error("1 data rewind", ten) == RuntimeErrorKind::RewindBeyond);
  CHECK(read_error("4 data skip -1 data rewind", ten) == RuntimeErrorKind::RewindBeyond);
  CHECK(run_reads("data len data end 10 data seek data end", ten) == I64s{10, 0, -1});
  CHECK(run_reads("data end", {}) == I64s{-1});
}

TEST_CASE("position algebra") {
  std::mt19937_64 rng(99);
  Bytes data(256);
  for (auto& b : data) b = static_cast<std::uint8_t>(rng());
  InputBuffer in("data", data);
  const std::size_t widths[] = {1, 1, 2, 2, 4, 4, 8, 8};
  for (int trial = 0; trial < 500; ++trial) {
    auto code = static_cast<ReadCode>(rng() % 8);
    std::size_t before = in.position();
    std::int64_t out;
    if (in.read_int(code, rng() % 2 == 0, out) != RuntimeErrorKind::None) {
      CHECK(in.position() == before);
      REQUIRE(in.seek(static_cast<std::int64_t>(rng() % (data.size() + 1))) ==
              RuntimeErrorKind::None);
      continue;
    }
    CHECK(in.position() == before + widths[static_cast<int>(code)]);
  }
}

TEST_CASE("output writes") {
  Run r("output x int32 0 x <- stack 5 x +<- stack", {});
  REQUIRE(r.resume() == StopReason::Done);
  CHECK(column_values(r.machine.output("x").snapshot()) == I64s{0, 5});

  Run empty_add("output y int32 3 y +<- stack", {});
  REQUIRE(empty_add.resume() == StopReason::Done);
  CHECK(column_values(empty_add.machine.output("y").snapshot()) == I64s{3});

  Run dup("output x int32 7 x <- stack 3 x dup", {});
  REQUIRE(dup.resume() == StopReason::Done);
  CHECK(column_values(dup.machine.output("x").snapshot()) == I64s{7, 7, 7, 7});

  Run dup_empty("output x int32 3 x dup", {});
  REQUIRE(dup_empty.resume() == StopReason::Done);
  CHECK(column_values(dup_empty.machine.output("x").snapshot()) == I64s{0, 0, 0});
}

TEST_CASE("dup_last keeps last unchanged") {
  OutputBuffer out("x", Dtype::Int16);
  out.append_int(41);
  out.dup_last(5);
  CHECK(out.size() == 6);
  CHECK(out.last_int() == 41);
  out.dup_last(0);
  out.dup_last(-3);
  CHECK(out.size() == 6);
}

TEST_CASE("snapshot layout is little-endian") {
  OutputBuffer out("x", Dtype::Int32);
  out.append_int(0);
  out.append_int(5);
  auto snap = out.snapshot();
  CHECK(snap.length == 2);
  CHECK(snap.bytes == Bytes{0, 0, 0, 0, 5, 0, 0, 0});
  out.append_int(6);  // still appendable after snapshot
  CHECK(out.size() == 3);
  CHECK(snap.length == 2);

  OutputBuffer empty("y", Dtype::Float32);
  CHECK(empty.snapshot().length == 0);
}

TEST_CASE("float fidelity through direct fills") {
  Bytes big_endian_1_5 = {0x3F, 0xF8, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00};
  Run r("input data output x float64 data !d-> x", {{"data", big_endian_1_5}});
  REQUIRE(r.resume() == StopReason::Done);
  auto floats = column_floats(r.machine.output("x").snapshot());
  REQUIRE(floats.size() == 1);
  CHECK(floats[0] == 1.5);

  // bit-identical round trip for arbitrary payloads
  std::mt19937_64 rng(5);
  Bytes raw(4 * 64);
  for (auto& b : raw) b = static_cast<std::uint8_t>(rng());
  Run f32("input data output x float32 64 data #f-> x", {{"data", raw}});
  REQUIRE(f32.resume() == StopReason::Done);
  CHECK(f32.machine.output("x").snapshot().bytes == raw);
}

TEST_CASE("narrowing and widening fills") {
  // double read into a float32 output rounds to nearest
  Bytes d;
  d.resize(8);
  const double value = 1.1;
  std::memcpy(d.data(), &value, 8);
  Run narrow("input data output x float32 data d-> x", {{"data", d}});
  REQUIRE(narrow.resume() == StopReason::Done);
  auto floats = column_floats(narrow.machine.output("x").snapshot());
  CHECK(floats[0] == doctest::Approx(1.1f));

  // integer stack value into a float output converts numerically
  Run int_to_float("output x float64 3 x <- stack", {});
  REQUIRE(int_to_float.resume() == StopReason::Done);
  CHECK(column_floats(int_to_float.machine.output("x").snapshot())[0] == 3.0);

  // integer writes wrap into narrow outputs
  Run wrap("output x uint8 300 x <- stack", {});
  REQUIRE(wrap.resume() == StopReason::Done);
  CHECK(column_values(wrap.machine.output("x").snapshot()) == I64s{44});
}

TEST_CASE("bool outputs") {
  Run r("output x bool 0 x <- stack 7 x <- stack", {});
  REQUIRE(r.resume() == StopReason::Done);
  CHECK(column_values(r.machine.output("x").snapshot()) == I64s{0, 1});
}
