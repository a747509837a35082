#include <doctest.h>

#include <cstring>

#include "rtc/bitstream.hpp"
#include "rtc/codec.hpp"
#include "rtc/error.hpp"
#include "support.hpp"

using namespace rtc;

namespace {

SpikeStream small_stream() {
  const auto img = test::smooth_image(16, 31);
  CodecOptions o;
  o.seed = 0x0123456789abcdefULL;
  return encode_image(img, RetinaParams{}, o).stream;
}

std::size_t format_offset(std::span<const std::uint8_t> bytes) {
  try {
    parse(bytes);
  } catch (const FormatError& e) {
    return e.offset();
  }
  return SIZE_MAX;
}

void put_u32(std::vector<std::uint8_t>& b, std::size_t at, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b[at + i] = static_cast<std::uint8_t>(v >> (8 * i));
}

}  // namespace

TEST_CASE("header size") {
  // 27 fixed bytes, 4 schedule words, 17 doubles, sign count, ceil(85 / 8) sign bytes
  CHECK(header_length(4) == 194);
  SpikeStream empty;
  empty.header.n = 8;
  empty.header.subbands = 4;
  empty.header.horizon_us = 100000;
  empty.header.schedule_us = {10000, 20000, 30000, 38000};
  empty.negative.assign(85, 0);
  const auto bytes = serialize(empty);
  CHECK(bytes.size() == 194);
  CHECK(std::memcmp(bytes.data(), "RTC1", 4) == 0);
  CHECK(bytes[9] == 4);
  const auto back = parse(bytes);
  CHECK(back.events.empty());
  CHECK(back.header.schedule_us == empty.header.schedule_us);
}

TEST_CASE("round trip is byte identical") {
  const auto s = small_stream();
  REQUIRE_FALSE(s.events.empty());
  const auto bytes = serialize(s);
  CHECK(bytes.size() == header_length(5) + s.events.size() * bitstream::kEventBytes);
  const auto back = parse(bytes);
  CHECK(back.events == s.events);
  CHECK(back.negative == s.negative);
  CHECK(back.header.seed == s.header.seed);
  CHECK(back.header.lowpass == s.header.lowpass);
  CHECK(back.header.params_digest() == s.header.params_digest());
  CHECK(serialize(back) == bytes);
}

TEST_CASE("every record-aligned prefix parses") {
  const auto s = small_stream();
  const auto bytes = serialize(s);
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t records = static_cast<std::size_t>(open_unit(rng) * s.events.size());
    const auto cut = parse(truncate_records(bytes, records));
    CHECK(cut.events.size() == records);
    CHECK(std::equal(cut.events.begin(), cut.events.end(), s.events.begin()));
  }
  CHECK_THROWS_AS(truncate_records(bytes, s.events.size() + 1), ConfigError);
}

TEST_CASE("malformed streams report the offending offset") {
  const auto s = small_stream();
  const auto good = serialize(s);
  const std::size_t first = header_length(5);

  auto b = good;
  b[0] = 'X';
  CHECK(format_offset(b) == 0);

  b = good;
  b[4] = 2;
  CHECK(format_offset(b) == 4);

  b = good;
  b[9] = 6;
  CHECK(format_offset(b) == 9);

  CHECK(format_offset(std::span(good).first(first - 3)) < first);

  b = good;
  b.pop_back();
  CHECK(format_offset(b) == good.size() - bitstream::kEventBytes);

  b = good;
  b[first + 4] = 5;
  CHECK(format_offset(b) == first);
  try {
    parse(b);
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("event record 0") != std::string::npos);
  }

  b = good;
  put_u32(b, first + 5, 1u << 2 * s.events[0].k);
  CHECK(format_offset(b) == first);

  REQUIRE(s.events.size() >= 2);
  b = good;
  std::swap_ranges(b.begin() + first, b.begin() + first + 9, b.begin() + first + 9);
  if (s.events[0] != s.events[1]) CHECK(format_offset(b) == first + 9);

  b = good;
  put_u32(b, first, s.header.horizon_us + 1);
  CHECK(format_offset(b) == first);
}
