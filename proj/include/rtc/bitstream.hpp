#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rtc/ganglionic.hpp"

namespace rtc {

/// File layout, all integers little-endian:
///   "RTC1" | version u8 | N u32 | K u8 | horizon_us u32 | flags u8 (bit 0 dithered)
///   | seed u64 | t_star_us u32 | schedule K x u32 | params 16 x f64 | low-pass f64
///   | sign byte count u32 | sign bits (LSB first, (k,i,j) order)
///   | events: timestamp_us u32, k u8, index u32
namespace bitstream {
inline constexpr std::uint8_t kVersion = 1;
inline constexpr std::size_t kEventBytes = 9;
}  // namespace bitstream

/// Bytes before the first event record.
std::size_t header_length(int subbands);

std::vector<std::uint8_t> serialize(const SpikeStream& stream);

/// Throws FormatError with the byte offset of the first violation.
SpikeStream parse(std::span<const std::uint8_t> bytes);

/// First `records` event records of a serialized stream, header included.
std::vector<std::uint8_t> truncate_records(std::span<const std::uint8_t> bytes, std::size_t records);

}  // namespace rtc
