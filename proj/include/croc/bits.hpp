#pragma once

#include <cstdint>
#include <string>

namespace croc {

using Cycle = std::uint64_t;

/// Sign-extend the low `bits` bits of `value`.
constexpr std::int32_t sext(std::uint32_t value, unsigned bits) {
  const std::uint32_t shift = 32U - bits;
  return static_cast<std::int32_t>(value << shift) >> shift;
}

constexpr std::uint32_t bit_field(std::uint32_t value, unsigned hi, unsigned lo) {
  return (value >> lo) & ((hi - lo == 31U) ? 0xFFFF'FFFFU : ((1U << (hi - lo + 1U)) - 1U));
}

constexpr std::uint32_t bit(std::uint32_t value, unsigned pos) { return (value >> pos) & 1U; }

/// "0x" followed by exactly eight lowercase hex digits.
std::string hex32(std::uint32_t value);
/// "0x" followed by the minimal number of hex digits.
std::string hex(std::uint64_t value);
std::string hex_bytes(const std::uint8_t* data, std::size_t len);

/// Accepts decimal or 0x-prefixed hex; underscores are ignored. Throws std::invalid_argument.
std::uint64_t parse_uint(const std::string& text);

}  // namespace croc
