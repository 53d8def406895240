#include "croc/bits.hpp"

#include <fmt/format.h>

#include <stdexcept>

namespace croc {

std::string hex32(std::uint32_t value) { return fmt::format("0x{:08x}", value); }

std::string hex(std::uint64_t value) { return fmt::format("0x{:x}", value); }

std::string hex_bytes(const std::uint8_t* data, std::size_t len) {
  std::string out;
  out.reserve(len * 2);
  for (std::size_t i = 0; i < len; ++i) out += fmt::format("{:02x}", data[i]);
  return out;
}

std::uint64_t parse_uint(const std::string& text) {
  std::string digits;
  for (char c : text)
    if (c != '_') digits += c;
  if (digits.empty()) throw std::invalid_argument("empty number");
  int base = 10;
  std::size_t start = 0;
  if (digits.size() > 2 && digits[0] == '0' && (digits[1] == 'x' || digits[1] == 'X')) {
    base = 16;
    start = 2;
  }
  std::uint64_t value = 0;
  for (std::size_t i = start; i < digits.size(); ++i) {
    const char c = digits[i];
    unsigned d = 0;
    if (c >= '0' && c <= '9') {
      d = static_cast<unsigned>(c - '0');
    } else if (base == 16 && c >= 'a' && c <= 'f') {
      d = static_cast<unsigned>(c - 'a' + 10);
    } else if (base == 16 && c >= 'A' && c <= 'F') {
      d = static_cast<unsigned>(c - 'A' + 10);
    } else {
      throw std::invalid_argument("bad number: " + text);
    }
    const std::uint64_t next = value * static_cast<std::uint64_t>(base) + d;
    if (next / static_cast<std::uint64_t>(base) != value) throw std::invalid_argument("number out of range: " + text);
    value = next;
  }
  return value;
}

}  // namespace croc
