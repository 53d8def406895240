#include "croc/mem/sram.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace croc::mem {

SramBank::SramBank(std::string name, std::uint32_t base, std::uint32_t size)
    : name_(std::move(name)), base_(base), data_(size, 0) {
  if (size == 0 || size % 4 != 0) throw std::invalid_argument("SRAM size must be a non-zero multiple of 4");
}

bool SramBank::contains(std::uint32_t addr, std::uint32_t len) const {
  if (addr < base_) return false;
  const std::uint64_t offset = addr - base_;
  return offset + len <= data_.size();
}

obi::ObiResponse SramBank::access(const obi::ObiTransaction& txn) {
  const std::uint32_t addr = txn.addr & ~3U;
  if (!contains(addr, 4)) return {0, true};
  const std::size_t off = addr - base_;
  if (txn.we) {
    for (unsigned lane = 0; lane < 4; ++lane)
      if (txn.be & (1U << lane)) data_[off + lane] = static_cast<std::uint8_t>(txn.wdata >> (8U * lane));
    return {0, false};
  }
  std::uint32_t word = 0;
  for (unsigned lane = 0; lane < 4; ++lane) word |= static_cast<std::uint32_t>(data_[off + lane]) << (8U * lane);
  return {word, false};
}

std::uint8_t SramBank::peek(std::uint32_t addr) const {
  if (!contains(addr)) throw RangeError(fmt::format("{}: address 0x{:08x} out of range", name_, addr), addr);
  return data_[addr - base_];
}

void SramBank::poke(std::uint32_t addr, std::uint8_t value) {
  if (!contains(addr)) throw RangeError(fmt::format("{}: address 0x{:08x} out of range", name_, addr), addr);
  data_[addr - base_] = value;
}

std::uint32_t SramBank::peek_word(std::uint32_t addr) const {
  std::uint32_t word = 0;
  for (unsigned i = 0; i < 4; ++i) word |= static_cast<std::uint32_t>(peek(addr + i)) << (8U * i);
  return word;
}

void SramBank::clear() { std::fill(data_.begin(), data_.end(), 0); }

void load_image(std::span<SramBank* const> banks, std::uint32_t base, std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) return;
  SramBank* target = nullptr;
  for (SramBank* bank : banks)
    if (bank->contains(base)) target = bank;
  if (!target) throw RangeError(fmt::format("image byte at 0x{:08x} is not in SRAM", base), base);
  if (!target->contains(base, static_cast<std::uint32_t>(bytes.size()))) {
    const std::uint32_t first_bad = target->base() + target->size();
    throw RangeError(fmt::format("image byte at 0x{:08x} lies outside {}", first_bad, target->name()), first_bad);
  }
  for (std::size_t i = 0; i < bytes.size(); ++i) target->poke(base + static_cast<std::uint32_t>(i), bytes[i]);
}

}  // namespace croc::mem
