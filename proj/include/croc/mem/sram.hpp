#pragma once

#include "croc/obi/crossbar.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace croc::mem {

/// Raised when an image or host access leaves mapped SRAM.
class RangeError : public std::runtime_error {
 public:
  RangeError(const std::string& what, std::uint32_t addr) : std::runtime_error(what), addr_(addr) {}
  std::uint32_t addr() const { return addr_; }

 private:
  std::uint32_t addr_;
};

/// Tightly coupled SRAM: grant and access in the same cycle, response the next.
class SramBank : public obi::Subordinate {
 public:
  SramBank(std::string name, std::uint32_t base, std::uint32_t size);

  obi::ObiResponse access(const obi::ObiTransaction& txn) override;

  const std::string& name() const { return name_; }
  std::uint32_t base() const { return base_; }
  std::uint32_t size() const { return static_cast<std::uint32_t>(data_.size()); }
  bool contains(std::uint32_t addr, std::uint32_t len = 1) const;

  /// Host-side access, bypassing the bus. Throws RangeError.
  std::uint8_t peek(std::uint32_t addr) const;
  void poke(std::uint32_t addr, std::uint8_t value);
  std::uint32_t peek_word(std::uint32_t addr) const;

  void clear();
  std::span<const std::uint8_t> bytes() const { return data_; }

 private:
  std::string name_;
  std::uint32_t base_;
  std::vector<std::uint8_t> data_;
};

/// Copies `bytes` to [base, base+len) which must lie inside a single bank.
/// Zero-length images are a no-op. Throws RangeError naming the first byte
/// that falls outside every bank (or crosses a bank boundary).
void load_image(std::span<SramBank* const> banks, std::uint32_t base, std::span<const std::uint8_t> bytes);

}  // namespace croc::mem
