#pragma once

#include "croc/obi/crossbar.hpp"

#include <cstdint>
#include <optional>

namespace croc::periph {

/// Register-file subordinate. Offsets are relative to the attached base and
/// word aligned; partial writes carry only the enabled byte lanes.
class MmioDevice : public obi::Subordinate {
 public:
  explicit MmioDevice(std::uint32_t base) : base_(base) {}

  obi::ObiResponse access(const obi::ObiTransaction& txn) final {
    const std::uint32_t offset = (txn.addr & ~3U) - base_;
    if (txn.we) {
      std::uint32_t mask = 0;
      for (unsigned lane = 0; lane < 4; ++lane)
        if (txn.be & (1U << lane)) mask |= 0xFFU << (8U * lane);
      return {0, !write(offset, txn.wdata & mask, txn.granted_cycle)};
    }
    const auto value = read(offset, txn.granted_cycle);
    return {value.value_or(0), !value.has_value()};
  }

  std::uint32_t base() const { return base_; }
  void rebase(std::uint32_t base) { base_ = base; }

  /// nullopt / false for unmapped offsets (bus error).
  virtual std::optional<std::uint32_t> read(std::uint32_t offset, Cycle now) = 0;
  virtual bool write(std::uint32_t offset, std::uint32_t value, Cycle now) = 0;

 private:
  std::uint32_t base_;
};

}  // namespace croc::periph
