#pragma once

#include "croc/periph/mmio.hpp"

#include <cstdint>
#include <limits>

namespace croc::periph {

namespace timer_reg {
inline constexpr std::uint32_t kMtimeLo = 0x00;
inline constexpr std::uint32_t kMtimeHi = 0x04;
inline constexpr std::uint32_t kMtimecmpLo = 0x08;
inline constexpr std::uint32_t kMtimecmpHi = 0x0C;
}  // namespace timer_reg

/// Machine timer. mtime counts cycles; the interrupt line is mtime >= mtimecmp.
class Timer : public MmioDevice {
 public:
  explicit Timer(std::uint32_t base) : MmioDevice(base) {}

  std::optional<std::uint32_t> read(std::uint32_t offset, Cycle now) override;
  bool write(std::uint32_t offset, std::uint32_t value, Cycle now) override;

  /// One cycle elapses; returns the interrupt line level.
  bool tick();
  void reset();

  bool level() const { return mtime_ >= mtimecmp_; }
  std::uint64_t mtime() const { return mtime_; }
  std::uint64_t mtimecmp() const { return mtimecmp_; }
  void set_mtime(std::uint64_t value) { mtime_ = value; }
  void set_mtimecmp(std::uint64_t value) { mtimecmp_ = value; }

 private:
  std::uint64_t mtime_ = 0;
  std::uint64_t mtimecmp_ = std::numeric_limits<std::uint64_t>::max();
};

}  // namespace croc::periph
