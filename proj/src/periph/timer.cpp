#include "croc/periph/timer.hpp"

namespace croc::periph {
namespace {

std::uint64_t with_low(std::uint64_t v, std::uint32_t lo) { return (v & 0xFFFF'FFFF'0000'0000ULL) | lo; }
std::uint64_t with_high(std::uint64_t v, std::uint32_t hi) {
  return (v & 0xFFFF'FFFFULL) | (static_cast<std::uint64_t>(hi) << 32);
}

}  // namespace

std::optional<std::uint32_t> Timer::read(std::uint32_t offset, Cycle) {
  switch (offset) {
    case timer_reg::kMtimeLo: return static_cast<std::uint32_t>(mtime_);
    case timer_reg::kMtimeHi: return static_cast<std::uint32_t>(mtime_ >> 32);
    case timer_reg::kMtimecmpLo: return static_cast<std::uint32_t>(mtimecmp_);
    case timer_reg::kMtimecmpHi: return static_cast<std::uint32_t>(mtimecmp_ >> 32);
    default: return std::nullopt;
  }
}

bool Timer::write(std::uint32_t offset, std::uint32_t value, Cycle) {
  switch (offset) {
    case timer_reg::kMtimeLo: mtime_ = with_low(mtime_, value); return true;
    case timer_reg::kMtimeHi: mtime_ = with_high(mtime_, value); return true;
    case timer_reg::kMtimecmpLo: mtimecmp_ = with_low(mtimecmp_, value); return true;
    case timer_reg::kMtimecmpHi: mtimecmp_ = with_high(mtimecmp_, value); return true;
    default: return false;
  }
}

bool Timer::tick() {
  ++mtime_;
  return level();
}

void Timer::reset() {
  mtime_ = 0;
  mtimecmp_ = std::numeric_limits<std::uint64_t>::max();
}

}  // namespace croc::periph
