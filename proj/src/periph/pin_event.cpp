#include "croc/periph/pin_event.hpp"

namespace croc::periph {

std::uint64_t cycles_to_ns(Cycle cycle, std::uint64_t clk_hz) {
  if (clk_hz == 0) return 0;
  constexpr std::uint64_t kNsPerSecond = 1'000'000'000ULL;
  return cycle / clk_hz * kNsPerSecond + cycle % clk_hz * kNsPerSecond / clk_hz;
}

void PinDriver::drive(Cycle cycle, std::uint8_t level, std::vector<PinEvent>& out) {
  level = level ? 1 : 0;
  if (level == level_) return;
  level_ = level;
  // time_ns is filled in by the platform, which knows the clock.
  out.push_back(PinEvent{cycle, 0, name_, level});
}

}  // namespace croc::periph
