#pragma once

#include "croc/periph/mmio.hpp"
#include "croc/periph/pin_event.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace croc::periph {

namespace gpio_reg {
inline constexpr std::uint32_t kDir = 0x00;  // 1 = output
inline constexpr std::uint32_t kOut = 0x04;
inline constexpr std::uint32_t kIn = 0x08;   // read-only pad levels
}  // namespace gpio_reg

/// GPIO bank. A pad follows the output latch when its direction is output
/// and the host-driven input sample otherwise; every pad level change is an event.
class Gpio : public MmioDevice {
 public:
  Gpio(std::uint32_t base, unsigned pin_count);

  std::optional<std::uint32_t> read(std::uint32_t offset, Cycle now) override;
  bool write(std::uint32_t offset, std::uint32_t value, Cycle now) override;

  /// Host-side input. Throws std::out_of_range for pin >= pin_count().
  void set_input(unsigned pin, std::uint8_t level, Cycle now);

  /// Events produced by register writes and input changes since the last call.
  void drain_events(std::vector<PinEvent>& out);
  void reset();

  unsigned pin_count() const { return static_cast<unsigned>(pads_.size()); }
  std::uint32_t dir() const { return dir_; }
  std::uint32_t out() const { return out_; }
  std::uint32_t pad_levels() const;

 private:
  void update_pads(Cycle now);

  std::uint32_t mask_;
  std::uint32_t dir_ = 0;
  std::uint32_t out_ = 0;
  std::uint32_t in_ = 0;
  std::vector<PinDriver> pads_;
  std::vector<PinEvent> pending_;
};

}  // namespace croc::periph
