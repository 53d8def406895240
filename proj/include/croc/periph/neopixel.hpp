#pragma once

#include "croc/periph/mmio.hpp"
#include "croc/periph/pin_event.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace croc::periph {

namespace neo_reg {
inline constexpr std::uint32_t kCtrl = 0x00;  // write bit0: start
inline constexpr std::uint32_t kStatus = 0x04;
inline constexpr std::uint32_t kLedCount = 0x08;
inline constexpr std::uint32_t kT0h = 0x0C;
inline constexpr std::uint32_t kT1h = 0x10;
inline constexpr std::uint32_t kTbit = 0x14;
inline constexpr std::uint32_t kTreset = 0x18;
inline constexpr std::uint32_t kFrameBuffer = 0x100;  // FB[i] at +4i
}  // namespace neo_reg

namespace neo_status {
inline constexpr std::uint32_t kBusy = 1U << 0;
inline constexpr std::uint32_t kError = 1U << 1;  // sticky, write 1 to clear
}  // namespace neo_status

/// Pulse timing in cycles.
struct NeoTiming {
  std::uint32_t t0h = 7;
  std::uint32_t t1h = 14;
  std::uint32_t tbit = 25;
  std::uint32_t treset = 1000;

  /// WS2812-class defaults (0.35 / 0.70 / 1.25 us, 50 us reset) at clk_hz.
  static NeoTiming for_clock(std::uint64_t clk_hz);
  bool valid() const { return t0h > 0 && t0h < t1h && t1h < tbit && treset > 0; }
};

/// Colors are stored as 0xRRGGBB and shifted out G, R, B, each MSB first.
class NeoPixel : public MmioDevice {
 public:
  static constexpr std::size_t kMaxLeds = 64;

  NeoPixel(std::uint32_t base, NeoTiming reset_timing);

  std::optional<std::uint32_t> read(std::uint32_t offset, Cycle now) override;
  bool write(std::uint32_t offset, std::uint32_t value, Cycle now) override;

  void tick(Cycle now, std::vector<PinEvent>& out);
  void reset();

  bool busy() const { return busy_; }
  std::uint32_t status() const { return (busy_ ? neo_status::kBusy : 0U) | sticky_; }
  const NeoTiming& timing() const { return timing_; }
  std::uint32_t led_count() const { return led_count_; }
  std::uint32_t color(std::size_t index) const { return frame_buffer_.at(index); }

  /// Frames (RGB colors) whose reset gap has completed since the last call.
  std::vector<std::vector<std::uint32_t>> take_completed_frames();

 private:
  bool wire_bit(std::size_t index) const;

  NeoTiming reset_timing_;
  NeoTiming timing_;
  std::uint32_t led_count_ = 0;
  std::array<std::uint32_t, kMaxLeds> frame_buffer_{};
  std::uint32_t sticky_ = 0;

  bool busy_ = false;
  Cycle frame_start_ = 0;
  std::vector<std::uint32_t> shifting_;  // snapshot taken at start
  std::vector<std::vector<std::uint32_t>> completed_;
  PinDriver pin_{"neopixel", 0};
};

}  // namespace croc::periph
