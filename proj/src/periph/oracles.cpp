#include "croc/periph/oracles.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace croc::periph {
namespace {

std::uint8_t level_at(std::span<const PinEvent> events, Cycle t) {
  const auto it = std::upper_bound(events.begin(), events.end(), t,
                                   [](Cycle value, const PinEvent& e) { return value < e.cycle; });
  if (it == events.begin()) return 1;
  return std::prev(it)->level;
}

}  // namespace

std::vector<std::uint8_t> uart_decode_oracle(std::span<const PinEvent> events, std::uint32_t divisor,
                                             std::optional<Cycle> end_cycle) {
  std::vector<std::uint8_t> bytes;
  Cycle from = 0;
  std::size_t i = 0;
  while (true) {
    while (i < events.size() && (events[i].level != 0 || events[i].cycle < from)) ++i;
    if (i == events.size()) break;
    const Cycle start = events[i].cycle;
    const auto sample = [&](unsigned bit_index) {
      const Cycle at = start + divisor / 2 + static_cast<Cycle>(bit_index) * divisor;
      if (end_cycle && at >= *end_cycle)
        throw FramingError(fmt::format("frame starting at cycle {} is truncated", start), i);
      return level_at(events, at);
    };
    if (sample(0) != 0) {
      from = start + 1;  // glitch shorter than half a bit
      ++i;
      continue;
    }
    std::uint8_t byte = 0;
    for (unsigned b = 0; b < 8; ++b)
      if (sample(1 + b)) byte = static_cast<std::uint8_t>(byte | (1U << b));
    if (sample(9) == 0) throw FramingError(fmt::format("stop bit low in frame starting at cycle {}", start), i);
    bytes.push_back(byte);
    from = start + divisor / 2 + 9ULL * divisor;
  }
  return bytes;
}

std::vector<std::vector<std::uint32_t>> neopixel_decode_oracle(std::span<const PinEvent> events,
                                                               const NeoTiming& timing) {
  std::vector<std::vector<std::uint32_t>> frames;
  std::vector<bool> bits;

  const auto close_frame = [&](std::size_t at_event) {
    if (bits.empty()) return;
    if (bits.size() % 24 != 0)
      throw NeoDecodeError(NeoDecodeError::Kind::PartialByte,
                           fmt::format("frame ends after {} bits (not a whole number of LEDs)", bits.size()),
                           at_event);
    std::vector<std::uint32_t> colors;
    for (std::size_t led = 0; led < bits.size() / 24; ++led) {
      std::uint32_t grb = 0;
      for (std::size_t b = 0; b < 24; ++b) grb = (grb << 1) | (bits[led * 24 + b] ? 1U : 0U);
      const std::uint32_t g = (grb >> 16) & 0xFFU;
      const std::uint32_t r = (grb >> 8) & 0xFFU;
      const std::uint32_t b = grb & 0xFFU;
      colors.push_back((r << 16) | (g << 8) | b);
    }
    frames.push_back(std::move(colors));
    bits.clear();
  };

  const auto within = [](Cycle width, std::uint32_t nominal) {
    const Cycle diff = width > nominal ? width - nominal : nominal - width;
    return diff * 4 <= nominal;
  };
  const auto distance = [](Cycle width, std::uint32_t nominal) {
    return width > nominal ? width - nominal : nominal - width;
  };

  std::optional<Cycle> last_fall;
  std::size_t i = 0;
  while (i < events.size()) {
    if (events[i].level != 1) {
      ++i;
      continue;
    }
    const Cycle rise = events[i].cycle;
    if (last_fall && rise - *last_fall >= timing.treset / 2) close_frame(i);
    if (i + 1 >= events.size())
      throw NeoDecodeError(NeoDecodeError::Kind::PartialByte, "trace ends inside a pulse", i);
    const Cycle width = events[i + 1].cycle - rise;
    const bool ok0 = within(width, timing.t0h);
    const bool ok1 = within(width, timing.t1h);
    bool value = false;
    if (ok0 && ok1) {
      const Cycle d0 = distance(width, timing.t0h);
      const Cycle d1 = distance(width, timing.t1h);
      if (d0 == d1)
        throw NeoDecodeError(NeoDecodeError::Kind::AmbiguousPulse,
                             fmt::format("pulse of {} cycles is equidistant from t0h and t1h", width), i);
      value = d1 < d0;
    } else if (ok0 || ok1) {
      value = ok1;
    } else {
      throw NeoDecodeError(NeoDecodeError::Kind::AmbiguousPulse,
                           fmt::format("pulse of {} cycles matches neither t0h={} nor t1h={}", width, timing.t0h,
                                       timing.t1h),
                           i);
    }
    bits.push_back(value);
    last_fall = events[i + 1].cycle;
    i += 2;
  }
  close_frame(events.size());
  return frames;
}

}  // namespace croc::periph
