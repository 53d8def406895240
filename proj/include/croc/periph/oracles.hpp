#pragma once

// Independent waveform decoders. They only look at pin edges and know
// nothing about the peripheral state machines that produced them.

#include "croc/periph/neopixel.hpp"
#include "croc/periph/pin_event.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace croc::periph {

class FramingError : public std::runtime_error {
 public:
  FramingError(const std::string& what, std::size_t event_index)
      : std::runtime_error(what), event_index_(event_index) {}
  std::size_t event_index() const { return event_index_; }

 private:
  std::size_t event_index_;
};

/// Mid-bit sampling 8N1 decoder. The line idles high before the first event.
/// With `end_cycle`, samples at or past it mean a truncated frame.
std::vector<std::uint8_t> uart_decode_oracle(std::span<const PinEvent> events, std::uint32_t divisor,
                                             std::optional<Cycle> end_cycle = std::nullopt);

class NeoDecodeError : public std::runtime_error {
 public:
  enum class Kind { AmbiguousPulse, PartialByte };
  NeoDecodeError(Kind kind, const std::string& what, std::size_t event_index)
      : std::runtime_error(what), kind_(kind), event_index_(event_index) {}
  Kind kind() const { return kind_; }
  std::size_t event_index() const { return event_index_; }

 private:
  Kind kind_;
  std::size_t event_index_;
};

/// Classifies each high pulse as 0 or 1 by the nearest of t0h/t1h (within
/// +-25% of a nominal), splits frames at low gaps >= treset/2, and returns
/// the colors of each frame as 0xRRGGBB.
std::vector<std::vector<std::uint32_t>> neopixel_decode_oracle(std::span<const PinEvent> events,
                                                               const NeoTiming& timing);

}  // namespace croc::periph
