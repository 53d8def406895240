#pragma once

#include "croc/bits.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace croc::periph {

/// Timestamped edge on a named pad.
struct PinEvent {
  Cycle cycle = 0;
  std::uint64_t time_ns = 0;
  std::string pin;
  std::uint8_t level = 0;

  bool operator==(const PinEvent&) const = default;
};

std::uint64_t cycles_to_ns(Cycle cycle, std::uint64_t clk_hz);

/// Collects edges for one pad, dropping writes that do not change the level.
class PinDriver {
 public:
  PinDriver(std::string name, std::uint8_t idle_level) : name_(std::move(name)), level_(idle_level), idle_(idle_level) {}

  /// Appends an event to `out` only if the level changes.
  void drive(Cycle cycle, std::uint8_t level, std::vector<PinEvent>& out);
  std::uint8_t level() const { return level_; }
  const std::string& name() const { return name_; }
  void reset() { level_ = idle_; }

 private:
  std::string name_;
  std::uint8_t level_;
  std::uint8_t idle_;
};

}  // namespace croc::periph
