#include "croc/periph/gpio.hpp"

#include <string>

namespace croc::periph {

Gpio::Gpio(std::uint32_t base, unsigned pin_count)
    : MmioDevice(base), mask_(pin_count >= 32 ? 0xFFFF'FFFFU : ((1U << pin_count) - 1U)) {
  if (pin_count == 0 || pin_count > 32) throw std::invalid_argument("GPIO pin count must be 1..32");
  pads_.reserve(pin_count);
  for (unsigned i = 0; i < pin_count; ++i) pads_.emplace_back("gpio" + std::to_string(i), 0);
}

void Gpio::reset() {
  dir_ = out_ = in_ = 0;
  for (auto& pad : pads_) pad.reset();
  pending_.clear();
}

std::uint32_t Gpio::pad_levels() const { return ((out_ & dir_) | (in_ & ~dir_)) & mask_; }

void Gpio::update_pads(Cycle now) {
  const std::uint32_t levels = pad_levels();
  for (unsigned i = 0; i < pads_.size(); ++i) pads_[i].drive(now, (levels >> i) & 1U, pending_);
}

std::optional<std::uint32_t> Gpio::read(std::uint32_t offset, Cycle) {
  switch (offset) {
    case gpio_reg::kDir: return dir_;
    case gpio_reg::kOut: return out_;
    case gpio_reg::kIn: return pad_levels();
    default: return std::nullopt;
  }
}

bool Gpio::write(std::uint32_t offset, std::uint32_t value, Cycle now) {
  switch (offset) {
    case gpio_reg::kDir: dir_ = value & mask_; break;
    case gpio_reg::kOut: out_ = value & mask_; break;
    case gpio_reg::kIn: return true;
    default: return false;
  }
  update_pads(now);
  return true;
}

void Gpio::set_input(unsigned pin, std::uint8_t level, Cycle now) {
  if (pin >= pads_.size()) throw std::out_of_range("GPIO pin " + std::to_string(pin) + " out of range");
  if (level) {
    in_ |= 1U << pin;
  } else {
    in_ &= ~(1U << pin);
  }
  update_pads(now);
}

void Gpio::drain_events(std::vector<PinEvent>& out) {
  out.insert(out.end(), pending_.begin(), pending_.end());
  pending_.clear();
}

}  // namespace croc::periph
