#include "croc/periph/neopixel.hpp"

#include <algorithm>
#include <cmath>

namespace croc::periph {
namespace {

std::uint32_t ns_to_cycles(double ns, std::uint64_t clk_hz) {
  return static_cast<std::uint32_t>(std::llround(ns * static_cast<double>(clk_hz) / 1e9));
}

}  // namespace

NeoTiming NeoTiming::for_clock(std::uint64_t clk_hz) {
  NeoTiming t;
  t.t0h = std::max<std::uint32_t>(1, ns_to_cycles(350, clk_hz));
  t.t1h = std::max<std::uint32_t>(t.t0h + 1, ns_to_cycles(700, clk_hz));
  t.tbit = std::max<std::uint32_t>(t.t1h + 1, ns_to_cycles(1250, clk_hz));
  t.treset = std::max<std::uint32_t>(1, ns_to_cycles(50'000, clk_hz));
  return t;
}

NeoPixel::NeoPixel(std::uint32_t base, NeoTiming reset_timing)
    : MmioDevice(base), reset_timing_(reset_timing), timing_(reset_timing) {}

void NeoPixel::reset() {
  timing_ = reset_timing_;
  led_count_ = 0;
  frame_buffer_.fill(0);
  sticky_ = 0;
  busy_ = false;
  shifting_.clear();
  completed_.clear();
  pin_.reset();
}

std::optional<std::uint32_t> NeoPixel::read(std::uint32_t offset, Cycle) {
  if (offset >= neo_reg::kFrameBuffer) {
    const std::uint32_t index = (offset - neo_reg::kFrameBuffer) / 4;
    if (index >= kMaxLeds) return std::nullopt;
    return frame_buffer_[index];
  }
  switch (offset) {
    case neo_reg::kCtrl: return busy_ ? 1U : 0U;
    case neo_reg::kStatus: return status();
    case neo_reg::kLedCount: return led_count_;
    case neo_reg::kT0h: return timing_.t0h;
    case neo_reg::kT1h: return timing_.t1h;
    case neo_reg::kTbit: return timing_.tbit;
    case neo_reg::kTreset: return timing_.treset;
    default: return std::nullopt;
  }
}

bool NeoPixel::write(std::uint32_t offset, std::uint32_t value, Cycle now) {
  if (offset >= neo_reg::kFrameBuffer) {
    const std::uint32_t index = (offset - neo_reg::kFrameBuffer) / 4;
    if (index >= kMaxLeds) return false;
    if (busy_) {
      sticky_ |= neo_status::kError;
    } else {
      frame_buffer_[index] = value & 0x00FF'FFFFU;
    }
    return true;
  }
  if (offset == neo_reg::kStatus) {
    sticky_ &= ~(value & neo_status::kError);
    return true;
  }
  std::uint32_t* timing_field = nullptr;
  switch (offset) {
    case neo_reg::kCtrl:
      if (!(value & 1U)) return true;
      if (busy_ || !timing_.valid()) {
        sticky_ |= neo_status::kError;
        return true;
      }
      busy_ = true;
      frame_start_ = now + 1;
      shifting_.assign(frame_buffer_.begin(), frame_buffer_.begin() + led_count_);
      return true;
    case neo_reg::kLedCount:
      if (busy_) {
        sticky_ |= neo_status::kError;
      } else {
        led_count_ = std::min<std::uint32_t>(value, kMaxLeds);
      }
      return true;
    case neo_reg::kT0h: timing_field = &timing_.t0h; break;
    case neo_reg::kT1h: timing_field = &timing_.t1h; break;
    case neo_reg::kTbit: timing_field = &timing_.tbit; break;
    case neo_reg::kTreset: timing_field = &timing_.treset; break;
    default: return false;
  }
  if (busy_) {
    sticky_ |= neo_status::kError;
  } else {
    *timing_field = value;
  }
  return true;
}

bool NeoPixel::wire_bit(std::size_t index) const {
  const std::uint32_t rgb = shifting_[index / 24];
  const std::uint32_t grb = (((rgb >> 8) & 0xFFU) << 16) | (((rgb >> 16) & 0xFFU) << 8) | (rgb & 0xFFU);
  return ((grb >> (23 - index % 24)) & 1U) != 0;
}

void NeoPixel::tick(Cycle now, std::vector<PinEvent>& out) {
  if (!busy_ || now < frame_start_) return;
  const Cycle rel = now - frame_start_;
  const Cycle bits_end = static_cast<Cycle>(shifting_.size()) * 24U * timing_.tbit;
  if (rel < bits_end) {
    const std::size_t index = static_cast<std::size_t>(rel / timing_.tbit);
    const Cycle offset = rel % timing_.tbit;
    const std::uint32_t high = wire_bit(index) ? timing_.t1h : timing_.t0h;
    if (offset == 0) pin_.drive(now, 1, out);
    if (offset == high) pin_.drive(now, 0, out);
  } else if (rel >= bits_end + timing_.treset) {
    busy_ = false;
    completed_.push_back(shifting_);
  }
}

std::vector<std::vector<std::uint32_t>> NeoPixel::take_completed_frames() {
  std::vector<std::vector<std::uint32_t>> out;
  out.swap(completed_);
  return out;
}

}  // namespace croc::periph
