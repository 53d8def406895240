#include "croc/periph/uart.hpp"

#include <algorithm>

namespace croc::periph {
namespace {

// start(0) + 8 data bits LSB first + stop(1)
std::uint16_t frame_of(std::uint8_t byte) { return static_cast<std::uint16_t>((1U << 9) | (byte << 1)); }

constexpr unsigned kFrameBits = 10;

}  // namespace

Uart::Uart(std::uint32_t base, std::uint32_t reset_divisor)
    : MmioDevice(base), reset_divisor_(std::max(reset_divisor, kMinDivisor)), divisor_(reset_divisor_) {}

void Uart::reset() {
  divisor_ = reset_divisor_;
  ctrl_ = uart_ctrl::kTxEnable | uart_ctrl::kRxEnable;
  sticky_ = 0;
  tx_fifo_.clear();
  rx_fifo_.clear();
  tx_done_.clear();
  tx_pin_.reset();
  rx_pin_.reset();
  tx_active_ = false;
  rx_state_ = RxState::Idle;
  host_queue_.clear();
  host_active_ = false;
}

std::uint32_t Uart::status() const {
  std::uint32_t s = sticky_;
  if (tx_fifo_.empty() && !tx_active_) s |= uart_status::kTxEmpty;
  if (tx_fifo_.size() >= kFifoDepth) s |= uart_status::kTxFull;
  if (!rx_fifo_.empty()) s |= uart_status::kRxAvail;
  if (tx_active_) s |= uart_status::kTxBusy;
  return s;
}

std::optional<std::uint32_t> Uart::read(std::uint32_t offset, Cycle) {
  switch (offset) {
    case uart_reg::kTxData: return 0U;
    case uart_reg::kRxData: {
      if (rx_fifo_.empty()) {
        sticky_ |= uart_status::kRxUnderflow;
        return 0U;
      }
      const std::uint8_t byte = rx_fifo_.front();
      rx_fifo_.pop_front();
      return byte;
    }
    case uart_reg::kStatus: return status();
    case uart_reg::kCtrl: return ctrl_;
    case uart_reg::kBaudDiv: return divisor_;
    default: return std::nullopt;
  }
}

bool Uart::write(std::uint32_t offset, std::uint32_t value, Cycle) {
  switch (offset) {
    case uart_reg::kTxData:
      if (tx_fifo_.size() >= kFifoDepth) {
        sticky_ |= uart_status::kTxOverflow;
      } else {
        tx_fifo_.push_back(static_cast<std::uint8_t>(value));
      }
      return true;
    case uart_reg::kRxData: return true;
    case uart_reg::kStatus: sticky_ &= ~(value & uart_status::kSticky); return true;
    case uart_reg::kCtrl: ctrl_ = value & (uart_ctrl::kTxEnable | uart_ctrl::kRxEnable); return true;
    case uart_reg::kBaudDiv: divisor_ = std::max(value, kMinDivisor); return true;
    default: return false;
  }
}

void Uart::inject_rx(std::span<const std::uint8_t> bytes) { host_queue_.insert(host_queue_.end(), bytes.begin(), bytes.end()); }

void Uart::drive_rx(Cycle now, std::uint8_t level, std::vector<PinEvent>& out) { rx_pin_.drive(now, level, out); }

std::vector<std::uint8_t> Uart::take_tx_bytes() {
  std::vector<std::uint8_t> out;
  out.swap(tx_done_);
  return out;
}

void Uart::tick(Cycle now, std::vector<PinEvent>& out) {
  tick_host_tx(now, out);
  tick_rx(now);
  tick_tx(now, out);
}

void Uart::tick_host_tx(Cycle now, std::vector<PinEvent>& out) {
  if (host_active_ && --host_count_ == 0) {
    ++host_bit_;
    if (host_bit_ == kFrameBits) {
      host_active_ = false;
    } else {
      host_count_ = divisor_;
      rx_pin_.drive(now, (host_frame_ >> host_bit_) & 1U, out);
    }
  }
  if (!host_active_ && !host_queue_.empty()) {
    host_frame_ = frame_of(host_queue_.front());
    host_queue_.pop_front();
    host_active_ = true;
    host_bit_ = 0;
    host_count_ = divisor_;
    rx_pin_.drive(now, 0, out);
  }
}

void Uart::tick_rx(Cycle now) {
  if (!(ctrl_ & uart_ctrl::kRxEnable)) {
    rx_state_ = RxState::Idle;
    return;
  }
  const bool line = rx_pin_.level() != 0;
  switch (rx_state_) {
    case RxState::Idle:
      if (!line) {
        rx_state_ = RxState::Receiving;
        rx_bit_ = 0;
        rx_shift_ = 0;
        rx_next_sample_ = now + divisor_ / 2;
      }
      break;
    case RxState::Receiving:
      if (now < rx_next_sample_) break;
      if (rx_bit_ == 0) {
        if (line) {
          rx_state_ = RxState::Idle;  // glitch, not a start bit
          break;
        }
      } else if (rx_bit_ <= 8) {
        if (line) rx_shift_ = static_cast<std::uint8_t>(rx_shift_ | (1U << (rx_bit_ - 1)));
      } else {
        if (!line) {
          sticky_ |= uart_status::kFramingError;
          rx_state_ = RxState::WaitHigh;
          break;
        }
        if (rx_fifo_.size() >= kFifoDepth) {
          sticky_ |= uart_status::kRxOverflow;
        } else {
          rx_fifo_.push_back(rx_shift_);
        }
        rx_state_ = RxState::Idle;
        break;
      }
      ++rx_bit_;
      rx_next_sample_ += divisor_;
      break;
    case RxState::WaitHigh:
      if (line) rx_state_ = RxState::Idle;
      break;
  }
}

void Uart::start_tx_frame(Cycle now, std::vector<PinEvent>& out) {
  tx_frame_ = frame_of(tx_fifo_.front());
  tx_fifo_.pop_front();
  tx_active_ = true;
  tx_bit_ = 0;
  tx_count_ = divisor_;
  tx_pin_.drive(now, 0, out);
}

void Uart::tick_tx(Cycle now, std::vector<PinEvent>& out) {
  if (tx_active_ && --tx_count_ == 0) {
    ++tx_bit_;
    if (tx_bit_ == kFrameBits) {
      tx_active_ = false;
      tx_done_.push_back(static_cast<std::uint8_t>(tx_frame_ >> 1));
    } else {
      tx_count_ = divisor_;
      tx_pin_.drive(now, (tx_frame_ >> tx_bit_) & 1U, out);
    }
  }
  if (!tx_active_ && !tx_fifo_.empty() && (ctrl_ & uart_ctrl::kTxEnable)) start_tx_frame(now, out);
}

}  // namespace croc::periph
