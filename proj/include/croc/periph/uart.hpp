#pragma once

#include "croc/periph/mmio.hpp"
#include "croc/periph/pin_event.hpp"

#include <cstdint>
#include <deque>
#include <span>
#include <vector>

namespace croc::periph {

namespace uart_reg {
inline constexpr std::uint32_t kTxData = 0x00;
inline constexpr std::uint32_t kRxData = 0x04;
inline constexpr std::uint32_t kStatus = 0x08;
inline constexpr std::uint32_t kCtrl = 0x0C;
inline constexpr std::uint32_t kBaudDiv = 0x10;
}  // namespace uart_reg

namespace uart_status {
inline constexpr std::uint32_t kTxEmpty = 1U << 0;
inline constexpr std::uint32_t kTxFull = 1U << 1;
inline constexpr std::uint32_t kRxAvail = 1U << 2;
inline constexpr std::uint32_t kRxOverflow = 1U << 3;   // sticky
inline constexpr std::uint32_t kRxUnderflow = 1U << 4;  // sticky
inline constexpr std::uint32_t kFramingError = 1U << 5; // sticky
inline constexpr std::uint32_t kTxOverflow = 1U << 6;   // sticky
inline constexpr std::uint32_t kTxBusy = 1U << 7;
inline constexpr std::uint32_t kSticky = kRxOverflow | kRxUnderflow | kFramingError | kTxOverflow;
}  // namespace uart_status

namespace uart_ctrl {
inline constexpr std::uint32_t kTxEnable = 1U << 0;
inline constexpr std::uint32_t kRxEnable = 1U << 1;
}  // namespace uart_ctrl

/// 8N1 UART with 8-deep TX and RX FIFOs. One bit lasts `baud_div` cycles.
/// The RX pad is driven by a host-side transmitter fed through inject_rx().
class Uart : public MmioDevice {
 public:
  static constexpr std::size_t kFifoDepth = 8;
  static constexpr std::uint32_t kMinDivisor = 4;

  Uart(std::uint32_t base, std::uint32_t reset_divisor);

  std::optional<std::uint32_t> read(std::uint32_t offset, Cycle now) override;
  bool write(std::uint32_t offset, std::uint32_t value, Cycle now) override;

  void tick(Cycle now, std::vector<PinEvent>& out);
  void reset();

  /// Queues bytes for the host transmitter on the RX pad (at the current divisor).
  void inject_rx(std::span<const std::uint8_t> bytes);
  /// Drives the RX pad directly; only meaningful while no injected bytes are pending.
  void drive_rx(Cycle now, std::uint8_t level, std::vector<PinEvent>& out);

  /// Bytes whose stop bit has completed on the TX pad since the last call.
  std::vector<std::uint8_t> take_tx_bytes();

  std::uint32_t status() const;
  std::uint32_t baud_div() const { return divisor_; }
  std::size_t tx_fifo_size() const { return tx_fifo_.size(); }
  std::size_t rx_fifo_size() const { return rx_fifo_.size(); }
  bool rx_host_idle() const { return host_queue_.empty() && !host_active_; }

 private:
  void tick_host_tx(Cycle now, std::vector<PinEvent>& out);
  void tick_rx(Cycle now);
  void tick_tx(Cycle now, std::vector<PinEvent>& out);
  void start_tx_frame(Cycle now, std::vector<PinEvent>& out);

  std::uint32_t reset_divisor_;
  std::uint32_t divisor_;
  std::uint32_t ctrl_ = uart_ctrl::kTxEnable | uart_ctrl::kRxEnable;
  std::uint32_t sticky_ = 0;

  std::deque<std::uint8_t> tx_fifo_;
  std::deque<std::uint8_t> rx_fifo_;
  std::vector<std::uint8_t> tx_done_;

  PinDriver tx_pin_{"uart_tx", 1};
  PinDriver rx_pin_{"uart_rx", 1};

  // TX serializer
  bool tx_active_ = false;
  std::uint16_t tx_frame_ = 0;
  unsigned tx_bit_ = 0;
  std::uint32_t tx_count_ = 0;

  // RX sampler
  enum class RxState : std::uint8_t { Idle, Receiving, WaitHigh };
  RxState rx_state_ = RxState::Idle;
  Cycle rx_next_sample_ = 0;
  unsigned rx_bit_ = 0;
  std::uint8_t rx_shift_ = 0;

  // Host transmitter driving the RX pad
  std::deque<std::uint8_t> host_queue_;
  bool host_active_ = false;
  std::uint16_t host_frame_ = 0;
  unsigned host_bit_ = 0;
  std::uint32_t host_count_ = 0;
};

}  // namespace croc::periph
