#pragma once

#include "croc/isa/core.hpp"
#include "croc/mem/sram.hpp"
#include "croc/obi/crossbar.hpp"
#include "croc/periph/gpio.hpp"
#include "croc/periph/neopixel.hpp"
#include "croc/periph/pin_event.hpp"
#include "croc/periph/timer.hpp"
#include "croc/periph/uart.hpp"
#include "croc/soc/config.hpp"
#include "croc/soc/stimulus.hpp"

#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace croc::soc {

/// A device in the user domain. It sits on the crossbar like any other
/// subordinate and is ticked once per cycle before the crossbar.
class UserDevice : public obi::Subordinate {
 public:
  virtual void tick(Cycle /*now*/) {}
  virtual bool irq() const { return false; }
  virtual void reset() {}
};

class OutsideUserWindow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Receives platform events in simulation order. All callbacks run on the
/// thread that drives the Soc.
class SocObserver {
 public:
  virtual ~SocObserver() = default;
  virtual void on_step(const isa::StepReport& /*report*/) {}
  virtual void on_pin(const periph::PinEvent& /*event*/) {}
  virtual void on_uart_tx(std::uint8_t /*byte*/, Cycle /*cycle*/) {}
  /// Colors (0xRRGGBB) decoded from the pin waveform once the reset gap ends.
  virtual void on_neopixel_frame(const std::vector<std::uint32_t>& /*colors*/, Cycle /*cycle*/) {}
};

enum class StopReason { CycleLimit, Breakpoint, Halt, DoubleFault, Paused };
const char* stop_reason_name(StopReason reason);

struct RunResult {
  std::uint64_t cycles = 0;
  std::uint64_t instret = 0;
  StopReason reason = StopReason::CycleLimit;
  std::uint32_t final_pc = 0;
};

enum class ResetKind { Warm, Cold };

/// Thread-safe queue of actions applied to the Soc at instruction boundaries.
class CommandQueue {
 public:
  using Command = std::function<void()>;
  void push(Command command);
  /// Runs every queued command in order on the calling thread.
  void drain();
  bool empty() const;

 private:
  mutable std::mutex mutex_;
  std::deque<Command> queue_;
};

class Soc : private isa::Clock {
 public:
  /// Validates the configuration and builds the platform. Throws ConfigError.
  explicit Soc(SocConfig config);
  ~Soc() override;
  Soc(const Soc&) = delete;
  Soc& operator=(const Soc&) = delete;

  const SocConfig& config() const { return config_; }
  PadReport pad_report() const { return config_.pads; }

  /// Executes one instruction (or one sleep cycle / interrupt entry).
  /// Precondition: not halted.
  isa::StepReport step();

  /// Runs until `max_cycles` elapse, a breakpoint is reached (except at the
  /// starting pc), the core halts, or `pause` returns true at an instruction
  /// boundary. Queued commands are applied at every boundary.
  RunResult run(std::uint64_t max_cycles, const std::function<bool()>& pause = {});

  /// Warm keeps memory contents; cold also clears SRAM. Both restart the
  /// cycle count and re-arm the stimulus schedule.
  void reset(ResetKind kind = ResetKind::Warm);

  Cycle now() const override { return fabric_.now(); }
  bool halted() const { return core_->state().halted; }
  std::uint64_t instret() const { return core_->state().csr.minstret; }

  isa::Core& core() { return *core_; }
  const isa::Core& core() const { return *core_; }
  obi::Crossbar& fabric() { return fabric_; }
  periph::Uart& uart() { return *uart_; }
  periph::Gpio& gpio() { return *gpio_; }
  periph::Timer& timer() { return *timer_; }
  /// nullptr when the profile has no NeoPixel controller.
  periph::NeoPixel* neopixel() { return neopixel_.get(); }
  mem::SramBank& sram0() { return *sram0_; }
  mem::SramBank& sram1() { return *sram1_; }
  std::vector<mem::SramBank*> banks() { return {sram0_.get(), sram1_.get()}; }

  /// Maps a device into the user window. Throws OutsideUserWindow or obi::OverlapError.
  void attach_user_device(obi::AddressRule rule, std::unique_ptr<UserDevice> device);

  std::set<std::uint32_t>& breakpoints() { return breakpoints_; }

  /// Host side of the pads; effective from the current cycle.
  void set_gpio_input(unsigned pin, std::uint8_t level);
  void uart_send(std::span<const std::uint8_t> bytes);

  /// Scheduled pad stimulus, applied at the start of the given cycle.
  void add_stimulus(std::vector<Stimulus> stimulus);
  const std::vector<Stimulus>& stimulus() const { return stimulus_; }

  /// Host access to SRAM (throws mem::RangeError outside it).
  std::vector<std::uint8_t> read_memory(std::uint32_t addr, std::uint32_t len) const;
  void write_memory(std::uint32_t addr, std::span<const std::uint8_t> bytes);

  void add_observer(SocObserver* observer);
  void remove_observer(SocObserver* observer);

  CommandQueue& commands() { return commands_; }

 private:
  void advance() override;
  void dispatch_pins();
  mem::SramBank* bank_for(std::uint32_t addr, std::uint32_t len) const;

  SocConfig config_;
  obi::Crossbar fabric_;
  std::unique_ptr<mem::SramBank> sram0_;
  std::unique_ptr<mem::SramBank> sram1_;
  std::unique_ptr<periph::Uart> uart_;
  std::unique_ptr<periph::Gpio> gpio_;
  std::unique_ptr<periph::Timer> timer_;
  std::unique_ptr<periph::NeoPixel> neopixel_;
  std::vector<std::unique_ptr<UserDevice>> user_devices_;
  std::unique_ptr<isa::Core> core_;

  std::vector<Stimulus> stimulus_;
  std::size_t next_stimulus_ = 0;
  std::set<std::uint32_t> breakpoints_;
  std::vector<SocObserver*> observers_;
  CommandQueue commands_;

  std::vector<periph::PinEvent> pin_scratch_;
  std::vector<periph::PinEvent> neo_frame_events_;
};

}  // namespace croc::soc
