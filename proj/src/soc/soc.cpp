#include "croc/soc/soc.hpp"

#include "croc/periph/oracles.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace croc::soc {

const char* stop_reason_name(StopReason reason) {
  switch (reason) {
    case StopReason::CycleLimit: return "cycle_limit";
    case StopReason::Breakpoint: return "breakpoint";
    case StopReason::Halt: return "halt";
    case StopReason::DoubleFault: return "double_fault";
    case StopReason::Paused: return "paused";
  }
  return "?";
}

void CommandQueue::push(Command command) {
  std::lock_guard lock(mutex_);
  queue_.push_back(std::move(command));
}

void CommandQueue::drain() {
  std::deque<Command> batch;
  {
    std::lock_guard lock(mutex_);
    if (queue_.empty()) return;
    batch.swap(queue_);
  }
  for (auto& command : batch) command();
}

bool CommandQueue::empty() const {
  std::lock_guard lock(mutex_);
  return queue_.empty();
}

namespace {

constexpr std::uint32_t kPeripheralWindow = 0x1000;

}  // namespace

Soc::Soc(SocConfig config) : config_(std::move(config)), fabric_(config_.arbitration) {
  config_.validate();
  sram0_ = std::make_unique<mem::SramBank>("sram0", config_.sram0_base, config_.sram0_size);
  sram1_ = std::make_unique<mem::SramBank>("sram1", config_.sram1_base, config_.sram1_size);
  uart_ = std::make_unique<periph::Uart>(config_.uart_base, config_.uart_divisor());
  gpio_ = std::make_unique<periph::Gpio>(config_.gpio_base, config_.pads.gpio_count);
  timer_ = std::make_unique<periph::Timer>(config_.timer_base);
  if (config_.neopixel_base)
    neopixel_ = std::make_unique<periph::NeoPixel>(*config_.neopixel_base, periph::NeoTiming::for_clock(config_.clk_hz));

  try {
    fabric_.attach({config_.sram0_base, config_.sram0_size, 0, "sram0"}, *sram0_);
    fabric_.attach({config_.sram1_base, config_.sram1_size, 0, "sram1"}, *sram1_);
    fabric_.attach({config_.uart_base, kPeripheralWindow, 0, "uart"}, *uart_);
    fabric_.attach({config_.gpio_base, kPeripheralWindow, 0, "gpio"}, *gpio_);
    fabric_.attach({config_.timer_base, kPeripheralWindow, 0, "timer"}, *timer_);
    if (neopixel_) fabric_.attach({*config_.neopixel_base, kPeripheralWindow, 0, "neopixel"}, *neopixel_);
    // The user window must not shadow any Croc-domain region.
    const obi::AddressRule window{config_.user_base, config_.user_size, 0, "user"};
    for (const auto& rule : fabric_.rules())
      if (obi::overlaps(rule, window))
        throw ConfigError(fmt::format("user window overlaps {}", rule.name));
  } catch (const obi::OverlapError& e) {
    throw ConfigError(std::string("memory map: ") + e.what());
  }

  isa::CoreConfig core_config;
  core_config.reset_pc = config_.reset_pc;
  core_config.c_ext = config_.enable_c_ext;
  core_config.ebreak_halts = config_.ebreak_halts;
  core_ = std::make_unique<isa::Core>(core_config, fabric_, static_cast<isa::Clock&>(*this));
}

Soc::~Soc() = default;

void Soc::attach_user_device(obi::AddressRule rule, std::unique_ptr<UserDevice> device) {
  const std::uint64_t window_end = static_cast<std::uint64_t>(config_.user_base) + config_.user_size;
  if (rule.size == 0 || rule.base < config_.user_base || rule.end() > window_end)
    throw OutsideUserWindow(fmt::format("{} [{}, +{}) is outside the user window [{}, +{})", rule.name,
                                        hex32(rule.base), hex(rule.size), hex32(config_.user_base),
                                        hex(config_.user_size)));
  fabric_.attach(rule, *device);
  user_devices_.push_back(std::move(device));
}

void Soc::advance() {
  const Cycle t = fabric_.now();
  while (next_stimulus_ < stimulus_.size() && stimulus_[next_stimulus_].at <= t) {
    const Stimulus& s = stimulus_[next_stimulus_++];
    if (s.kind == Stimulus::Kind::Gpio) {
      gpio_->set_input(s.pin, s.level, t);
    } else {
      uart_->inject_rx(s.bytes);
    }
  }

  timer_->tick();
  uart_->tick(t, pin_scratch_);
  if (neopixel_) neopixel_->tick(t, pin_scratch_);
  for (auto& device : user_devices_) device->tick(t);
  fabric_.tick();

  // Lines are sampled after the bus so a store that lowers one is seen at this boundary.
  bool external = false;
  for (auto& device : user_devices_) external = external || device->irq();
  auto& state = core_->state();
  state.timer_irq = timer_->level();
  state.external_irq = external;
  state.csr.time = timer_->mtime();

  gpio_->drain_events(pin_scratch_);

  if (!observers_.empty()) {
    for (const std::uint8_t byte : uart_->take_tx_bytes())
      for (auto* o : observers_) o->on_uart_tx(byte, t);
  } else {
    uart_->take_tx_bytes();
  }

  if (neopixel_) {
    for (const auto& e : pin_scratch_)
      if (e.pin == "neopixel") neo_frame_events_.push_back(e);
    auto frames = neopixel_->take_completed_frames();
    for (auto& snapshot : frames) {
      std::vector<std::uint32_t> colors;
      try {
        auto decoded = periph::neopixel_decode_oracle(neo_frame_events_, neopixel_->timing());
        colors = decoded.empty() ? std::vector<std::uint32_t>{} : std::move(decoded.front());
      } catch (const periph::NeoDecodeError&) {
        // Timing registers set outside what the decoder can classify.
        colors = std::move(snapshot);
      }
      neo_frame_events_.clear();
      for (auto* o : observers_) o->on_neopixel_frame(colors, t);
    }
  }

  dispatch_pins();
}

void Soc::dispatch_pins() {
  if (pin_scratch_.empty()) return;
  for (auto& e : pin_scratch_) {
    e.time_ns = periph::cycles_to_ns(e.cycle, config_.clk_hz);
    for (auto* o : observers_) o->on_pin(e);
  }
  pin_scratch_.clear();
}

isa::StepReport Soc::step() {
  auto report = core_->step();
  for (auto* o : observers_) o->on_step(report);
  return report;
}

RunResult Soc::run(std::uint64_t max_cycles, const std::function<bool()>& pause) {
  RunResult result;
  const Cycle start = now();
  const std::uint64_t instret_start = instret();
  bool first = true;
  for (;;) {
    commands_.drain();
    if (halted()) {
      result.reason =
          core_->halt_reason() == isa::HaltReason::DoubleFault ? StopReason::DoubleFault : StopReason::Halt;
      break;
    }
    if (now() - start >= max_cycles) {
      result.reason = StopReason::CycleLimit;
      break;
    }
    if (pause && pause()) {
      result.reason = StopReason::Paused;
      break;
    }
    if (!first && !breakpoints_.empty() && breakpoints_.contains(core_->state().pc)) {
      result.reason = StopReason::Breakpoint;
      break;
    }
    first = false;
    step();
  }
  result.cycles = now() - start;
  result.instret = instret() - instret_start;
  result.final_pc = core_->state().pc;
  return result;
}

void Soc::reset(ResetKind kind) {
  fabric_.reset();
  if (kind == ResetKind::Cold) {
    sram0_->clear();
    sram1_->clear();
  }
  uart_->reset();
  gpio_->reset();
  timer_->reset();
  if (neopixel_) neopixel_->reset();
  for (auto& device : user_devices_) device->reset();
  core_->reset();
  next_stimulus_ = 0;
  pin_scratch_.clear();
  neo_frame_events_.clear();
}

void Soc::set_gpio_input(unsigned pin, std::uint8_t level) { gpio_->set_input(pin, level, now()); }

void Soc::uart_send(std::span<const std::uint8_t> bytes) { uart_->inject_rx(bytes); }

void Soc::add_stimulus(std::vector<Stimulus> stimulus) {
  for (const auto& s : stimulus)
    if (s.kind == Stimulus::Kind::Gpio && s.pin >= gpio_->pin_count())
      throw std::out_of_range(fmt::format("stimulus drives gpio{} but only {} pins exist", s.pin, gpio_->pin_count()));
  stimulus_.insert(stimulus_.end(), std::make_move_iterator(stimulus.begin()), std::make_move_iterator(stimulus.end()));
  std::stable_sort(stimulus_.begin() + static_cast<std::ptrdiff_t>(next_stimulus_), stimulus_.end(),
                   [](const Stimulus& a, const Stimulus& b) { return a.at < b.at; });
}

mem::SramBank* Soc::bank_for(std::uint32_t addr, std::uint32_t len) const {
  for (auto* bank : {sram0_.get(), sram1_.get()})
    if (bank->contains(addr, len)) return bank;
  return nullptr;
}

std::vector<std::uint8_t> Soc::read_memory(std::uint32_t addr, std::uint32_t len) const {
  std::vector<std::uint8_t> out;
  out.reserve(len);
  for (std::uint32_t i = 0; i < len; ++i) {
    const std::uint32_t a = addr + i;
    const auto* bank = bank_for(a, 1);
    if (!bank) throw mem::RangeError(fmt::format("address {} is not in SRAM", hex32(a)), a);
    out.push_back(bank->peek(a));
  }
  return out;
}

void Soc::write_memory(std::uint32_t addr, std::span<const std::uint8_t> bytes) {
  for (std::uint32_t i = 0; i < bytes.size(); ++i) {
    const std::uint32_t a = addr + i;
    if (!bank_for(a, 1)) throw mem::RangeError(fmt::format("address {} is not in SRAM", hex32(a)), a);
  }
  for (std::uint32_t i = 0; i < bytes.size(); ++i) bank_for(addr + i, 1)->poke(addr + i, bytes[i]);
  core_->flush_fetch_buffer();
}

void Soc::add_observer(SocObserver* observer) {
  if (std::find(observers_.begin(), observers_.end(), observer) == observers_.end()) observers_.push_back(observer);
}

void Soc::remove_observer(SocObserver* observer) {
  observers_.erase(std::remove(observers_.begin(), observers_.end(), observer), observers_.end());
}

}  // namespace croc::soc
