#include "croc/control/host.hpp"

#include <algorithm>

namespace croc::ctl {

std::optional<Channel> channel_from_name(std::string_view name) {
  if (name == "pins") return Channel::Pins;
  if (name == "uart") return Channel::Uart;
  if (name == "neopixel") return Channel::Neopixel;
  if (name == "stats") return Channel::Stats;
  return std::nullopt;
}

bool Outbox::push(std::string frame, bool is_pin) {
  std::lock_guard lock(mutex_);
  const bool was_empty = items_.empty();
  if (is_pin) {
    if (pins_ >= pin_limit_) {
      ++dropped_;
      if (!overflowed_) {
        overflowed_ = true;
        items_.push_back({serialize(Event{"overflow", {{"channel", "pins"}}}), false});
      }
      return was_empty;
    }
    ++pins_;
  }
  items_.push_back({std::move(frame), is_pin});
  return was_empty;
}

std::optional<std::string> Outbox::pop() {
  std::lock_guard lock(mutex_);
  if (items_.empty()) return std::nullopt;
  Item item = std::move(items_.front());
  items_.pop_front();
  if (item.is_pin && --pins_ == 0) overflowed_ = false;
  return std::move(item.frame);
}

std::size_t Outbox::size() const {
  std::lock_guard lock(mutex_);
  return items_.size();
}

std::size_t Outbox::queued_pins() const {
  std::lock_guard lock(mutex_);
  return pins_;
}

std::uint64_t Outbox::dropped_pins() const {
  std::lock_guard lock(mutex_);
  return dropped_;
}

void EventBus::add(std::shared_ptr<Subscriber> subscriber) {
  std::lock_guard lock(mutex_);
  subscribers_.push_back(std::move(subscriber));
}

void EventBus::remove(const Subscriber* subscriber) {
  std::lock_guard lock(mutex_);
  std::erase_if(subscribers_, [&](const auto& s) { return s.get() == subscriber; });
}

void EventBus::publish(const Event& event, std::optional<Channel> channel) {
  std::lock_guard lock(mutex_);
  for (const auto& s : subscribers_)
    if (!channel || s->wants(*channel)) s->deliver(event, channel);
}

bool EventBus::anyone_wants(Channel channel) const {
  std::lock_guard lock(mutex_);
  return std::any_of(subscribers_.begin(), subscribers_.end(), [&](const auto& s) { return s->wants(channel); });
}

/// Turns platform observations into protocol events.
class SimHost::Publisher : public soc::SocObserver {
 public:
  explicit Publisher(EventBus& bus) : bus_(bus) {}

  void on_step(const isa::StepReport& report) override {
    if (report.retired) ++retired_;
  }
  void on_pin(const periph::PinEvent& e) override {
    if (!bus_.anyone_wants(Channel::Pins)) return;
    bus_.publish(Event{"pin",
                       {{"cycle", hex_u64(e.cycle)},
                        {"time_ns", hex_u64(e.time_ns)},
                        {"pin", e.pin},
                        {"level", e.level}}},
                 Channel::Pins);
  }
  void on_uart_tx(std::uint8_t byte, Cycle /*cycle*/) override {
    bus_.publish(Event{"uart_tx", {{"byte", byte}}}, Channel::Uart);
  }
  void on_neopixel_frame(const std::vector<std::uint32_t>& colors, Cycle /*cycle*/) override {
    json list = json::array();
    for (const auto c : colors) list.push_back(color_hex(c));
    bus_.publish(Event{"neopixel_frame", {{"colors", std::move(list)}}}, Channel::Neopixel);
  }

  std::uint64_t retired() const { return retired_; }
  void reset_counts() { retired_ = 0; }

 private:
  EventBus& bus_;
  std::uint64_t retired_ = 0;
};

SimHost::SimHost(soc::SocConfig config, HostOptions options)
    : soc_(std::move(config)),
      controller_(soc_, Controller::RunMode::Background),
      options_(options),
      publisher_(std::make_unique<Publisher>(bus_)) {
  soc_.add_observer(publisher_.get());
}

SimHost::~SimHost() { stop(); }

void SimHost::start() {
  if (thread_.joinable()) return;
  {
    std::lock_guard lock(mutex_);
    stop_ = false;
  }
  stopping_ = false;
  thread_ = std::thread([this] { loop(); });
}

void SimHost::stop() {
  {
    std::lock_guard lock(mutex_);
    stop_ = true;
  }
  stopping_ = true;
  wake_.notify_all();
  if (thread_.joinable()) thread_.join();
}

void SimHost::enqueue(std::function<void()> command) {
  soc_.commands().push(std::move(command));
  // Taking the lock orders the push against a waiter that just saw an empty queue.
  { std::lock_guard lock(mutex_); }
  wake_.notify_all();
}

void SimHost::submit(Request request, std::function<void(const Response&)> reply) {
  enqueue([this, request = std::move(request), reply = std::move(reply)] {
    const bool halted_before = soc_.halted();
    const Response response = controller_.dispatch(request);
    if (request.method == "reset" || request.method == "load") {
      last_stats_ = 0;
      publisher_->reset_counts();
    }
    reply(response);
    // A step that ended in a halt reports it like a run would.
    if (request.method == "step" && !halted_before && soc_.halted()) {
      const auto reason = soc_.core().halt_reason() == isa::HaltReason::DoubleFault ? soc::StopReason::DoubleFault
                                                                                    : soc::StopReason::Halt;
      bus_.publish(Event{"halted", {{"reason", soc::stop_reason_name(reason)}, {"pc", hex_u32(soc_.core().state().pc)}}});
    }
  });
}

std::future<Response> SimHost::call(Request request) {
  auto promise = std::make_shared<std::promise<Response>>();
  auto future = promise->get_future();
  submit(std::move(request), [promise](const Response& r) { promise->set_value(r); });
  return future;
}

std::future<void> SimHost::post(std::function<void(soc::Soc&)> fn) {
  auto promise = std::make_shared<std::promise<void>>();
  auto future = promise->get_future();
  enqueue([this, promise, fn = std::move(fn)] {
    try {
      fn(soc_);
      promise->set_value();
    } catch (...) {
      promise->set_exception(std::current_exception());
    }
  });
  return future;
}

void SimHost::publish_stats() {
  const Cycle cycles = soc_.now();
  const std::uint64_t instret = publisher_->retired();
  const double ipc = cycles ? static_cast<double>(instret) / static_cast<double>(cycles) : 0.0;
  bus_.publish(Event{"stats", {{"cycles", hex_u64(cycles)}, {"instret", hex_u64(instret)}, {"ipc", ipc}}},
               Channel::Stats);
  last_stats_ = cycles;
}

void SimHost::finish_run(const soc::RunResult& result) {
  controller_.set_running(false);
  controller_.clear_pause();
  running_ = false;
  json fields = {{"reason", soc::stop_reason_name(result.reason)}, {"pc", hex_u32(result.final_pc)}};
  if (result.reason == soc::StopReason::DoubleFault) fields["diagnostic"] = soc_.core().diagnostic();
  bus_.publish(Event{"halted", std::move(fields)});
}

void SimHost::loop() {
  for (;;) {
    {
      std::unique_lock lock(mutex_);
      wake_.wait(lock, [this] { return stop_ || !soc_.commands().empty(); });
      if (stop_) return;
    }
    soc_.commands().drain();

    const auto budget = controller_.take_run_request();
    if (!budget) continue;
    controller_.set_running(true);
    running_ = true;
    const auto result = soc_.run(*budget, [this] {
      if (soc_.now() - last_stats_ >= options_.stats_interval) publish_stats();
      return controller_.pause_requested() || stopping_.load(std::memory_order_relaxed);
    });
    finish_run(result);
  }
}

}  // namespace croc::ctl
