#pragma once

#include "croc/control/controller.hpp"
#include "croc/control/protocol.hpp"
#include "croc/soc/soc.hpp"

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <future>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace croc::ctl {

enum class Channel : unsigned { Pins = 1, Uart = 2, Neopixel = 4, Stats = 8 };
/// "pins", "uart", "neopixel", "stats"; nullopt otherwise.
std::optional<Channel> channel_from_name(std::string_view name);

/// Outgoing frames for one session. Pin events beyond `pin_limit` queued
/// frames are dropped and replaced by a single overflow event; nothing else
/// is ever dropped.
class Outbox {
 public:
  explicit Outbox(std::size_t pin_limit = 65536) : pin_limit_(pin_limit) {}

  /// Returns true when the outbox was empty, i.e. a writer must be woken.
  bool push(std::string frame, bool is_pin = false);
  std::optional<std::string> pop();
  std::size_t size() const;
  std::size_t queued_pins() const;
  std::uint64_t dropped_pins() const;

 private:
  struct Item {
    std::string frame;
    bool is_pin;
  };
  mutable std::mutex mutex_;
  std::deque<Item> items_;
  std::size_t pin_limit_;
  std::size_t pins_ = 0;
  bool overflowed_ = false;
  std::uint64_t dropped_ = 0;
};

/// Receives events on the simulation thread; must not block.
class Subscriber {
 public:
  virtual ~Subscriber() = default;
  virtual void deliver(const Event& event, std::optional<Channel> channel) = 0;

  void subscribe(unsigned mask) { channels_ |= mask; }
  void set_channels(unsigned mask) { channels_ = mask; }
  bool wants(Channel channel) const { return (channels_.load() & static_cast<unsigned>(channel)) != 0; }

 private:
  std::atomic<unsigned> channels_{0};
};

class EventBus {
 public:
  void add(std::shared_ptr<Subscriber> subscriber);
  void remove(const Subscriber* subscriber);
  /// Channel events go to subscribers of that channel; nullopt goes to everyone.
  void publish(const Event& event, std::optional<Channel> channel = std::nullopt);
  bool anyone_wants(Channel channel) const;

 private:
  mutable std::mutex mutex_;
  std::vector<std::shared_ptr<Subscriber>> subscribers_;
};

struct HostOptions {
  std::uint64_t stats_interval = 100'000;
};

/// Owns the Soc and its simulation thread. Requests are queued into the
/// platform command queue and applied at instruction boundaries.
class SimHost {
 public:
  explicit SimHost(soc::SocConfig config, HostOptions options = {});
  ~SimHost();
  SimHost(const SimHost&) = delete;
  SimHost& operator=(const SimHost&) = delete;

  void start();
  void stop();

  /// Thread-safe. `reply` runs on the simulation thread.
  void submit(Request request, std::function<void(const Response&)> reply);
  /// Thread-safe convenience wrapper around submit().
  std::future<Response> call(Request request);
  /// Runs `fn` on the simulation thread at the next boundary.
  std::future<void> post(std::function<void(soc::Soc&)> fn);

  EventBus& bus() { return bus_; }
  bool running() const { return running_.load(); }

 private:
  class Publisher;

  void enqueue(std::function<void()> command);
  void loop();
  void finish_run(const soc::RunResult& result);
  void publish_stats();

  soc::Soc soc_;
  Controller controller_;
  HostOptions options_;
  EventBus bus_;
  std::unique_ptr<Publisher> publisher_;

  std::mutex mutex_;
  std::condition_variable wake_;
  bool stop_ = false;
  std::atomic<bool> stopping_{false};
  std::atomic<bool> running_{false};
  std::thread thread_;
  Cycle last_stats_ = 0;
};

}  // namespace croc::ctl
