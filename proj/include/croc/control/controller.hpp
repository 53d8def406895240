#pragma once

#include "croc/control/protocol.hpp"
#include "croc/soc/soc.hpp"

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>

namespace croc::ctl {

inline constexpr std::uint32_t kMaxReadLen = 4096;
inline constexpr std::uint64_t kUnlimited = ~0ULL;

/// Method handlers shared by the websocket service and the REPL. Runs on the
/// simulation thread only.
class Controller {
 public:
  enum class RunMode {
    /// `run` executes to completion inside handle().
    Blocking,
    /// `run` only records the request; the owner drives the simulation.
    Background,
  };

  Controller(soc::Soc& soc, RunMode mode) : soc_(soc), mode_(mode) {}

  /// Result object for a request. Throws CtlError.
  json handle(const Request& request);
  /// Never throws: errors become error responses.
  Response dispatch(const Request& request);

  /// Methods that change simulator state; refused with kSimBusy while running.
  static bool is_mutating(std::string_view method);
  /// Methods an observer session may call.
  static bool is_observer_safe(std::string_view method);
  static bool is_known(std::string_view method);

  bool running() const { return running_; }
  void set_running(bool running) { running_ = running; }
  /// Background mode: the pending run budget, cleared by the call.
  std::optional<std::uint64_t> take_run_request();
  bool pause_requested() const { return pause_requested_; }
  void clear_pause() { pause_requested_ = false; }

  /// Blocking mode: polled at every instruction boundary during `run`.
  void set_interrupt(std::function<bool()> interrupted) { interrupted_ = std::move(interrupted); }

  static json run_result_json(const soc::RunResult& result);
  json regs_json() const;

 private:
  json load(const json& params);
  json reset(const json& params);
  json run(const json& params);
  json pause();
  json step(const json& params);
  json breakpoint(const json& params, bool set);
  json read_mem(const json& params);
  json write_mem(const json& params);
  json gpio_input(const json& params);
  json uart_rx(const json& params);

  soc::Soc& soc_;
  RunMode mode_;
  bool running_ = false;
  bool pause_requested_ = false;
  std::optional<std::uint64_t> run_request_;
  std::function<bool()> interrupted_;
};

}  // namespace croc::ctl
