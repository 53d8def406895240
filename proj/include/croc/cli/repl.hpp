#pragma once

#include "croc/control/host.hpp"

#include <atomic>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

namespace croc::cli {

/// Debug REPL. Every command becomes one control request sent through the
/// SimHost, so it behaves exactly like a remote client.
class Repl {
 public:
  explicit Repl(ctl::SimHost& host);
  ~Repl();

  struct Result {
    std::string output;
    bool quit = false;
  };

  Result eval(const std::string& line);
  /// Asks a running `c` to pause. Safe to call from another thread.
  void interrupt() { interrupted_ = true; }

  static std::string help();

 private:
  class Listener;

  ctl::Response call(const std::string& method, ctl::json params = ctl::json::object());
  std::string take_uart();

  ctl::SimHost& host_;
  std::shared_ptr<Listener> listener_;
  std::atomic<bool> interrupted_{false};
  std::int64_t next_id_ = 1;
};

/// Parses the `tx` argument: a double-quoted string with \n \r \t \\ \" escapes.
std::optional<std::string> parse_quoted_text(const std::string& text);

}  // namespace croc::cli
