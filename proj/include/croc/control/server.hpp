#pragma once

#include "croc/control/host.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace croc::ctl {

struct ServerOptions {
  std::string address = "127.0.0.1";
  /// 0 picks a free port; see Server::port().
  std::uint16_t port = 0;
  /// Static files served over plain HTTP on the same port.
  std::optional<std::filesystem::path> ui_dir;
  std::size_t pin_limit = 65536;
};

/// Websocket front end for a SimHost. The first session to connect is the
/// controller; later sessions are observers until it disconnects.
class Server {
 public:
  Server(SimHost& host, ServerOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds, listens and starts the network thread. Throws on bind failure.
  void start();
  void stop();
  /// Blocks until SIGINT/SIGTERM or stop().
  void wait_for_signal();
  std::uint16_t port() const;

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

/// Content type by file extension.
std::string mime_type(const std::filesystem::path& path);

}  // namespace croc::ctl
