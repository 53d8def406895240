#include "croc/control/server.hpp"

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/post.hpp>
#include <boost/asio/signal_set.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include <fstream>
#include <future>
#include <iterator>
#include <mutex>
#include <thread>
#include <vector>

#include <fmt/format.h>

namespace croc::ctl {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

std::string mime_type(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".html" || ext == ".htm") return "text/html; charset=utf-8";
  if (ext == ".js" || ext == ".mjs") return "text/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json" || ext == ".map") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  if (ext == ".ico") return "image/x-icon";
  if (ext == ".wasm") return "application/wasm";
  if (ext == ".txt") return "text/plain; charset=utf-8";
  return "application/octet-stream";
}

class WsSession;

struct Server::Impl {
  Impl(SimHost& h, ServerOptions o) : host(h), options(std::move(o)), acceptor(net::make_strand(ioc)) {}

  void do_accept();
  bool claim_controller(WsSession* session);
  void release(WsSession* session);

  SimHost& host;
  ServerOptions options;
  net::io_context ioc;
  tcp::acceptor acceptor;
  std::thread thread;
  std::uint16_t port = 0;

  std::mutex mutex;
  WsSession* controller = nullptr;
  std::vector<std::weak_ptr<WsSession>> sessions;
};

class WsSession : public Subscriber, public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket&& socket, Server::Impl& server)
      : ws_(std::move(socket)), server_(server), outbox_(server.options.pin_limit) {}

  void run(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, beast::bind_front_handler(&WsSession::on_accept, shared_from_this()));
  }

  void deliver(const Event& event, std::optional<Channel> channel) override {
    enqueue(serialize(event), channel == Channel::Pins);
  }

  std::future<void> close() {
    auto done = std::make_shared<std::promise<void>>();
    auto future = done->get_future();
    net::post(ws_.get_executor(), [self = shared_from_this(), done] {
      beast::error_code ec;
      beast::get_lowest_layer(self->ws_).socket().close(ec);
      done->set_value();
    });
    return future;
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    controller_ = server_.claim_controller(this);
    server_.host.bus().add(shared_from_this());
    json methods = json::array({"load", "reset", "run", "pause", "step", "set_breakpoint", "clear_breakpoint",
                                "read_regs", "read_mem", "write_mem", "gpio_input", "uart_rx", "subscribe"});
    enqueue(serialize(Event{"hello",
                            {{"version", kProtocolVersion},
                             {"role", controller_ ? "controller" : "observer"},
                             {"methods", std::move(methods)},
                             {"channels", json::array({"pins", "uart", "neopixel", "stats"})}}}),
            false);
    do_read();
  }

  void do_read() {
    ws_.async_read(buffer_, beast::bind_front_handler(&WsSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      shutdown();
      return;
    }
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    handle(text);
    do_read();
  }

  void handle(const std::string& text) {
    Message message;
    try {
      message = parse_message(text);
    } catch (const CtlError& e) {
      const json raw = json::parse(text, nullptr, false);
      const std::int64_t id =
          raw.is_object() && raw.contains("id") && raw["id"].is_number_integer() ? raw["id"].get<std::int64_t>() : 0;
      enqueue(serialize(Response::fail(id, e.code(), e.what())), false);
      return;
    }
    auto* request = std::get_if<Request>(&message);
    if (!request) {
      enqueue(serialize(Response::fail(0, code::kBadParams, "only requests are accepted")), false);
      return;
    }
    if (request->method == "subscribe") {
      enqueue(serialize(subscribe(*request)), false);
      return;
    }
    if (!controller_ && !Controller::is_observer_safe(request->method)) {
      const int c = Controller::is_known(request->method) ? code::kNotController : code::kBadMethod;
      enqueue(serialize(Response::fail(request->id, c,
                                       c == code::kNotController ? "observer sessions cannot call " + request->method
                                                                 : "unknown method '" + request->method + "'")),
              false);
      return;
    }
    std::weak_ptr<WsSession> weak = shared_from_this();
    server_.host.submit(std::move(*request), [weak](const Response& r) {
      if (auto self = weak.lock()) self->enqueue(serialize(r), false);
    });
  }

  Response subscribe(const Request& r) {
    const auto it = r.params.find("channels");
    if (it == r.params.end()) return Response::fail(r.id, code::kBadParams, "missing parameter 'channels'");
    json names = it->is_string() ? json::array({*it}) : *it;
    if (!names.is_array()) return Response::fail(r.id, code::kBadParams, "channels must be a list");
    unsigned mask = 0;
    for (const auto& n : names) {
      const auto ch = n.is_string() ? channel_from_name(n.get<std::string>()) : std::nullopt;
      if (!ch) return Response::fail(r.id, code::kBadParams, "unknown channel " + n.dump());
      mask |= static_cast<unsigned>(*ch);
    }
    set_channels(mask);
    return Response::ok(r.id, {{"channels", names}});
  }

  void enqueue(std::string frame, bool is_pin) {
    if (outbox_.push(std::move(frame), is_pin))
      net::post(ws_.get_executor(), [self = shared_from_this()] { self->write_next(); });
  }

  void write_next() {
    if (writing_ || closed_) return;
    auto next = outbox_.pop();
    if (!next) return;
    writing_ = true;
    current_ = std::move(*next);
    ws_.text(true);
    ws_.async_write(net::buffer(current_), beast::bind_front_handler(&WsSession::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    writing_ = false;
    if (ec) {
      shutdown();
      return;
    }
    write_next();
  }

  void shutdown() {
    if (closed_) return;
    closed_ = true;
    server_.host.bus().remove(this);
    server_.release(this);
  }

  websocket::stream<beast::tcp_stream> ws_;
  Server::Impl& server_;
  beast::flat_buffer buffer_;
  Outbox outbox_;
  std::string current_;
  bool writing_ = false;
  bool closed_ = false;
  bool controller_ = false;
};

namespace {

http::response<http::string_body> plain(http::status status, const http::request<http::string_body>& req,
                                        std::string body) {
  http::response<http::string_body> res{status, req.version()};
  res.set(http::field::content_type, "text/plain; charset=utf-8");
  res.keep_alive(false);
  res.body() = std::move(body);
  res.prepare_payload();
  return res;
}

http::response<http::string_body> serve_static(const ServerOptions& options,
                                               const http::request<http::string_body>& req) {
  if (req.method() != http::verb::get && req.method() != http::verb::head)
    return plain(http::status::method_not_allowed, req, "only GET is supported\n");
  if (!options.ui_dir) return plain(http::status::not_found, req, "no UI directory configured (serve --ui-dir)\n");

  std::string target(req.target());
  if (const auto q = target.find_first_of("?#"); q != std::string::npos) target.erase(q);
  if (target.empty() || target.front() != '/') return plain(http::status::bad_request, req, "bad target\n");
  if (target.back() == '/') target += "index.html";
  const std::filesystem::path rel = std::filesystem::path(target.substr(1)).lexically_normal();
  for (const auto& part : rel)
    if (part == "..") return plain(http::status::forbidden, req, "forbidden\n");
  const auto path = *options.ui_dir / rel;

  std::ifstream in(path, std::ios::binary);
  if (!in || std::filesystem::is_directory(path)) return plain(http::status::not_found, req, "not found\n");
  std::string body{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};

  http::response<http::string_body> res{http::status::ok, req.version()};
  res.set(http::field::content_type, mime_type(path));
  res.keep_alive(false);
  if (req.method() == http::verb::head) {
    res.content_length(body.size());
  } else {
    res.body() = std::move(body);
    res.prepare_payload();
  }
  return res;
}

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& socket, Server::Impl& server) : stream_(std::move(socket)), server_(server) {}

  void run() {
    net::dispatch(stream_.get_executor(), [self = shared_from_this()] { self->do_read(); });
  }

 private:
  void do_read() {
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_, beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) return;
    if (websocket::is_upgrade(req_)) {
      stream_.expires_never();
      auto session = std::make_shared<WsSession>(stream_.release_socket(), server_);
      {
        std::lock_guard lock(server_.mutex);
        server_.sessions.push_back(session);
      }
      session->run(std::move(req_));
      return;
    }
    res_ = serve_static(server_.options, req_);
    http::async_write(stream_, res_, beast::bind_front_handler(&HttpSession::on_write, shared_from_this()));
  }

  void on_write(beast::error_code, std::size_t) {
    beast::error_code ec;
    stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
  }

  beast::tcp_stream stream_;
  Server::Impl& server_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
  http::response<http::string_body> res_;
};

}  // namespace

void Server::Impl::do_accept() {
  acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
    if (ec) return;  // acceptor closed
    std::make_shared<HttpSession>(std::move(socket), *this)->run();
    do_accept();
  });
}

bool Server::Impl::claim_controller(WsSession* session) {
  std::lock_guard lock(mutex);
  if (controller) return false;
  controller = session;
  return true;
}

void Server::Impl::release(WsSession* session) {
  std::lock_guard lock(mutex);
  if (controller == session) controller = nullptr;
}

Server::Server(SimHost& host, ServerOptions options) : impl_(std::make_unique<Impl>(host, std::move(options))) {}

Server::~Server() { stop(); }

void Server::start() {
  const tcp::endpoint endpoint{net::ip::make_address(impl_->options.address), impl_->options.port};
  impl_->acceptor.open(endpoint.protocol());
  impl_->acceptor.set_option(net::socket_base::reuse_address(true));
  impl_->acceptor.bind(endpoint);
  impl_->acceptor.listen(net::socket_base::max_listen_connections);
  impl_->port = impl_->acceptor.local_endpoint().port();
  impl_->do_accept();
  impl_->thread = std::thread([this] { impl_->ioc.run(); });
}

void Server::stop() {
  if (!impl_->thread.joinable()) return;
  net::post(impl_->acceptor.get_executor(), [this] {
    beast::error_code ec;
    impl_->acceptor.close(ec);
  });
  std::vector<std::shared_ptr<WsSession>> live;
  {
    std::lock_guard lock(impl_->mutex);
    for (auto& weak : impl_->sessions)
      if (auto s = weak.lock()) live.push_back(std::move(s));
    impl_->sessions.clear();
  }
  std::vector<std::future<void>> closed;
  for (auto& s : live) {
    impl_->host.bus().remove(s.get());
    closed.push_back(s->close());
  }
  live.clear();
  // Peers must see the sockets go away before the io_context stops.
  for (auto& f : closed) f.wait_for(std::chrono::seconds(2));
  impl_->ioc.stop();
  impl_->thread.join();
}

void Server::wait_for_signal() {
  net::io_context signals_ioc;
  net::signal_set signals(signals_ioc, SIGINT, SIGTERM);
  signals.async_wait([&](beast::error_code, int) {});
  signals_ioc.run();
}

std::uint16_t Server::port() const { return impl_->port; }

}  // namespace croc::ctl
