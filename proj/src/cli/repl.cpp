#include "croc/cli/repl.hpp"

#include "croc/bits.hpp"

#include <array>
#include <chrono>
#include <sstream>

#include <fmt/format.h>

namespace croc::cli {

using ctl::json;

namespace {

constexpr std::array<const char*, 32> kAbi = {"zero", "ra", "sp", "gp", "tp",  "t0",  "t1", "t2",
                                              "s0",   "s1", "a0", "a1", "a2",  "a3",  "a4", "a5",
                                              "a6",   "a7", "s2", "s3", "s4",  "s5",  "s6", "s7",
                                              "s8",   "s9", "s10", "s11", "t3", "t4", "t5", "t6"};

std::string error_text(const ctl::Response& r) {
  return fmt::format("error {}: {}\n", r.error->code, r.error->message);
}

}  // namespace

std::optional<std::string> parse_quoted_text(const std::string& text) {
  if (text.size() < 2 || text.front() != '"' || text.back() != '"') return std::nullopt;
  std::string out;
  for (std::size_t i = 1; i + 1 < text.size(); ++i) {
    if (text[i] != '\\') {
      out.push_back(text[i]);
      continue;
    }
    if (++i + 1 >= text.size()) return std::nullopt;
    switch (text[i]) {
      case 'n': out.push_back('\n'); break;
      case 'r': out.push_back('\r'); break;
      case 't': out.push_back('\t'); break;
      case '\\': out.push_back('\\'); break;
      case '"': out.push_back('"'); break;
      default: return std::nullopt;
    }
  }
  return out;
}

/// Collects UART output and the halted event for the REPL.
class Repl::Listener : public ctl::Subscriber {
 public:
  void deliver(const ctl::Event& event, std::optional<ctl::Channel> /*channel*/) override {
    std::lock_guard lock(mutex_);
    if (event.kind == "uart_tx") {
      uart_.push_back(static_cast<char>(event.fields.at("byte").get<int>()));
    } else if (event.kind == "halted") {
      halted_ = event;
      cv_.notify_all();
    }
  }

  std::mutex mutex_;
  std::condition_variable cv_;
  std::string uart_;
  std::optional<ctl::Event> halted_;
};

Repl::Repl(ctl::SimHost& host) : host_(host), listener_(std::make_shared<Listener>()) {
  listener_->subscribe(static_cast<unsigned>(ctl::Channel::Uart));
  host_.bus().add(listener_);
}

Repl::~Repl() { host_.bus().remove(listener_.get()); }

ctl::Response Repl::call(const std::string& method, json params) {
  return host_.call(ctl::Request{next_id_++, method, std::move(params)}).get();
}

std::string Repl::take_uart() {
  std::lock_guard lock(listener_->mutex_);
  std::string out;
  out.swap(listener_->uart_);
  return out;
}

std::string Repl::help() {
  return "commands:\n"
         "  s [n]            step n instructions (default 1)\n"
         "  c                continue until breakpoint, halt or Ctrl-C\n"
         "  b <addr>         set breakpoint\n"
         "  d <addr>         delete breakpoint\n"
         "  r                show registers\n"
         "  x/<n>w <addr>    show n memory words\n"
         "  gpio <pin> <0|1> drive a GPIO input\n"
         "  tx \"<text>\"      send text to the UART receiver\n"
         "  q                quit\n";
}

Repl::Result Repl::eval(const std::string& line) {
  std::istringstream in(line);
  std::string cmd;
  in >> cmd;
  Result result;
  std::string& out = result.output;

  const auto with_uart = [&] {
    const auto uart = take_uart();
    if (!uart.empty()) out += "uart: " + uart + (uart.back() == '\n' ? "" : "\n");
  };

  if (cmd.empty()) return result;
  if (cmd == "q" || cmd == "quit") {
    result.quit = true;
    return result;
  }
  if (cmd == "s") {
    std::uint64_t n = 1;
    std::string count;
    if (in >> count) {
      try {
        n = parse_uint(count);
      } catch (const std::invalid_argument&) {
        out = help();
        return result;
      }
    }
    const auto r = call("step", {{"n", n}, {"trace", true}});
    if (r.error) return {error_text(r), false};
    for (const auto& l : r.result->at("trace")) out += l.get<std::string>() + "\n";
    with_uart();
    out += "pc=" + r.result->at("pc").get<std::string>() + (r.result->contains("halted") ? " (halted)" : "") + "\n";
    return result;
  }
  if (cmd == "c") {
    {
      std::lock_guard lock(listener_->mutex_);
      listener_->halted_.reset();
    }
    interrupted_ = false;
    const auto r = call("run");
    if (r.error) return {error_text(r), false};
    std::unique_lock lock(listener_->mutex_);
    bool pause_sent = false;
    while (!listener_->halted_) {
      listener_->cv_.wait_for(lock, std::chrono::milliseconds(50));
      if (interrupted_ && !pause_sent) {
        lock.unlock();
        call("pause");
        pause_sent = true;
        lock.lock();
      }
    }
    const auto halted = *listener_->halted_;
    lock.unlock();
    with_uart();
    out += fmt::format("stopped: {} at pc={}\n", halted.fields.at("reason").get<std::string>(),
                       halted.fields.at("pc").get<std::string>());
    if (halted.fields.contains("diagnostic")) out += halted.fields.at("diagnostic").get<std::string>() + "\n";
    return result;
  }
  if (cmd == "b" || cmd == "d") {
    std::string addr;
    if (!(in >> addr)) return {help(), false};
    const auto r = call(cmd == "b" ? "set_breakpoint" : "clear_breakpoint", {{"addr", addr}});
    if (r.error) return {error_text(r), false};
    out = "breakpoints:";
    for (const auto& bp : r.result->at("breakpoints")) out += " " + bp.get<std::string>();
    out += "\n";
    return result;
  }
  if (cmd == "r") {
    const auto r = call("read_regs");
    if (r.error) return {error_text(r), false};
    const auto& j = *r.result;
    out = "pc       = " + j.at("pc").get<std::string>() + "\n";
    for (unsigned i = 0; i < 32; ++i) {
      out += fmt::format("x{:<2} {:<4} = {}", i, kAbi[i], j.at("x").at(i).get<std::string>());
      out += (i % 4 == 3) ? "\n" : "   ";
    }
    const auto& c = j.at("csr");
    for (const char* name : {"mstatus", "mtvec", "mepc", "mcause", "mtval", "mie", "mip", "mcycle", "minstret"})
      out += fmt::format("{}={} ", name, c.at(name).get<std::string>());
    out.back() = '\n';
    return result;
  }
  if (cmd.rfind("x/", 0) == 0 && cmd.size() > 3 && cmd.back() == 'w') {
    std::uint64_t n = 0;
    std::string addr_text;
    try {
      n = parse_uint(cmd.substr(2, cmd.size() - 3));
    } catch (const std::invalid_argument&) {
      return {help(), false};
    }
    if (!(in >> addr_text)) return {help(), false};
    const auto r = call("read_mem", {{"addr", addr_text}, {"len", n * 4}});
    if (r.error) return {error_text(r), false};
    const auto bytes = ctl::hex_to_bytes(r.result->at("bytes").get<std::string>());
    const std::uint32_t base = static_cast<std::uint32_t>(parse_uint(r.result->at("addr").get<std::string>()));
    for (std::size_t w = 0; w < n; ++w) {
      if (w % 4 == 0) out += fmt::format("{}:", hex32(base + static_cast<std::uint32_t>(4 * w)));
      std::uint32_t word = 0;
      for (unsigned b = 0; b < 4; ++b) word |= static_cast<std::uint32_t>(bytes[4 * w + b]) << (8 * b);
      out += " " + hex32(word);
      if (w % 4 == 3 || w + 1 == n) out += "\n";
    }
    return result;
  }
  if (cmd == "gpio") {
    std::string pin, level;
    if (!(in >> pin >> level)) return {help(), false};
    json params;
    try {
      params = {{"pin", parse_uint(pin)}, {"level", parse_uint(level)}};
    } catch (const std::invalid_argument&) {
      return {help(), false};
    }
    const auto r = call("gpio_input", params);
    if (r.error) return {error_text(r), false};
    out = fmt::format("gpio{} <- {}\n", r.result->at("pin").get<int>(), r.result->at("level").get<int>());
    return result;
  }
  if (cmd == "tx") {
    std::string rest;
    std::getline(in, rest);
    const auto first = rest.find_first_not_of(' ');
    rest = first == std::string::npos ? "" : rest.substr(first);
    while (!rest.empty() && (rest.back() == ' ' || rest.back() == '\r')) rest.pop_back();
    const auto text = parse_quoted_text(rest);
    if (!text) return {help(), false};
    const auto r = call("uart_rx", {{"text", *text}});
    if (r.error) return {error_text(r), false};
    out = fmt::format("queued {} bytes\n", r.result->at("queued").get<int>());
    return result;
  }
  return {help(), false};
}

}  // namespace croc::cli
