#include "croc/control/controller.hpp"

#include "croc/loader/loader.hpp"
#include "croc/trace/trace.hpp"

#include <algorithm>
#include <array>

#include <fmt/format.h>

namespace croc::ctl {
namespace {

constexpr std::array<std::string_view, 13> kMethods = {
    "load",     "reset",    "run",       "pause",      "step",       "set_breakpoint", "clear_breakpoint",
    "read_regs", "read_mem", "write_mem", "gpio_input", "uart_rx",    "subscribe"};

constexpr std::array<std::string_view, 5> kMutating = {"load", "reset", "run", "step", "write_mem"};

constexpr std::array<std::string_view, 3> kObserverSafe = {"read_regs", "read_mem", "subscribe"};

bool in(std::string_view needle, std::span<const std::string_view> hay) {
  return std::find(hay.begin(), hay.end(), needle) != hay.end();
}

std::string string_param(const json& params, std::string_view name) {
  const auto it = params.find(name);
  if (it == params.end() || !it->is_string())
    throw CtlError(code::kBadParams, fmt::format("parameter '{}' must be a string", name));
  return it->get<std::string>();
}

}  // namespace

bool Controller::is_mutating(std::string_view method) { return in(method, kMutating); }
bool Controller::is_observer_safe(std::string_view method) { return in(method, kObserverSafe); }
bool Controller::is_known(std::string_view method) { return in(method, kMethods); }

std::optional<std::uint64_t> Controller::take_run_request() {
  auto r = run_request_;
  run_request_.reset();
  return r;
}

Response Controller::dispatch(const Request& request) {
  try {
    return Response::ok(request.id, handle(request));
  } catch (const CtlError& e) {
    return Response::fail(request.id, e.code(), e.what());
  } catch (const json::exception& e) {
    return Response::fail(request.id, code::kBadParams, e.what());
  }
}

json Controller::handle(const Request& r) {
  if (!is_known(r.method) || r.method == "subscribe")
    throw CtlError(code::kBadMethod, fmt::format("unknown method '{}'", r.method));
  if (running_ && is_mutating(r.method))
    throw CtlError(code::kSimBusy, fmt::format("'{}' is not allowed while the simulation runs", r.method));
  const json& p = r.params;
  if (r.method == "load") return load(p);
  if (r.method == "reset") return reset(p);
  if (r.method == "run") return run(p);
  if (r.method == "pause") return pause();
  if (r.method == "step") return step(p);
  if (r.method == "set_breakpoint") return breakpoint(p, true);
  if (r.method == "clear_breakpoint") return breakpoint(p, false);
  if (r.method == "read_regs") return regs_json();
  if (r.method == "read_mem") return read_mem(p);
  if (r.method == "write_mem") return write_mem(p);
  if (r.method == "gpio_input") return gpio_input(p);
  return uart_rx(p);
}

json Controller::load(const json& p) {
  loader::FirmwareImage image;
  try {
    if (p.contains("elf_b64")) {
      image = loader::parse_elf(base64_decode(string_param(p, "elf_b64")));
    } else if (p.contains("bin_b64")) {
      const auto bytes = base64_decode(string_param(p, "bin_b64"));
      image = loader::raw_image(bytes, parse_u32(p.value("addr", json(hex_u32(soc_.config().sram0_base))), "addr"));
    } else {
      throw CtlError(code::kBadParams, "load needs elf_b64 or bin_b64 + addr");
    }
  } catch (const loader::ElfError& e) {
    throw CtlError(code::kBadParams, e.what());
  } catch (const std::invalid_argument& e) {
    throw CtlError(code::kBadParams, e.what());
  }
  soc_.reset(soc::ResetKind::Warm);
  try {
    loader::load(soc_, image);
  } catch (const mem::RangeError& e) {
    throw CtlError(code::kRange, e.what());
  }
  return {{"entry", hex_u32(soc_.core().state().pc)},
          {"segments", image.segments.size()},
          {"bytes", image.total_bytes()}};
}

json Controller::reset(const json& p) {
  const bool cold = p.value("cold", false);
  soc_.reset(cold ? soc::ResetKind::Cold : soc::ResetKind::Warm);
  return {{"pc", hex_u32(soc_.core().state().pc)}};
}

json Controller::run_result_json(const soc::RunResult& r) {
  return {{"reason", soc::stop_reason_name(r.reason)},
          {"pc", hex_u32(r.final_pc)},
          {"cycles", hex_u64(r.cycles)},
          {"instret", hex_u64(r.instret)}};
}

json Controller::run(const json& p) {
  const std::uint64_t budget = optional_param_u64(p, "max_cycles").value_or(kUnlimited);
  if (mode_ == RunMode::Background) {
    run_request_ = budget;
    pause_requested_ = false;
    return {{"running", true}};
  }
  const auto result = soc_.run(budget, [this] { return interrupted_ && interrupted_(); });
  return run_result_json(result);
}

json Controller::pause() {
  if (!running_) return {{"running", false}};
  pause_requested_ = true;
  return {{"running", true}, {"pause", "requested"}};
}

json Controller::step(const json& p) {
  const std::uint64_t n = optional_param_u64(p, "n").value_or(1);
  const bool want_trace = p.value("trace", false);
  const Cycle start = soc_.now();
  json lines = json::array();
  for (std::uint64_t i = 0; i < n && !soc_.halted(); ++i) {
    const auto report = soc_.step();
    if (want_trace) {
      if (auto line = trace::format_trace_line(report)) lines.push_back(*line);
    }
  }
  json result = {{"pc", hex_u32(soc_.core().state().pc)}, {"cycles", soc_.now() - start}};
  if (want_trace) result["trace"] = std::move(lines);
  if (soc_.halted()) result["halted"] = true;
  return result;
}

json Controller::breakpoint(const json& p, bool set) {
  const std::uint32_t addr = parse_u32(p.value("addr", json()), "addr");
  if (set) {
    soc_.breakpoints().insert(addr);
  } else {
    soc_.breakpoints().erase(addr);
  }
  json list = json::array();
  for (const auto bp : soc_.breakpoints()) list.push_back(hex_u32(bp));
  return {{"breakpoints", std::move(list)}};
}

json Controller::regs_json() const {
  const auto& st = soc_.core().state();
  json x = json::array();
  for (unsigned i = 0; i < 32; ++i) x.push_back(hex_u32(st.reg(i)));
  const auto& c = st.csr;
  return {{"pc", hex_u32(st.pc)},
          {"x", std::move(x)},
          {"csr",
           {{"mstatus", hex_u32(c.mstatus)},
            {"mtvec", hex_u32(c.mtvec)},
            {"mepc", hex_u32(c.mepc)},
            {"mcause", hex_u32(c.mcause)},
            {"mtval", hex_u32(c.mtval)},
            {"mie", hex_u32(c.mie)},
            {"mip", hex_u32(st.mip())},
            {"mscratch", hex_u32(c.mscratch)},
            {"mcycle", hex_u64(c.mcycle)},
            {"minstret", hex_u64(c.minstret)}}},
          {"cycle", hex_u64(soc_.now())},
          {"halted", st.halted},
          {"sleeping", soc_.core().sleeping()}};
}

json Controller::read_mem(const json& p) {
  const std::uint32_t addr = parse_u32(p.value("addr", json()), "addr");
  const std::uint64_t len = param_u64(p, "len");
  if (len > kMaxReadLen) throw CtlError(code::kRange, fmt::format("len {} exceeds {}", len, kMaxReadLen));
  try {
    const auto bytes = soc_.read_memory(addr, static_cast<std::uint32_t>(len));
    return {{"addr", hex_u32(addr)}, {"bytes", bytes_to_hex(bytes)}};
  } catch (const mem::RangeError& e) {
    throw CtlError(code::kRange, e.what());
  }
}

json Controller::write_mem(const json& p) {
  const std::uint32_t addr = parse_u32(p.value("addr", json()), "addr");
  const auto bytes = hex_to_bytes(string_param(p, "bytes"));
  try {
    soc_.write_memory(addr, bytes);
  } catch (const mem::RangeError& e) {
    throw CtlError(code::kRange, e.what());
  }
  return {{"written", bytes.size()}};
}

json Controller::gpio_input(const json& p) {
  const std::uint64_t pin = param_u64(p, "pin");
  const std::uint64_t level = param_u64(p, "level");
  if (pin >= soc_.gpio().pin_count())
    throw CtlError(code::kRange, fmt::format("pin {} out of range (0..{})", pin, soc_.gpio().pin_count() - 1));
  if (level > 1) throw CtlError(code::kBadParams, "level must be 0 or 1");
  soc_.set_gpio_input(static_cast<unsigned>(pin), static_cast<std::uint8_t>(level));
  return {{"pin", pin}, {"level", level}};
}

json Controller::uart_rx(const json& p) {
  std::vector<std::uint8_t> bytes;
  if (p.contains("text")) {
    const auto text = string_param(p, "text");
    bytes.assign(text.begin(), text.end());
  } else {
    bytes = hex_to_bytes(string_param(p, "bytes"));
  }
  soc_.uart_send(bytes);
  return {{"queued", bytes.size()}};
}

}  // namespace croc::ctl
