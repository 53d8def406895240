#include "croc/trace/trace.hpp"

#include "croc/bits.hpp"

#include <charconv>

#include <fmt/format.h>

namespace croc::trace {

void Fnv1a64::update(std::span<const std::uint8_t> bytes) {
  for (const std::uint8_t b : bytes) {
    state_ ^= b;
    state_ *= kFnvPrime;
  }
}

void Fnv1a64::update(std::string_view text) {
  update(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) {
  Fnv1a64 h;
  h.update(bytes);
  return h.digest();
}

std::uint64_t fnv1a64(std::string_view text) {
  Fnv1a64 h;
  h.update(text);
  return h.digest();
}

std::optional<std::string> format_trace_line(const isa::StepReport& report) {
  if (!report.retired) return std::nullopt;
  const auto& instr = *report.retired;
  TraceRecord r;
  r.cycle = report.start_cycle;
  r.pc = report.pc;
  r.raw = instr.raw;
  r.mnemonic = std::string(isa::mnemonic(instr.op));
  if (report.reg_write) {
    r.rd = report.reg_write->rd;
    r.rd_value = report.reg_write->value;
  }
  return format_trace_record(r);
}

std::string format_trace_record(const TraceRecord& r) {
  std::string line = fmt::format("C{} PC=0x{:08x} I=0x{:08x} {}", r.cycle, r.pc, r.raw, r.mnemonic);
  if (r.rd) line += fmt::format(" x{}=0x{:08x}", *r.rd, r.rd_value);
  return line;
}

namespace {

template <typename T>
T parse_number(std::string_view text, int base, std::string_view field) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value, base);
  if (ec != std::errc() || ptr != end || text.empty())
    throw TraceParseError(fmt::format("bad {} field '{}'", field, text));
  return value;
}

std::uint32_t parse_hex8(std::string_view token, std::string_view prefix, std::string_view field) {
  if (token.substr(0, prefix.size()) != prefix || token.size() != prefix.size() + 8)
    throw TraceParseError(fmt::format("bad {} field '{}'", field, token));
  return parse_number<std::uint32_t>(token.substr(prefix.size()), 16, field);
}

}  // namespace

TraceRecord parse_trace_line(std::string_view line) {
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    const auto space = line.find(' ', pos);
    const auto end = space == std::string_view::npos ? line.size() : space;
    tokens.push_back(line.substr(pos, end - pos));
    pos = end + 1;
  }
  if (tokens.size() != 4 && tokens.size() != 5)
    throw TraceParseError(fmt::format("expected 4 or 5 fields, got {}", tokens.size()));
  TraceRecord r;
  if (tokens[0].size() < 2 || tokens[0][0] != 'C') throw TraceParseError("missing cycle field");
  r.cycle = parse_number<std::uint64_t>(tokens[0].substr(1), 10, "cycle");
  r.pc = parse_hex8(tokens[1], "PC=0x", "pc");
  r.raw = parse_hex8(tokens[2], "I=0x", "instruction");
  if (tokens[3].empty()) throw TraceParseError("empty mnemonic");
  r.mnemonic = std::string(tokens[3]);
  if (tokens.size() == 5) {
    const auto reg = tokens[4];
    const auto eq = reg.find('=');
    if (reg.size() < 2 || reg[0] != 'x' || eq == std::string_view::npos)
      throw TraceParseError(fmt::format("bad register field '{}'", reg));
    const auto rd = parse_number<unsigned>(reg.substr(1, eq - 1), 10, "register");
    if (rd > 31) throw TraceParseError(fmt::format("register x{} out of range", rd));
    r.rd = static_cast<std::uint8_t>(rd);
    r.rd_value = parse_hex8(reg.substr(eq + 1), "0x", "register value");
  }
  return r;
}

std::string format_pin_csv_line(const periph::PinEvent& e) {
  return fmt::format("{},{},{},{}", e.time_ns, e.cycle, e.pin, static_cast<unsigned>(e.level));
}

std::string pin_csv(std::span<const periph::PinEvent> events) {
  std::string out(kPinCsvHeader);
  out += '\n';
  for (const auto& e : events) {
    out += format_pin_csv_line(e);
    out += '\n';
  }
  return out;
}

void TraceWriter::on_step(const isa::StepReport& report) {
  auto line = format_trace_line(report);
  if (!line) return;
  line->push_back('\n');
  hash_.update(*line);
  if (out_) *out_ << *line;
  ++lines_;
}

PinCsvWriter::PinCsvWriter(std::ostream& out) : out_(out) { out_ << kPinCsvHeader << '\n'; }

void PinCsvWriter::on_pin(const periph::PinEvent& event) { out_ << format_pin_csv_line(event) << '\n'; }

std::vector<periph::PinEvent> PinRecorder::events_for(std::string_view pin) const {
  std::vector<periph::PinEvent> out;
  for (const auto& e : events_)
    if (e.pin == pin) out.push_back(e);
  return out;
}

double RunStats::ipc() const {
  if (cycles == 0) throw EmptyWindow("statistics window spans zero cycles");
  return static_cast<double>(instret) / static_cast<double>(cycles);
}

RunStats make_stats(std::uint64_t cycles, std::uint64_t instret) {
  RunStats s;
  s.cycles = cycles;
  s.instret = instret;
  return s;
}

void StatsCollector::on_step(const isa::StepReport& report) {
  for (Counters* c : {&total_, &window_}) {
    c->cycles += report.cycles_consumed;
    if (report.retired) {
      ++c->instret;
      ++c->per_kind[static_cast<std::size_t>(report.retired->kind)];
    }
  }
}

void StatsCollector::begin_window() { window_ = Counters{}; }

RunStats StatsCollector::to_stats(const Counters& c) {
  RunStats s = make_stats(c.cycles, c.instret);
  for (std::size_t k = 0; k < c.per_kind.size(); ++k)
    if (c.per_kind[k]) s.per_class[std::string(isa::kind_name(static_cast<isa::Kind>(k)))] = c.per_kind[k];
  return s;
}

RunStats StatsCollector::window() const { return to_stats(window_); }
RunStats StatsCollector::total() const { return to_stats(total_); }

}  // namespace croc::trace
