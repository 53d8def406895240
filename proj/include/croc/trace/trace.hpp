#pragma once

#include "croc/isa/core.hpp"
#include "croc/periph/pin_event.hpp"
#include "croc/soc/soc.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace croc::trace {

inline constexpr std::uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

/// Incremental FNV-1a 64.
class Fnv1a64 {
 public:
  void update(std::span<const std::uint8_t> bytes);
  void update(std::string_view text);
  std::uint64_t digest() const { return state_; }

 private:
  std::uint64_t state_ = kFnvOffsetBasis;
};

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes);
std::uint64_t fnv1a64(std::string_view text);

/// `C<cycle> PC=0x%08x I=0x%08x <mnemonic>[ x<rd>=0x%08x]`, or nullopt when
/// nothing retired (trap entry, WFI sleep).
std::optional<std::string> format_trace_line(const isa::StepReport& report);

struct TraceRecord {
  Cycle cycle = 0;
  std::uint32_t pc = 0;
  std::uint32_t raw = 0;
  std::string mnemonic;
  std::optional<std::uint8_t> rd;
  std::uint32_t rd_value = 0;

  bool operator==(const TraceRecord&) const = default;
};

class TraceParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

TraceRecord parse_trace_line(std::string_view line);
std::string format_trace_record(const TraceRecord& record);

inline constexpr std::string_view kPinCsvHeader = "time_ns,cycle,pin,level";
std::string format_pin_csv_line(const periph::PinEvent& event);
/// Header plus one line per event, each newline-terminated.
std::string pin_csv(std::span<const periph::PinEvent> events);

/// Streams trace lines to `out` (may be null) and hashes the exact bytes.
class TraceWriter : public soc::SocObserver {
 public:
  explicit TraceWriter(std::ostream* out = nullptr) : out_(out) {}
  void on_step(const isa::StepReport& report) override;
  std::uint64_t digest() const { return hash_.digest(); }
  std::uint64_t lines() const { return lines_; }

 private:
  std::ostream* out_;
  Fnv1a64 hash_;
  std::uint64_t lines_ = 0;
};

/// Streams pin events as CSV; the header is written on construction.
class PinCsvWriter : public soc::SocObserver {
 public:
  explicit PinCsvWriter(std::ostream& out);
  void on_pin(const periph::PinEvent& event) override;

 private:
  std::ostream& out_;
};

/// Keeps every pin event in memory.
class PinRecorder : public soc::SocObserver {
 public:
  void on_pin(const periph::PinEvent& event) override { events_.push_back(event); }
  const std::vector<periph::PinEvent>& events() const { return events_; }
  std::vector<periph::PinEvent> events_for(std::string_view pin) const;
  void clear() { events_.clear(); }

 private:
  std::vector<periph::PinEvent> events_;
};

class EmptyWindow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunStats {
  std::uint64_t cycles = 0;
  std::uint64_t instret = 0;
  /// Retirements per instruction class name ("alu", "load", ...).
  std::map<std::string, std::uint64_t> per_class;

  /// instret / cycles; throws EmptyWindow when cycles == 0.
  double ipc() const;
};

RunStats make_stats(std::uint64_t cycles, std::uint64_t instret);

/// Accumulates retirement counts. A window starts at begin_window() and
/// ends at the current step.
class StatsCollector : public soc::SocObserver {
 public:
  void on_step(const isa::StepReport& report) override;
  void begin_window();
  RunStats window() const;
  RunStats total() const;

 private:
  struct Counters {
    std::uint64_t cycles = 0;
    std::uint64_t instret = 0;
    std::array<std::uint64_t, 11> per_kind{};
  };
  static RunStats to_stats(const Counters& c);

  Counters total_;
  Counters window_;
};

}  // namespace croc::trace
