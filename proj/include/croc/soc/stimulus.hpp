#pragma once

#include "croc/bits.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace croc::soc {

/// Host-side pad activity at a given cycle.
struct Stimulus {
  enum class Kind { Gpio, Uart };
  Cycle at = 0;
  Kind kind = Kind::Gpio;
  unsigned pin = 0;
  std::uint8_t level = 0;
  std::vector<std::uint8_t> bytes;

  bool operator==(const Stimulus&) const = default;
};

class StimulusError : public std::runtime_error {
 public:
  StimulusError(const std::string& what, int line) : std::runtime_error(what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// One entry per line:
///   at <cycle> gpio <pin> <0|1>
///   at <cycle> uart <hex bytes>            e.g. 48656c6c6f or 48 65 6c
///   at <cycle> uart "<text>"               escapes: \n \r \t \\ \" \xNN
/// Blank lines and `#` comments are ignored. The result is stably sorted by cycle.
std::vector<Stimulus> parse_stimulus(const std::string& text);
std::vector<Stimulus> load_stimulus_file(const std::string& path);

}  // namespace croc::soc
