#pragma once

#include "croc/obi/crossbar.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace croc::soc {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Chip-level I/O pad split between the Croc domain and the user domain.
struct PadBudget {
  unsigned total = 48;
  unsigned croc_domain = 12;
  unsigned user = 36;
  unsigned gpio_count = 26;

  bool operator==(const PadBudget&) const = default;
};

using PadReport = PadBudget;

struct SocConfig {
  std::string profile = "mlem";
  std::uint64_t clk_hz = 20'000'000;
  std::uint32_t reset_pc = 0x1000'0000;
  bool enable_c_ext = true;
  bool ebreak_halts = true;

  std::uint32_t sram0_base = 0x1000'0000;
  std::uint32_t sram0_size = 64 * 1024;
  std::uint32_t sram1_base = 0x1001'0000;
  std::uint32_t sram1_size = 64 * 1024;

  std::uint32_t uart_base = 0x0300'1000;
  std::uint32_t gpio_base = 0x0300'2000;
  std::uint32_t timer_base = 0x0300'3000;
  std::optional<std::uint32_t> neopixel_base = 0x0300'5000;

  std::uint32_t user_base = 0x2000'0000;
  std::uint32_t user_size = 0x1000'0000;

  /// Defaults to round(clk_hz / 115200), at least 4.
  std::optional<std::uint32_t> uart_reset_divisor;

  PadBudget pads;
  obi::Arbitration arbitration = obi::Arbitration::FixedPriority;

  /// Throws ConfigError.
  void validate() const;
  std::uint32_t uart_divisor() const;
  std::string to_text() const;
};

/// The MLEM tapeout configuration: 48 pads, 12 Croc domain, 36 user, 26 GPIOs.
SocConfig mlem_profile();
/// Croc without the NeoPixel controller.
SocConfig minimal_profile();
/// "mlem" or "minimal"; throws ConfigError for anything else.
SocConfig profile_by_name(const std::string& name);

/// Applies `key = value` lines (with `#` comments) on top of `base`.
/// A `profile = <name>` line restarts from that profile.
SocConfig parse_config(const std::string& text, SocConfig base = mlem_profile());
SocConfig load_config_file(const std::string& path, SocConfig base = mlem_profile());

}  // namespace croc::soc
