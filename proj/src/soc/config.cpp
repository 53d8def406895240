#include "croc/soc/config.hpp"

#include "croc/bits.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace croc::soc {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw ConfigError(fmt::format("{}: expected a boolean, got '{}'", key, v));
}

std::uint64_t parse_number(const std::string& key, const std::string& v) {
  try {
    return parse_uint(v);
  } catch (const std::invalid_argument&) {
    throw ConfigError(fmt::format("{}: expected a number, got '{}'", key, v));
  }
}

std::uint32_t parse_u32(const std::string& key, const std::string& v) {
  const std::uint64_t n = parse_number(key, v);
  if (n > 0xFFFF'FFFFULL) throw ConfigError(fmt::format("{}: value {} exceeds 32 bits", key, v));
  return static_cast<std::uint32_t>(n);
}

}  // namespace

SocConfig mlem_profile() { return SocConfig{}; }

SocConfig minimal_profile() {
  SocConfig c;
  c.profile = "minimal";
  c.neopixel_base.reset();
  return c;
}

SocConfig profile_by_name(const std::string& name) {
  if (name == "mlem") return mlem_profile();
  if (name == "minimal") return minimal_profile();
  throw ConfigError(fmt::format("unknown profile '{}' (expected mlem or minimal)", name));
}

std::uint32_t SocConfig::uart_divisor() const {
  if (uart_reset_divisor) return std::max<std::uint32_t>(*uart_reset_divisor, 4);
  const auto div = static_cast<std::uint32_t>(std::llround(static_cast<double>(clk_hz) / 115200.0));
  return std::max<std::uint32_t>(div, 4);
}

void SocConfig::validate() const {
  if (clk_hz == 0) throw ConfigError("clk_hz must be positive");
  if (pads.croc_domain + pads.user != pads.total)
    throw ConfigError(fmt::format("pad arithmetic: croc_domain {} + user {} != total {}", pads.croc_domain, pads.user,
                                  pads.total));
  if (pads.gpio_count == 0 || pads.gpio_count > 32) throw ConfigError("gpio_count must be 1..32");
  const unsigned io_pads = pads.gpio_count + 2 + (neopixel_base ? 1U : 0U);
  if (io_pads > pads.user)
    throw ConfigError(fmt::format("user pads ({}) cannot carry {} GPIOs, UART{}", pads.user, pads.gpio_count,
                                  neopixel_base ? " and NeoPixel" : ""));
  if (profile == "mlem" && pads != PadBudget{})
    throw ConfigError(fmt::format("mlem profile requires pads total=48 croc=12 user=36 gpio=26, got {}/{}/{}/{}",
                                  pads.total, pads.croc_domain, pads.user, pads.gpio_count));
  if (profile == "mlem" && !neopixel_base) throw ConfigError("mlem profile requires the NeoPixel controller");
  for (const auto size : {sram0_size, sram1_size})
    if (size == 0 || size % 4 != 0) throw ConfigError("SRAM sizes must be non-zero multiples of 4");
  if (reset_pc & (enable_c_ext ? 1U : 3U)) throw ConfigError("reset_pc is misaligned");
  if (user_size == 0) throw ConfigError("user window must be non-empty");
}

std::string SocConfig::to_text() const {
  std::ostringstream out;
  out << "profile = " << profile << '\n'
      << "clk_hz = " << clk_hz << '\n'
      << "reset_pc = " << hex32(reset_pc) << '\n'
      << "enable_c_ext = " << (enable_c_ext ? "true" : "false") << '\n'
      << "ebreak_halts = " << (ebreak_halts ? "true" : "false") << '\n'
      << "sram0_base = " << hex32(sram0_base) << '\n'
      << "sram0_size = " << hex(sram0_size) << '\n'
      << "sram1_base = " << hex32(sram1_base) << '\n'
      << "sram1_size = " << hex(sram1_size) << '\n'
      << "uart_base = " << hex32(uart_base) << '\n'
      << "gpio_base = " << hex32(gpio_base) << '\n'
      << "timer_base = " << hex32(timer_base) << '\n'
      << "neopixel_base = " << (neopixel_base ? hex32(*neopixel_base) : std::string("none")) << '\n'
      << "user_base = " << hex32(user_base) << '\n'
      << "user_size = " << hex(user_size) << '\n'
      << "uart_divisor = " << uart_divisor() << '\n'
      << "pads_total = " << pads.total << '\n'
      << "pads_croc = " << pads.croc_domain << '\n'
      << "pads_user = " << pads.user << '\n'
      << "gpio_count = " << pads.gpio_count << '\n'
      << "arbitration = " << (arbitration == obi::Arbitration::FixedPriority ? "fixed" : "round_robin") << '\n';
  return out.str();
}

SocConfig parse_config(const std::string& text, SocConfig c) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("line {}: expected 'key = value'", line_no));
    const std::string key = trim(line.substr(0, eq));
    const std::string v = trim(line.substr(eq + 1));

    if (key == "profile") c = profile_by_name(v);
    else if (key == "clk_hz") c.clk_hz = parse_number(key, v);
    else if (key == "reset_pc") c.reset_pc = parse_u32(key, v);
    else if (key == "enable_c_ext") c.enable_c_ext = parse_bool(key, v);
    else if (key == "ebreak_halts") c.ebreak_halts = parse_bool(key, v);
    else if (key == "sram0_base") c.sram0_base = parse_u32(key, v);
    else if (key == "sram0_size") c.sram0_size = parse_u32(key, v);
    else if (key == "sram1_base") c.sram1_base = parse_u32(key, v);
    else if (key == "sram1_size") c.sram1_size = parse_u32(key, v);
    else if (key == "uart_base") c.uart_base = parse_u32(key, v);
    else if (key == "gpio_base") c.gpio_base = parse_u32(key, v);
    else if (key == "timer_base") c.timer_base = parse_u32(key, v);
    else if (key == "neopixel_base") {
      if (v == "none") c.neopixel_base.reset();
      else c.neopixel_base = parse_u32(key, v);
    }
    else if (key == "user_base") c.user_base = parse_u32(key, v);
    else if (key == "user_size") c.user_size = parse_u32(key, v);
    else if (key == "uart_divisor") c.uart_reset_divisor = parse_u32(key, v);
    else if (key == "pads_total") c.pads.total = parse_u32(key, v);
    else if (key == "pads_croc") c.pads.croc_domain = parse_u32(key, v);
    else if (key == "pads_user") c.pads.user = parse_u32(key, v);
    else if (key == "gpio_count") c.pads.gpio_count = parse_u32(key, v);
    else if (key == "arbitration") {
      if (v == "fixed") c.arbitration = obi::Arbitration::FixedPriority;
      else if (v == "round_robin") c.arbitration = obi::Arbitration::RoundRobin;
      else throw ConfigError(fmt::format("arbitration: expected fixed or round_robin, got '{}'", v));
    }
    else throw ConfigError(fmt::format("line {}: unknown key '{}'", line_no, key));
  }
  return c;
}

SocConfig load_config_file(const std::string& path, SocConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), std::move(base));
}

}  // namespace croc::soc
