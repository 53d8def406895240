#include "croc/soc/stimulus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace croc::soc {
namespace {

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::vector<std::uint8_t> parse_quoted(const std::string& s, int line) {
  if (s.size() < 2 || s.front() != '"' || s.back() != '"')
    throw StimulusError(fmt::format("line {}: uart payload must be a quoted string", line), line);
  std::vector<std::uint8_t> out;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    char c = s[i];
    if (c != '\\') {
      out.push_back(static_cast<std::uint8_t>(c));
      continue;
    }
    if (++i >= s.size() - 1) throw StimulusError(fmt::format("line {}: dangling escape", line), line);
    switch (s[i]) {
      case 'n': out.push_back('\n'); break;
      case 'r': out.push_back('\r'); break;
      case 't': out.push_back('\t'); break;
      case '\\': out.push_back('\\'); break;
      case '"': out.push_back('"'); break;
      case 'x': {
        if (i + 2 >= s.size() - 1 || hex_digit(s[i + 1]) < 0 || hex_digit(s[i + 2]) < 0)
          throw StimulusError(fmt::format("line {}: bad \\x escape", line), line);
        out.push_back(static_cast<std::uint8_t>(hex_digit(s[i + 1]) * 16 + hex_digit(s[i + 2])));
        i += 2;
        break;
      }
      default: throw StimulusError(fmt::format("line {}: unknown escape \\{}", line, s[i]), line);
    }
  }
  return out;
}

std::vector<std::uint8_t> parse_hex_bytes(const std::string& s, int line) {
  std::string digits;
  for (char c : s)
    if (c != ' ' && c != '\t') digits.push_back(c);
  if (digits.rfind("0x", 0) == 0) digits.erase(0, 2);
  if (digits.empty() || digits.size() % 2 != 0)
    throw StimulusError(fmt::format("line {}: uart needs an even number of hex digits", line), line);
  std::vector<std::uint8_t> out;
  for (std::size_t i = 0; i < digits.size(); i += 2) {
    const int hi = hex_digit(digits[i]);
    const int lo = hex_digit(digits[i + 1]);
    if (hi < 0 || lo < 0) throw StimulusError(fmt::format("line {}: bad hex digit", line), line);
    out.push_back(static_cast<std::uint8_t>(hi * 16 + lo));
  }
  return out;
}

}  // namespace

std::vector<Stimulus> parse_stimulus(const std::string& text) {
  std::vector<Stimulus> out;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::istringstream ls(raw);
    std::string at, cycle_text;
    if (!(ls >> at) || at[0] == '#') continue;
    if (at != "at" || !(ls >> cycle_text))
      throw StimulusError(fmt::format("line {}: expected 'at <cycle> ...'", line), line);
    Stimulus s;
    try {
      s.at = parse_uint(cycle_text);
    } catch (const std::invalid_argument&) {
      throw StimulusError(fmt::format("line {}: bad cycle '{}'", line, cycle_text), line);
    }
    std::string action;
    ls >> action;
    if (action == "gpio") {
      std::string pin, level;
      if (!(ls >> pin >> level)) throw StimulusError(fmt::format("line {}: gpio needs <pin> <level>", line), line);
      try {
        s.pin = static_cast<unsigned>(parse_uint(pin));
      } catch (const std::invalid_argument&) {
        throw StimulusError(fmt::format("line {}: bad pin '{}'", line, pin), line);
      }
      if (level != "0" && level != "1") throw StimulusError(fmt::format("line {}: level must be 0 or 1", line), line);
      s.kind = Stimulus::Kind::Gpio;
      s.level = level == "1" ? 1 : 0;
    } else if (action == "uart") {
      std::string rest;
      std::getline(ls, rest);
      const auto first = rest.find_first_not_of(" \t");
      const auto last = rest.find_last_not_of(" \t\r");
      rest = first == std::string::npos ? std::string() : rest.substr(first, last - first + 1);
      s.kind = Stimulus::Kind::Uart;
      s.bytes = !rest.empty() && rest.front() == '"' ? parse_quoted(rest, line) : parse_hex_bytes(rest, line);
    } else {
      throw StimulusError(fmt::format("line {}: unknown action '{}'", line, action), line);
    }
    out.push_back(std::move(s));
  }
  std::stable_sort(out.begin(), out.end(), [](const Stimulus& a, const Stimulus& b) { return a.at < b.at; });
  return out;
}

std::vector<Stimulus> load_stimulus_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StimulusError("cannot open stimulus file " + path, 0);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_stimulus(text.str());
}

}  // namespace croc::soc
