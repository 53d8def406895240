#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace croc::ctl {

using json = nlohmann::json;

inline constexpr std::string_view kProtocolVersion = "croc-ctl/1";

namespace code {
inline constexpr int kBadMethod = 1;
inline constexpr int kBadParams = 2;
inline constexpr int kSimBusy = 3;
inline constexpr int kRange = 4;
inline constexpr int kNotController = 5;
}  // namespace code

/// Raised by handlers; becomes an error response.
class CtlError : public std::runtime_error {
 public:
  CtlError(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

struct Request {
  std::int64_t id = 0;
  std::string method;
  json params = json::object();

  bool operator==(const Request&) const = default;
};

struct ErrorInfo {
  int code = 0;
  std::string message;

  bool operator==(const ErrorInfo&) const = default;
};

struct Response {
  std::int64_t id = 0;
  std::optional<json> result;
  std::optional<ErrorInfo> error;

  bool operator==(const Response&) const = default;
  static Response ok(std::int64_t id, json result) { return {id, std::move(result), std::nullopt}; }
  static Response fail(std::int64_t id, int code, std::string message) {
    return {id, std::nullopt, ErrorInfo{code, std::move(message)}};
  }
};

/// `{"event": kind, ...fields}`; events carry no id.
struct Event {
  std::string kind;
  json fields = json::object();

  bool operator==(const Event&) const = default;
};

using Message = std::variant<Request, Response, Event>;

/// Throws CtlError(kBadParams) for malformed frames.
Message parse_message(std::string_view text);
std::string serialize(const Message& message);
std::string serialize(const Request& request);
std::string serialize(const Response& response);
std::string serialize(const Event& event);

/// Value helpers. 32-bit quantities travel as "0x%08x" strings, 64-bit
/// counters as "0x..." strings; both parsers also accept plain JSON integers.
std::string hex_u32(std::uint32_t value);
std::string hex_u64(std::uint64_t value);
std::uint64_t parse_u64(const json& value, std::string_view name);
std::uint32_t parse_u32(const json& value, std::string_view name);
std::uint64_t param_u64(const json& params, std::string_view name);
std::optional<std::uint64_t> optional_param_u64(const json& params, std::string_view name);

/// Byte payloads: lowercase hex in read_mem/write_mem/uart_rx, base64 in load.
std::string bytes_to_hex(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> hex_to_bytes(std::string_view text);
std::string base64_encode(std::span<const std::uint8_t> bytes);
/// Throws std::invalid_argument on malformed input.
std::vector<std::uint8_t> base64_decode(std::string_view text);

/// Color list entry for neopixel_frame: "RRGGBB".
std::string color_hex(std::uint32_t rgb);

}  // namespace croc::ctl
