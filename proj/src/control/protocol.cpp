#include "croc/control/protocol.hpp"

#include "croc/bits.hpp"

#include <boost/beast/core/detail/base64.hpp>

#include <fmt/format.h>

namespace croc::ctl {

namespace base64 = boost::beast::detail::base64;

Message parse_message(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw CtlError(code::kBadParams, std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw CtlError(code::kBadParams, "message must be a JSON object");

  if (j.contains("event")) {
    if (!j["event"].is_string()) throw CtlError(code::kBadParams, "event must be a string");
    Event e;
    e.kind = j["event"].get<std::string>();
    j.erase("event");
    e.fields = std::move(j);
    return e;
  }
  if (!j.contains("id") || !j["id"].is_number_integer()) throw CtlError(code::kBadParams, "id must be an integer");
  const auto id = j["id"].get<std::int64_t>();
  if (j.contains("method")) {
    if (!j["method"].is_string()) throw CtlError(code::kBadParams, "method must be a string");
    Request r;
    r.id = id;
    r.method = j["method"].get<std::string>();
    if (j.contains("params")) {
      if (!j["params"].is_object()) throw CtlError(code::kBadParams, "params must be an object");
      r.params = j["params"];
    }
    return r;
  }
  if (j.contains("result")) return Response::ok(id, j["result"]);
  if (j.contains("error")) {
    const auto& err = j["error"];
    if (!err.is_object() || !err.contains("code") || !err["code"].is_number_integer() || !err.contains("message") ||
        !err["message"].is_string())
      throw CtlError(code::kBadParams, "error must be {code, message}");
    return Response::fail(id, err["code"].get<int>(), err["message"].get<std::string>());
  }
  throw CtlError(code::kBadParams, "message is neither request, response nor event");
}

std::string serialize(const Request& r) {
  json j = {{"id", r.id}, {"method", r.method}};
  if (!r.params.empty()) j["params"] = r.params;
  return j.dump();
}

std::string serialize(const Response& r) {
  json j = {{"id", r.id}};
  if (r.error) {
    j["error"] = {{"code", r.error->code}, {"message", r.error->message}};
  } else {
    j["result"] = r.result.value_or(json::object());
  }
  return j.dump();
}

std::string serialize(const Event& e) {
  json j = {{"event", e.kind}};
  for (const auto& [key, value] : e.fields.items()) j[key] = value;
  return j.dump();
}

std::string serialize(const Message& message) {
  return std::visit([](const auto& m) { return serialize(m); }, message);
}

std::string hex_u32(std::uint32_t value) { return hex32(value); }
std::string hex_u64(std::uint64_t value) { return fmt::format("0x{:x}", value); }

std::uint64_t parse_u64(const json& value, std::string_view name) {
  if (value.is_number_unsigned()) return value.get<std::uint64_t>();
  if (value.is_number_integer()) {
    const auto v = value.get<std::int64_t>();
    if (v < 0) throw CtlError(code::kBadParams, fmt::format("{} must not be negative", name));
    return static_cast<std::uint64_t>(v);
  }
  if (value.is_string()) {
    try {
      return parse_uint(value.get<std::string>());
    } catch (const std::exception&) {
      throw CtlError(code::kBadParams, fmt::format("{}: cannot parse '{}'", name, value.get<std::string>()));
    }
  }
  throw CtlError(code::kBadParams, fmt::format("{} must be a number or hex string", name));
}

std::uint32_t parse_u32(const json& value, std::string_view name) {
  const auto v = parse_u64(value, name);
  if (v > 0xFFFF'FFFFULL) throw CtlError(code::kRange, fmt::format("{} exceeds 32 bits", name));
  return static_cast<std::uint32_t>(v);
}

std::uint64_t param_u64(const json& params, std::string_view name) {
  const auto it = params.find(name);
  if (it == params.end()) throw CtlError(code::kBadParams, fmt::format("missing parameter '{}'", name));
  return parse_u64(*it, name);
}

std::optional<std::uint64_t> optional_param_u64(const json& params, std::string_view name) {
  const auto it = params.find(name);
  if (it == params.end() || it->is_null()) return std::nullopt;
  return parse_u64(*it, name);
}

std::string bytes_to_hex(std::span<const std::uint8_t> bytes) { return hex_bytes(bytes.data(), bytes.size()); }

std::vector<std::uint8_t> hex_to_bytes(std::string_view text) {
  if (text.rfind("0x", 0) == 0) text.remove_prefix(2);
  if (text.size() % 2 != 0) throw CtlError(code::kBadParams, "hex byte string has odd length");
  const auto digit = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 2);
  for (std::size_t i = 0; i < text.size(); i += 2) {
    const int hi = digit(text[i]);
    const int lo = digit(text[i + 1]);
    if (hi < 0 || lo < 0) throw CtlError(code::kBadParams, "bad hex digit in byte string");
    out.push_back(static_cast<std::uint8_t>(hi * 16 + lo));
  }
  return out;
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out(base64::encoded_size(bytes.size()), '\0');
  out.resize(base64::encode(out.data(), bytes.data(), bytes.size()));
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw std::invalid_argument("base64 length is not a multiple of 4");
  std::size_t padding = 0;
  while (padding < 2 && padding < text.size() && text[text.size() - 1 - padding] == '=') ++padding;
  for (std::size_t i = 0; i + padding < text.size(); ++i) {
    const char c = text[i];
    const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '+' || c == '/';
    if (!ok) throw std::invalid_argument(fmt::format("invalid base64 character at {}", i));
  }
  std::vector<std::uint8_t> out(base64::decoded_size(text.size()));
  const auto [written, read] = base64::decode(out.data(), text.data(), text.size());
  if (read + padding != text.size()) throw std::invalid_argument("truncated base64 input");
  out.resize(written);
  return out;
}

std::string color_hex(std::uint32_t rgb) { return fmt::format("{:06X}", rgb & 0xFF'FFFFU); }

}  // namespace croc::ctl
