#include "croc/control/controller.hpp"
#include "croc/control/host.hpp"
#include "croc/control/protocol.hpp"
#include "croc/firmware/assembler.hpp"
#include "croc/firmware/demos.hpp"
#include "support.hpp"

#include <doctest.h>

#include <chrono>
#include <condition_variable>
#include <random>

using namespace croc;
using namespace croc::ctl;
using namespace std::chrono_literals;

namespace {

json random_value(std::mt19937_64& rng, int depth = 0) {
  switch (rng() % (depth > 2 ? 4 : 6)) {
    case 0: return static_cast<std::int64_t>(rng() % 100000) - 50000;
    case 1: return hex_u32(static_cast<std::uint32_t>(rng()));
    case 2: return rng() % 2 == 0;
    case 3: {
      std::string s;
      for (std::size_t i = rng() % 12; i > 0; --i) s.push_back(static_cast<char>(' ' + rng() % 95));
      return s;
    }
    case 4: {
      json a = json::array();
      for (std::size_t i = rng() % 4; i > 0; --i) a.push_back(random_value(rng, depth + 1));
      return a;
    }
    default: {
      json o = json::object();
      for (std::size_t i = rng() % 4; i > 0; --i) o["k" + std::to_string(rng() % 50)] = random_value(rng, depth + 1);
      return o;
    }
  }
}

json random_object(std::mt19937_64& rng) {
  json o = json::object();
  for (std::size_t i = rng() % 5; i > 0; --i) o["f" + std::to_string(rng() % 20)] = random_value(rng, 1);
  return o;
}

Message random_message(std::mt19937_64& rng) {
  const auto id = static_cast<std::int64_t>(rng() % 1'000'000);
  switch (rng() % 4) {
    case 0: return Request{id, "m" + std::to_string(rng() % 30), random_object(rng)};
    case 1: return Response::ok(id, random_object(rng));
    case 2: return Response::fail(id, 1 + static_cast<int>(rng() % 5), "msg " + std::to_string(rng()));
    default: return Event{"e" + std::to_string(rng() % 30), random_object(rng)};
  }
}

/// Program: nops up to 0x10000010, then a tight loop.
fw::Assembler nop_loop() {
  fw::Assembler a(0x1000'0000);
  for (int i = 0; i < 4; ++i) a.opi(isa::Op::Addi, 0, 0, 0);
  a.label("spin");
  a.opi(isa::Op::Addi, fw::reg::a0, fw::reg::a0, 1);
  a.j("spin");
  return a;
}

std::string elf_b64(const loader::FirmwareImage& image) { return base64_encode(loader::write_elf(image)); }

class Collector : public Subscriber {
 public:
  void deliver(const Event& event, std::optional<Channel>) override {
    std::lock_guard lock(mutex_);
    events_.push_back(event);
    cv_.notify_all();
  }

  /// First event of `kind`, waiting up to `timeout`.
  std::optional<Event> wait_for(const std::string& kind, std::chrono::milliseconds timeout = 10s) {
    std::unique_lock lock(mutex_);
    std::optional<Event> found;
    cv_.wait_for(lock, timeout, [&] {
      for (const auto& e : events_)
        if (e.kind == kind) {
          found = e;
          return true;
        }
      return false;
    });
    return found;
  }

  std::size_t count(const std::string& kind) {
    std::lock_guard lock(mutex_);
    return static_cast<std::size_t>(std::count_if(events_.begin(), events_.end(), [&](const Event& e) { return e.kind == kind; }));
  }

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  std::vector<Event> events_;
};

Response call(SimHost& host, std::int64_t id, std::string method, json params = json::object()) {
  auto f = host.call(Request{id, std::move(method), std::move(params)});
  REQUIRE(f.wait_for(10s) == std::future_status::ready);
  return f.get();
}

}  // namespace

TEST_SUITE("control") {

TEST_CASE("message round trip") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 2000; ++i) {
    const Message m = random_message(rng);
    const auto text = serialize(m);
    CHECK(parse_message(text) == m);
  }
}

TEST_CASE("malformed frames") {
  for (const char* text : {"", "[1]", "{\"id\":\"x\",\"method\":\"step\"}", "{\"id\":1,\"method\":3}",
                           "{\"id\":1,\"method\":\"step\",\"params\":[]}", "{\"id\":1}", "{\"event\":5}",
                           "{\"id\":1,\"error\":{\"code\":1}}"}) {
    try {
      parse_message(text);
      FAIL("accepted " << text);
    } catch (const CtlError& e) {
      CHECK(e.code() == code::kBadParams);
    }
  }
}

TEST_CASE("value helpers") {
  CHECK(hex_u32(0x1000'0004) == "0x10000004");
  CHECK(hex_u64(0x1'0000'0000ULL).rfind("0x", 0) == 0);
  CHECK(parse_u64(json(hex_u64(0x1'2345'6789ULL)), "n") == 0x1'2345'6789ULL);
  CHECK(parse_u32(json(42), "n") == 42U);
  CHECK_THROWS_AS(parse_u32(json("0x100000000"), "n"), CtlError);
  CHECK(bytes_to_hex(std::vector<std::uint8_t>{0x00, 0xAB, 0x10}) == "00ab10");
  CHECK(hex_to_bytes("00AB10") == std::vector<std::uint8_t>{0x00, 0xAB, 0x10});
  CHECK_THROWS(hex_to_bytes("abc"));
  CHECK(color_hex(0x00FF00) == "00FF00");
  CHECK(color_hex(0x0A0B0C) == "0A0B0C");

  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    std::vector<std::uint8_t> bytes(rng() % 64);
    for (auto& b : bytes) b = static_cast<std::uint8_t>(rng());
    CHECK(base64_decode(base64_encode(bytes)) == bytes);
    CHECK(hex_to_bytes(bytes_to_hex(bytes)) == bytes);
  }
  CHECK(base64_encode(std::vector<std::uint8_t>{'f', 'o', 'o', 'b'}) == "Zm9vYg==");
  CHECK_THROWS_AS(base64_decode("Zm9v!"), std::invalid_argument);
}

TEST_CASE("step response") {
  soc::Soc s(soc::mlem_profile());
  loader::load(s, nop_loop().image());
  Controller c(s, Controller::RunMode::Blocking);
  const auto r = c.dispatch(Request{1, "step", json::object()});
  CHECK(serialize(r) == R"({"id":1,"result":{"cycles":1,"pc":"0x10000004"}})");
  const auto traced = c.dispatch(Request{2, "step", {{"n", 2}, {"trace", true}}});
  REQUIRE(traced.result);
  CHECK((*traced.result)["trace"].size() == 2);
  CHECK((*traced.result)["trace"][0] == "C1 PC=0x10000004 I=0x00000013 addi x0=0x00000000");
}

TEST_CASE("error codes") {
  soc::Soc s(soc::mlem_profile());
  loader::load(s, nop_loop().image());
  Controller c(s, Controller::RunMode::Blocking);

  CHECK(c.dispatch(Request{1, "frobnicate", {}}).error->code == code::kBadMethod);
  CHECK(c.dispatch(Request{2, "read_mem", {{"addr", "0x10000000"}, {"len", 8192}}}).error->code == code::kRange);
  CHECK(c.dispatch(Request{3, "read_mem", {{"addr", "0x40000000"}, {"len", 4}}}).error->code == code::kRange);
  CHECK(c.dispatch(Request{4, "read_mem", {{"addr", "nowhere"}, {"len", 4}}}).error->code == code::kBadParams);
  CHECK(c.dispatch(Request{5, "write_mem", {{"addr", "0x10000000"}}}).error->code == code::kBadParams);
  CHECK(c.dispatch(Request{6, "gpio_input", {{"pin", 26}, {"level", 1}}}).error->code == code::kRange);
  CHECK(c.dispatch(Request{7, "gpio_input", {{"pin", 8}, {"level", 2}}}).error->code == code::kBadParams);
  CHECK(c.dispatch(Request{8, "load", json::object()}).error->code == code::kBadParams);
  CHECK(c.dispatch(Request{9, "load", {{"elf_b64", base64_encode(std::vector<std::uint8_t>(64, 1))}}}).error->code ==
        code::kBadParams);

  c.set_running(true);
  for (const char* m : {"write_mem", "step", "load", "reset", "run"}) {
    const auto r = c.dispatch(Request{10, m, {{"addr", "0x10000000"}, {"bytes", "00"}}});
    REQUIRE(r.error);
    CHECK(r.error->code == code::kSimBusy);
  }
  CHECK(c.dispatch(Request{11, "read_regs", {}}).result);
  CHECK(c.dispatch(Request{12, "gpio_input", {{"pin", 8}, {"level", 1}}}).result);
  CHECK(c.dispatch(Request{13, "uart_rx", {{"text", "x"}}}).result);
}

TEST_CASE("memory and register methods") {
  soc::Soc s(soc::mlem_profile());
  loader::load(s, nop_loop().image());
  Controller c(s, Controller::RunMode::Blocking);
  CHECK(c.handle(Request{1, "write_mem", {{"addr", "0x10010000"}, {"bytes", "deadbeef"}}})["written"] == 4);
  const auto r = c.handle(Request{2, "read_mem", {{"addr", "0x10010000"}, {"len", 4}}});
  CHECK(r["bytes"] == "deadbeef");
  CHECK(c.handle(Request{3, "read_mem", {{"addr", "0x10000000"}, {"len", 4096}}})["bytes"].get<std::string>().size() ==
        8192);

  const auto regs = c.handle(Request{4, "read_regs", {}});
  CHECK(regs["pc"] == "0x10000000");
  CHECK(regs["x"].size() == 32);
  CHECK(regs["halted"] == false);

  const auto bp = c.handle(Request{5, "set_breakpoint", {{"addr", "0x10000010"}}});
  CHECK(bp["breakpoints"] == json::array({"0x10000010"}));
  const auto run = c.handle(Request{6, "run", {{"max_cycles", 1000}}});
  CHECK(run["reason"] == "breakpoint");
  CHECK(run["pc"] == "0x10000010");
  CHECK(c.handle(Request{7, "clear_breakpoint", {{"addr", "0x10000010"}}})["breakpoints"].empty());
  CHECK(c.handle(Request{8, "run", {{"max_cycles", 100}}})["reason"] == "cycle_limit");
  CHECK(c.handle(Request{9, "reset", {{"cold", true}}})["pc"] == "0x10000000");
}

TEST_CASE("load through elf_b64") {
  soc::Soc s(soc::mlem_profile());
  Controller c(s, Controller::RunMode::Blocking);
  const auto image = fw::hello_program(s.config(), "hi\n");
  const auto r = c.handle(Request{1, "load", {{"elf_b64", elf_b64(image)}}});
  CHECK(r["entry"] == hex_u32(image.entry));
  CHECK(r["bytes"] == image.total_bytes());
  CHECK(c.handle(Request{2, "run", {{"max_cycles", 1'000'000}}})["reason"] == "halt");

  const std::vector<std::uint8_t> bin = {0x13, 0x05, 0x70, 0x00, 0x73, 0x00, 0x10, 0x00};
  CHECK(c.handle(Request{3, "load", {{"bin_b64", base64_encode(bin)}, {"addr", "0x10010000"}}})["entry"] ==
        "0x10010000");
  c.handle(Request{4, "run", {{"max_cycles", 100}}});
  CHECK(s.core().state().reg(fw::reg::a0) == 7);
}

TEST_CASE("method classes") {
  for (const char* m : {"load", "reset", "run", "step", "write_mem"}) CHECK(Controller::is_mutating(m));
  for (const char* m : {"read_regs", "read_mem", "subscribe"}) CHECK(Controller::is_observer_safe(m));
  CHECK_FALSE(Controller::is_observer_safe("step"));
  CHECK_FALSE(Controller::is_known("frobnicate"));
}

TEST_CASE("outbox overflow is reported once") {
  Outbox box(4);
  CHECK(box.push("a", true));
  for (int i = 0; i < 9; ++i) CHECK_FALSE(box.push("p", true));
  box.push("resp", false);
  CHECK(box.queued_pins() == 4);
  CHECK(box.dropped_pins() == 6);
  std::vector<std::string> frames;
  while (auto f = box.pop()) frames.push_back(*f);
  CHECK(std::count(frames.begin(), frames.end(), R"({"channel":"pins","event":"overflow"})") == 1);
  CHECK(frames.back() == "resp");  // non-pin frames are never dropped
  CHECK(frames.size() == 6);

  // Draining re-arms the notice.
  for (int i = 0; i < 6; ++i) box.push("p", true);
  int overflow = 0;
  while (auto f = box.pop()) overflow += f->find("overflow") != std::string::npos;
  CHECK(overflow == 1);
}

TEST_CASE("event bus channels") {
  EventBus bus;
  auto pins = std::make_shared<Collector>();
  auto all = std::make_shared<Collector>();
  pins->subscribe(static_cast<unsigned>(Channel::Pins));
  all->subscribe(15);
  bus.add(pins);
  bus.add(all);
  bus.publish(Event{"uart_tx", {{"byte", 65}}}, Channel::Uart);
  bus.publish(Event{"halted", {}});
  CHECK(pins->count("uart_tx") == 0);
  CHECK(all->count("uart_tx") == 1);
  CHECK(pins->count("halted") == 1);
  CHECK(bus.anyone_wants(Channel::Stats));
  bus.remove(all.get());
  CHECK_FALSE(bus.anyone_wants(Channel::Stats));
  CHECK(channel_from_name("neopixel") == Channel::Neopixel);
  CHECK_FALSE(channel_from_name("video"));
}

TEST_CASE("host reports a breakpoint halt") {
  SimHost host(soc::mlem_profile());
  auto events = std::make_shared<Collector>();
  host.bus().add(events);
  host.start();
  CHECK(call(host, 1, "load", {{"elf_b64", elf_b64(nop_loop().image())}}).result);
  CHECK(call(host, 2, "set_breakpoint", {{"addr", "0x10000010"}}).result);
  const auto run = call(host, 3, "run");
  REQUIRE(run.result);
  CHECK((*run.result)["running"] == true);
  const auto halted = events->wait_for("halted");
  REQUIRE(halted);
  CHECK(serialize(*halted) == R"({"event":"halted","pc":"0x10000010","reason":"breakpoint"})");
  host.stop();
}

TEST_CASE("host pause and busy while running") {
  SimHost host(soc::mlem_profile());
  auto events = std::make_shared<Collector>();
  host.bus().add(events);
  host.start();
  call(host, 1, "load", {{"elf_b64", elf_b64(nop_loop().image())}});
  call(host, 2, "run");
  const auto busy = call(host, 3, "write_mem", {{"addr", "0x10010000"}, {"bytes", "00"}});
  REQUIRE(busy.error);
  CHECK(busy.error->code == code::kSimBusy);
  CHECK(call(host, 4, "read_regs").result);
  CHECK(call(host, 5, "pause").result);
  const auto halted = events->wait_for("halted");
  REQUIRE(halted);
  CHECK(halted->fields["reason"] == "paused");
  CHECK(call(host, 6, "write_mem", {{"addr", "0x10010000"}, {"bytes", "00"}}).result);
  host.stop();
}

TEST_CASE("host publishes uart, neopixel and stats") {
  SimHost host(soc::mlem_profile(), HostOptions{50'000});
  auto events = std::make_shared<Collector>();
  events->subscribe(static_cast<unsigned>(Channel::Uart) | static_cast<unsigned>(Channel::Neopixel) |
                    static_cast<unsigned>(Channel::Stats));
  host.bus().add(events);
  host.start();
  const soc::SocConfig cfg = soc::mlem_profile();
  call(host, 1, "load", {{"elf_b64", elf_b64(fw::board_demo_program(cfg))}});
  call(host, 2, "run", {{"max_cycles", 400'000}});
  REQUIRE(events->wait_for("halted"));
  const auto frame = events->wait_for("neopixel_frame", 0ms);
  REQUIRE(frame);
  CHECK(frame->fields["colors"].size() == 8);
  for (const auto& c : frame->fields["colors"]) CHECK(c.get<std::string>().size() == 6);
  const auto tx = events->wait_for("uart_tx", 0ms);
  REQUIRE(tx);
  CHECK(tx->fields["byte"].is_number_integer());
  const auto stats = events->wait_for("stats", 0ms);
  REQUIRE(stats);
  CHECK(stats->fields["ipc"].get<double>() > 0.0);
  CHECK(stats->fields["ipc"].get<double>() <= 1.0);
  host.stop();
}

TEST_CASE("step into a halt publishes halted") {
  SimHost host(soc::mlem_profile());
  auto events = std::make_shared<Collector>();
  host.bus().add(events);
  host.start();
  const std::vector<std::uint8_t> bin = {0x13, 0x00, 0x00, 0x00, 0x73, 0x00, 0x10, 0x00};
  call(host, 1, "load", {{"bin_b64", base64_encode(bin)}});
  const auto r = call(host, 2, "step", {{"n", 5}});
  REQUIRE(r.result);
  CHECK((*r.result)["halted"] == true);
  const auto halted = events->wait_for("halted");
  REQUIRE(halted);
  CHECK(halted->fields["reason"] == "halt");
  host.stop();
}

}  // TEST_SUITE
