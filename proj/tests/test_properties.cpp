#include "checks.hpp"
#include "croc/control/host.hpp"
#include "croc/firmware/demos.hpp"
#include "croc/loader/loader.hpp"
#include "croc/soc/soc.hpp"
#include "croc/trace/trace.hpp"
#include "support.hpp"

#include <doctest.h>

#include <chrono>
#include <map>
#include <random>

using namespace croc;

namespace {

void require_pass(const check::Result& r) {
  INFO(r.detail);
  CHECK(r.pass);
}

class PinLog : public soc::SocObserver {
 public:
  void on_pin(const periph::PinEvent& e) override { events.push_back(e); }
  std::vector<periph::PinEvent> events;
};

std::vector<soc::Stimulus> board_stimulus() {
  return soc::parse_stimulus(
      "at 20000 uart \"ab\"\n"
      "at 30000 gpio 8 1\n"
      "at 30500 gpio 9 1\n"
      "at 60000 gpio 8 0\n"
      "at 90000 uart 7a\n");
}

std::unique_ptr<soc::Soc> board(std::vector<soc::Stimulus> stimulus = board_stimulus()) {
  auto s = std::make_unique<soc::Soc>(soc::mlem_profile());
  loader::load(*s, fw::board_demo_program(s->config()));
  s->add_stimulus(std::move(stimulus));
  return s;
}

struct Snapshot {
  isa::ArchState state;
  Cycle now;
  std::vector<std::uint8_t> sram;
  std::uint32_t gpio_out;
  bool operator==(const Snapshot&) const = default;
};

Snapshot snapshot(soc::Soc& s) {
  auto sram = s.read_memory(s.config().sram0_base, 0x1000);
  return {s.core().state(), s.now(), std::move(sram), s.gpio().out()};
}

}  // namespace

TEST_SUITE("properties") {

TEST_CASE("differential ISA against the functional model") { require_pass(check::isa_differential(20'000, 101)); }

TEST_CASE("uart waveform round trip") { require_pass(check::uart_round_trip(200, 102)); }

TEST_CASE("neopixel waveform round trip") { require_pass(check::neopixel_round_trip(40, 103)); }

TEST_CASE("bus conservation") { require_pass(check::obi_traffic(20'000, 104)); }

TEST_CASE("byte enables") { require_pass(check::byte_enables(256, 105)); }

TEST_CASE("deterministic replay") { require_pass(check::determinism(200'000)); }

TEST_CASE("pin events alternate per pin and time never runs backwards") {
  for (std::uint64_t seed : {1, 2, 3}) {
    std::mt19937_64 rng(seed);
    std::vector<soc::Stimulus> stim;
    Cycle at = 10'000;
    for (int i = 0; i < 20; ++i) {
      at += 1 + rng() % 8000;
      soc::Stimulus st;
      st.at = at;
      if (rng() % 2) {
        st.kind = soc::Stimulus::Kind::Gpio;
        st.pin = 8 + static_cast<unsigned>(rng() % 8);
        st.level = static_cast<std::uint8_t>(rng() % 2);
      } else {
        st.kind = soc::Stimulus::Kind::Uart;
        st.bytes = {static_cast<std::uint8_t>(rng())};
      }
      stim.push_back(st);
    }
    auto s = board(stim);
    PinLog log;
    s->add_observer(&log);
    s->run(at + 100'000);
    REQUIRE(log.events.size() > 100);
    std::map<std::string, std::uint8_t> level;
    Cycle last = 0;
    for (const auto& e : log.events) {
      CHECK(e.cycle >= last);
      last = e.cycle;
      const auto it = level.find(e.pin);
      if (it != level.end()) CHECK(it->second != e.level);
      level[e.pin] = e.level;
      CHECK(e.time_ns == periph::cycles_to_ns(e.cycle, s->config().clk_hz));
    }
  }
}

TEST_CASE("timer interrupt line follows mtime >= mtimecmp") {
  soc::Soc s(soc::mlem_profile());
  loader::load(s, loader::parse_elf(loader::read_file(test::data_path("timer_irq.elf"))));
  std::size_t raised = 0;
  while (!s.halted() && s.now() < 100'000) {
    s.step();
    const bool level = s.timer().mtime() >= s.timer().mtimecmp();
    CHECK(s.timer().level() == level);
    CHECK(((s.core().state().mip() & isa::irq::kMti) != 0) == level);
    raised += level;
  }
  CHECK(s.halted());
  CHECK(raised > 0);
}

TEST_CASE("counter law holds through interrupts") {
  soc::Soc s(soc::mlem_profile());
  loader::load(s, loader::parse_elf(loader::read_file(test::data_path("timer_irq.elf"))));
  std::uint64_t cycles = 0;
  std::uint64_t retired = 0;
  std::uint64_t traps = 0;
  while (!s.halted()) {
    const auto r = s.step();
    cycles += r.cycles_consumed;
    retired += r.retired.has_value();
    traps += r.trap_taken.has_value();
    REQUIRE(s.core().state().csr.mcycle == cycles);
    REQUIRE(s.now() == cycles);
    REQUIRE(s.instret() == retired);
  }
  CHECK(traps >= 5);
}

TEST_CASE("observers do not perturb the simulation") {
  auto plain = board();
  auto watched = board();
  PinLog pins;
  trace::TraceWriter tracer;
  trace::StatsCollector stats;
  watched->add_observer(&pins);
  watched->add_observer(&tracer);
  watched->add_observer(&stats);
  const auto a = plain->run(150'000);
  const auto b = watched->run(150'000);
  CHECK(a.cycles == b.cycles);
  CHECK(a.instret == b.instret);
  CHECK(snapshot(*plain) == snapshot(*watched));
  CHECK(tracer.lines() == b.instret);
}

TEST_CASE("subscribers do not perturb the hosted simulation") {
  struct Sink : ctl::Subscriber {
    void deliver(const ctl::Event&, std::optional<ctl::Channel>) override { ++count; }
    std::atomic<std::uint64_t> count{0};
  };
  const auto image = loader::write_elf(fw::board_demo_program(soc::mlem_profile()));
  std::vector<ctl::json> regs;
  for (bool subscribed : {false, true}) {
    ctl::SimHost host(soc::mlem_profile(), ctl::HostOptions{10'000});
    auto sink = std::make_shared<Sink>();
    if (subscribed) {
      sink->subscribe(15);
      host.bus().add(sink);
    }
    host.start();
    auto call = [&](std::int64_t id, std::string method, ctl::json params) {
      auto f = host.call(ctl::Request{id, std::move(method), std::move(params)});
      REQUIRE(f.wait_for(std::chrono::seconds(10)) == std::future_status::ready);
      return f.get();
    };
    call(1, "load", {{"elf_b64", ctl::base64_encode(image)}});
    call(2, "step", {{"n", 50'000}});
    regs.push_back(*call(3, "read_regs", {}).result);
    host.stop();
    if (subscribed) CHECK(sink->count > 100);
  }
  CHECK(regs[0] == regs[1]);
}

TEST_CASE("SRAM banks are isolated") {
  soc::Soc s(soc::mlem_profile());
  const auto b0 = s.config().sram0_base;
  const auto b1 = s.config().sram1_base;
  const auto size = s.config().sram0_size;
  std::mt19937_64 rng(9);
  std::vector<std::uint8_t> fill1(0x10000);
  for (auto& b : fill1) b = static_cast<std::uint8_t>(rng());
  s.write_memory(b1, fill1);
  for (int i = 0; i < 500; ++i) {
    std::vector<std::uint8_t> bytes(1 + rng() % 64);
    for (auto& b : bytes) b = static_cast<std::uint8_t>(rng());
    const auto addr = b0 + static_cast<std::uint32_t>(rng() % (size - bytes.size() + 1));
    s.write_memory(addr, bytes);
    CHECK(s.read_memory(addr, static_cast<std::uint32_t>(bytes.size())) == bytes);
  }
  CHECK(s.read_memory(b1, 0x10000) == fill1);

  // The banks are adjacent: a write across the boundary lands half in each.
  s.write_memory(b0 + size - 2, std::vector<std::uint8_t>{1, 2, 3, 4});
  CHECK(s.sram0().peek(b0 + size - 1) == 2);
  CHECK(s.sram1().peek(b1) == 3);
  CHECK(s.read_memory(b1 + 2, 0x10000 - 2) == std::vector<std::uint8_t>(fill1.begin() + 2, fill1.end()));

  // With a gap between them, nothing is written.
  soc::SocConfig gapped = soc::mlem_profile();
  gapped.sram1_base = b0 + 2 * size;
  soc::Soc g(gapped);
  CHECK_THROWS_AS(g.write_memory(b0 + size - 2, std::vector<std::uint8_t>(4, 0xAA)), mem::RangeError);
  CHECK(g.read_memory(b0 + size - 2, 2) == std::vector<std::uint8_t>(2, 0));
}

TEST_CASE("reset restores the initial state") {
  auto s = board();
  const auto initial = snapshot(*s);
  s->run(120'000);
  s->reset(soc::ResetKind::Warm);
  const auto after = snapshot(*s);
  CHECK(after.state == initial.state);
  CHECK(after.now == 0);
  CHECK(after.gpio_out == 0);
}

}  // TEST_SUITE
