#include "croc/firmware/assembler.hpp"
#include "croc/firmware/demos.hpp"
#include "croc/loader/loader.hpp"
#include "croc/periph/oracles.hpp"
#include "croc/soc/soc.hpp"
#include "croc/trace/trace.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace croc;
using namespace croc::soc;
using fw::Assembler;
using isa::Op;
namespace reg = fw::reg;

namespace {

class EchoDevice : public UserDevice {
 public:
  obi::ObiResponse access(const obi::ObiTransaction& txn) override {
    if (txn.we) {
      value = txn.wdata;
      raise = (txn.wdata & 1U) != 0;
      return {0, false};
    }
    return {value ^ 0xA5A5'0000U, false};
  }
  bool irq() const override { return raise; }
  void reset() override { value = 0; raise = false; }
  std::uint32_t value = 0;
  bool raise = false;
};

class UartCapture : public SocObserver {
 public:
  void on_uart_tx(std::uint8_t byte, Cycle) override { text.push_back(static_cast<char>(byte)); }
  std::string text;
};

RunResult run_elf(Soc& s, const std::string& name, std::uint64_t cycles) {
  loader::load(s, loader::parse_elf(loader::read_file(test::data_path(name))));
  return s.run(cycles);
}

}  // namespace

TEST_SUITE("soc") {

TEST_CASE("mlem pad report") {
  Soc s(mlem_profile());
  const auto pads = s.pad_report();
  CHECK(pads.total == 48);
  CHECK(pads.croc_domain == 12);
  CHECK(pads.user == 36);
  CHECK(pads.gpio_count == 26);
  CHECK(s.fabric().rule_named("neopixel") != nullptr);
}

TEST_CASE("pad arithmetic violations are rejected") {
  auto c = mlem_profile();
  c.pads.user = 35;
  CHECK_THROWS_AS(Soc{c}, ConfigError);
  auto wide = minimal_profile();
  wide.pads.gpio_count = 34;
  CHECK_THROWS_AS(Soc{wide}, ConfigError);
}

TEST_CASE("minimal profile has no NeoPixel") {
  Soc s(minimal_profile());
  CHECK(s.neopixel() == nullptr);
  CHECK(s.fabric().rule_named("neopixel") == nullptr);
  CHECK(s.fabric().rule_named("uart") != nullptr);
}

TEST_CASE("config text") {
  const auto c = parse_config("# comment\nclk_hz = 40000000\nneopixel_base = none  # off\narbitration = round_robin\n",
                              minimal_profile());
  CHECK(c.clk_hz == 40'000'000);
  CHECK_FALSE(c.neopixel_base);
  CHECK(c.arbitration == obi::Arbitration::RoundRobin);
  CHECK(parse_config(c.to_text(), mlem_profile()).to_text() == c.to_text());
  CHECK_THROWS_AS(parse_config("bogus = 1"), ConfigError);
  CHECK_THROWS_AS(parse_config("clk_hz"), ConfigError);
  CHECK_THROWS_AS(parse_config("sram0_base = 0x1_0000_0000"), ConfigError);
  CHECK(parse_config("profile = minimal").profile == "minimal");
}

TEST_CASE("overlapping memory map is a config error") {
  auto c = mlem_profile();
  c.gpio_base = c.uart_base;
  CHECK_THROWS_AS(Soc{c}, ConfigError);
  auto u = mlem_profile();
  u.user_base = 0x1000'0000;
  CHECK_THROWS_AS(Soc{u}, ConfigError);
}

TEST_CASE("uart divisor defaults from the clock") {
  CHECK(mlem_profile().uart_divisor() == 174);
  auto c = mlem_profile();
  c.clk_hz = 100'000;
  CHECK(c.uart_divisor() == 4);
}

TEST_CASE("max_cycles zero returns at once") {
  Soc s(mlem_profile());
  const auto r = s.run(0);
  CHECK(r.cycles == 0);
  CHECK(r.instret == 0);
  CHECK(r.reason == StopReason::CycleLimit);
  CHECK(s.now() == 0);
}

TEST_CASE("breakpoint stops before execute") {
  Assembler a(0x1000'0000);
  for (int i = 0; i < 8; ++i) a.opi(Op::Addi, reg::a0, reg::a0, 1);
  a.system(Op::Ebreak);
  auto s = test::soc_with(a);
  s->breakpoints().insert(0x1000'0010);
  const auto r = s->run(1000);
  CHECK(r.reason == StopReason::Breakpoint);
  CHECK(r.final_pc == 0x1000'0010);
  CHECK(s->core().state().reg(reg::a0) == 4);
  CHECK(r.instret <= r.cycles);
  // Resuming from the breakpoint does not stop on it again.
  const auto r2 = s->run(1000);
  CHECK(r2.reason == StopReason::Halt);
  CHECK(s->core().state().reg(reg::a0) == 8);
}

TEST_CASE("warm and cold reset") {
  Assembler a(0x1000'0000);
  a.li(reg::a0, 0x1234);
  a.system(Op::Ebreak);
  auto s = test::soc_with(a);
  s->run(100);
  CHECK(s->halted());
  const auto image = s->read_memory(0x1000'0000, 8);

  s->reset(ResetKind::Warm);
  CHECK(s->core().state().pc == 0x1000'0000);
  CHECK(s->core().state().reg(reg::a0) == 0);
  CHECK(s->now() == 0);
  CHECK(s->instret() == 0);
  CHECK_FALSE(s->halted());
  CHECK(s->read_memory(0x1000'0000, 8) == image);

  s->reset(ResetKind::Warm);
  const auto once = s->core().state();
  s->reset(ResetKind::Warm);
  CHECK(s->core().state().pc == once.pc);
  CHECK(s->core().state().regs == once.regs);

  s->reset(ResetKind::Cold);
  CHECK(s->read_memory(0x1000'0000, 8) == std::vector<std::uint8_t>(8, 0));
}

TEST_CASE("zeroed SRAM double faults") {
  Soc s(mlem_profile());
  const auto r = s.run(100);
  CHECK(r.reason == StopReason::DoubleFault);
  CHECK(s.core().halt_reason() == isa::HaltReason::DoubleFault);
  CHECK_FALSE(s.core().diagnostic().empty());
}

TEST_CASE("timed core cycle costs") {
  Assembler a(0x1000'0000);
  a.li(reg::s0, 0x1001'0000);
  a.opi(Op::Addi, reg::a0, reg::zero, 7);  // 1
  a.load(Op::Lw, reg::a1, reg::s0, 0);     // 2
  a.store(Op::Sw, reg::a0, reg::s0, 4);    // 2
  a.op(Op::Div, reg::a2, reg::a0, reg::a0);  // 37
  a.op(Op::Mul, reg::a2, reg::a0, reg::a0);  // 1
  a.branch(Op::Beq, reg::zero, reg::zero, "t");  // taken 2
  a.nop();
  a.label("t");
  a.branch(Op::Bne, reg::zero, reg::zero, "u");  // not taken 1
  a.label("u");
  a.load(Op::Lw, reg::a3, reg::s0, 2);  // misaligned: +1
  a.system(Op::Ebreak);
  auto s = test::soc_with(a);
  s->step();  // li is a single lui here
  std::vector<unsigned> costs;
  for (int i = 0; i < 8; ++i) {
    const auto r = s->step();
    REQUIRE(r.retired);
    costs.push_back(r.cycles_consumed);
    CHECK(r.cycles_consumed == isa::timing_cycles(*r.retired, r.outcome));
  }
  CHECK(costs == std::vector<unsigned>{1, 2, 2, 37, 1, 2, 1, 3});
}

TEST_CASE("counter law: cycles and retirements add up") {
  auto s = std::make_unique<Soc>(mlem_profile());
  loader::load(*s, fw::hello_program(s->config()));
  std::uint64_t cycles = 0;
  std::uint64_t retired = 0;
  while (!s->halted()) {
    const auto r = s->step();
    cycles += r.cycles_consumed;
    if (r.retired) ++retired;
    CHECK(s->core().state().reg(0) == 0);
  }
  CHECK(cycles == s->core().state().csr.mcycle);
  CHECK(retired == s->instret());
}

TEST_CASE("user device is reachable and raises the external interrupt") {
  Soc s(mlem_profile());
  s.attach_user_device({0x2000'0000, 0x1000, 0, "echo"}, std::make_unique<EchoDevice>());
  CHECK_THROWS_AS(s.attach_user_device({0x1000'0000, 0x1000, 0, "bad"}, std::make_unique<EchoDevice>()),
                  OutsideUserWindow);
  CHECK_THROWS_AS(s.attach_user_device({0x2000'0800, 0x1000, 0, "overlap"}, std::make_unique<EchoDevice>()),
                  obi::OverlapError);

  Assembler a(0x1000'0000);
  a.la(reg::t0, "handler");
  a.csr(Op::Csrrw, reg::zero, isa::csr::kMtvec, reg::t0);
  a.li(reg::t0, isa::irq::kMei);
  a.csr(Op::Csrrs, reg::zero, isa::csr::kMie, reg::t0);
  a.csr(Op::Csrrsi, reg::zero, isa::csr::kMstatus, 8);
  a.li(reg::s0, 0x2000'0000);
  a.li(reg::t1, 0x10);
  a.store(Op::Sw, reg::t1, reg::s0, 0);
  a.load(Op::Lw, reg::a0, reg::s0, 0);
  a.li(reg::t1, 1);
  a.store(Op::Sw, reg::t1, reg::s0, 0);  // raises the line
  a.label("spin");
  a.j("spin");
  a.label("handler");
  a.csr(Op::Csrrs, reg::a1, isa::csr::kMcause, reg::zero);
  a.system(Op::Ebreak);
  loader::load(s, a.image());
  s.run(1000);
  CHECK(s.halted());
  CHECK(s.core().state().reg(reg::a0) == 0xA5A5'0010U);
  CHECK(s.core().state().reg(reg::a1) == 0x8000'000BU);
}

TEST_CASE("stimulus grammar") {
  const auto list = parse_stimulus("# script\nat 10 uart \"hi\\n\"\nat 5 gpio 3 1\nat 7 uart 41 42\n");
  REQUIRE(list.size() == 3);
  CHECK(list[0].at == 5);
  CHECK(list[0].pin == 3);
  CHECK(list[1].bytes == std::vector<std::uint8_t>{0x41, 0x42});
  CHECK(list[2].bytes == std::vector<std::uint8_t>{'h', 'i', '\n'});
  CHECK_THROWS_AS(parse_stimulus("at x gpio 1 1"), StimulusError);
  CHECK_THROWS_AS(parse_stimulus("at 1 gpio 1 2"), StimulusError);
  CHECK_THROWS_AS(parse_stimulus("at 1 spi 1"), StimulusError);
  try {
    parse_stimulus("\nat 1 uart zz");
  } catch (const StimulusError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("stimulus reaches the pads and re-arms on reset") {
  Soc s(mlem_profile());
  loader::load(s, fw::board_demo_program(s.config()));
  s.add_stimulus(parse_stimulus("at 100 gpio 8 1\n"));
  trace::PinRecorder pins;
  s.add_observer(&pins);
  s.run(5000);
  const auto first = pins.events_for("gpio8");
  REQUIRE(first.size() == 1);
  CHECK(first[0].cycle == 100);
  CHECK(first[0].time_ns == 5000);
  CHECK_THROWS_AS(s.add_stimulus(parse_stimulus("at 1 gpio 30 1")), std::out_of_range);
  pins.clear();
  s.reset();
  s.run(5000);
  CHECK(pins.events_for("gpio8").size() == 1);
}

TEST_CASE("hello demo prints through the uart pad") {
  Soc s(mlem_profile());
  loader::load(s, fw::hello_program(s.config()));
  UartCapture uart;
  trace::PinRecorder pins;
  s.add_observer(&uart);
  s.add_observer(&pins);
  const auto r = s.run(1'000'000);
  CHECK(r.reason == StopReason::Halt);
  CHECK(uart.text == "Hello from Croc!\n");
  const auto decoded = periph::uart_decode_oracle(pins.events_for("uart_tx"), s.config().uart_divisor());
  CHECK(std::string(decoded.begin(), decoded.end()) == uart.text);
}

TEST_CASE("compiled C firmware") {
  SUBCASE("hello") {
    Soc s(mlem_profile());
    UartCapture uart;
    s.add_observer(&uart);
    const auto r = run_elf(s, "hello.elf", 2'000'000);
    CHECK(r.reason == StopReason::Halt);
    CHECK(uart.text == "Hello from C firmware!\nfib(15)=610\nprimes: 2 3 5 7 11 13 17 19 23 29 31 37\n");
  }
  SUBCASE("timer interrupts") {
    Soc s(mlem_profile());
    UartCapture uart;
    trace::PinRecorder pins;
    s.add_observer(&uart);
    s.add_observer(&pins);
    const auto r = run_elf(s, "timer_irq.elf", 2'000'000);
    CHECK(r.reason == StopReason::Halt);
    CHECK(uart.text == "ticks=5\n");
    CHECK(s.gpio().out() == 5);
    CHECK(pins.events_for("gpio0").size() >= 3);
  }
}

TEST_CASE("board demo drives gpio and neopixel") {
  Soc s(mlem_profile());
  loader::load(s, fw::board_demo_program(s.config()));
  struct Frames : SocObserver {
    void on_neopixel_frame(const std::vector<std::uint32_t>& colors, Cycle) override { frames.push_back(colors); }
    std::vector<std::vector<std::uint32_t>> frames;
  } frames;
  UartCapture uart;
  s.add_observer(&frames);
  s.add_observer(&uart);
  s.add_stimulus(parse_stimulus("at 100000 uart \"i\"\nat 100000 gpio 9 1\n"));
  s.run(200'000);
  CHECK(uart.text == "Croc board demo: type to echo\r\ni");
  CHECK((s.gpio().out() & 0xFF) == 'i');
  CHECK((s.gpio().out() >> 16 & 0xFF) == 0x02);
  REQUIRE(frames.frames.size() >= 2);
  CHECK(frames.frames.front().size() == 8);
  CHECK(frames.frames.back().front() == 0x00'69'00);
}

TEST_CASE("host memory access") {
  Soc s(mlem_profile());
  s.write_memory(0x1000'fffe, std::vector<std::uint8_t>{1, 2});
  CHECK(s.read_memory(0x1000'fffe, 2) == std::vector<std::uint8_t>{1, 2});
  CHECK_THROWS_AS(s.read_memory(0x0300'1000, 4), mem::RangeError);
  CHECK_THROWS_AS(s.write_memory(0x1001'fffe, std::vector<std::uint8_t>{1, 2, 3}), mem::RangeError);
  CHECK(s.read_memory(0x1001'fffe, 2) == std::vector<std::uint8_t>{0, 0});
}

TEST_CASE("commands run at instruction boundaries") {
  Assembler a(0x1000'0000);
  a.label("top");
  a.j("top");
  auto s = test::soc_with(a);
  int applied = 0;
  s->commands().push([&] { ++applied; });
  s->run(10);
  CHECK(applied == 1);
  bool stop = false;
  s->commands().push([&] { stop = true; });
  const auto r = s->run(1000, [&] { return stop; });
  CHECK(r.reason == StopReason::Paused);
  CHECK(r.cycles == 0);
}

}  // TEST_SUITE
