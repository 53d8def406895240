#include "croc/isa/arch_state.hpp"
#include "croc/isa/exec.hpp"
#include "croc/isa/functional_core.hpp"
#include "croc/isa/instr.hpp"
#include "support.hpp"

#include <doctest.h>
#include <fmt/format.h>

#include <fstream>
#include <random>
#include <sstream>

using namespace croc;
using namespace croc::isa;

namespace {

struct FixtureEntry {
  std::uint32_t encoding;
  bool compressed;
  std::string text;
};

std::vector<FixtureEntry> read_fixture() {
  std::ifstream in(test::data_path("decode_fixture.txt"));
  REQUIRE(in);
  std::vector<FixtureEntry> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto space = line.find(' ');
    FixtureEntry e;
    e.compressed = space == 4;
    e.encoding = static_cast<std::uint32_t>(std::stoul(line.substr(0, space), nullptr, 16));
    e.text = line.substr(space + 1);
    out.push_back(std::move(e));
  }
  return out;
}

DecodeResult decode_any(const FixtureEntry& e) {
  return e.compressed ? decode_compressed(static_cast<std::uint16_t>(e.encoding)) : decode(e.encoding);
}

}  // namespace

TEST_SUITE("isa") {

TEST_CASE("decode matches the assembler fixture") {
  const auto entries = read_fixture();
  REQUIRE(entries.size() >= 5000);
  std::size_t mismatches = 0;
  for (const auto& e : entries) {
    const auto r = decode_any(e);
    if (!r || disassemble(r.instr) != e.text) {
      if (++mismatches <= 10)
        MESSAGE(fmt::format("{:08x}: expected '{}', got '{}'", e.encoding, e.text,
                            r ? disassemble(r.instr) : std::string("<illegal>")));
    }
  }
  CHECK(mismatches == 0);
}

TEST_CASE("encode inverts decode for 32-bit fixture entries") {
  for (const auto& e : read_fixture()) {
    if (e.compressed) continue;
    const auto r = decode(e.encoding);
    REQUIRE(r);
    const auto again = decode(encode(r.instr));
    REQUIRE(again);
    CHECK_MESSAGE(same_operation(again.instr, r.instr), e.text);
  }
}

TEST_CASE("compressed expansion re-decodes to the same operation") {
  std::size_t legal = 0;
  for (std::uint32_t h = 0; h <= 0xFFFF; ++h) {
    if ((h & 3U) == 3U) continue;
    const auto c = decode_compressed(static_cast<std::uint16_t>(h));
    if (!c) continue;
    ++legal;
    CHECK(c.instr.was_compressed);
    const auto full = decode(encode(c.instr));
    REQUIRE(full);
    CHECK_MESSAGE(same_operation(full.instr, c.instr), fmt::format("{:04x}", h));
  }
  CHECK(legal > 20000);
}

TEST_CASE("illegal encodings are reported, not skipped") {
  CHECK_FALSE(decode(0x00000000));
  CHECK_FALSE(decode(0xFFFFFFFF));
  CHECK_FALSE(decode_compressed(0x0000));
  CHECK(decode(0x00000013).instr.op == Op::Addi);
}

TEST_CASE("trace mnemonics") {
  CHECK(mnemonic(Op::Addi) == "addi");
  CHECK(mnemonic(Op::FenceI) == "fence.i");
  CHECK(mnemonic(Op::Mulhsu) == "mulhsu");
}

TEST_CASE("timing table") {
  const auto cycles = [](Op op, bool taken = false) { return base_cycles(make_instr(op, 1, 2, 3, 0), taken); };
  CHECK(cycles(Op::Add) == 1);
  CHECK(cycles(Op::Csrrs) == 1);
  CHECK(cycles(Op::Fence) == 1);
  CHECK(cycles(Op::Mul) == 1);
  CHECK(cycles(Op::Beq, false) == 1);
  CHECK(cycles(Op::Beq, true) == 2);
  CHECK(cycles(Op::Jal) == 2);
  CHECK(cycles(Op::Jalr) == 2);
  CHECK(cycles(Op::Lw) == 2);
  CHECK(cycles(Op::Sw) == 2);
  CHECK(cycles(Op::Div) == 37);
  CHECK(cycles(Op::Remu) == 37);
  TimingOutcome waits;
  waits.wait_states = 3;
  waits.extra_transactions = 1;
  CHECK(timing_cycles(make_instr(Op::Lw, 1, 2, 0, 0), waits) == 6);
}

TEST_CASE("M extension corner cases") {
  FlatMemory memory;
  ArchState s;
  const auto run = [&](Op op, std::uint32_t a, std::uint32_t b) {
    s.set_reg(1, a);
    s.set_reg(2, b);
    exec_functional(s, make_instr(op, 3, 1, 2, 0), memory);
    return s.reg(3);
  };
  CHECK(run(Op::Div, 7, 0) == 0xFFFFFFFF);
  CHECK(run(Op::Divu, 7, 0) == 0xFFFFFFFF);
  CHECK(run(Op::Rem, 7, 0) == 7);
  CHECK(run(Op::Remu, 7, 0) == 7);
  CHECK(run(Op::Div, 0x80000000, 0xFFFFFFFF) == 0x80000000);
  CHECK(run(Op::Rem, 0x80000000, 0xFFFFFFFF) == 0);
  CHECK(run(Op::Div, static_cast<std::uint32_t>(-7), 2) == static_cast<std::uint32_t>(-3));
  CHECK(run(Op::Rem, static_cast<std::uint32_t>(-7), 2) == static_cast<std::uint32_t>(-1));
  CHECK(run(Op::Mulh, 0x80000000, 0x80000000) == 0x40000000);
  CHECK(run(Op::Mulhu, 0xFFFFFFFF, 0xFFFFFFFF) == 0xFFFFFFFE);
  CHECK(run(Op::Mulhsu, 0xFFFFFFFF, 0xFFFFFFFF) == 0xFFFFFFFF);
  CHECK(run(Op::Mulhsu, 0x80000000, 0xFFFFFFFF) == 0x80000000);
  CHECK(run(Op::Mul, 0x12345678, 0x9abcdef0) == 0x242d2080);
}

TEST_CASE("x0 stays zero") {
  FlatMemory memory;
  ArchState s;
  s.set_reg(1, 5);
  const auto r = exec_functional(s, make_instr(Op::Addi, 0, 1, 0, 9), memory);
  CHECK(s.reg(0) == 0);
  REQUIRE(r.reg_write);
  CHECK(r.reg_write->rd == 0);
}

TEST_CASE("functional core traps and double faults") {
  FlatMemory memory;
  memory.add_region(0x1000'0000, 0x100);
  memory.write_bytes(0x1000'0000, {0x73, 0x00, 0x00, 0x00});  // ecall
  FunctionalCore core(memory, 0x1000'0000);
  core.state().csr.mtvec = 0x1000'0080;
  auto out = core.step();
  REQUIRE(out.trap_cause);
  CHECK(*out.trap_cause == cause::kEcallM);
  CHECK(core.state().pc == 0x1000'0080);
  CHECK(core.state().csr.mepc == 0x1000'0000);

  FunctionalCore bare(memory, 0x1000'0000);
  bare.step();
  CHECK(bare.state().halted);
  CHECK(bare.halt_reason() == HaltReason::DoubleFault);
}

TEST_CASE("csr access rules") {
  ArchState s;
  CHECK(csr_op(s, csr::kMscratch, CsrOp::ReadWrite, 0x55, true).ok);
  CHECK(s.csr.mscratch == 0x55);
  CHECK_FALSE(csr_op(s, csr::kCycle, CsrOp::ReadWrite, 1, true).ok);
  CHECK(csr_op(s, csr::kCycle, CsrOp::ReadSet, 0, false).ok);
  CHECK_FALSE(csr_op(s, 0x7C0, CsrOp::ReadSet, 0, false).ok);
  s.csr.minstret = 0x1'0000'0002ULL;
  CHECK(csr_op(s, csr::kInstreth, CsrOp::ReadSet, 0, false).old_value == 1);
}

TEST_CASE("interrupt priority and wfi wake") {
  ArchState s;
  s.timer_irq = true;
  s.external_irq = true;
  s.csr.mie = irq::kMti | irq::kMei;
  CHECK_FALSE(pending_interrupt(s));
  CHECK(wfi_should_wake(s));
  s.csr.mstatus |= mstatus::kMie;
  REQUIRE(pending_interrupt(s));
  CHECK(*pending_interrupt(s) == cause::kMachineExternalIrq);
}

}  // TEST_SUITE
