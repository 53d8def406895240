#include "croc/firmware/demos.hpp"

#include "croc/firmware/assembler.hpp"
#include "croc/periph/gpio.hpp"
#include "croc/periph/neopixel.hpp"
#include "croc/periph/uart.hpp"

#include <array>
#include <random>
#include <stdexcept>

namespace croc::fw {

using isa::Op;
namespace uart_reg = periph::uart_reg;
namespace uart_status = periph::uart_status;
namespace gpio_reg = periph::gpio_reg;
namespace neo_reg = periph::neo_reg;

namespace {

// puts(a0 = NUL-terminated string); uses t0, t1; s0 holds the UART base.
void emit_puts(Assembler& a) {
  a.label("puts");
  a.label("puts_loop");
  a.load(Op::Lbu, reg::t0, reg::a0, 0);
  a.branch(Op::Beq, reg::t0, reg::zero, "puts_done");
  a.label("puts_wait");
  a.load(Op::Lw, reg::t1, reg::s0, uart_reg::kStatus);
  a.opi(Op::Andi, reg::t1, reg::t1, uart_status::kTxFull);
  a.branch(Op::Bne, reg::t1, reg::zero, "puts_wait");
  a.store(Op::Sw, reg::t0, reg::s0, uart_reg::kTxData);
  a.opi(Op::Addi, reg::a0, reg::a0, 1);
  a.j("puts_loop");
  a.label("puts_done");
  a.ret();
}

}  // namespace

loader::FirmwareImage hello_program(const soc::SocConfig& config, std::string_view text) {
  Assembler a(config.reset_pc);
  a.li(reg::s0, config.uart_base);
  a.la(reg::a0, "message");
  a.call("puts");
  a.label("drain");
  a.load(Op::Lw, reg::t1, reg::s0, uart_reg::kStatus);
  a.opi(Op::Andi, reg::t1, reg::t1, static_cast<std::int32_t>(uart_status::kTxEmpty | uart_status::kTxBusy));
  a.opi(Op::Addi, reg::t2, reg::zero, static_cast<std::int32_t>(uart_status::kTxEmpty));
  a.branch(Op::Bne, reg::t1, reg::t2, "drain");
  a.system(Op::Ebreak);
  emit_puts(a);
  a.label("message");
  a.ascii(text);
  a.ascii(std::string_view("\0", 1));
  a.align(4);
  return a.image();
}

loader::FirmwareImage board_demo_program(const soc::SocConfig& config) {
  const bool neo = config.neopixel_base.has_value();
  Assembler a(config.reset_pc);
  a.li(reg::sp, config.sram1_base + config.sram1_size);
  a.li(reg::s0, config.uart_base);
  a.li(reg::s2, config.gpio_base);
  if (neo) a.li(reg::s3, *config.neopixel_base);

  a.la(reg::a0, "banner");
  a.call("puts");

  a.li(reg::t0, 0x00FF'00FF);
  a.store(Op::Sw, reg::t0, reg::s2, gpio_reg::kDir);
  a.li(reg::t0, 0xFF);
  a.store(Op::Sw, reg::t0, reg::s2, gpio_reg::kOut);

  if (neo) {
    constexpr std::array<std::uint32_t, 8> kGradient = {0xFF0000, 0xFF7F00, 0xFFFF00, 0x00FF00,
                                                        0x00FFFF, 0x0000FF, 0x7F00FF, 0xFF00FF};
    a.li(reg::t0, kGradient.size());
    a.store(Op::Sw, reg::t0, reg::s3, neo_reg::kLedCount);
    for (std::size_t i = 0; i < kGradient.size(); ++i) {
      a.li(reg::t0, kGradient[i]);
      a.store(Op::Sw, reg::t0, reg::s3, static_cast<std::int32_t>(neo_reg::kFrameBuffer + 4 * i));
    }
    a.opi(Op::Addi, reg::t0, reg::zero, 1);
    a.store(Op::Sw, reg::t0, reg::s3, neo_reg::kCtrl);
  }

  a.opi(Op::Addi, reg::s5, reg::zero, 0);  // last received byte
  a.label("echo");
  a.load(Op::Lw, reg::t1, reg::s0, uart_reg::kStatus);
  a.opi(Op::Andi, reg::t1, reg::t1, uart_status::kRxAvail);
  a.branch(Op::Beq, reg::t1, reg::zero, "mirror");
  a.load(Op::Lw, reg::s5, reg::s0, uart_reg::kRxData);
  a.label("tx_wait");
  a.load(Op::Lw, reg::t1, reg::s0, uart_reg::kStatus);
  a.opi(Op::Andi, reg::t1, reg::t1, uart_status::kTxFull);
  a.branch(Op::Bne, reg::t1, reg::zero, "tx_wait");
  a.store(Op::Sw, reg::s5, reg::s0, uart_reg::kTxData);
  if (neo) {
    a.label("neo_wait");
    a.load(Op::Lw, reg::t1, reg::s3, neo_reg::kStatus);
    a.opi(Op::Andi, reg::t1, reg::t1, periph::neo_status::kBusy);
    a.branch(Op::Bne, reg::t1, reg::zero, "neo_wait");
    a.opi(Op::Slli, reg::t0, reg::s5, 8);  // byte as green
    a.store(Op::Sw, reg::t0, reg::s3, neo_reg::kFrameBuffer);
    a.opi(Op::Addi, reg::t0, reg::zero, 1);
    a.store(Op::Sw, reg::t0, reg::s3, neo_reg::kCtrl);
  }
  a.label("mirror");
  a.load(Op::Lw, reg::t1, reg::s2, gpio_reg::kIn);
  a.opi(Op::Srli, reg::t1, reg::t1, 8);
  a.opi(Op::Andi, reg::t1, reg::t1, 0xFF);
  a.opi(Op::Slli, reg::t1, reg::t1, 16);
  a.op(Op::Or, reg::t1, reg::t1, reg::s5);
  a.store(Op::Sw, reg::t1, reg::s2, gpio_reg::kOut);
  a.j("echo");

  emit_puts(a);
  a.label("banner");
  static constexpr char kBanner[] = "Croc board demo: type to echo\r\n";
  a.ascii(std::string_view(kBanner, sizeof kBanner));  // keeps the NUL
  a.align(4);
  return a.image();
}

loader::FirmwareImage alu_block_program(std::uint32_t origin, std::size_t count, std::uint64_t seed) {
  static constexpr std::array<Op, 10> kReg = {Op::Add, Op::Sub, Op::Xor, Op::Or,  Op::And,
                                              Op::Sll, Op::Srl, Op::Sra, Op::Slt, Op::Sltu};
  static constexpr std::array<Op, 9> kImm = {Op::Addi,  Op::Xori, Op::Ori,  Op::Andi, Op::Slti,
                                             Op::Sltiu, Op::Slli, Op::Srli, Op::Srai};
  std::mt19937_64 rng(seed);
  const auto pick_reg = [&] { return static_cast<unsigned>(1 + rng() % 31); };
  Assembler a(origin);
  for (std::size_t i = 0; i < count; ++i) {
    const unsigned form = static_cast<unsigned>(rng() % 8);
    if (form < 4) {
      a.op(kReg[rng() % kReg.size()], pick_reg(), pick_reg(), pick_reg());
    } else if (form < 7) {
      const Op op = kImm[rng() % kImm.size()];
      const bool shift = op == Op::Slli || op == Op::Srli || op == Op::Srai;
      const auto imm = shift ? static_cast<std::int32_t>(rng() % 32) : static_cast<std::int32_t>(rng() % 4096) - 2048;
      a.opi(op, pick_reg(), pick_reg(), imm);
    } else {
      a.emit(isa::make_instr(Op::Lui, pick_reg(), 0, 0, static_cast<std::int32_t>(rng() & 0xFFFF'F000U)));
    }
  }
  a.system(Op::Ebreak);
  return a.image();
}

loader::FirmwareImage demo_program(const std::string& name, const soc::SocConfig& config) {
  if (name == "hello") return hello_program(config);
  if (name == "board") return board_demo_program(config);
  if (name == "alu") return alu_block_program(config.reset_pc, 10'000, 1);
  throw std::invalid_argument("unknown demo '" + name + "' (expected hello, board or alu)");
}

}  // namespace croc::fw
