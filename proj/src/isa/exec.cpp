#include "croc/isa/exec.hpp"

#include <limits>

namespace croc::isa {
namespace {

std::uint32_t mul_high(std::int64_t a, std::int64_t b) { return static_cast<std::uint32_t>((a * b) >> 32); }

std::uint32_t mulhsu(std::uint32_t a, std::uint32_t b) {
  // |signed| * unsigned stays below 2^63.
  const std::int64_t product = static_cast<std::int64_t>(static_cast<std::int32_t>(a)) * static_cast<std::int64_t>(b);
  return static_cast<std::uint32_t>(static_cast<std::uint64_t>(product) >> 32);
}

std::uint32_t divide(Op op, std::uint32_t a, std::uint32_t b) {
  const auto sa = static_cast<std::int32_t>(a);
  const auto sb = static_cast<std::int32_t>(b);
  const bool overflow = sa == std::numeric_limits<std::int32_t>::min() && sb == -1;
  switch (op) {
    case Op::Div:
      if (b == 0) return 0xFFFF'FFFFU;
      if (overflow) return a;
      return static_cast<std::uint32_t>(sa / sb);
    case Op::Divu:
      return b == 0 ? 0xFFFF'FFFFU : a / b;
    case Op::Rem:
      if (b == 0) return a;
      if (overflow) return 0;
      return static_cast<std::uint32_t>(sa % sb);
    default:
      return b == 0 ? a : a % b;
  }
}

std::uint32_t alu(const DecodedInstr& d, std::uint32_t a, std::uint32_t b) {
  const auto sa = static_cast<std::int32_t>(a);
  const auto sb = static_cast<std::int32_t>(b);
  switch (d.op) {
    case Op::Addi:
    case Op::Add: return a + b;
    case Op::Sub: return a - b;
    case Op::Slti:
    case Op::Slt: return sa < sb ? 1U : 0U;
    case Op::Sltiu:
    case Op::Sltu: return a < b ? 1U : 0U;
    case Op::Xori:
    case Op::Xor: return a ^ b;
    case Op::Ori:
    case Op::Or: return a | b;
    case Op::Andi:
    case Op::And: return a & b;
    case Op::Slli:
    case Op::Sll: return a << (b & 31U);
    case Op::Srli:
    case Op::Srl: return a >> (b & 31U);
    case Op::Srai:
    case Op::Sra: return static_cast<std::uint32_t>(sa >> (b & 31U));
    case Op::Mul: return a * b;
    case Op::Mulh: return mul_high(sa, sb);
    case Op::Mulhsu: return mulhsu(a, b);
    case Op::Mulhu: return static_cast<std::uint32_t>((static_cast<std::uint64_t>(a) * b) >> 32);
    default: return divide(d.op, a, b);
  }
}

bool branch_taken(Op op, std::uint32_t a, std::uint32_t b) {
  const auto sa = static_cast<std::int32_t>(a);
  const auto sb = static_cast<std::int32_t>(b);
  switch (op) {
    case Op::Beq: return a == b;
    case Op::Bne: return a != b;
    case Op::Blt: return sa < sb;
    case Op::Bge: return sa >= sb;
    case Op::Bltu: return a < b;
    default: return a >= b;
  }
}

std::uint32_t extend_load(const DecodedInstr& d, std::uint32_t raw) {
  switch (d.width) {
    case 1: return d.is_unsigned ? (raw & 0xFFU) : static_cast<std::uint32_t>(static_cast<std::int8_t>(raw));
    case 2: return d.is_unsigned ? (raw & 0xFFFFU) : static_cast<std::uint32_t>(static_cast<std::int16_t>(raw));
    default: return raw;
  }
}

Retirement trap(Retirement r, std::uint32_t c, std::uint32_t tval) {
  r.next_pc = r.pc;
  r.trap = Trap{c, tval};
  return r;
}

}  // namespace

Retirement exec_functional(ArchState& s, const DecodedInstr& d, DataPort& port) {
  Retirement r;
  r.pc = s.pc;
  r.next_pc = s.pc + d.length();
  const std::uint32_t a = s.reg(d.rs1);
  const std::uint32_t b = s.reg(d.rs2);
  const std::uint32_t imm = static_cast<std::uint32_t>(d.imm);
  const std::uint32_t align_mask = s.c_ext ? 1U : 3U;
  std::optional<std::uint32_t> result;

  switch (d.kind) {
    case Kind::Alu:
      if (d.op == Op::Lui) {
        result = imm;
      } else if (d.op == Op::Auipc) {
        result = s.pc + imm;
      } else {
        const bool immediate = static_cast<int>(d.op) < static_cast<int>(Op::Add);
        result = alu(d, a, immediate ? imm : b);
      }
      break;
    case Kind::Mul:
    case Kind::Div:
      result = alu(d, a, b);
      break;
    case Kind::Jal:
    case Kind::Jalr: {
      const std::uint32_t target = d.kind == Kind::Jal ? s.pc + imm : (a + imm) & ~1U;
      if (target & align_mask) return trap(r, cause::kInstrMisaligned, target);
      result = s.pc + d.length();
      r.next_pc = target;
      r.branch_taken = true;
      break;
    }
    case Kind::Branch:
      if (branch_taken(d.op, a, b)) {
        const std::uint32_t target = s.pc + imm;
        if (target & align_mask) return trap(r, cause::kInstrMisaligned, target);
        r.next_pc = target;
        r.branch_taken = true;
      }
      break;
    case Kind::Load: {
      const std::uint32_t addr = a + imm;
      const auto raw = port.load(addr, d.width);
      if (!raw) return trap(r, cause::kLoadAccessFault, addr);
      result = extend_load(d, *raw);
      r.mem = MemEffect{addr, d.width, *result, false};
      break;
    }
    case Kind::Store: {
      const std::uint32_t addr = a + imm;
      const std::uint32_t value = d.width == 4 ? b : b & ((1U << (8U * d.width)) - 1U);
      if (!port.store(addr, d.width, value)) return trap(r, cause::kStoreAccessFault, addr);
      r.mem = MemEffect{addr, d.width, value, true};
      break;
    }
    case Kind::Csr: {
      const bool immediate = d.op == Op::Csrrwi || d.op == Op::Csrrsi || d.op == Op::Csrrci;
      const std::uint32_t source = immediate ? d.rs1 : a;
      CsrOp op = CsrOp::ReadWrite;
      if (d.op == Op::Csrrs || d.op == Op::Csrrsi) op = CsrOp::ReadSet;
      if (d.op == Op::Csrrc || d.op == Op::Csrrci) op = CsrOp::ReadClear;
      const bool write = op == CsrOp::ReadWrite || d.rs1 != 0;
      const CsrAccess access = csr_op(s, d.csr, op, source, write);
      if (!access.ok) return trap(r, cause::kIllegalInstr, d.raw);
      r.wrote_mcycle = access.wrote_mcycle;
      r.wrote_minstret = access.wrote_minstret;
      result = access.old_value;
      break;
    }
    case Kind::System:
      switch (d.op) {
        case Op::Ecall: return trap(r, cause::kEcallM, 0);
        case Op::Ebreak: return trap(r, cause::kBreakpoint, s.pc);
        case Op::Mret:
          take_mret(s);
          r.next_pc = s.pc;
          r.branch_taken = true;
          return r;
        default:
          r.wait_for_interrupt = true;
          break;
      }
      break;
    case Kind::Fence:
      break;
  }

  if (result && d.writes_rd()) {
    s.set_reg(d.rd, *result);
    r.reg_write = RegWrite{d.rd, d.rd == 0 ? 0U : *result};
  }
  s.pc = r.next_pc;
  return r;
}

unsigned base_cycles(const DecodedInstr& d, bool taken) {
  switch (d.kind) {
    case Kind::Branch: return taken ? 2 : 1;
    case Kind::Jal:
    case Kind::Jalr:
    case Kind::Load:
    case Kind::Store: return 2;
    case Kind::Div: return kDivCycles;
    case Kind::System: return d.op == Op::Mret ? 2 : 1;
    default: return 1;
  }
}

unsigned timing_cycles(const DecodedInstr& d, const TimingOutcome& outcome) {
  unsigned base = 0;
  if (outcome.trapped) {
    // Fetch (plus the data slot for memory ops) followed by one redirect cycle.
    base = (d.kind == Kind::Load || d.kind == Kind::Store) ? 3 : 2;
  } else {
    base = base_cycles(d, outcome.taken);
  }
  return base + outcome.extra_transactions + outcome.wait_states;
}

}  // namespace croc::isa
