#include "croc/isa/instr.hpp"

#include "croc/bits.hpp"

#include <array>

#include <fmt/format.h>

namespace croc::isa {
namespace {

struct OpInfo {
  std::string_view name;
  Kind kind;
  std::uint8_t width;
  bool is_unsigned;
};

constexpr std::array<OpInfo, kOpCount> kOps{{
    {"lui", Kind::Alu, 0, false},      {"auipc", Kind::Alu, 0, false},
    {"jal", Kind::Jal, 0, false},      {"jalr", Kind::Jalr, 0, false},
    {"beq", Kind::Branch, 0, false},   {"bne", Kind::Branch, 0, false},
    {"blt", Kind::Branch, 0, false},   {"bge", Kind::Branch, 0, false},
    {"bltu", Kind::Branch, 0, false},  {"bgeu", Kind::Branch, 0, false},
    {"lb", Kind::Load, 1, false},      {"lh", Kind::Load, 2, false},
    {"lw", Kind::Load, 4, false},      {"lbu", Kind::Load, 1, true},
    {"lhu", Kind::Load, 2, true},      {"sb", Kind::Store, 1, false},
    {"sh", Kind::Store, 2, false},     {"sw", Kind::Store, 4, false},
    {"addi", Kind::Alu, 0, false},     {"slti", Kind::Alu, 0, false},
    {"sltiu", Kind::Alu, 0, false},    {"xori", Kind::Alu, 0, false},
    {"ori", Kind::Alu, 0, false},      {"andi", Kind::Alu, 0, false},
    {"slli", Kind::Alu, 0, false},     {"srli", Kind::Alu, 0, false},
    {"srai", Kind::Alu, 0, false},     {"add", Kind::Alu, 0, false},
    {"sub", Kind::Alu, 0, false},      {"sll", Kind::Alu, 0, false},
    {"slt", Kind::Alu, 0, false},      {"sltu", Kind::Alu, 0, false},
    {"xor", Kind::Alu, 0, false},      {"srl", Kind::Alu, 0, false},
    {"sra", Kind::Alu, 0, false},      {"or", Kind::Alu, 0, false},
    {"and", Kind::Alu, 0, false},      {"fence", Kind::Fence, 0, false},
    {"fence.i", Kind::Fence, 0, false}, {"ecall", Kind::System, 0, false},
    {"ebreak", Kind::System, 0, false}, {"mret", Kind::System, 0, false},
    {"wfi", Kind::System, 0, false},   {"csrrw", Kind::Csr, 0, false},
    {"csrrs", Kind::Csr, 0, false},    {"csrrc", Kind::Csr, 0, false},
    {"csrrwi", Kind::Csr, 0, false},   {"csrrsi", Kind::Csr, 0, false},
    {"csrrci", Kind::Csr, 0, false},   {"mul", Kind::Mul, 0, false},
    {"mulh", Kind::Mul, 0, false},     {"mulhsu", Kind::Mul, 0, false},
    {"mulhu", Kind::Mul, 0, false},    {"div", Kind::Div, 0, false},
    {"divu", Kind::Div, 0, false},     {"rem", Kind::Div, 0, false},
    {"remu", Kind::Div, 0, false},
}};

const OpInfo& info(Op op) { return kOps[static_cast<std::size_t>(op)]; }

DecodeResult ok(DecodedInstr instr) { return {DecodeStatus::Ok, instr}; }
DecodeResult illegal() { return {DecodeStatus::Illegal, {}}; }

std::int32_t imm_i(std::uint32_t w) { return static_cast<std::int32_t>(w) >> 20; }

std::int32_t imm_s(std::uint32_t w) {
  return (static_cast<std::int32_t>(w & 0xFE00'0000U) >> 20) | static_cast<std::int32_t>(bit_field(w, 11, 7));
}

std::int32_t imm_b(std::uint32_t w) {
  const std::uint32_t v = (bit(w, 31) << 12) | (bit(w, 7) << 11) | (bit_field(w, 30, 25) << 5) | (bit_field(w, 11, 8) << 1);
  return sext(v, 13);
}

std::int32_t imm_j(std::uint32_t w) {
  const std::uint32_t v =
      (bit(w, 31) << 20) | (bit_field(w, 19, 12) << 12) | (bit(w, 20) << 11) | (bit_field(w, 30, 21) << 1);
  return sext(v, 21);
}

constexpr std::array<Op, 8> kBranchOps{Op::Beq, Op::Bne, Op::Addi, Op::Addi, Op::Blt, Op::Bge, Op::Bltu, Op::Bgeu};
constexpr std::array<Op, 8> kLoadOps{Op::Lb, Op::Lh, Op::Lw, Op::Addi, Op::Lbu, Op::Lhu, Op::Addi, Op::Addi};
constexpr std::array<Op, 8> kCsrOps{Op::Addi, Op::Csrrw, Op::Csrrs, Op::Csrrc, Op::Addi, Op::Csrrwi, Op::Csrrsi, Op::Csrrci};
constexpr std::array<Op, 8> kMulOps{Op::Mul, Op::Mulh, Op::Mulhsu, Op::Mulhu, Op::Div, Op::Divu, Op::Rem, Op::Remu};

}  // namespace

Kind kind_of(Op op) { return info(op).kind; }
std::string_view mnemonic(Op op) { return info(op).name; }

std::string_view kind_name(Kind kind) {
  static constexpr std::array<std::string_view, kKindCount> names{
      "alu", "load", "store", "branch", "jal", "jalr", "mul", "div", "csr", "system", "fence"};
  return names[static_cast<std::size_t>(kind)];
}

bool DecodedInstr::writes_rd() const {
  switch (kind) {
    case Kind::Store:
    case Kind::Branch:
    case Kind::Fence:
    case Kind::System:
      return false;
    default:
      return true;
  }
}

bool same_operation(const DecodedInstr& a, const DecodedInstr& b) {
  return a.op == b.op && a.kind == b.kind && a.rd == b.rd && a.rs1 == b.rs1 && a.rs2 == b.rs2 && a.imm == b.imm &&
         a.csr == b.csr && a.width == b.width && a.is_unsigned == b.is_unsigned;
}

DecodedInstr make_instr(Op op, unsigned rd, unsigned rs1, unsigned rs2, std::int32_t imm, std::uint16_t csr) {
  DecodedInstr d;
  d.op = op;
  d.kind = info(op).kind;
  d.width = info(op).width;
  d.is_unsigned = info(op).is_unsigned;
  d.rd = static_cast<std::uint8_t>(rd & 31U);
  d.rs1 = static_cast<std::uint8_t>(rs1 & 31U);
  d.rs2 = static_cast<std::uint8_t>(rs2 & 31U);
  d.imm = imm;
  d.csr = csr;
  return d;
}

DecodeResult decode(std::uint32_t w) {
  if ((w & 3U) != 3U) return illegal();
  const unsigned rd = bit_field(w, 11, 7);
  const unsigned rs1 = bit_field(w, 19, 15);
  const unsigned rs2 = bit_field(w, 24, 20);
  const unsigned f3 = bit_field(w, 14, 12);
  const unsigned f7 = bit_field(w, 31, 25);

  DecodeResult r = illegal();
  switch (w & 0x7FU) {
    case 0x37:
      r = ok(make_instr(Op::Lui, rd, 0, 0, static_cast<std::int32_t>(w & 0xFFFF'F000U)));
      break;
    case 0x17:
      r = ok(make_instr(Op::Auipc, rd, 0, 0, static_cast<std::int32_t>(w & 0xFFFF'F000U)));
      break;
    case 0x6F:
      r = ok(make_instr(Op::Jal, rd, 0, 0, imm_j(w)));
      break;
    case 0x67:
      if (f3 == 0) r = ok(make_instr(Op::Jalr, rd, rs1, 0, imm_i(w)));
      break;
    case 0x63:
      if (f3 != 2 && f3 != 3) r = ok(make_instr(kBranchOps[f3], 0, rs1, rs2, imm_b(w)));
      break;
    case 0x03:
      if (f3 != 3 && f3 < 6) r = ok(make_instr(kLoadOps[f3], rd, rs1, 0, imm_i(w)));
      break;
    case 0x23:
      if (f3 < 3) r = ok(make_instr(f3 == 0 ? Op::Sb : f3 == 1 ? Op::Sh : Op::Sw, 0, rs1, rs2, imm_s(w)));
      break;
    case 0x13: {
      const std::int32_t imm = imm_i(w);
      switch (f3) {
        case 0: r = ok(make_instr(Op::Addi, rd, rs1, 0, imm)); break;
        case 2: r = ok(make_instr(Op::Slti, rd, rs1, 0, imm)); break;
        case 3: r = ok(make_instr(Op::Sltiu, rd, rs1, 0, imm)); break;
        case 4: r = ok(make_instr(Op::Xori, rd, rs1, 0, imm)); break;
        case 6: r = ok(make_instr(Op::Ori, rd, rs1, 0, imm)); break;
        case 7: r = ok(make_instr(Op::Andi, rd, rs1, 0, imm)); break;
        case 1:
          if (f7 == 0) r = ok(make_instr(Op::Slli, rd, rs1, 0, static_cast<std::int32_t>(rs2)));
          break;
        case 5:
          if (f7 == 0) r = ok(make_instr(Op::Srli, rd, rs1, 0, static_cast<std::int32_t>(rs2)));
          if (f7 == 0x20) r = ok(make_instr(Op::Srai, rd, rs1, 0, static_cast<std::int32_t>(rs2)));
          break;
        default: break;
      }
      break;
    }
    case 0x33:
      if (f7 == 1) {
        r = ok(make_instr(kMulOps[f3], rd, rs1, rs2, 0));
      } else if (f7 == 0) {
        static constexpr std::array<Op, 8> ops{Op::Add, Op::Sll, Op::Slt, Op::Sltu, Op::Xor, Op::Srl, Op::Or, Op::And};
        r = ok(make_instr(ops[f3], rd, rs1, rs2, 0));
      } else if (f7 == 0x20 && (f3 == 0 || f3 == 5)) {
        r = ok(make_instr(f3 == 0 ? Op::Sub : Op::Sra, rd, rs1, rs2, 0));
      }
      break;
    case 0x0F:
      if (f3 == 0) r = ok(make_instr(Op::Fence, rd, rs1, 0, imm_i(w)));
      if (f3 == 1) r = ok(make_instr(Op::FenceI, rd, rs1, 0, imm_i(w)));
      break;
    case 0x73:
      if (f3 == 0) {
        switch (w) {
          case 0x0000'0073: r = ok(make_instr(Op::Ecall, 0, 0, 0, 0)); break;
          case 0x0010'0073: r = ok(make_instr(Op::Ebreak, 0, 0, 0, 0)); break;
          case 0x3020'0073: r = ok(make_instr(Op::Mret, 0, 0, 0, 0)); break;
          case 0x1050'0073: r = ok(make_instr(Op::Wfi, 0, 0, 0, 0)); break;
          default: break;
        }
      } else if (f3 != 4) {
        r = ok(make_instr(kCsrOps[f3], rd, rs1, 0, 0, static_cast<std::uint16_t>(w >> 20)));
      }
      break;
    default:
      break;
  }
  if (r) r.instr.raw = w;
  return r;
}

namespace {

// Compressed register fields address x8..x15.
unsigned creg(std::uint32_t field) { return 8U + (field & 7U); }

DecodeResult expand(std::uint16_t half) {
  const std::uint32_t h = half;
  const unsigned f3 = bit_field(h, 15, 13);
  const unsigned rd_full = bit_field(h, 11, 7);
  const unsigned rs2_full = bit_field(h, 6, 2);
  const std::int32_t imm6 = sext((bit(h, 12) << 5) | bit_field(h, 6, 2), 6);

  switch (h & 3U) {
    case 0: {
      const unsigned rd_c = creg(bit_field(h, 4, 2));
      const unsigned rs1_c = creg(bit_field(h, 9, 7));
      const std::uint32_t lw_off = (bit_field(h, 12, 10) << 3) | (bit(h, 6) << 2) | (bit(h, 5) << 6);
      switch (f3) {
        case 0: {
          const std::uint32_t nzuimm =
              (bit_field(h, 12, 11) << 4) | (bit_field(h, 10, 7) << 6) | (bit(h, 6) << 2) | (bit(h, 5) << 3);
          if (nzuimm == 0) return illegal();
          return ok(make_instr(Op::Addi, rd_c, 2, 0, static_cast<std::int32_t>(nzuimm)));
        }
        case 2: return ok(make_instr(Op::Lw, rd_c, rs1_c, 0, static_cast<std::int32_t>(lw_off)));
        case 6: return ok(make_instr(Op::Sw, 0, rs1_c, rd_c, static_cast<std::int32_t>(lw_off)));
        default: return illegal();
      }
    }
    case 1: {
      const std::int32_t j_off = sext((bit(h, 12) << 11) | (bit(h, 11) << 4) | (bit_field(h, 10, 9) << 8) |
                                          (bit(h, 8) << 10) | (bit(h, 7) << 6) | (bit(h, 6) << 7) |
                                          (bit_field(h, 5, 3) << 1) | (bit(h, 2) << 5),
                                      12);
      const std::int32_t b_off = sext((bit(h, 12) << 8) | (bit_field(h, 11, 10) << 3) | (bit_field(h, 6, 5) << 6) |
                                          (bit_field(h, 4, 3) << 1) | (bit(h, 2) << 5),
                                      9);
      const unsigned rs1_c = creg(bit_field(h, 9, 7));
      switch (f3) {
        case 0: return ok(make_instr(Op::Addi, rd_full, rd_full, 0, imm6));
        case 1: return ok(make_instr(Op::Jal, 1, 0, 0, j_off));
        case 2: return ok(make_instr(Op::Addi, rd_full, 0, 0, imm6));
        case 3:
          if (rd_full == 2) {
            const std::int32_t nzimm = sext((bit(h, 12) << 9) | (bit(h, 6) << 4) | (bit(h, 5) << 6) |
                                                (bit_field(h, 4, 3) << 7) | (bit(h, 2) << 5),
                                            10);
            if (nzimm == 0) return illegal();
            return ok(make_instr(Op::Addi, 2, 2, 0, nzimm));
          } else {
            const std::int32_t nzimm = sext((bit(h, 12) << 17) | (bit_field(h, 6, 2) << 12), 18);
            if (nzimm == 0) return illegal();
            return ok(make_instr(Op::Lui, rd_full, 0, 0, nzimm));
          }
        case 4:
          switch (bit_field(h, 11, 10)) {
            case 0:
              if (bit(h, 12)) return illegal();
              return ok(make_instr(Op::Srli, rs1_c, rs1_c, 0, static_cast<std::int32_t>(rs2_full)));
            case 1:
              if (bit(h, 12)) return illegal();
              return ok(make_instr(Op::Srai, rs1_c, rs1_c, 0, static_cast<std::int32_t>(rs2_full)));
            case 2: return ok(make_instr(Op::Andi, rs1_c, rs1_c, 0, imm6));
            default: {
              if (bit(h, 12)) return illegal();
              static constexpr std::array<Op, 4> ops{Op::Sub, Op::Xor, Op::Or, Op::And};
              return ok(make_instr(ops[bit_field(h, 6, 5)], rs1_c, rs1_c, creg(bit_field(h, 4, 2)), 0));
            }
          }
        case 5: return ok(make_instr(Op::Jal, 0, 0, 0, j_off));
        case 6: return ok(make_instr(Op::Beq, 0, rs1_c, 0, b_off));
        default: return ok(make_instr(Op::Bne, 0, rs1_c, 0, b_off));
      }
    }
    case 2:
      switch (f3) {
        case 0:
          if (bit(h, 12)) return illegal();
          return ok(make_instr(Op::Slli, rd_full, rd_full, 0, static_cast<std::int32_t>(rs2_full)));
        case 2: {
          if (rd_full == 0) return illegal();
          const std::uint32_t off = (bit(h, 12) << 5) | (bit_field(h, 6, 4) << 2) | (bit_field(h, 3, 2) << 6);
          return ok(make_instr(Op::Lw, rd_full, 2, 0, static_cast<std::int32_t>(off)));
        }
        case 4:
          if (!bit(h, 12)) {
            if (rs2_full == 0) {
              if (rd_full == 0) return illegal();
              return ok(make_instr(Op::Jalr, 0, rd_full, 0, 0));
            }
            return ok(make_instr(Op::Add, rd_full, 0, rs2_full, 0));
          }
          if (rs2_full == 0) {
            if (rd_full == 0) return ok(make_instr(Op::Ebreak, 0, 0, 0, 0));
            return ok(make_instr(Op::Jalr, 1, rd_full, 0, 0));
          }
          return ok(make_instr(Op::Add, rd_full, rd_full, rs2_full, 0));
        case 6: {
          const std::uint32_t off = (bit_field(h, 12, 9) << 2) | (bit_field(h, 8, 7) << 6);
          return ok(make_instr(Op::Sw, 0, 2, rs2_full, static_cast<std::int32_t>(off)));
        }
        default:
          return illegal();
      }
    default:
      return {DecodeStatus::NotCompressed, {}};
  }
}

}  // namespace

DecodeResult decode_compressed(std::uint16_t half) {
  DecodeResult r = expand(half);
  if (r) {
    r.instr.was_compressed = true;
    r.instr.raw = half;
  }
  return r;
}

std::uint32_t encode(const DecodedInstr& d) {
  const auto u = [](std::int32_t v) { return static_cast<std::uint32_t>(v); };
  const std::uint32_t rd = d.rd;
  const std::uint32_t rs1 = d.rs1;
  const std::uint32_t rs2 = d.rs2;
  const std::uint32_t imm = u(d.imm);
  const auto r_type = [&](std::uint32_t f7, std::uint32_t f3) {
    return (f7 << 25) | (rs2 << 20) | (rs1 << 15) | (f3 << 12) | (rd << 7) | 0x33U;
  };
  const auto i_type = [&](std::uint32_t opcode, std::uint32_t f3) {
    return ((imm & 0xFFFU) << 20) | (rs1 << 15) | (f3 << 12) | (rd << 7) | opcode;
  };
  const auto s_type = [&](std::uint32_t f3) {
    return (bit_field(imm, 11, 5) << 25) | (rs2 << 20) | (rs1 << 15) | (f3 << 12) | (bit_field(imm, 4, 0) << 7) | 0x23U;
  };
  const auto b_type = [&](std::uint32_t f3) {
    return (bit(imm, 12) << 31) | (bit_field(imm, 10, 5) << 25) | (rs2 << 20) | (rs1 << 15) | (f3 << 12) |
           (bit_field(imm, 4, 1) << 8) | (bit(imm, 11) << 7) | 0x63U;
  };
  const auto shift = [&](std::uint32_t f7, std::uint32_t f3) {
    return (f7 << 25) | ((imm & 31U) << 20) | (rs1 << 15) | (f3 << 12) | (rd << 7) | 0x13U;
  };
  const auto csr = [&](std::uint32_t f3) {
    return (static_cast<std::uint32_t>(d.csr) << 20) | (rs1 << 15) | (f3 << 12) | (rd << 7) | 0x73U;
  };

  switch (d.op) {
    case Op::Lui: return (imm & 0xFFFF'F000U) | (rd << 7) | 0x37U;
    case Op::Auipc: return (imm & 0xFFFF'F000U) | (rd << 7) | 0x17U;
    case Op::Jal:
      return (bit(imm, 20) << 31) | (bit_field(imm, 10, 1) << 21) | (bit(imm, 11) << 20) |
             (bit_field(imm, 19, 12) << 12) | (rd << 7) | 0x6FU;
    case Op::Jalr: return i_type(0x67, 0);
    case Op::Beq: return b_type(0);
    case Op::Bne: return b_type(1);
    case Op::Blt: return b_type(4);
    case Op::Bge: return b_type(5);
    case Op::Bltu: return b_type(6);
    case Op::Bgeu: return b_type(7);
    case Op::Lb: return i_type(0x03, 0);
    case Op::Lh: return i_type(0x03, 1);
    case Op::Lw: return i_type(0x03, 2);
    case Op::Lbu: return i_type(0x03, 4);
    case Op::Lhu: return i_type(0x03, 5);
    case Op::Sb: return s_type(0);
    case Op::Sh: return s_type(1);
    case Op::Sw: return s_type(2);
    case Op::Addi: return i_type(0x13, 0);
    case Op::Slti: return i_type(0x13, 2);
    case Op::Sltiu: return i_type(0x13, 3);
    case Op::Xori: return i_type(0x13, 4);
    case Op::Ori: return i_type(0x13, 6);
    case Op::Andi: return i_type(0x13, 7);
    case Op::Slli: return shift(0, 1);
    case Op::Srli: return shift(0, 5);
    case Op::Srai: return shift(0x20, 5);
    case Op::Add: return r_type(0, 0);
    case Op::Sub: return r_type(0x20, 0);
    case Op::Sll: return r_type(0, 1);
    case Op::Slt: return r_type(0, 2);
    case Op::Sltu: return r_type(0, 3);
    case Op::Xor: return r_type(0, 4);
    case Op::Srl: return r_type(0, 5);
    case Op::Sra: return r_type(0x20, 5);
    case Op::Or: return r_type(0, 6);
    case Op::And: return r_type(0, 7);
    case Op::Fence: return i_type(0x0F, 0);
    case Op::FenceI: return i_type(0x0F, 1);
    case Op::Ecall: return 0x0000'0073U;
    case Op::Ebreak: return 0x0010'0073U;
    case Op::Mret: return 0x3020'0073U;
    case Op::Wfi: return 0x1050'0073U;
    case Op::Csrrw: return csr(1);
    case Op::Csrrs: return csr(2);
    case Op::Csrrc: return csr(3);
    case Op::Csrrwi: return csr(5);
    case Op::Csrrsi: return csr(6);
    case Op::Csrrci: return csr(7);
    case Op::Mul: return r_type(1, 0);
    case Op::Mulh: return r_type(1, 1);
    case Op::Mulhsu: return r_type(1, 2);
    case Op::Mulhu: return r_type(1, 3);
    case Op::Div: return r_type(1, 4);
    case Op::Divu: return r_type(1, 5);
    case Op::Rem: return r_type(1, 6);
    case Op::Remu: return r_type(1, 7);
  }
  return 0;
}

std::string disassemble(const DecodedInstr& d) {
  const std::string_view name = mnemonic(d.op);
  switch (d.op) {
    case Op::Lui:
    case Op::Auipc:
      return fmt::format("{} x{}, {}", name, d.rd, static_cast<std::uint32_t>(d.imm) >> 12);
    case Op::Jal:
      return fmt::format("{} x{}, {}", name, d.rd, d.imm);
    case Op::Jalr:
      return fmt::format("{} x{}, {}(x{})", name, d.rd, d.imm, d.rs1);
    case Op::Fence:
    case Op::FenceI:
    case Op::Ecall:
    case Op::Ebreak:
    case Op::Mret:
    case Op::Wfi:
      return std::string(name);
    default:
      break;
  }
  switch (d.kind) {
    case Kind::Branch: return fmt::format("{} x{}, x{}, {}", name, d.rs1, d.rs2, d.imm);
    case Kind::Load: return fmt::format("{} x{}, {}(x{})", name, d.rd, d.imm, d.rs1);
    case Kind::Store: return fmt::format("{} x{}, {}(x{})", name, d.rs2, d.imm, d.rs1);
    case Kind::Csr:
      if (d.op == Op::Csrrwi || d.op == Op::Csrrsi || d.op == Op::Csrrci)
        return fmt::format("{} x{}, {:#x}, {}", name, d.rd, d.csr, d.rs1);
      return fmt::format("{} x{}, {:#x}, x{}", name, d.rd, d.csr, d.rs1);
    case Kind::Alu:
      if (static_cast<int>(d.op) >= static_cast<int>(Op::Add)) break;
      return fmt::format("{} x{}, x{}, {}", name, d.rd, d.rs1, d.imm);
    default:
      break;
  }
  return fmt::format("{} x{}, x{}, x{}", name, d.rd, d.rs1, d.rs2);
}

}  // namespace croc::isa
