#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace croc::isa {

/// Opcode class. Drives the timing table and the per-class retirement statistics.
enum class Kind : std::uint8_t { Alu, Load, Store, Branch, Jal, Jalr, Mul, Div, Csr, System, Fence };

inline constexpr int kKindCount = 11;

enum class Op : std::uint8_t {
  Lui, Auipc, Jal, Jalr,
  Beq, Bne, Blt, Bge, Bltu, Bgeu,
  Lb, Lh, Lw, Lbu, Lhu,
  Sb, Sh, Sw,
  Addi, Slti, Sltiu, Xori, Ori, Andi, Slli, Srli, Srai,
  Add, Sub, Sll, Slt, Sltu, Xor, Srl, Sra, Or, And,
  Fence, FenceI, Ecall, Ebreak, Mret, Wfi,
  Csrrw, Csrrs, Csrrc, Csrrwi, Csrrsi, Csrrci,
  Mul, Mulh, Mulhsu, Mulhu, Div, Divu, Rem, Remu,
};

inline constexpr int kOpCount = static_cast<int>(Op::Remu) + 1;

/// Canonical decoded form. Compressed instructions are expanded into the
/// equivalent 32-bit operation with `was_compressed` set.
struct DecodedInstr {
  Op op = Op::Addi;
  Kind kind = Kind::Alu;
  std::uint8_t rd = 0;
  std::uint8_t rs1 = 0;  // uimm for the immediate CSR forms
  std::uint8_t rs2 = 0;
  std::int32_t imm = 0;
  std::uint16_t csr = 0;
  std::uint8_t width = 0;  // memory access size in bytes
  bool is_unsigned = false;
  bool was_compressed = false;
  std::uint32_t raw = 0;

  unsigned length() const { return was_compressed ? 2U : 4U; }
  bool writes_rd() const;
};

/// Equality over the architectural meaning only (ignores encoding origin).
bool same_operation(const DecodedInstr& a, const DecodedInstr& b);

enum class DecodeStatus : std::uint8_t { Ok, Illegal, NotCompressed };

struct DecodeResult {
  DecodeStatus status = DecodeStatus::Illegal;
  DecodedInstr instr;

  explicit operator bool() const { return status == DecodeStatus::Ok; }
};

DecodeResult decode(std::uint32_t word);
DecodeResult decode_compressed(std::uint16_t half);

/// Builds a DecodedInstr with kind, width and signedness filled in from `op`.
DecodedInstr make_instr(Op op, unsigned rd, unsigned rs1, unsigned rs2, std::int32_t imm, std::uint16_t csr = 0);

/// 32-bit encoding of a decoded instruction (compressed origin is ignored).
std::uint32_t encode(const DecodedInstr& instr);

Kind kind_of(Op op);
std::string_view mnemonic(Op op);
std::string_view kind_name(Kind kind);

/// e.g. "addi x1, x0, 5", "lw x5, -4(x2)", "csrrs x1, 0xb00, x0".
std::string disassemble(const DecodedInstr& instr);

}  // namespace croc::isa
