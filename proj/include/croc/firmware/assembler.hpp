#pragma once

#include "croc/isa/instr.hpp"
#include "croc/loader/loader.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace croc::fw {

namespace reg {
inline constexpr unsigned zero = 0, ra = 1, sp = 2, gp = 3, tp = 4;
inline constexpr unsigned t0 = 5, t1 = 6, t2 = 7, s0 = 8, s1 = 9;
inline constexpr unsigned a0 = 10, a1 = 11, a2 = 12, a3 = 13, a4 = 14, a5 = 15, a6 = 16, a7 = 17;
inline constexpr unsigned s2 = 18, s3 = 19, s4 = 20, s5 = 21;
inline constexpr unsigned t3 = 28, t4 = 29, t5 = 30, t6 = 31;
}  // namespace reg

class AsmError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Small program builder on top of isa::encode(). Label references are
/// resolved when the program is finished.
class Assembler {
 public:
  explicit Assembler(std::uint32_t origin) : origin_(origin) {}

  std::uint32_t origin() const { return origin_; }
  std::uint32_t here() const { return origin_ + static_cast<std::uint32_t>(bytes_.size()); }
  void label(const std::string& name);

  void emit(const isa::DecodedInstr& instr);
  void emit_word(std::uint32_t word);
  void emit_half(std::uint16_t half);
  void ascii(std::string_view text);
  void align(unsigned n);

  void op(isa::Op op, unsigned rd, unsigned rs1, unsigned rs2);
  void opi(isa::Op op, unsigned rd, unsigned rs1, std::int32_t imm);
  void load(isa::Op op, unsigned rd, unsigned base, std::int32_t offset);
  void store(isa::Op op, unsigned src, unsigned base, std::int32_t offset);
  void csr(isa::Op op, unsigned rd, std::uint16_t csr, unsigned rs1_or_uimm);
  void system(isa::Op op);

  void li(unsigned rd, std::uint32_t value);
  void la(unsigned rd, const std::string& target);
  void mv(unsigned rd, unsigned rs) { opi(isa::Op::Addi, rd, rs, 0); }
  void nop() { opi(isa::Op::Addi, 0, 0, 0); }
  void branch(isa::Op op, unsigned rs1, unsigned rs2, const std::string& target);
  void jal(unsigned rd, const std::string& target);
  void j(const std::string& target) { jal(reg::zero, target); }
  void call(const std::string& target) { jal(reg::ra, target); }
  void ret();

  std::uint32_t address_of(const std::string& name) const;
  /// Resolves all references. Throws AsmError on unknown labels or out-of-range offsets.
  std::vector<std::uint8_t> finish() const;
  loader::FirmwareImage image() const;

 private:
  enum class FixKind { Branch, Jal, PcrelPair };
  struct Fixup {
    std::size_t offset;
    FixKind kind;
    std::string target;
  };

  std::uint32_t origin_;
  std::vector<std::uint8_t> bytes_;
  std::map<std::string, std::uint32_t> labels_;
  std::vector<Fixup> fixups_;
};

}  // namespace croc::fw
