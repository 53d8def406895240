#include "croc/firmware/assembler.hpp"

#include "croc/bits.hpp"

#include <fmt/format.h>

namespace croc::fw {

using isa::make_instr;
using isa::Op;

namespace {

void put_word(std::vector<std::uint8_t>& bytes, std::size_t at, std::uint32_t word) {
  for (unsigned i = 0; i < 4; ++i) bytes[at + i] = static_cast<std::uint8_t>(word >> (8 * i));
}

std::uint32_t get_word(const std::vector<std::uint8_t>& bytes, std::size_t at) {
  std::uint32_t w = 0;
  for (unsigned i = 0; i < 4; ++i) w |= static_cast<std::uint32_t>(bytes[at + i]) << (8 * i);
  return w;
}

}  // namespace

void Assembler::label(const std::string& name) {
  if (!labels_.emplace(name, here()).second) throw AsmError("duplicate label " + name);
}

void Assembler::emit(const isa::DecodedInstr& instr) { emit_word(isa::encode(instr)); }

void Assembler::emit_word(std::uint32_t word) {
  for (unsigned i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(word >> (8 * i)));
}

void Assembler::emit_half(std::uint16_t half) {
  bytes_.push_back(static_cast<std::uint8_t>(half));
  bytes_.push_back(static_cast<std::uint8_t>(half >> 8));
}

void Assembler::ascii(std::string_view text) { bytes_.insert(bytes_.end(), text.begin(), text.end()); }

void Assembler::align(unsigned n) {
  while (bytes_.size() % n) bytes_.push_back(0);
}

void Assembler::op(Op op, unsigned rd, unsigned rs1, unsigned rs2) { emit(make_instr(op, rd, rs1, rs2, 0)); }

void Assembler::opi(Op op, unsigned rd, unsigned rs1, std::int32_t imm) { emit(make_instr(op, rd, rs1, 0, imm)); }

void Assembler::load(Op op, unsigned rd, unsigned base, std::int32_t offset) {
  emit(make_instr(op, rd, base, 0, offset));
}

void Assembler::store(Op op, unsigned src, unsigned base, std::int32_t offset) {
  emit(make_instr(op, 0, base, src, offset));
}

void Assembler::csr(Op op, unsigned rd, std::uint16_t csr_addr, unsigned rs1_or_uimm) {
  emit(make_instr(op, rd, rs1_or_uimm, 0, 0, csr_addr));
}

void Assembler::system(Op op) { emit(make_instr(op, 0, 0, 0, 0)); }

void Assembler::li(unsigned rd, std::uint32_t value) {
  const auto v = static_cast<std::int32_t>(value);
  if (v >= -2048 && v < 2048) {
    opi(Op::Addi, rd, reg::zero, v);
    return;
  }
  const std::uint32_t hi = (value + 0x800U) & 0xFFFF'F000U;
  const auto lo = static_cast<std::int32_t>(value - hi);
  emit(make_instr(Op::Lui, rd, 0, 0, static_cast<std::int32_t>(hi)));
  if (lo != 0) opi(Op::Addi, rd, rd, lo);
}

void Assembler::la(unsigned rd, const std::string& target) {
  fixups_.push_back({bytes_.size(), FixKind::PcrelPair, target});
  emit(make_instr(Op::Auipc, rd, 0, 0, 0));
  opi(Op::Addi, rd, rd, 0);
}

void Assembler::branch(Op op, unsigned rs1, unsigned rs2, const std::string& target) {
  fixups_.push_back({bytes_.size(), FixKind::Branch, target});
  emit(make_instr(op, 0, rs1, rs2, 0));
}

void Assembler::jal(unsigned rd, const std::string& target) {
  fixups_.push_back({bytes_.size(), FixKind::Jal, target});
  emit(make_instr(Op::Jal, rd, 0, 0, 0));
}

void Assembler::ret() { emit(make_instr(Op::Jalr, reg::zero, reg::ra, 0, 0)); }

std::uint32_t Assembler::address_of(const std::string& name) const {
  const auto it = labels_.find(name);
  if (it == labels_.end()) throw AsmError("unknown label " + name);
  return it->second;
}

std::vector<std::uint8_t> Assembler::finish() const {
  std::vector<std::uint8_t> out = bytes_;
  for (const auto& f : fixups_) {
    const std::uint32_t pc = origin_ + static_cast<std::uint32_t>(f.offset);
    const auto delta = static_cast<std::int32_t>(address_of(f.target) - pc);
    auto instr = isa::decode(get_word(out, f.offset)).instr;
    switch (f.kind) {
      case FixKind::Branch:
        if (delta < -4096 || delta > 4094) throw AsmError(fmt::format("branch to {} out of range", f.target));
        instr.imm = delta;
        put_word(out, f.offset, isa::encode(instr));
        break;
      case FixKind::Jal:
        if (delta < -(1 << 20) || delta >= (1 << 20)) throw AsmError(fmt::format("jump to {} out of range", f.target));
        instr.imm = delta;
        put_word(out, f.offset, isa::encode(instr));
        break;
      case FixKind::PcrelPair: {
        const std::uint32_t hi = (static_cast<std::uint32_t>(delta) + 0x800U) & 0xFFFF'F000U;
        instr.imm = static_cast<std::int32_t>(hi);
        put_word(out, f.offset, isa::encode(instr));
        auto lo = isa::decode(get_word(out, f.offset + 4)).instr;
        lo.imm = static_cast<std::int32_t>(static_cast<std::uint32_t>(delta) - hi);
        put_word(out, f.offset + 4, isa::encode(lo));
        break;
      }
    }
  }
  return out;
}

loader::FirmwareImage Assembler::image() const {
  auto bytes = finish();
  return loader::raw_image(bytes, origin_);
}

}  // namespace croc::fw
