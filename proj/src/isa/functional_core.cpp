#include "croc/isa/functional_core.hpp"

#include <stdexcept>

namespace croc::isa {

void FlatMemory::add_region(std::uint32_t base, std::uint32_t size) {
  regions_.push_back(Region{base, std::vector<std::uint8_t>(size, 0)});
}

FlatMemory::Region* FlatMemory::find(std::uint32_t addr) {
  for (auto& r : regions_)
    if (addr >= r.base && addr - r.base < r.bytes.size()) return &r;
  return nullptr;
}

const FlatMemory::Region* FlatMemory::find(std::uint32_t addr) const {
  for (const auto& r : regions_)
    if (addr >= r.base && addr - r.base < r.bytes.size()) return &r;
  return nullptr;
}

bool FlatMemory::contains(std::uint32_t addr) const { return find(addr) != nullptr; }

std::optional<std::uint8_t> FlatMemory::read_byte(std::uint32_t addr) const {
  const Region* r = find(addr);
  if (!r) return std::nullopt;
  return r->bytes[addr - r->base];
}

bool FlatMemory::write_byte(std::uint32_t addr, std::uint8_t value) {
  Region* r = find(addr);
  if (!r) return false;
  r->bytes[addr - r->base] = value;
  return true;
}

void FlatMemory::write_bytes(std::uint32_t addr, const std::vector<std::uint8_t>& bytes) {
  for (std::size_t i = 0; i < bytes.size(); ++i)
    if (!write_byte(addr + static_cast<std::uint32_t>(i), bytes[i]))
      throw std::out_of_range("FlatMemory: unmapped byte");
}

std::optional<std::uint32_t> FlatMemory::load(std::uint32_t addr, unsigned size) {
  std::uint32_t value = 0;
  for (unsigned i = 0; i < size; ++i) {
    const auto b = read_byte(addr + i);
    if (!b) return std::nullopt;
    value |= static_cast<std::uint32_t>(*b) << (8U * i);
  }
  return value;
}

bool FlatMemory::store(std::uint32_t addr, unsigned size, std::uint32_t value) {
  for (unsigned i = 0; i < size; ++i)
    if (!contains(addr + i)) return false;
  for (unsigned i = 0; i < size; ++i) write_byte(addr + i, static_cast<std::uint8_t>(value >> (8U * i)));
  return true;
}

FunctionalCore::FunctionalCore(FlatMemory& memory, std::uint32_t reset_pc, bool c_ext, bool ebreak_halts)
    : memory_(memory), ebreak_halts_(ebreak_halts) {
  state_.pc = reset_pc;
  state_.c_ext = c_ext;
}

void FunctionalCore::enter_trap(std::uint32_t trap_cause, std::uint32_t tval, Outcome& out) {
  out.trap_cause = trap_cause;
  if (trap_cause == cause::kBreakpoint && ebreak_halts_) {
    state_.halted = true;
    halt_reason_ = HaltReason::Ebreak;
    return;
  }
  if (!raise_trap(state_, trap_cause, tval)) {
    state_.halted = true;
    halt_reason_ = HaltReason::DoubleFault;
  }
}

FunctionalCore::Outcome FunctionalCore::step() {
  Outcome out;
  if (state_.halted) return out;

  if (sleeping_) {
    if (!wfi_should_wake(state_)) return out;
    sleeping_ = false;
  }
  if (const auto irq = pending_interrupt(state_)) {
    enter_trap(*irq, 0, out);
    return out;
  }

  const std::uint32_t pc = state_.pc;
  if (pc & (state_.c_ext ? 1U : 3U)) {
    enter_trap(cause::kInstrMisaligned, pc, out);
    return out;
  }
  const auto low = memory_.load(pc, 2);
  if (!low) {
    enter_trap(cause::kInstrAccessFault, pc, out);
    return out;
  }
  DecodeResult decoded;
  if ((*low & 3U) != 3U && state_.c_ext) {
    decoded = decode_compressed(static_cast<std::uint16_t>(*low));
    if (!decoded) {
      enter_trap(cause::kIllegalInstr, *low, out);
      return out;
    }
  } else {
    const auto high = memory_.load(pc + 2, 2);
    if (!high) {
      enter_trap(cause::kInstrAccessFault, pc, out);
      return out;
    }
    const std::uint32_t word = *low | (*high << 16);
    decoded = decode(word);
    if (!decoded) {
      enter_trap(cause::kIllegalInstr, word, out);
      return out;
    }
  }

  out.instr = decoded.instr;
  Retirement r = exec_functional(state_, decoded.instr, memory_);
  if (r.trap) {
    enter_trap(r.trap->cause, r.trap->tval, out);
    return out;
  }
  if (!r.wrote_minstret) ++state_.csr.minstret;
  if (r.wait_for_interrupt) sleeping_ = !wfi_should_wake(state_);
  out.retired = r;
  return out;
}

}  // namespace croc::isa
