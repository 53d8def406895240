#include "croc/isa/arch_state.hpp"

namespace croc::isa {

std::uint32_t ArchState::misa() const {
  // MXL=1 (32-bit), extensions I, M and optionally C.
  std::uint32_t value = (1U << 30) | (1U << ('I' - 'A')) | (1U << ('M' - 'A'));
  if (c_ext) value |= 1U << ('C' - 'A');
  return value;
}

namespace {

std::optional<std::uint32_t> read_csr(const ArchState& s, std::uint16_t addr) {
  const CsrFile& c = s.csr;
  switch (addr) {
    case csr::kMstatus: return c.mstatus;
    case csr::kMisa: return s.misa();
    case csr::kMie: return c.mie;
    case csr::kMtvec: return c.mtvec;
    case csr::kMscratch: return c.mscratch;
    case csr::kMepc: return c.mepc;
    case csr::kMcause: return c.mcause;
    case csr::kMtval: return c.mtval;
    case csr::kMip: return s.mip();
    case csr::kMcycle:
    case csr::kCycle: return static_cast<std::uint32_t>(c.mcycle);
    case csr::kMinstret:
    case csr::kInstret: return static_cast<std::uint32_t>(c.minstret);
    case csr::kMcycleh:
    case csr::kCycleh: return static_cast<std::uint32_t>(c.mcycle >> 32);
    case csr::kMinstreth:
    case csr::kInstreth: return static_cast<std::uint32_t>(c.minstret >> 32);
    case csr::kTime: return static_cast<std::uint32_t>(c.time);
    case csr::kTimeh: return static_cast<std::uint32_t>(c.time >> 32);
    case csr::kMvendorid:
    case csr::kMarchid:
    case csr::kMimpid:
    case csr::kMhartid: return 0U;
    default: return std::nullopt;
  }
}

bool read_only(std::uint16_t addr) { return (addr >> 10) == 3U; }

}  // namespace

CsrAccess csr_op(ArchState& s, std::uint16_t addr, CsrOp op, std::uint32_t value, bool write) {
  CsrAccess result;
  const auto old = read_csr(s, addr);
  if (!old) return result;
  if (write && read_only(addr)) return result;
  result.ok = true;
  result.old_value = *old;
  if (!write) return result;

  std::uint32_t next = *old;
  switch (op) {
    case CsrOp::ReadWrite: next = value; break;
    case CsrOp::ReadSet: next = *old | value; break;
    case CsrOp::ReadClear: next = *old & ~value; break;
  }

  CsrFile& c = s.csr;
  switch (addr) {
    case csr::kMstatus:
      c.mstatus = (next & (mstatus::kMie | mstatus::kMpie)) | mstatus::kMpp;
      break;
    case csr::kMie: c.mie = next & (irq::kMsi | irq::kMti | irq::kMei); break;
    case csr::kMtvec: c.mtvec = next & ~3U; break;
    case csr::kMscratch: c.mscratch = next; break;
    case csr::kMepc: c.mepc = next & (s.c_ext ? ~1U : ~3U); break;
    case csr::kMcause: c.mcause = next; break;
    case csr::kMtval: c.mtval = next; break;
    case csr::kMcycle:
      c.mcycle = (c.mcycle & 0xFFFF'FFFF'0000'0000ULL) | next;
      result.wrote_mcycle = true;
      break;
    case csr::kMcycleh:
      c.mcycle = (c.mcycle & 0xFFFF'FFFFULL) | (static_cast<std::uint64_t>(next) << 32);
      result.wrote_mcycle = true;
      break;
    case csr::kMinstret:
      c.minstret = (c.minstret & 0xFFFF'FFFF'0000'0000ULL) | next;
      result.wrote_minstret = true;
      break;
    case csr::kMinstreth:
      c.minstret = (c.minstret & 0xFFFF'FFFFULL) | (static_cast<std::uint64_t>(next) << 32);
      result.wrote_minstret = true;
      break;
    default:
      // misa and mip: WARL, writes ignored.
      break;
  }
  return result;
}

bool raise_trap(ArchState& s, std::uint32_t trap_cause, std::uint32_t tval) {
  if (s.csr.mtvec == 0) return false;
  CsrFile& c = s.csr;
  c.mepc = s.pc;
  c.mcause = trap_cause;
  c.mtval = tval;
  const bool mie = (c.mstatus & mstatus::kMie) != 0;
  c.mstatus = (c.mstatus & ~(mstatus::kMie | mstatus::kMpie)) | (mie ? mstatus::kMpie : 0U) | mstatus::kMpp;
  s.pc = c.mtvec & ~3U;
  return true;
}

void take_mret(ArchState& s) {
  CsrFile& c = s.csr;
  const bool mpie = (c.mstatus & mstatus::kMpie) != 0;
  c.mstatus = (c.mstatus & ~mstatus::kMie) | (mpie ? mstatus::kMie : 0U) | mstatus::kMpie | mstatus::kMpp;
  s.pc = c.mepc;
}

std::optional<std::uint32_t> pending_interrupt(const ArchState& s) {
  if ((s.csr.mstatus & mstatus::kMie) == 0) return std::nullopt;
  const std::uint32_t active = s.mip() & s.csr.mie;
  if (active & irq::kMei) return cause::kMachineExternalIrq;
  if (active & irq::kMsi) return cause::kInterrupt | 3U;
  if (active & irq::kMti) return cause::kMachineTimerIrq;
  return std::nullopt;
}

bool wfi_should_wake(const ArchState& s) { return (s.mip() & s.csr.mie) != 0; }

}  // namespace croc::isa
