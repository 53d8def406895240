#pragma once

#include <array>
#include <cstdint>
#include <optional>

namespace croc::isa {

namespace csr {
inline constexpr std::uint16_t kMstatus = 0x300;
inline constexpr std::uint16_t kMisa = 0x301;
inline constexpr std::uint16_t kMie = 0x304;
inline constexpr std::uint16_t kMtvec = 0x305;
inline constexpr std::uint16_t kMscratch = 0x340;
inline constexpr std::uint16_t kMepc = 0x341;
inline constexpr std::uint16_t kMcause = 0x342;
inline constexpr std::uint16_t kMtval = 0x343;
inline constexpr std::uint16_t kMip = 0x344;
inline constexpr std::uint16_t kMcycle = 0xB00;
inline constexpr std::uint16_t kMinstret = 0xB02;
inline constexpr std::uint16_t kMcycleh = 0xB80;
inline constexpr std::uint16_t kMinstreth = 0xB82;
inline constexpr std::uint16_t kCycle = 0xC00;
inline constexpr std::uint16_t kTime = 0xC01;
inline constexpr std::uint16_t kInstret = 0xC02;
inline constexpr std::uint16_t kCycleh = 0xC80;
inline constexpr std::uint16_t kTimeh = 0xC81;
inline constexpr std::uint16_t kInstreth = 0xC82;
inline constexpr std::uint16_t kMvendorid = 0xF11;
inline constexpr std::uint16_t kMarchid = 0xF12;
inline constexpr std::uint16_t kMimpid = 0xF13;
inline constexpr std::uint16_t kMhartid = 0xF14;
}  // namespace csr

namespace mstatus {
inline constexpr std::uint32_t kMie = 1U << 3;
inline constexpr std::uint32_t kMpie = 1U << 7;
inline constexpr std::uint32_t kMpp = 3U << 11;
}  // namespace mstatus

namespace irq {
inline constexpr std::uint32_t kMsi = 1U << 3;
inline constexpr std::uint32_t kMti = 1U << 7;
inline constexpr std::uint32_t kMei = 1U << 11;
}  // namespace irq

namespace cause {
inline constexpr std::uint32_t kInstrMisaligned = 0;
inline constexpr std::uint32_t kInstrAccessFault = 1;
inline constexpr std::uint32_t kIllegalInstr = 2;
inline constexpr std::uint32_t kBreakpoint = 3;
inline constexpr std::uint32_t kLoadAccessFault = 5;
inline constexpr std::uint32_t kStoreAccessFault = 7;
inline constexpr std::uint32_t kEcallM = 11;
inline constexpr std::uint32_t kInterrupt = 0x8000'0000U;
inline constexpr std::uint32_t kMachineTimerIrq = kInterrupt | 7U;
inline constexpr std::uint32_t kMachineExternalIrq = kInterrupt | 11U;
}  // namespace cause

struct CsrFile {
  std::uint32_t mstatus = mstatus::kMpp;
  std::uint32_t mtvec = 0;
  std::uint32_t mepc = 0;
  std::uint32_t mcause = 0;
  std::uint32_t mtval = 0;
  std::uint32_t mie = 0;
  std::uint32_t mscratch = 0;
  std::uint64_t mcycle = 0;
  std::uint64_t minstret = 0;
  /// Mirror of the platform timer, read through the `time` CSR.
  std::uint64_t time = 0;

  bool operator==(const CsrFile&) const = default;
};

struct ArchState {
  std::uint32_t pc = 0;
  std::array<std::uint32_t, 32> regs{};
  CsrFile csr;
  bool halted = false;
  bool timer_irq = false;
  bool external_irq = false;
  bool c_ext = true;

  std::uint32_t reg(unsigned index) const { return index == 0 ? 0U : regs[index]; }
  void set_reg(unsigned index, std::uint32_t value) {
    if (index != 0) regs[index] = value;
  }
  /// mip as seen by software: driven entirely by the interrupt lines.
  std::uint32_t mip() const { return (timer_irq ? irq::kMti : 0U) | (external_irq ? irq::kMei : 0U); }
  std::uint32_t misa() const;

  bool operator==(const ArchState&) const = default;
};

enum class CsrOp : std::uint8_t { ReadWrite, ReadSet, ReadClear };

struct CsrAccess {
  bool ok = false;
  std::uint32_t old_value = 0;
  /// The instruction overwrote mcycle/minstret; the step must not add its own increment.
  bool wrote_mcycle = false;
  bool wrote_minstret = false;
};

/// Read-modify-write of one CSR. `write` is false for the set/clear forms
/// whose source is x0 (or uimm 0); such accesses never fault on read-only CSRs.
CsrAccess csr_op(ArchState& state, std::uint16_t addr, CsrOp op, std::uint32_t value, bool write);

/// Enters the trap handler. Returns false (state untouched) when mtvec is 0,
/// which the cores treat as a double fault.
bool raise_trap(ArchState& state, std::uint32_t trap_cause, std::uint32_t tval);

void take_mret(ArchState& state);

/// Highest-priority interrupt that would be taken now, if any.
std::optional<std::uint32_t> pending_interrupt(const ArchState& state);

/// WFI wake condition: any enabled interrupt pending, regardless of mstatus.MIE.
bool wfi_should_wake(const ArchState& state);

}  // namespace croc::isa
