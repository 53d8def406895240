#include "croc/isa/core.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

namespace croc::isa {

using obi::ManagerId;

/// Data port that turns byte-addressed accesses into word-aligned OBI
/// transactions, splitting misaligned ones in two.
class Core::BusPort : public DataPort {
 public:
  BusPort(Core& core, StepReport& report) : core_(core), report_(report) {}

  std::optional<std::uint32_t> load(std::uint32_t addr, unsigned size) override {
    std::uint32_t value = 0;
    unsigned done = 0;
    bool first = true;
    while (done < size) {
      const std::uint32_t a = addr + done;
      const std::uint32_t word_addr = a & ~3U;
      const unsigned lane = a & 3U;
      const unsigned n = std::min(size - done, 4U - lane);
      const auto be = static_cast<std::uint8_t>(((1U << n) - 1U) << lane);
      if (!first) ++report_.outcome.extra_transactions;
      first = false;
      const auto txn = core_.transact(ManagerId::Data, word_addr, false, be, 0, report_);
      if (txn.err) return std::nullopt;
      const std::uint32_t part = (txn.rdata >> (8U * lane)) & (n == 4 ? 0xFFFF'FFFFU : ((1U << (8U * n)) - 1U));
      value |= part << (8U * done);
      done += n;
    }
    return value;
  }

  bool store(std::uint32_t addr, unsigned size, std::uint32_t value) override {
    unsigned done = 0;
    bool first = true;
    while (done < size) {
      const std::uint32_t a = addr + done;
      const std::uint32_t word_addr = a & ~3U;
      const unsigned lane = a & 3U;
      const unsigned n = std::min(size - done, 4U - lane);
      const auto be = static_cast<std::uint8_t>(((1U << n) - 1U) << lane);
      if (!first) ++report_.outcome.extra_transactions;
      first = false;
      const std::uint32_t wdata = (value >> (8U * done)) << (8U * lane);
      if (core_.fetch_valid_ && core_.fetch_addr_ == word_addr) core_.fetch_valid_ = false;
      const auto txn = core_.transact(ManagerId::Data, word_addr, true, be, wdata, report_);
      if (txn.err) return false;
      done += n;
    }
    return true;
  }

 private:
  Core& core_;
  StepReport& report_;
};

Core::Core(CoreConfig config, obi::Crossbar& fabric, Clock& clock)
    : config_(config), fabric_(fabric), clock_(clock) {
  reset();
}

void Core::reset() {
  state_ = ArchState{};
  state_.c_ext = config_.c_ext;
  state_.pc = config_.reset_pc;
  halt_reason_ = HaltReason::None;
  diagnostic_.clear();
  sleeping_ = false;
  fetch_valid_ = false;
}

obi::ObiTransaction Core::transact(ManagerId port, std::uint32_t addr, bool we, std::uint8_t be, std::uint32_t wdata,
                                   StepReport& report) {
  fabric_.request(port, addr, we, be, wdata);
  for (;;) {
    clock_.advance();
    if (auto txn = fabric_.take_response(port)) {
      report.outcome.wait_states += static_cast<unsigned>((txn->granted_cycle - txn->issued_cycle) +
                                                          (txn->response_cycle - txn->granted_cycle - 1));
      report.bus_accesses.push_back(*txn);
      return *txn;
    }
  }
}

std::optional<std::uint16_t> Core::fetch_half(std::uint32_t addr, StepReport& report, unsigned& fetches) {
  const std::uint32_t word_addr = addr & ~3U;
  if (!fetch_valid_ || fetch_addr_ != word_addr) {
    if (fetches > 0) ++report.outcome.extra_transactions;
    ++fetches;
    const auto txn = transact(ManagerId::Instr, word_addr, false, 0xF, 0, report);
    if (txn.err) {
      fetch_valid_ = false;
      return std::nullopt;
    }
    fetch_valid_ = true;
    fetch_addr_ = word_addr;
    fetch_word_ = txn.rdata;
  }
  return static_cast<std::uint16_t>((addr & 2U) ? (fetch_word_ >> 16) : (fetch_word_ & 0xFFFFU));
}

void Core::finish(StepReport& report, unsigned target_cycles) {
  while (clock_.now() - report.start_cycle < target_cycles) clock_.advance();
  report.cycles_consumed = static_cast<unsigned>(clock_.now() - report.start_cycle);
}

void Core::trap(std::uint32_t trap_cause, std::uint32_t tval, StepReport& report) {
  report.trap_taken = trap_cause;
  if (trap_cause == cause::kBreakpoint && config_.ebreak_halts) {
    state_.halted = true;
    halt_reason_ = HaltReason::Ebreak;
    diagnostic_ = fmt::format("ebreak at pc 0x{:08x}", state_.pc);
    return;
  }
  if (!raise_trap(state_, trap_cause, tval)) {
    state_.halted = true;
    halt_reason_ = HaltReason::DoubleFault;
    diagnostic_ = fmt::format("double fault: trap cause 0x{:x} (tval 0x{:08x}) at pc 0x{:08x} with mtvec=0",
                              trap_cause, tval, state_.pc);
  }
}

StepReport Core::step() {
  if (state_.halted) throw std::logic_error("Core::step on a halted core");
  StepReport report;
  report.start_cycle = clock_.now();
  report.pc = state_.pc;

  const auto account = [&](bool wrote_mcycle) {
    if (!wrote_mcycle) state_.csr.mcycle += report.cycles_consumed;
  };
  // Fetch-side trap: whatever fetch time was spent plus one redirect cycle.
  const auto fetch_trap = [&](std::uint32_t trap_cause, std::uint32_t tval) {
    if (clock_.now() == report.start_cycle) clock_.advance();
    trap(trap_cause, tval, report);
    finish(report, static_cast<unsigned>(clock_.now() - report.start_cycle) + 1);
    account(false);
    return report;
  };

  if (sleeping_) {
    if (!wfi_should_wake(state_)) {
      report.sleeping = true;
      finish(report, 1);
      account(false);
      return report;
    }
    sleeping_ = false;
  }
  if (const auto irq = pending_interrupt(state_)) {
    trap(*irq, 0, report);
    finish(report, 1);
    account(false);
    return report;
  }

  const std::uint32_t pc = state_.pc;
  if (pc & (state_.c_ext ? 1U : 3U)) return fetch_trap(cause::kInstrMisaligned, pc);

  unsigned fetches = 0;
  const auto low = fetch_half(pc, report, fetches);
  if (!low) return fetch_trap(cause::kInstrAccessFault, pc);

  DecodeResult decoded;
  if ((*low & 3U) != 3U && state_.c_ext) {
    decoded = decode_compressed(*low);
    if (!decoded) return fetch_trap(cause::kIllegalInstr, *low);
  } else {
    const auto high = fetch_half(pc + 2, report, fetches);
    if (!high) return fetch_trap(cause::kInstrAccessFault, pc);
    const std::uint32_t word = static_cast<std::uint32_t>(*low) | (static_cast<std::uint32_t>(*high) << 16);
    decoded = decode(word);
    if (!decoded) return fetch_trap(cause::kIllegalInstr, word);
  }
  const DecodedInstr& instr = decoded.instr;

  // The execute cycle overlaps the fetch; a buffered fetch still costs it.
  if (clock_.now() == report.start_cycle) clock_.advance();

  BusPort port(*this, report);
  const Retirement r = exec_functional(state_, instr, port);
  if (instr.op == Op::FenceI) fetch_valid_ = false;

  report.outcome.taken = r.branch_taken;
  if (r.trap) {
    report.outcome.trapped = true;
    trap(r.trap->cause, r.trap->tval, report);
    finish(report, timing_cycles(instr, report.outcome));
    account(false);
    return report;
  }

  report.retired = instr;
  report.reg_write = r.reg_write;
  report.mem = r.mem;
  finish(report, timing_cycles(instr, report.outcome));
  account(r.wrote_mcycle);
  if (!r.wrote_minstret) ++state_.csr.minstret;
  if (r.wait_for_interrupt) sleeping_ = !wfi_should_wake(state_);
  return report;
}

}  // namespace croc::isa
