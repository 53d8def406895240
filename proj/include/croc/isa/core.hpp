#pragma once

#include "croc/isa/arch_state.hpp"
#include "croc/isa/exec.hpp"
#include "croc/isa/functional_core.hpp"
#include "croc/isa/instr.hpp"
#include "croc/obi/crossbar.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace croc::isa {

/// Drives the whole platform forward by one clock cycle (peripherals, then
/// the crossbar). The timed core only advances time through this interface.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual Cycle now() const = 0;
  virtual void advance() = 0;
};

struct StepReport {
  Cycle start_cycle = 0;
  std::uint32_t pc = 0;
  /// Set when an instruction retired (not for trap entry or WFI sleep cycles).
  std::optional<DecodedInstr> retired;
  std::optional<RegWrite> reg_write;
  std::optional<MemEffect> mem;
  unsigned cycles_consumed = 0;
  /// Table value for this instruction and the wait states observed on the bus;
  /// cycles_consumed == timing_cycles(instr, outcome).
  TimingOutcome outcome;
  std::optional<std::uint32_t> trap_taken;
  std::vector<obi::ObiTransaction> bus_accesses;
  bool sleeping = false;
};

struct CoreConfig {
  std::uint32_t reset_pc = 0x1000'0000;
  bool c_ext = true;
  bool ebreak_halts = true;
};

/// CVE2-style two-stage core. Instruction fetches go through the
/// instruction manager port, loads/stores through the data manager port.
class Core {
 public:
  Core(CoreConfig config, obi::Crossbar& fabric, Clock& clock);

  /// Executes one instruction (or takes one interrupt, or sleeps one cycle in WFI).
  /// Precondition: not halted.
  StepReport step();

  /// Architectural reset: registers, CSRs and counters cleared, pc = reset_pc.
  void reset();

  ArchState& state() { return state_; }
  const ArchState& state() const { return state_; }
  const CoreConfig& config() const { return config_; }
  void set_reset_pc(std::uint32_t pc) { config_.reset_pc = pc; }

  HaltReason halt_reason() const { return halt_reason_; }
  const std::string& diagnostic() const { return diagnostic_; }
  bool sleeping() const { return sleeping_; }

  /// Drops the prefetched word; call after host writes to memory.
  void flush_fetch_buffer() { fetch_valid_ = false; }

 private:
  class BusPort;
  struct FetchResult;

  obi::ObiTransaction transact(obi::ManagerId port, std::uint32_t addr, bool we, std::uint8_t be, std::uint32_t wdata,
                               StepReport& report);
  std::optional<std::uint16_t> fetch_half(std::uint32_t addr, StepReport& report, unsigned& fetches);
  void finish(StepReport& report, unsigned target_cycles);
  void trap(std::uint32_t trap_cause, std::uint32_t tval, StepReport& report);

  CoreConfig config_;
  obi::Crossbar& fabric_;
  Clock& clock_;
  ArchState state_;
  HaltReason halt_reason_ = HaltReason::None;
  std::string diagnostic_;
  bool sleeping_ = false;

  bool fetch_valid_ = false;
  std::uint32_t fetch_addr_ = 0;
  std::uint32_t fetch_word_ = 0;
};

}  // namespace croc::isa
