#pragma once

#include "croc/isa/arch_state.hpp"
#include "croc/isa/instr.hpp"

#include <cstdint>
#include <optional>

namespace croc::isa {

/// Byte-addressed data accessor used by the execute stage. Sizes are 1, 2
/// or 4 bytes and may be misaligned; returning nullopt/false reports an
/// access fault.
class DataPort {
 public:
  virtual ~DataPort() = default;
  virtual std::optional<std::uint32_t> load(std::uint32_t addr, unsigned size) = 0;
  virtual bool store(std::uint32_t addr, unsigned size, std::uint32_t value) = 0;
};

struct RegWrite {
  std::uint8_t rd = 0;
  std::uint32_t value = 0;
};

struct MemEffect {
  std::uint32_t addr = 0;
  std::uint8_t size = 0;
  std::uint32_t value = 0;
  bool is_store = false;
};

struct Trap {
  std::uint32_t cause = 0;
  std::uint32_t tval = 0;
};

/// What one instruction did. On a trap nothing else has been applied to
/// the state (pc still points at the faulting instruction).
struct Retirement {
  std::uint32_t pc = 0;
  std::uint32_t next_pc = 0;
  std::optional<RegWrite> reg_write;
  std::optional<MemEffect> mem;
  std::optional<Trap> trap;
  bool branch_taken = false;
  bool wait_for_interrupt = false;
  bool wrote_mcycle = false;
  bool wrote_minstret = false;
};

/// Untimed architectural semantics of one decoded instruction. Applies the
/// register, CSR and pc updates to `state` and performs memory effects via
/// `port`; does not touch the counters and does not enter trap handlers.
Retirement exec_functional(ArchState& state, const DecodedInstr& instr, DataPort& port);

struct TimingOutcome {
  bool taken = false;
  /// Extra bus transactions beyond the first fetch and first data access
  /// (split fetches, misaligned data halves).
  unsigned extra_transactions = 0;
  /// Cycles spent waiting for grant or response beyond zero-wait latency.
  unsigned wait_states = 0;
  bool trapped = false;
};

/// Base cycles from the timing table plus observed wait states.
unsigned timing_cycles(const DecodedInstr& instr, const TimingOutcome& outcome);

/// Cycles of the table alone (no wait states, no split transactions).
unsigned base_cycles(const DecodedInstr& instr, bool taken);

inline constexpr unsigned kDivCycles = 37;

}  // namespace croc::isa
