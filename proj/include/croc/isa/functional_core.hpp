#pragma once

#include "croc/isa/arch_state.hpp"
#include "croc/isa/exec.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace croc::isa {

enum class HaltReason : std::uint8_t { None, Ebreak, DoubleFault };

/// Plain byte-array memory made of disjoint regions. Serves as the data
/// port of the untimed reference core; accesses are performed byte by byte.
class FlatMemory : public DataPort {
 public:
  void add_region(std::uint32_t base, std::uint32_t size);
  bool contains(std::uint32_t addr) const;
  std::optional<std::uint8_t> read_byte(std::uint32_t addr) const;
  bool write_byte(std::uint32_t addr, std::uint8_t value);
  void write_bytes(std::uint32_t addr, const std::vector<std::uint8_t>& bytes);

  std::optional<std::uint32_t> load(std::uint32_t addr, unsigned size) override;
  bool store(std::uint32_t addr, unsigned size, std::uint32_t value) override;

  struct Region {
    std::uint32_t base;
    std::vector<std::uint8_t> bytes;
  };
  const std::vector<Region>& regions() const { return regions_; }

 private:
  Region* find(std::uint32_t addr);
  const Region* find(std::uint32_t addr) const;
  std::vector<Region> regions_;
};

/// Untimed golden model: fetch, decode and exec_functional over a FlatMemory.
/// One call to step() corresponds to one call of the timed core's step.
class FunctionalCore {
 public:
  FunctionalCore(FlatMemory& memory, std::uint32_t reset_pc, bool c_ext = true, bool ebreak_halts = true);

  struct Outcome {
    std::optional<Retirement> retired;
    std::optional<DecodedInstr> instr;
    std::optional<std::uint32_t> trap_cause;
  };

  Outcome step();

  ArchState& state() { return state_; }
  const ArchState& state() const { return state_; }
  HaltReason halt_reason() const { return halt_reason_; }
  bool sleeping() const { return sleeping_; }

 private:
  void enter_trap(std::uint32_t trap_cause, std::uint32_t tval, Outcome& out);

  FlatMemory& memory_;
  ArchState state_;
  bool ebreak_halts_;
  bool sleeping_ = false;
  HaltReason halt_reason_ = HaltReason::None;
};

}  // namespace croc::isa
