#pragma once

#include "croc/soc/soc.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace croc::loader {

struct Segment {
  std::uint32_t addr = 0;
  std::vector<std::uint8_t> bytes;

  bool operator==(const Segment&) const = default;
};

struct FirmwareImage {
  std::vector<Segment> segments;
  std::uint32_t entry = 0;

  bool operator==(const FirmwareImage&) const = default;
  bool empty() const { return segments.empty(); }
  std::size_t total_bytes() const;
};

class ElfError : public std::runtime_error {
 public:
  enum class Kind { NotElf, WrongClass, WrongMachine, MalformedHeader };
  ElfError(Kind kind, const std::string& what, std::size_t offset)
      : std::runtime_error(what), kind_(kind), offset_(offset) {}
  Kind kind() const { return kind_; }
  /// File offset of the offending field.
  std::size_t offset() const { return offset_; }

 private:
  Kind kind_;
  std::size_t offset_;
};

inline constexpr std::uint16_t kMachineRiscv = 243;

/// Little-endian ELF32 RISC-V only. PT_LOAD segments are placed at their
/// physical address and zero-filled up to p_memsz. Throws ElfError.
FirmwareImage parse_elf(std::span<const std::uint8_t> bytes);

/// Minimal executable: one PT_LOAD per segment, no sections. Trailing zero
/// bytes of each segment go into p_memsz instead of the file.
std::vector<std::uint8_t> write_elf(const FirmwareImage& image);

FirmwareImage raw_image(std::span<const std::uint8_t> bytes, std::uint32_t addr);

/// `path` or `path@addr` as accepted by --bin.
struct BinSpec {
  std::string path;
  std::uint32_t addr = 0;
};
BinSpec parse_bin_spec(const std::string& text, std::uint32_t default_addr);

std::vector<std::uint8_t> read_file(const std::string& path);

/// Copies every segment into SRAM and points the core (and later resets)
/// at the entry, or at `override_entry`. Peripherals are left alone.
/// An empty image is a no-op. Throws mem::RangeError naming the segment.
void load(soc::Soc& soc, const FirmwareImage& image, std::optional<std::uint32_t> override_entry = std::nullopt);

}  // namespace croc::loader
