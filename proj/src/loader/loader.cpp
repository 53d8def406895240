#include "croc/loader/loader.hpp"

#include "croc/bits.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

#include <fmt/format.h>

namespace croc::loader {
namespace {

constexpr std::size_t kEhdrSize = 52;
constexpr std::size_t kPhdrSize = 32;
constexpr std::uint32_t kPtLoad = 1;

std::uint16_t le16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

std::uint32_t le32(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) | (static_cast<std::uint32_t>(b[at + 1]) << 8) |
         (static_cast<std::uint32_t>(b[at + 2]) << 16) | (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

void put16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

ElfError malformed(const std::string& what, std::size_t offset) {
  return ElfError(ElfError::Kind::MalformedHeader, fmt::format("{} (offset {})", what, offset), offset);
}

}  // namespace

std::size_t FirmwareImage::total_bytes() const {
  std::size_t n = 0;
  for (const auto& s : segments) n += s.bytes.size();
  return n;
}

FirmwareImage parse_elf(std::span<const std::uint8_t> b) {
  if (b.size() < 4 || b[0] != 0x7F || b[1] != 'E' || b[2] != 'L' || b[3] != 'F')
    throw ElfError(ElfError::Kind::NotElf, "not an ELF file (bad magic)", 0);
  if (b.size() < 5) throw malformed("truncated identification", b.size());
  if (b[4] != 1) throw ElfError(ElfError::Kind::WrongClass, fmt::format("ELF class {} is not ELF32", b[4]), 4);
  if (b.size() < kEhdrSize) throw malformed("truncated ELF header", b.size());
  if (b[5] != 1) throw malformed("not little-endian", 5);
  const std::uint16_t machine = le16(b, 18);
  if (machine != kMachineRiscv)
    throw ElfError(ElfError::Kind::WrongMachine, fmt::format("machine {} is not RISC-V ({})", machine, kMachineRiscv),
                   18);

  FirmwareImage image;
  image.entry = le32(b, 24);
  const std::uint32_t phoff = le32(b, 28);
  const std::uint16_t phentsize = le16(b, 42);
  const std::uint16_t phnum = le16(b, 44);
  if (phnum == 0) return image;
  if (phentsize < kPhdrSize) throw malformed(fmt::format("program header entry size {}", phentsize), 42);
  if (static_cast<std::uint64_t>(phoff) + static_cast<std::uint64_t>(phentsize) * phnum > b.size())
    throw malformed("program header table past end of file", 28);

  for (std::uint16_t i = 0; i < phnum; ++i) {
    const std::size_t ph = phoff + static_cast<std::size_t>(i) * phentsize;
    if (le32(b, ph) != kPtLoad) continue;
    const std::uint32_t offset = le32(b, ph + 4);
    const std::uint32_t paddr = le32(b, ph + 12);
    const std::uint32_t filesz = le32(b, ph + 16);
    const std::uint32_t memsz = le32(b, ph + 20);
    if (memsz == 0) continue;
    if (filesz > memsz) throw malformed(fmt::format("segment {} has p_filesz > p_memsz", i), ph + 16);
    if (static_cast<std::uint64_t>(offset) + filesz > b.size())
      throw malformed(fmt::format("segment {} data past end of file", i), ph + 4);
    if (static_cast<std::uint64_t>(paddr) + memsz > 0x1'0000'0000ULL)
      throw malformed(fmt::format("segment {} wraps the address space", i), ph + 12);
    Segment seg;
    seg.addr = paddr;
    seg.bytes.assign(b.begin() + offset, b.begin() + offset + filesz);
    seg.bytes.resize(memsz, 0);
    image.segments.push_back(std::move(seg));
  }
  return image;
}

std::vector<std::uint8_t> write_elf(const FirmwareImage& image) {
  const auto phnum = static_cast<std::uint16_t>(image.segments.size());
  std::vector<std::uint8_t> out = {0x7F, 'E', 'L', 'F', 1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0};
  put16(out, 2);  // ET_EXEC
  put16(out, kMachineRiscv);
  put32(out, 1);
  put32(out, image.entry);
  put32(out, phnum ? static_cast<std::uint32_t>(kEhdrSize) : 0U);
  put32(out, 0);  // no section headers
  put32(out, 0);
  put16(out, kEhdrSize);
  put16(out, kPhdrSize);
  put16(out, phnum);
  put16(out, 40);
  put16(out, 0);
  put16(out, 0);

  std::uint32_t data_offset = static_cast<std::uint32_t>(kEhdrSize + kPhdrSize * phnum);
  std::vector<std::uint8_t> data;
  for (const auto& seg : image.segments) {
    const auto last = std::find_if(seg.bytes.rbegin(), seg.bytes.rend(), [](std::uint8_t v) { return v != 0; });
    const auto filesz = static_cast<std::uint32_t>(seg.bytes.rend() - last);
    put32(out, kPtLoad);
    put32(out, data_offset);
    put32(out, seg.addr);
    put32(out, seg.addr);
    put32(out, filesz);
    put32(out, static_cast<std::uint32_t>(seg.bytes.size()));
    put32(out, 7);  // RWX
    put32(out, 4);
    data.insert(data.end(), seg.bytes.begin(), seg.bytes.begin() + filesz);
    data_offset += filesz;
  }
  out.insert(out.end(), data.begin(), data.end());
  return out;
}

FirmwareImage raw_image(std::span<const std::uint8_t> bytes, std::uint32_t addr) {
  FirmwareImage image;
  image.entry = addr;
  if (!bytes.empty()) image.segments.push_back({addr, {bytes.begin(), bytes.end()}});
  return image;
}

BinSpec parse_bin_spec(const std::string& text, std::uint32_t default_addr) {
  const auto at = text.rfind('@');
  if (at == std::string::npos) return {text, default_addr};
  const std::uint64_t addr = parse_uint(text.substr(at + 1));
  if (addr > 0xFFFF'FFFFULL) throw std::invalid_argument("load address exceeds 32 bits");
  return {text.substr(0, at), static_cast<std::uint32_t>(addr)};
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void load(soc::Soc& soc, const FirmwareImage& image, std::optional<std::uint32_t> override_entry) {
  if (image.empty() && !override_entry) return;
  const auto banks = soc.banks();
  // Check everything first so a bad image leaves memory untouched.
  for (std::size_t i = 0; i < image.segments.size(); ++i) {
    const auto& seg = image.segments[i];
    if (seg.bytes.empty()) continue;
    const auto size = static_cast<std::uint32_t>(seg.bytes.size());
    const bool fits = std::any_of(banks.begin(), banks.end(), [&](const mem::SramBank* bank) {
      return seg.bytes.size() <= 0xFFFF'FFFFULL && bank->contains(seg.addr, size);
    });
    if (!fits)
      throw mem::RangeError(fmt::format("segment {} at {} (+{} bytes) is outside mapped SRAM", i, hex32(seg.addr),
                                        seg.bytes.size()),
                            seg.addr);
  }
  for (const auto& seg : image.segments) mem::load_image(banks, seg.addr, seg.bytes);
  const std::uint32_t entry = override_entry.value_or(image.entry);
  soc.core().set_reset_pc(entry);
  soc.core().state().pc = entry;
  soc.core().flush_fetch_buffer();
}

}  // namespace croc::loader
