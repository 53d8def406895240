#include "croc/firmware/assembler.hpp"
#include "croc/loader/loader.hpp"
#include "croc/soc/soc.hpp"
#include "support.hpp"

#include <doctest.h>

#include <random>

using namespace croc;
using namespace croc::loader;

namespace {

std::vector<std::uint8_t> minimal_elf() {
  FirmwareImage image;
  image.entry = 0x1000'0000;
  image.segments.push_back({0x1000'0000, {0x13, 0x00, 0x00, 0x00, 0x73, 0x00, 0x10, 0x00}});
  return write_elf(image);
}

void put16(std::vector<std::uint8_t>& b, std::size_t at, std::uint16_t v) {
  b[at] = static_cast<std::uint8_t>(v);
  b[at + 1] = static_cast<std::uint8_t>(v >> 8);
}

}  // namespace

TEST_SUITE("loader") {

TEST_CASE("minimal ELF") {
  const auto image = parse_elf(minimal_elf());
  CHECK(image.entry == 0x1000'0000);
  REQUIRE(image.segments.size() == 1);
  CHECK(image.segments[0].bytes.size() == 8);
  CHECK(image.total_bytes() == 8);
}

TEST_CASE("header validation") {
  auto wrong_machine = minimal_elf();
  put16(wrong_machine, 18, 62);
  try {
    parse_elf(wrong_machine);
    FAIL("expected WrongMachine");
  } catch (const ElfError& e) {
    CHECK(e.kind() == ElfError::Kind::WrongMachine);
    CHECK(e.offset() == 18);
  }

  auto not_elf = minimal_elf();
  not_elf[0] = 0;
  CHECK_THROWS_AS(parse_elf(not_elf), ElfError);

  auto elf64 = minimal_elf();
  elf64[4] = 2;
  try {
    parse_elf(elf64);
  } catch (const ElfError& e) {
    CHECK(e.kind() == ElfError::Kind::WrongClass);
  }

  auto truncated = minimal_elf();
  truncated.resize(60);
  try {
    parse_elf(truncated);
  } catch (const ElfError& e) {
    CHECK(e.kind() == ElfError::Kind::MalformedHeader);
  }
  CHECK_THROWS_AS(parse_elf(std::vector<std::uint8_t>{0x7f, 'E'}), ElfError);
}

TEST_CASE("clang-linked segment with filesz < memsz is zero filled") {
  // readelf: LOAD 0x1100 -> 0x10000100 FileSiz 0x8 MemSiz 0x20
  const auto image = parse_elf(read_file(test::data_path("zerofill.elf")));
  CHECK(image.entry == 0x1000'0000);
  REQUIRE(image.segments.size() == 2);
  const auto& data = image.segments[1];
  CHECK(data.addr == 0x1000'0100);
  REQUIRE(data.bytes.size() == 0x20);
  CHECK(std::vector<std::uint8_t>(data.bytes.begin(), data.bytes.begin() + 8) ==
        std::vector<std::uint8_t>{0x11, 0x11, 0x11, 0x11, 0x22, 0x22, 0x22, 0x22});
  CHECK(std::all_of(data.bytes.begin() + 8, data.bytes.end(), [](auto b) { return b == 0; }));

  soc::Soc s(soc::mlem_profile());
  s.write_memory(0x1000'0100, std::vector<std::uint8_t>(0x40, 0xEE));
  load(s, image);
  s.run(100);
  CHECK(s.core().state().reg(fw::reg::a0) == 0x1111'1111);
  CHECK(s.core().state().reg(fw::reg::a1) == 0);
  CHECK(s.read_memory(0x1000'0120, 1)[0] == 0xEE);
}

TEST_CASE("clang-linked bss-only segment") {
  // readelf: LOAD 0x2000 -> 0x10010000 FileSiz 0x0 MemSiz 0x4
  const auto image = parse_elf(read_file(test::data_path("timer_irq.elf")));
  REQUIRE(image.segments.size() == 3);
  CHECK(image.segments[0].bytes.size() == 0x184);
  CHECK(image.segments[1].bytes.size() == 7);
  CHECK(image.segments[2].addr == 0x1001'0000);
  CHECK(image.segments[2].bytes == std::vector<std::uint8_t>(4, 0));
}

TEST_CASE("writer and parser round trip") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    FirmwareImage image;
    image.entry = 0x1000'0000 + static_cast<std::uint32_t>(rng() % 0x100) * 2;
    std::uint32_t addr = 0x1000'0000;
    const int segments = 1 + static_cast<int>(rng() % 4);
    for (int i = 0; i < segments; ++i) {
      Segment seg;
      seg.addr = addr;
      seg.bytes.resize(1 + rng() % 300);
      for (auto& b : seg.bytes) b = rng() % 3 ? static_cast<std::uint8_t>(rng()) : 0;
      if (rng() % 2) seg.bytes.resize(seg.bytes.size() + rng() % 64, 0);  // trailing zeros become memsz
      addr += static_cast<std::uint32_t>(seg.bytes.size()) + 16;
      image.segments.push_back(std::move(seg));
    }
    CHECK(parse_elf(write_elf(image)) == image);
  }
}

TEST_CASE("raw binary at SRAM0 base") {
  soc::Soc s(soc::mlem_profile());
  const std::vector<std::uint8_t> bytes = {0x13, 0x05, 0x50, 0x00, 0x73, 0x00, 0x10, 0x00};  // addi a0,x0,5; ebreak
  load(s, raw_image(bytes, 0x1000'0000));
  CHECK(s.core().state().pc == 0x1000'0000);
  s.run(100);
  CHECK(s.core().state().reg(fw::reg::a0) == 5);
}

TEST_CASE("entry override and reset pc") {
  soc::Soc s(soc::mlem_profile());
  load(s, raw_image(std::vector<std::uint8_t>(16, 0), 0x1000'0000), 0x1000'0008);
  CHECK(s.core().state().pc == 0x1000'0008);
  s.reset();
  CHECK(s.core().state().pc == 0x1000'0008);
}

TEST_CASE("segment outside SRAM") {
  soc::Soc s(soc::mlem_profile());
  const std::vector<std::uint8_t> bytes(4, 1);
  FirmwareImage image = raw_image(bytes, 0x1000'0000);
  image.segments.push_back({0x4000'0000, bytes});
  try {
    load(s, image);
    FAIL("expected RangeError");
  } catch (const mem::RangeError& e) {
    CHECK(std::string(e.what()).find("0x40000000") != std::string::npos);
  }
  // Nothing was written.
  CHECK(s.read_memory(0x1000'0000, 4) == std::vector<std::uint8_t>(4, 0));
}

TEST_CASE("empty image leaves the pc alone") {
  soc::Soc s(soc::mlem_profile());
  s.core().state().pc = 0x1000'0040;
  load(s, FirmwareImage{});
  CHECK(s.core().state().pc == 0x1000'0040);
}

TEST_CASE("loader leaves peripherals alone") {
  soc::Soc s(soc::mlem_profile());
  s.gpio().write(periph::gpio_reg::kOut, 0x5, 0);
  s.uart().write(periph::uart_reg::kBaudDiv, 16, 0);
  load(s, parse_elf(minimal_elf()));
  CHECK(s.gpio().out() == 0x5);
  CHECK(s.uart().baud_div() == 16);
}

TEST_CASE("--bin address syntax") {
  const auto a = parse_bin_spec("prog.bin@0x10010000", 0x1000'0000);
  CHECK(a.path == "prog.bin");
  CHECK(a.addr == 0x1001'0000);
  const auto b = parse_bin_spec("prog.bin", 0x1000'0000);
  CHECK(b.addr == 0x1000'0000);
  CHECK_THROWS(parse_bin_spec("prog.bin@zz", 0));
  CHECK_THROWS(read_file("/nonexistent/file.elf"));
}

}  // TEST_SUITE
