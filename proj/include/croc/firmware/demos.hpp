#pragma once

#include "croc/loader/loader.hpp"
#include "croc/soc/config.hpp"

#include <cstdint>
#include <string>
#include <string_view>

namespace croc::fw {

/// Prints `text` on the UART, waits for the transmitter to drain, then ebreak.
loader::FirmwareImage hello_program(const soc::SocConfig& config, std::string_view text = "Hello from Croc!\n");

/// Board demo: prints a banner, lights GPIO 0-7, shows an 8-LED NeoPixel
/// gradient (when present), then loops forever echoing UART RX back to TX.
/// Each received byte is also shown on GPIO 0-7 and on the first LED, and
/// GPIO inputs 8-15 are mirrored onto outputs 16-23.
loader::FirmwareImage board_demo_program(const soc::SocConfig& config);

/// `count` unrolled, branch-free ALU instructions drawn from `seed`, then ebreak.
loader::FirmwareImage alu_block_program(std::uint32_t origin, std::size_t count, std::uint64_t seed);

/// Names accepted by `demo_program`: "hello", "board", "alu".
loader::FirmwareImage demo_program(const std::string& name, const soc::SocConfig& config);

}  // namespace croc::fw
