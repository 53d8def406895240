#include "croc/cli/app.hpp"

#include "croc/cli/repl.hpp"
#include "croc/control/server.hpp"
#include "croc/firmware/demos.hpp"
#include "croc/loader/loader.hpp"
#include "croc/soc/soc.hpp"
#include "croc/trace/trace.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include <fmt/format.h>

namespace croc::cli {
namespace {

struct PlatformOptions {
  std::string profile = "mlem";
  std::string config_file;
  std::uint64_t clk_hz = 0;
};

struct FirmwareOptions {
  std::string elf;
  std::string bin;
  std::string demo;
  bool given() const { return !elf.empty() || !bin.empty() || !demo.empty(); }
};

void add_platform(CLI::App& cmd, PlatformOptions& p) {
  cmd.add_option("--profile", p.profile, "platform profile (mlem, minimal)");
  cmd.add_option("--config", p.config_file, "key = value configuration file");
  cmd.add_option("--clk-hz", p.clk_hz, "clock frequency used for pin timestamps");
}

void add_firmware(CLI::App& cmd, FirmwareOptions& f) {
  auto* elf = cmd.add_option("--elf", f.elf, "ELF32 RISC-V firmware");
  auto* bin = cmd.add_option("--bin", f.bin, "raw image, FILE or FILE@ADDR");
  auto* demo = cmd.add_option("--demo", f.demo, "built-in firmware (hello, board, alu)");
  elf->excludes(bin)->excludes(demo);
  bin->excludes(demo);
}

soc::SocConfig make_config(const PlatformOptions& p) {
  soc::SocConfig c = soc::profile_by_name(p.profile);
  if (!p.config_file.empty()) c = soc::load_config_file(p.config_file, c);
  if (p.clk_hz) c.clk_hz = p.clk_hz;
  c.validate();
  return c;
}

/// Throws on unreadable or invalid images.
loader::FirmwareImage read_firmware(const FirmwareOptions& f, const soc::SocConfig& config) {
  if (!f.elf.empty()) return loader::parse_elf(loader::read_file(f.elf));
  if (!f.bin.empty()) {
    const auto spec = loader::parse_bin_spec(f.bin, config.sram0_base);
    return loader::raw_image(loader::read_file(spec.path), spec.addr);
  }
  return fw::demo_program(f.demo, config);
}

class UartToStream : public soc::SocObserver {
 public:
  explicit UartToStream(std::ostream& out) : out_(out) {}
  void on_uart_tx(std::uint8_t byte, Cycle) override { out_.put(static_cast<char>(byte)).flush(); }

 private:
  std::ostream& out_;
};

std::atomic<Repl*> g_repl{nullptr};

extern "C" void on_sigint(int) {
  if (Repl* r = g_repl.load()) r->interrupt();
}

int do_run(const PlatformOptions& platform, const FirmwareOptions& firmware, std::uint64_t cycles,
           const std::string& trace_path, const std::string& pins_path, const std::string& uart_mode,
           const std::string& stim_path, const std::string& obi_log_path, std::istream& in, std::ostream& out,
           std::ostream& err) {
  soc::SocConfig config;
  try {
    config = make_config(platform);
  } catch (const soc::ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  }
  soc::Soc soc(config);
  try {
    loader::load(soc, read_firmware(firmware, config));
  } catch (const std::exception& e) {
    err << "load failed: " << e.what() << "\n";
    return kExitLoad;
  }
  if (!stim_path.empty()) {
    try {
      soc.add_stimulus(soc::load_stimulus_file(stim_path));
    } catch (const std::exception& e) {
      err << "stimulus error: " << e.what() << "\n";
      return kExitUsage;
    }
  }

  std::ofstream trace_file, pins_file, obi_file;
  if (!trace_path.empty()) trace_file.open(trace_path);
  if (!pins_path.empty()) pins_file.open(pins_path);
  if (!obi_log_path.empty()) {
    obi_file.open(obi_log_path);
    soc.fabric().set_log(&obi_file);
  }
  trace::TraceWriter tracer(trace_path.empty() ? nullptr : &trace_file);
  std::optional<trace::PinCsvWriter> pins;
  if (!pins_path.empty()) pins.emplace(pins_file);
  trace::StatsCollector stats;
  UartToStream uart_out(out);
  soc.add_observer(&tracer);
  soc.add_observer(&stats);
  if (pins) soc.add_observer(&*pins);

  std::thread reader;
  if (uart_mode == "stdio") {
    soc.add_observer(&uart_out);
    reader = std::thread([&soc, &in] {
      char c;
      while (in.get(c)) {
        const auto byte = static_cast<std::uint8_t>(c);
        soc.commands().push([&soc, byte] { soc.uart_send(std::span(&byte, 1)); });
      }
    });
    if (&in == &std::cin) reader.detach();
  }

  const auto result = soc.run(cycles);
  if (reader.joinable()) reader.join();
  soc.commands().drain();

  const auto total = stats.total();
  err << "stop: " << soc::stop_reason_name(result.reason) << "\n"
      << "pc: " << hex32(result.final_pc) << "\n"
      << "cycles: " << result.cycles << "\n"
      << "instret: " << result.instret << "\n"
      << fmt::format("ipc: {:.3f}\n", total.cycles ? total.ipc() : 0.0)
      << fmt::format("trace_digest: 0x{:016x}\n", tracer.digest());
  if (result.reason == soc::StopReason::DoubleFault) {
    err << soc.core().diagnostic() << "\n";
    return kExitDoubleFault;
  }
  return kExitOk;
}

int do_debug(const PlatformOptions& platform, const FirmwareOptions& firmware, const std::string& stim_path,
             std::istream& in, std::ostream& out, std::ostream& err) {
  soc::SocConfig config;
  loader::FirmwareImage image;
  std::vector<soc::Stimulus> stimulus;
  try {
    config = make_config(platform);
  } catch (const soc::ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  }
  try {
    image = read_firmware(firmware, config);
  } catch (const std::exception& e) {
    err << "load failed: " << e.what() << "\n";
    return kExitLoad;
  }
  try {
    if (!stim_path.empty()) stimulus = soc::load_stimulus_file(stim_path);
  } catch (const std::exception& e) {
    err << "stimulus error: " << e.what() << "\n";
    return kExitUsage;
  }

  ctl::SimHost host(config);
  host.start();
  try {
    host.post([&](soc::Soc& soc) {
          loader::load(soc, image);
          soc.add_stimulus(stimulus);
        })
        .get();
  } catch (const std::exception& e) {
    err << "load failed: " << e.what() << "\n";
    return kExitLoad;
  }

  Repl repl(host);
  const bool interactive = &in == &std::cin;
  if (interactive) {
    g_repl = &repl;
    std::signal(SIGINT, on_sigint);
  }
  out << "croc debug: type 'h' for help\n";
  std::string line;
  while (true) {
    out << "(croc) " << std::flush;
    if (!std::getline(in, line)) break;
    const auto r = repl.eval(line);
    out << r.output << std::flush;
    if (r.quit) break;
  }
  if (interactive) {
    std::signal(SIGINT, SIG_DFL);
    g_repl = nullptr;
  }
  host.stop();
  return kExitOk;
}

int do_serve(const PlatformOptions& platform, const FirmwareOptions& firmware, const std::string& address,
             std::uint16_t port, const std::string& ui_dir, std::uint64_t stats_interval, std::ostream& out,
             std::ostream& err) {
  soc::SocConfig config;
  try {
    config = make_config(platform);
  } catch (const soc::ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  }
  ctl::SimHost host(config, ctl::HostOptions{stats_interval});
  host.start();
  if (firmware.given()) {
    try {
      const auto image = read_firmware(firmware, config);
      host.post([&](soc::Soc& soc) { loader::load(soc, image); }).get();
    } catch (const std::exception& e) {
      err << "load failed: " << e.what() << "\n";
      return kExitLoad;
    }
  }
  ctl::ServerOptions options;
  options.address = address;
  options.port = port;
  if (!ui_dir.empty()) options.ui_dir = ui_dir;
  ctl::Server server(host, options);
  try {
    server.start();
  } catch (const std::exception& e) {
    err << "cannot listen on " << address << ":" << port << ": " << e.what() << "\n";
    return kExitUsage;
  }
  out << "listening on ws://" << address << ":" << server.port() << "/ (" << ctl::kProtocolVersion << ")\n"
      << std::flush;
  server.wait_for_signal();
  server.stop();
  host.stop();
  return kExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Croc/MLEM RISC-V virtual dev board", "croc_emu"};
  app.require_subcommand(1);

  PlatformOptions platform;
  FirmwareOptions firmware;
  std::uint64_t cycles = 10'000'000;
  std::string trace_path, pins_path, uart_mode = "none", stim_path, obi_log_path;

  auto* run = app.add_subcommand("run", "batch run");
  add_platform(*run, platform);
  add_firmware(*run, firmware);
  run->add_option("--cycles", cycles, "cycle budget");
  run->add_option("--trace", trace_path, "instruction trace output");
  run->add_option("--pins-csv", pins_path, "pin event CSV output");
  run->add_option("--uart", uart_mode, "stdio: TX to stdout, stdin to RX")->check(CLI::IsMember({"stdio", "none"}));
  run->add_option("--stim", stim_path, "scripted pad stimulus");
  run->add_option("--obi-log", obi_log_path, "bus transaction log");

  auto* debug = app.add_subcommand("debug", "interactive debugger");
  add_platform(*debug, platform);
  add_firmware(*debug, firmware);
  debug->add_option("--stim", stim_path, "scripted pad stimulus");

  std::string address = "127.0.0.1", ui_dir;
  std::uint16_t port = 8765;
  std::uint64_t stats_interval = 100'000;
  auto* serve = app.add_subcommand("serve", "control service");
  add_platform(*serve, platform);
  add_firmware(*serve, firmware);
  serve->add_option("--port", port, "TCP port (0 picks a free one)");
  serve->add_option("--address", address, "listen address");
  serve->add_option("--ui-dir", ui_dir, "static files served over HTTP")->check(CLI::ExistingDirectory);
  serve->add_option("--stats-interval", stats_interval, "cycles between stats events");

  std::string demo_name, demo_out;
  auto* demo = app.add_subcommand("demo", "write a built-in firmware as ELF");
  add_platform(*demo, platform);
  demo->add_option("name", demo_name, "hello, board or alu")->required();
  demo->add_option("--out", demo_out, "output ELF path")->required();

  auto* config_cmd = app.add_subcommand("config", "print the effective configuration and pad report");
  add_platform(*config_cmd, platform);

  std::vector<std::string> storage{"croc_emu"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*run) {
    if (!firmware.given()) {
      err << "run: one of --elf, --bin or --demo is required\n" << run->help();
      return kExitUsage;
    }
    return do_run(platform, firmware, cycles, trace_path, pins_path, uart_mode, stim_path, obi_log_path, in, out,
                  err);
  }
  if (*debug) {
    if (!firmware.given()) {
      err << "debug: one of --elf, --bin or --demo is required\n" << debug->help();
      return kExitUsage;
    }
    return do_debug(platform, firmware, stim_path, in, out, err);
  }
  if (*serve) return do_serve(platform, firmware, address, port, ui_dir, stats_interval, out, err);

  soc::SocConfig config;
  try {
    config = make_config(platform);
  } catch (const soc::ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (*demo) {
    try {
      const auto elf = loader::write_elf(fw::demo_program(demo_name, config));
      std::ofstream f(demo_out, std::ios::binary);
      f.write(reinterpret_cast<const char*>(elf.data()), static_cast<std::streamsize>(elf.size()));
      if (!f) throw std::runtime_error("cannot write " + demo_out);
    } catch (const std::exception& e) {
      err << e.what() << "\n";
      return kExitUsage;
    }
    return kExitOk;
  }
  out << config.to_text();
  const auto pads = config.pads;
  out << fmt::format("# pads: total={} croc_domain={} user={} gpio={}\n", pads.total, pads.croc_domain, pads.user,
                     pads.gpio_count);
  return kExitOk;
}

}  // namespace croc::cli
