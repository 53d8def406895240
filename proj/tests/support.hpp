#pragma once

#include "croc/firmware/assembler.hpp"
#include "croc/loader/loader.hpp"
#include "croc/soc/soc.hpp"

#include <memory>
#include <string>

namespace croc::test {

inline std::string data_path(const std::string& name) { return std::string(CROC_TEST_DATA) + "/" + name; }

/// mlem Soc with the assembled program loaded at its origin.
inline std::unique_ptr<soc::Soc> soc_with(const fw::Assembler& a, soc::SocConfig config = soc::mlem_profile()) {
  auto s = std::make_unique<soc::Soc>(std::move(config));
  loader::load(*s, a.image());
  return s;
}

}  // namespace croc::test
