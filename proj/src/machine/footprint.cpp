#include "edap/machine/footprint.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <string>

namespace edap::machine {

std::string_view to_string(Placement p) noexcept {
  switch (p) {
    case Placement::baseline: return "BASELINE";
    case Placement::fu_enclave: return "FU_ENCLAVE";
    case Placement::fu_enclave_buffered: return "FU_ENCLAVE_BUFFERED";
    case Placement::cleartext_regfile: return "CLEARTEXT_REGFILE";
    case Placement::cleartext_l1: return "CLEARTEXT_L1";
  }
  return "?";
}

std::optional<Placement> parse_placement(std::string_view s) noexcept {
  std::string up(s);
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) {
    return c == '-' ? '_' : static_cast<char>(std::toupper(c));
  });
  for (Placement p : kAllPlacements) {
    if (up == to_string(p)) return p;
  }
  return std::nullopt;
}

void FootprintConfig::validate() const {
  if (placement == Placement::baseline) {
    throw std::invalid_argument("baseline has no trusted footprint to model");
  }
  if (buffered() && buffer_entries == 0) {
    throw std::invalid_argument("buffered placement needs at least one buffer entry");
  }
}

}  // namespace edap::machine
