#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "edap/machine/machine.hpp"
#include "edap/machine/taint.hpp"

namespace edap::machine {

struct Violation {
  std::string location;  // "memory", "l1d", "l1i", "register", "buffer", "platform"
  std::uint64_t address = 0;  // line ea, register index, or buffer slot
  Placement placement = Placement::fu_enclave;
  std::string provenance;
  std::size_t bytes = 0;  // tainted or matching bytes at this location

  bool operator==(const Violation&) const = default;
};

/// Every location outside the footprint that holds data-owner plaintext.
/// The footprint depends on placement and on whether the owner is running:
/// registers count as inside only for the cleartext placements, the L1s
/// only for CLEARTEXT_L1, and either only while the owner is in problem
/// state (hidden registers excepted). With a scanner, memory, the L1s,
/// and platform state are also searched for plaintext content.
std::vector<Violation> confidentiality_audit(const Machine& m,
                                             const SecretScanner* scanner = nullptr);

/// One record per line: `location address placement provenance bytes`.
std::string format_audit(const std::vector<Violation>& v);
/// {"violations": [...], "count": n}
std::string audit_json(const std::vector<Violation>& v);

}  // namespace edap::machine
