#pragma once

#include <cstddef>
#include <vector>

#include "edap/machine/audit.hpp"
#include "edap/machine/machine.hpp"
#include "edap/sim/trace.hpp"

namespace edap::sim {

struct FunctionalResult {
  std::size_t events = 0;
  std::size_t protected_events = 0;
  std::size_t transitions = 0;
  std::size_t audits = 0;
  /// Union over every audit point, in the order found.
  std::vector<machine::Violation> violations;
};

/// Drives the functional footprint model with a trace. Data lines the
/// protected thread touches are first created as empty blocks in one
/// privileged round trip. The audit runs after every transition and once
/// at the end. Model errors (IntegrityError, AccessDenied, ...) propagate.
FunctionalResult run_functional(machine::Machine& m, const Trace& trace,
                                const machine::SecretScanner* scanner = nullptr);

}  // namespace edap::sim
