#pragma once

#include <cstdint>

#include "edap/sim/pipeline.hpp"
#include "edap/sim/trace_gen.hpp"

namespace edap::sim {

/// Closed-form cycle count for the dep_chain and independent families on a
/// width-1 core. std::invalid_argument for any other kind or width.
std::uint64_t analytic_cycles(TraceKind kind, std::size_t length, Placement placement,
                              const LatencyConfig& lat = {}, const CoreConfig& core = {});

}  // namespace edap::sim
