#include "edap/sim/analytic.hpp"

#include <algorithm>
#include <stdexcept>

namespace edap::sim {

std::uint64_t analytic_cycles(TraceKind kind, std::size_t length, Placement placement,
                              const LatencyConfig& lat, const CoreConfig& core) {
  if (kind != TraceKind::dep_chain && kind != TraceKind::independent) {
    throw std::invalid_argument("no closed form for this trace kind");
  }
  if (core.issue_width != 1) throw std::invalid_argument("closed forms assume a width-1 core");
  lat.validate();
  core.validate();

  const std::uint64_t depth = pipeline_depth(placement, lat, core);
  if (length == 0) return depth - 1;
  const std::uint64_t n1 = length - 1;
  const std::uint64_t d = lat.dec();
  const std::uint64_t e = lat.enc();
  const bool engine = placement == Placement::fu_enclave ||
                      placement == Placement::fu_enclave_buffered;
  // Initiation interval of a stage that is present: 1 when pipelined,
  // its latency otherwise.
  auto occ = [&](std::uint64_t lat_cycles) -> std::uint64_t {
    if (lat_cycles == 0) return 1;
    return lat.engine_pipelined ? 1 : lat_cycles;
  };

  if (kind == TraceKind::independent) {
    const std::uint64_t gap = engine ? std::max(occ(d), occ(e)) : 1;
    return depth + n1 * gap;
  }
  if (!engine) return depth + n1 * core.ex_cycles;
  if (placement == Placement::fu_enclave) return depth + n1 * (d + core.ex_cycles + e);
  // Buffered: only the head misses; every later hop forwards from the buffer.
  return depth + n1 * std::max<std::uint64_t>(core.ex_cycles, e ? occ(e) : 1);
}

}  // namespace edap::sim
