#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "edap/machine/cache.hpp"
#include "edap/machine/footprint.hpp"
#include "edap/sim/trace.hpp"

namespace edap::sim {

using machine::Placement;

struct LatencyConfig {
  unsigned dec_cycles = 20;
  unsigned enc_cycles = 20;
  bool engine_pipelined = true;
  /// Multiplies both latencies; results round to the nearest cycle.
  double scale = 1.0;

  unsigned dec() const noexcept;
  unsigned enc() const noexcept;
  void validate() const;
};

struct CoreConfig {
  unsigned issue_width = 4;
  unsigned if_cycles = 1;
  unsigned id_cycles = 1;
  unsigned ex_cycles = 1;
  unsigned wb_cycles = 1;
  /// The MEM stage takes the L1 hit time.
  unsigned l1_hit_cycles = 1;
  /// Added after MEM on an L1 miss that hits L2.
  unsigned l2_hit_cycles = 12;
  /// Added on top of l2_hit_cycles when L2 misses too.
  unsigned memory_cycles = 100;
  machine::CacheGeometry l1i{48 * 1024, 8, 128};
  machine::CacheGeometry l1d{32 * 1024, 8, 128};
  machine::CacheGeometry l2{1024 * 1024, 8, 128};
  /// Engine engage/disengage cost per privilege transition; one more cycle
  /// is charged per valid L1D line flushed.
  unsigned clearing_fixed_cycles = 10;
  unsigned branch_redirect_cycles = 1;

  /// Sum of the five base stage latencies.
  unsigned base_depth() const noexcept {
    return if_cycles + id_cycles + ex_cycles + l1_hit_cycles + wb_cycles;
  }
  void validate() const;
};

struct StallBreakdown {
  std::uint64_t dec = 0;
  std::uint64_t enc = 0;
  std::uint64_t cache_miss = 0;
  std::uint64_t dependency = 0;
  std::uint64_t clearing = 0;

  bool operator==(const StallBreakdown&) const = default;
};

struct SimCounters {
  std::uint64_t l1d_accesses = 0;
  std::uint64_t l1d_hits = 0;
  std::uint64_t l2_misses = 0;
  std::uint64_t buffer_lookups = 0;
  std::uint64_t buffer_hits = 0;
  std::uint64_t dec_ops = 0;
  std::uint64_t enc_ops = 0;
  std::uint64_t transitions = 0;

  bool operator==(const SimCounters&) const = default;
};

struct SimReport {
  Placement placement = Placement::baseline;
  std::size_t buffer_entries = 8;
  LatencyConfig lat;
  CoreConfig core;

  std::uint64_t cycles = 0;
  std::uint64_t instructions = 0;
  /// instructions / cycles, 0 for an empty trace.
  double ipc = 0.0;
  /// Set by compare_placements (and for baseline runs).
  std::optional<double> normalized_ipc;
  StallBreakdown stalls;
  SimCounters counters;

  double slowdown_vs(const SimReport& base) const noexcept {
    return static_cast<double>(cycles) / static_cast<double>(base.cycles);
  }
};

/// Pipeline depth for non-memory instructions under a placement.
unsigned pipeline_depth(Placement p, const LatencyConfig& lat, const CoreConfig& core);

/// In-order, W-wide, scoreboarded stage model. All placements, including
/// baseline, drain the pipeline at a privilege transition; the EDAP ones
/// also pay the clearing cost and flush L1D and the buffers.
/// std::invalid_argument for an invalid trace or configuration.
SimReport simulate(const Trace& trace, const machine::FootprintConfig& placement,
                   const LatencyConfig& lat, const CoreConfig& core);
SimReport simulate(const Trace& trace, Placement placement, const LatencyConfig& lat = {},
                   const CoreConfig& core = {});

/// One report per scale, in the given order. std::invalid_argument for a
/// negative scale.
std::vector<SimReport> sweep_latency(const Trace& trace, const machine::FootprintConfig& placement,
                                     const CoreConfig& core, const std::vector<double>& scales,
                                     LatencyConfig lat = {});

struct PlacementSummary {
  /// Baseline first, then CLEARTEXT_L1, REGFILE, BUFFERED, FU_ENCLAVE.
  std::vector<SimReport> reports;
  /// Cycles are non-decreasing along `reports`.
  bool ordered = false;

  const SimReport& at(Placement p) const;
};

PlacementSummary compare_placements(const Trace& trace, const LatencyConfig& lat = {},
                                    const CoreConfig& core = {}, std::size_t buffer_entries = 8);

}  // namespace edap::sim
