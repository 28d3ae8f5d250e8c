#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "edap/machine/cache.hpp"
#include "edap/sim/trace.hpp"

namespace edap::sim {

enum class TraceKind : std::uint8_t { dep_chain, independent, mem_bound, mixed };

std::string_view to_string(TraceKind k) noexcept;
std::optional<TraceKind> parse_trace_kind(std::string_view s) noexcept;

/// Register conventions shared by every generator: r0..r7 hold address
/// bases and r8..r15 inputs, neither ever written; results rotate through
/// r16..r63.
inline constexpr std::uint8_t kBaseRegs = 8;
inline constexpr std::uint8_t kFirstInput = 8;
inline constexpr std::uint8_t kFirstResult = 16;

struct TraceParams {
  std::size_t length = 100000;
  double l1_hit_rate = 0.9;
  double load_fraction = 0.25;
  double store_fraction = 0.10;
  /// Protected events between privilege round trips; 0 disables them.
  std::size_t priv_switch_period = 0;

  /// mixed only.
  double branch_fraction = 0.10;
  /// Privileged events per round trip.
  std::size_t priv_burst = 24;
  /// Each source names a recent result with probability `reuse` at a
  /// distance of 1 + Geometric(dep_spread); otherwise an input register.
  double reuse = 0.6;
  double dep_spread = 0.3;
  /// Loads' results are consumed no sooner than this many events later.
  std::size_t load_use_distance = 24;

  ThreadId thread = 1;
  std::uint64_t data_base = 0x100000;
  std::uint64_t platform_base = 0x40000000;
  std::size_t hot_lines = 64;
  std::size_t cold_lines = 4096;
  /// Cache the hit rate is realized against.
  machine::CacheGeometry l1d{};

  /// std::invalid_argument on out-of-range values.
  void validate() const;
};

/// Deterministic for a fixed (kind, params, seed). dep_chain and
/// independent are pure non_mem streams; mem_bound and mixed draw a hot
/// line with probability l1_hit_rate and a cold, non-resident line
/// otherwise, tracking residency with the configured cache.
Trace generate_trace(TraceKind kind, const TraceParams& params, std::uint64_t seed);

/// Fraction of protected memory events that hit a cold-started L1 of the
/// given geometry with no flushes.
double measured_hit_rate(const Trace& t, const machine::CacheGeometry& l1d);

}  // namespace edap::sim
