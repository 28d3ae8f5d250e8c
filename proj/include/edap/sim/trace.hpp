#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "edap/common/privilege.hpp"

namespace edap::sim {

inline constexpr std::size_t kLogicalRegisters = 64;
inline constexpr std::size_t kMaxSources = 3;

enum class EventKind : std::uint8_t { non_mem, load, store, branch, priv_enter, priv_exit };

std::string_view to_string(EventKind k) noexcept;
std::optional<EventKind> parse_event_kind(std::string_view s) noexcept;

/// One dynamic instruction. For priv_enter/priv_exit, `priv` is the level
/// being entered; for every other kind it is the level the event runs at.
/// Stores read srcs[0] as the address base and srcs[1] as the data.
struct TraceEvent {
  std::uint64_t seq = 0;
  EventKind kind = EventKind::non_mem;
  std::optional<std::uint8_t> dst;
  std::vector<std::uint8_t> srcs;
  std::optional<std::uint64_t> ea;
  ThreadId thread = 0;
  Privilege priv = Privilege::problem;

  bool is_memory() const noexcept { return kind == EventKind::load || kind == EventKind::store; }
  bool is_transition() const noexcept {
    return kind == EventKind::priv_enter || kind == EventKind::priv_exit;
  }
  bool operator==(const TraceEvent&) const = default;
};

using Trace = std::vector<TraceEvent>;

/// Throws std::invalid_argument describing the first broken invariant.
void validate_event(const TraceEvent& e);

/// Text form, one event per line:
///   seq kind dst srcs ea thread priv
/// dst and ea are `-` when absent; srcs is a comma list or `-`; ea is hex
/// with a 0x prefix; priv is problem, supervisor, or hypervisor. Blank
/// lines and lines starting with '#' are ignored.
std::string format_event(const TraceEvent& e);
std::string format_trace(const Trace& t);
/// ParseError carrying the 1-based line number of the first bad line.
Trace parse_trace(std::string_view text);
Trace read_trace_file(const std::string& path);
void write_trace_file(const std::string& path, const Trace& t);

}  // namespace edap::sim
