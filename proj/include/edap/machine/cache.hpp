#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "edap/common/privilege.hpp"

namespace edap::machine {

struct CacheGeometry {
  std::size_t size_bytes = 32 * 1024;
  std::size_t ways = 8;
  std::size_t line_bytes = 128;

  std::size_t lines() const noexcept { return size_bytes / line_bytes; }
  std::size_t sets() const noexcept { return lines() / ways; }
  /// std::invalid_argument unless size is a whole number of sets.
  void validate() const;
};

/// Tag store of a set-associative, LRU, thread-tagged cache indexed by
/// effective address. Payloads live with the owner, addressed by slot.
class CacheIndex {
 public:
  struct Entry {
    bool valid = false;
    std::uint64_t line = 0;
    ThreadId thread = 0;
    std::uint64_t stamp = 0;
  };

  struct Access {
    bool hit = false;
    std::size_t slot = 0;
    /// Line displaced by a miss fill, if the victim way was valid.
    std::optional<Entry> evicted;
  };

  explicit CacheIndex(CacheGeometry g = {});

  std::optional<std::size_t> find(std::uint64_t ea, ThreadId thread) const;
  /// Lookup; on a miss the LRU way of the set is reallocated.
  Access access(std::uint64_t ea, ThreadId thread);

  void invalidate(std::size_t slot) noexcept { entries_[slot].valid = false; }
  void invalidate_all() noexcept;
  std::size_t valid_lines() const noexcept;

  const Entry& entry(std::size_t slot) const noexcept { return entries_[slot]; }
  std::size_t slots() const noexcept { return entries_.size(); }
  const CacheGeometry& geometry() const noexcept { return geom_; }

 private:
  std::size_t set_of(std::uint64_t line) const noexcept { return line % geom_.sets(); }

  CacheGeometry geom_;
  std::vector<Entry> entries_;
  std::uint64_t clock_ = 0;
};

}  // namespace edap::machine
