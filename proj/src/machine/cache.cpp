#include "edap/machine/cache.hpp"

#include <algorithm>
#include <stdexcept>

namespace edap::machine {

void CacheGeometry::validate() const {
  if (line_bytes == 0 || ways == 0 || size_bytes == 0 || size_bytes % (line_bytes * ways) != 0) {
    throw std::invalid_argument("cache size must be a whole number of sets");
  }
}

CacheIndex::CacheIndex(CacheGeometry g) : geom_(g) {
  geom_.validate();
  entries_.resize(geom_.lines());
}

std::optional<std::size_t> CacheIndex::find(std::uint64_t ea, ThreadId thread) const {
  const std::uint64_t line = ea / geom_.line_bytes;
  const std::size_t base = set_of(line) * geom_.ways;
  for (std::size_t w = 0; w < geom_.ways; ++w) {
    const Entry& e = entries_[base + w];
    if (e.valid && e.line == line && e.thread == thread) return base + w;
  }
  return std::nullopt;
}

CacheIndex::Access CacheIndex::access(std::uint64_t ea, ThreadId thread) {
  Access a;
  if (auto s = find(ea, thread)) {
    a.hit = true;
    a.slot = *s;
    entries_[*s].stamp = ++clock_;
    return a;
  }
  const std::uint64_t line = ea / geom_.line_bytes;
  const std::size_t base = set_of(line) * geom_.ways;
  std::size_t victim = base;
  for (std::size_t w = 0; w < geom_.ways; ++w) {
    const Entry& e = entries_[base + w];
    if (!e.valid) {
      victim = base + w;
      break;
    }
    if (e.stamp < entries_[victim].stamp) victim = base + w;
  }
  if (entries_[victim].valid) a.evicted = entries_[victim];
  entries_[victim] = {true, line, thread, ++clock_};
  a.slot = victim;
  return a;
}

void CacheIndex::invalidate_all() noexcept {
  for (auto& e : entries_) e.valid = false;
}

std::size_t CacheIndex::valid_lines() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(entries_.begin(), entries_.end(), [](const Entry& e) { return e.valid; }));
}

}  // namespace edap::machine
