#pragma once

#include <bitset>
#include <cstddef>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "edap/common/bytes.hpp"

namespace edap::machine {

/// Per-byte provenance: a set bit marks data-owner plaintext. Test
/// instrumentation only; no functional path reads it.
using RegisterTaint = std::bitset<16>;
using LineTaint = std::bitset<128>;

/// Looks for data-owner plaintext by content rather than by provenance:
/// every k-byte window of the registered secrets is indexed, and a scan
/// reports offsets where any of them reappears. Windows with fewer than
/// four distinct byte values (zero runs, small integers) are skipped since
/// they also occur in public headers.
class SecretScanner {
 public:
  static constexpr std::size_t kWindow = 16;

  void add(ByteView secret);
  std::size_t indexed() const noexcept { return grams_.size(); }
  /// Offsets in `hay` where an indexed window starts.
  std::vector<std::size_t> scan(ByteView hay) const;
  bool found_in(ByteView hay) const { return !scan(hay).empty(); }

 private:
  std::vector<Bytes> store_;
  std::unordered_set<std::string_view> grams_;
};

}  // namespace edap::machine
