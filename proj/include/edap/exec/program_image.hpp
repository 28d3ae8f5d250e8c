#pragma once

#include <cstdint>
#include <vector>

#include "edap/common/bytes.hpp"
#include "edap/common/privilege.hpp"
#include "edap/crypto/codec.hpp"

namespace edap::exec {

struct Section {
  std::uint64_t ea = 0;
  Bytes bytes;
};

/// A statically linked program as the owner holds it in the clear.
struct ProgramImage {
  std::vector<Section> sections;
  std::uint64_t entry_point = 0;
  ThreadId thread_id = 0;

  /// AlignmentError for a misaligned section or a length that is not a
  /// multiple of 128; ImageError for overlap, an empty image, or an entry
  /// point outside every section.
  void validate() const;

  /// Every line in ascending ea order. Calls validate().
  std::vector<std::pair<std::uint64_t, crypto::PlainBlock>> lines() const;

  /// One section at `base`, zero-padded to a whole number of lines.
  static ProgramImage from_flat(ByteView data, std::uint64_t base, std::uint64_t entry,
                                ThreadId thread);
};

}  // namespace edap::exec
