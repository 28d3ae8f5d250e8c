#pragma once

#include <cstdint>
#include <map>

#include "edap/crypto/codec.hpp"

namespace edap::exec {

/// A line as it sits in L2/memory: ciphertext and digest only.
struct MemoryLine {
  crypto::CipherBlock cipher;
  crypto::Digest digest;
};

/// Untrusted memory plus the untrusted ea -> real translation. Translation
/// is the identity unless overridden; overrides stay injective.
class MemoryImage {
 public:
  std::uint64_t translate(std::uint64_t ea) const;

  /// Maps `ea` to `real`. Throws IntegrityError if another ea already
  /// translates to `real` (translation must stay injective).
  void remap(std::uint64_t ea, std::uint64_t real);
  /// Exchanges the translations of two eas.
  void swap(std::uint64_t ea_a, std::uint64_t ea_b);

  bool mapped(std::uint64_t real) const { return lines_.contains(real); }
  /// IntegrityError if `real` is already initialized.
  void install(std::uint64_t real, const MemoryLine& line);
  /// Overwrites an initialized line (write-back of a re-encrypted line).
  void update(std::uint64_t real, const MemoryLine& line);
  void erase(std::uint64_t real) { lines_.erase(real); }
  /// UnmappedBlock if absent.
  const MemoryLine& at(std::uint64_t real) const;
  /// Raw mutable access, the adversary's view.
  MemoryLine& raw(std::uint64_t real);

  const std::map<std::uint64_t, MemoryLine>& lines() const noexcept { return lines_; }

 private:
  std::map<std::uint64_t, MemoryLine> lines_;
  std::map<std::uint64_t, std::uint64_t> translation_;
};

}  // namespace edap::exec
