#pragma once

#include <cstdint>
#include <optional>
#include <unordered_set>

#include "edap/common/rng.hpp"
#include "edap/protocol/kem.hpp"
#include "edap/protocol/processor.hpp"

namespace edap::protocol {

/// What the platform hands the owner: a fresh SEID and the key to wrap to.
struct ResourceGrant {
  std::uint64_t seid = 0;
  PublicKey pub;
};

/// The untrusted platform provider's bookkeeping.
class PlatformState {
 public:
  explicit PlatformState(DeterministicRng rng) : rng_(std::move(rng)) {}

  /// Fault hook: a dishonest platform advertises this key instead.
  void forge_public_key(std::optional<PublicKey> pk) { forged_ = std::move(pk); }

  std::uint64_t fresh_seid();
  const std::optional<PublicKey>& forged_key() const noexcept { return forged_; }
  std::size_t issued() const noexcept { return issued_.size(); }

 private:
  DeterministicRng rng_;
  std::unordered_set<std::uint64_t> issued_;
  std::optional<PublicKey> forged_;
};

ResourceGrant grant_resources(PlatformState& pp, const ProcessorIdentity& processor);

}  // namespace edap::protocol
