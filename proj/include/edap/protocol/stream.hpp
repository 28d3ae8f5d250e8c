#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_set>
#include <vector>

#include "edap/common/bytes.hpp"
#include "edap/common/secret.hpp"
#include "edap/crypto/codec.hpp"

namespace edap::protocol {

inline constexpr std::size_t kSessionKeyBytes = 32;
inline constexpr std::size_t kTransportTagBytes = 16;
/// seq (8, BE) || ea (8, BE) || cipher (128) || digest (8) || tag (16).
inline constexpr std::size_t kFrameBytes = 8 + crypto::kEncryptedBlockBytes + kTransportTagBytes;

using SessionKey = Secret<kSessionKeyBytes>;
using Frame = std::array<std::uint8_t, kFrameBytes>;

/// One delivered <E, C, D> tuple with its transport sequence number.
struct StreamTuple {
  std::uint64_t seq = 0;
  crypto::EncryptedBlock block;
};

/// Owner side of the secure stream. The XTS ciphertext and digest are sealed
/// a second time under the session key; seq and ea travel as associated data.
class StreamSender {
 public:
  explicit StreamSender(const SessionKey& key, std::uint64_t first_seq = 0);

  Frame send(const crypto::EncryptedBlock& block);
  std::uint64_t next_seq() const noexcept { return next_seq_; }

 private:
  SessionKey key_;
  std::uint64_t next_seq_;
};

/// Processor side. Authenticates every frame, then enforces a strictly
/// increasing sequence number and at most one tuple per effective address.
class StreamReceiver {
 public:
  explicit StreamReceiver(const SessionKey& key);

  /// Throws AuthError (bad tag or length) or ReplayError (seq at or below
  /// the watermark, or an ea already delivered). Nothing is recorded on
  /// failure.
  StreamTuple receive(ByteView frame);

  std::size_t accepted() const noexcept { return seen_eas_.size(); }

 private:
  SessionKey key_;
  std::optional<std::uint64_t> watermark_;
  std::unordered_set<std::uint64_t> seen_eas_;
};

}  // namespace edap::protocol
