#pragma once

#include <cstdint>
#include <memory>
#include <optional>

#include "edap/common/bytes.hpp"
#include "edap/common/privilege.hpp"
#include "edap/common/rng.hpp"
#include "edap/crypto/codec.hpp"
#include "edap/protocol/kem.hpp"
#include "edap/protocol/stream.hpp"

namespace edap::protocol {

/// The processor's trusted state: its burnt-in key pair and the registers
/// that hold SEID, session key, and the memory key once unwrapped. None of
/// the secret registers is reachable through the public interface; callers
/// get the engine operations instead.
class ProcessorIdentity {
 public:
  explicit ProcessorIdentity(KeyPair keys);

  const PublicKey& pub() const noexcept { return keys_.pub; }

  /// Unwraps the session key and installs it with `seid`. Any previous
  /// session is cleared first; on DecryptFailure the registers stay empty.
  void accept_session(const WrappedKey& wrapped_session_key, std::uint64_t seid);
  /// Unwraps <K1, K2>. Requires an accepted session (ProtocolError).
  void load_xts_key(const WrappedKey& wrapped_xts_key);
  /// Authenticated, replay-checked delivery of one stream frame.
  StreamTuple receive(ByteView frame);
  void clear_session() noexcept;

  bool has_session() const noexcept { return session_key_.has_value(); }
  bool has_xts_key() const noexcept { return codec_ != nullptr; }
  std::optional<std::uint64_t> seid() const noexcept { return seid_; }

  /// Engine operations under tweak <seid_reg, ea>. Throw ProtocolError if no
  /// memory key is loaded; open_line throws IntegrityError on a bad digest.
  crypto::PlainBlock open_line(std::uint64_t ea, const crypto::CipherBlock& cipher,
                               const crypto::Digest& digest) const;
  crypto::SealedLine seal_line(std::uint64_t ea, const crypto::PlainBlock& plain) const;
  /// Single data unit with a caller-chosen 16-byte tweak (register sealing).
  crypto::Block16 seal_unit(const crypto::Block16& tweak, const crypto::Block16& plain) const;
  crypto::Block16 open_unit(const crypto::Block16& tweak, const crypto::Block16& cipher) const;

  /// Observable state: magic "EDPS", public key, register occupancy flags,
  /// SEID, and accepted-frame count. Never includes key material.
  Bytes export_state() const;

  /// Fixture files. The private form is "EDPK" v1 || pub || priv and exists
  /// only so tests and the CLI can reuse a provisioned identity.
  Bytes save_private() const;
  static ProcessorIdentity load_private(ByteView file);
  Bytes save_public() const;
  static PublicKey load_public(ByteView file);

 private:
  const crypto::LineCodec& engine() const;

  KeyPair keys_;
  std::optional<std::uint64_t> seid_;
  std::optional<SessionKey> session_key_;
  std::shared_ptr<const crypto::LineCodec> codec_;
  std::optional<StreamReceiver> receiver_;
};

/// Fresh identity from a 32-byte seed; all session registers empty.
ProcessorIdentity provision_processor(const DeterministicRng::Seed& seed);
ProcessorIdentity provision_processor(DeterministicRng& rng);

}  // namespace edap::protocol
