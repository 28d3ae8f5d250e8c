#pragma once

#include <array>
#include <cstdint>

#include "edap/common/bytes.hpp"
#include "edap/common/rng.hpp"
#include "edap/common/secret.hpp"

namespace edap::protocol {

inline constexpr std::size_t kPublicKeyBytes = 32;
inline constexpr std::size_t kPrivateKeyBytes = 32;
/// Ephemeral public key (32) + authenticator (16) ahead of the payload.
inline constexpr std::size_t kWrapOverheadBytes = 48;

struct PublicKey {
  std::array<std::uint8_t, kPublicKeyBytes> bytes{};
  bool operator==(const PublicKey&) const = default;
};

using PrivateKey = Secret<kPrivateKeyBytes>;

/// E_P(key): an opaque encapsulation of a symmetric key under a processor
/// public key.
struct WrappedKey {
  Bytes blob;
  bool operator==(const WrappedKey&) const = default;
};

struct KeyPair {
  PublicKey pub;
  PrivateKey priv;
};

KeyPair generate_keypair(DeterministicRng& rng);

/// Randomized: two wraps of the same key differ. Throws ProtocolError if the
/// public key is unusable (e.g. a low-order point).
WrappedKey wrap_key(const PublicKey& recipient, ByteView key, DeterministicRng& rng);

/// Deterministic inverse of wrap_key. Throws DecryptFailure for a wrong key
/// pair or any corruption of the blob.
Bytes unwrap_key(const KeyPair& recipient, const WrappedKey& wrapped);

}  // namespace edap::protocol
