#include "edap/protocol/kem.hpp"

#include <sodium.h>

#include "edap/common/errors.hpp"

namespace edap::protocol {

namespace {

// Sealed-box nonce: BLAKE2b-192(ephemeral_pk || recipient_pk).
std::array<std::uint8_t, crypto_box_NONCEBYTES> seal_nonce(const std::uint8_t* epk,
                                                           const PublicKey& pk) {
  std::array<std::uint8_t, crypto_box_NONCEBYTES> nonce{};
  crypto_generichash_state st;
  crypto_generichash_init(&st, nullptr, 0, nonce.size());
  crypto_generichash_update(&st, epk, crypto_box_PUBLICKEYBYTES);
  crypto_generichash_update(&st, pk.bytes.data(), pk.bytes.size());
  crypto_generichash_final(&st, nonce.data(), nonce.size());
  return nonce;
}

}  // namespace

KeyPair generate_keypair(DeterministicRng& rng) {
  ensure_sodium();
  auto seed = rng.bytes<crypto_box_SEEDBYTES>();
  KeyPair kp;
  crypto_box_seed_keypair(kp.pub.bytes.data(), kp.priv.mut().data(), seed.data());
  secure_wipe(seed.data(), seed.size());
  return kp;
}

WrappedKey wrap_key(const PublicKey& recipient, ByteView key, DeterministicRng& rng) {
  KeyPair eph = generate_keypair(rng);
  WrappedKey out;
  out.blob.resize(kWrapOverheadBytes + key.size());
  std::copy(eph.pub.bytes.begin(), eph.pub.bytes.end(), out.blob.begin());
  auto nonce = seal_nonce(eph.pub.bytes.data(), recipient);
  if (crypto_box_easy(out.blob.data() + kPublicKeyBytes, key.data(), key.size(), nonce.data(),
                      recipient.bytes.data(), eph.priv.view().data()) != 0) {
    throw ProtocolError("public key rejected by key encapsulation");
  }
  return out;
}

Bytes unwrap_key(const KeyPair& recipient, const WrappedKey& wrapped) {
  ensure_sodium();
  if (wrapped.blob.size() < kWrapOverheadBytes) throw DecryptFailure("wrapped key too short");
  const std::uint8_t* epk = wrapped.blob.data();
  auto nonce = seal_nonce(epk, recipient.pub);
  Bytes out(wrapped.blob.size() - kWrapOverheadBytes);
  if (crypto_box_open_easy(out.data(), wrapped.blob.data() + kPublicKeyBytes,
                           wrapped.blob.size() - kPublicKeyBytes, nonce.data(), epk,
                           recipient.priv.view().data()) != 0) {
    throw DecryptFailure("wrapped key does not open under this processor");
  }
  return out;
}

}  // namespace edap::protocol
