#include "edap/protocol/stream.hpp"

#include <sodium.h>

#include <string>

#include "edap/common/errors.hpp"
#include "edap/common/rng.hpp"

namespace edap::protocol {

namespace {

constexpr std::size_t kSealedBytes = crypto::kLineBytes + crypto::kDigestBytes;
constexpr std::size_t kHeaderBytes = 16;

std::array<std::uint8_t, crypto_aead_chacha20poly1305_IETF_NPUBBYTES> frame_nonce(
    std::uint64_t seq) {
  std::array<std::uint8_t, crypto_aead_chacha20poly1305_IETF_NPUBBYTES> n{};
  store_be64(n.data() + 4, seq);
  return n;
}

}  // namespace

StreamSender::StreamSender(const SessionKey& key, std::uint64_t first_seq)
    : key_(key), next_seq_(first_seq) {
  ensure_sodium();
}

Frame StreamSender::send(const crypto::EncryptedBlock& block) {
  Frame f{};
  const std::uint64_t seq = next_seq_++;
  store_be64(f.data(), seq);
  store_be64(f.data() + 8, block.ea);

  std::array<std::uint8_t, kSealedBytes> body{};
  std::copy(block.cipher.bytes.begin(), block.cipher.bytes.end(), body.begin());
  std::copy(block.digest.bytes.begin(), block.digest.bytes.end(),
            body.begin() + crypto::kLineBytes);

  auto nonce = frame_nonce(seq);
  unsigned long long tag_len = 0;
  crypto_aead_chacha20poly1305_ietf_encrypt_detached(
      f.data() + kHeaderBytes, f.data() + kHeaderBytes + kSealedBytes, &tag_len, body.data(),
      body.size(), f.data(), kHeaderBytes, nullptr, nonce.data(), key_.view().data());
  return f;
}

StreamReceiver::StreamReceiver(const SessionKey& key) : key_(key) { ensure_sodium(); }

StreamTuple StreamReceiver::receive(ByteView frame) {
  if (frame.size() != kFrameBytes) throw AuthError("frame has wrong length");
  const std::uint64_t seq = load_be64(frame.data());
  const std::uint64_t ea = load_be64(frame.data() + 8);

  std::array<std::uint8_t, kSealedBytes> body{};
  auto nonce = frame_nonce(seq);
  if (crypto_aead_chacha20poly1305_ietf_decrypt_detached(
          body.data(), nullptr, frame.data() + kHeaderBytes, kSealedBytes,
          frame.data() + kHeaderBytes + kSealedBytes, frame.data(), kHeaderBytes, nonce.data(),
          key_.view().data()) != 0) {
    throw AuthError("transport tag mismatch on frame " + std::to_string(seq));
  }
  if (watermark_ && seq <= *watermark_) {
    throw ReplayError("frame " + std::to_string(seq) + " at or below watermark " +
                      std::to_string(*watermark_));
  }
  if (seen_eas_.contains(ea)) {
    throw ReplayError("tuple for ea " + std::to_string(ea) + " already delivered");
  }
  watermark_ = seq;
  seen_eas_.insert(ea);

  StreamTuple t;
  t.seq = seq;
  t.block.ea = ea;
  std::copy(body.begin(), body.begin() + crypto::kLineBytes, t.block.cipher.bytes.begin());
  std::copy(body.begin() + crypto::kLineBytes, body.end(), t.block.digest.bytes.begin());
  return t;
}

}  // namespace edap::protocol
