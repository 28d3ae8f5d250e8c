#include "edap/crypto/codec.hpp"

#include <stdexcept>
#include <string>

#include "edap/common/errors.hpp"
#include "edap/crypto/gf128.hpp"

namespace edap::crypto {

namespace {

void require_aligned(const Tweak& tweak) {
  if (!tweak.aligned()) {
    throw AlignmentError("effective address " + std::to_string(tweak.ea) +
                         " is not 128-byte aligned");
  }
}

Block16 lengths_block() {
  Block16 b{};
  store_be64(b.data(), 8 * kBlockBytes);  // AAD: the serialized tweak
  store_be64(b.data() + 8, 8 * kLineBytes);
  return b;
}

bool digest_equal(const Digest& a, const Digest& b) {
  std::uint8_t diff = 0;
  for (std::size_t i = 0; i < kDigestBytes; ++i) diff |= a.bytes[i] ^ b.bytes[i];
  return diff == 0;
}

}  // namespace

XtsKeyPair::XtsKeyPair(const Key128& key1, const Key128& key2) : k1(key1), k2(key2) {
  if (k1 == k2) throw std::invalid_argument("XTS key halves must differ");
}

Block16 Tweak::serialize() const noexcept {
  Block16 b;
  store_be64(b.data(), seid);
  store_be64(b.data() + 8, ea);
  return b;
}

std::array<std::uint8_t, kEncryptedBlockBytes> EncryptedBlock::serialize() const noexcept {
  std::array<std::uint8_t, kEncryptedBlockBytes> out{};
  store_be64(out.data(), ea);
  std::copy(cipher.bytes.begin(), cipher.bytes.end(), out.begin() + 8);
  std::copy(digest.bytes.begin(), digest.bytes.end(), out.begin() + 8 + kLineBytes);
  return out;
}

EncryptedBlock EncryptedBlock::parse(ByteView in) {
  if (in.size() != kEncryptedBlockBytes) throw ParseError("encrypted block must be 144 bytes");
  EncryptedBlock b;
  b.ea = load_be64(in.data());
  std::copy(in.begin() + 8, in.begin() + 8 + kLineBytes, b.cipher.bytes.begin());
  std::copy(in.begin() + 8 + kLineBytes, in.end(), b.digest.bytes.begin());
  return b;
}

GhashKey derive_hash_key(const Key128& k2) noexcept { return {Aes128(k2).encrypt(Block16{})}; }

LineCodec::LineCodec(const XtsKeyPair& key) noexcept
    : data_cipher_(key.k1), tweak_cipher_(key.k2), hash_key_{tweak_cipher_.encrypt(Block16{})} {}

Block16 LineCodec::encrypt_unit(const Block16& tweak, const Block16& plain) const noexcept {
  Block16 t = tweak_cipher_.encrypt(tweak);
  return xor_block(data_cipher_.encrypt(xor_block(plain, t)), t);
}

Block16 LineCodec::decrypt_unit(const Block16& tweak, const Block16& cipher) const noexcept {
  Block16 t = tweak_cipher_.encrypt(tweak);
  return xor_block(data_cipher_.decrypt(xor_block(cipher, t)), t);
}

SealedLine LineCodec::encrypt(const Tweak& tweak, const PlainBlock& plain) const {
  require_aligned(tweak);
  SealedLine out;
  Block16 t = tweak_cipher_.encrypt(tweak.serialize());
  for (std::size_t j = 0; j < kSections; ++j) {
    out.cipher.set_section(j, xor_block(data_cipher_.encrypt(xor_block(plain.section(j), t)), t));
    t = gf128_mul_xts(t);
  }
  out.digest = digest(tweak, out.cipher);
  return out;
}

PlainBlock LineCodec::decrypt(const Tweak& tweak, const CipherBlock& cipher) const {
  require_aligned(tweak);
  PlainBlock out;
  Block16 t = tweak_cipher_.encrypt(tweak.serialize());
  for (std::size_t j = 0; j < kSections; ++j) {
    out.set_section(j, xor_block(data_cipher_.decrypt(xor_block(cipher.section(j), t)), t));
    t = gf128_mul_xts(t);
  }
  return out;
}

Digest LineCodec::digest(const Tweak& tweak, const CipherBlock& cipher) const {
  require_aligned(tweak);
  const Block16 tw = tweak.serialize();
  Block16 y = gf128_mul_ghash(tw, hash_key_.h);
  for (std::size_t j = 0; j < kSections; ++j) {
    y = gf128_mul_ghash(xor_block(y, cipher.section(j)), hash_key_.h);
  }
  y = gf128_mul_ghash(xor_block(y, lengths_block()), hash_key_.h);
  const Block16 tag = xor_block(y, tweak_cipher_.encrypt(tw));
  Digest d;
  std::copy(tag.begin(), tag.begin() + kDigestBytes, d.bytes.begin());
  return d;
}

PlainBlock LineCodec::verify_and_decrypt(const Tweak& tweak, const CipherBlock& cipher,
                                         const Digest& expected) const {
  if (!digest_equal(digest(tweak, cipher), expected)) {
    throw IntegrityError("digest mismatch for line at ea " + std::to_string(tweak.ea));
  }
  return decrypt(tweak, cipher);
}

SealedLine encrypt_block(const XtsKeyPair& key, const Tweak& tweak, const PlainBlock& plain) {
  require_aligned(tweak);
  return LineCodec(key).encrypt(tweak, plain);
}

PlainBlock decrypt_block(const XtsKeyPair& key, const Tweak& tweak, const CipherBlock& cipher) {
  require_aligned(tweak);
  return LineCodec(key).decrypt(tweak, cipher);
}

PlainBlock verify_and_decrypt(const XtsKeyPair& key, const Tweak& tweak,
                              const CipherBlock& cipher, const Digest& digest) {
  require_aligned(tweak);
  return LineCodec(key).verify_and_decrypt(tweak, cipher, digest);
}

Digest compute_digest(const XtsKeyPair& key, const Tweak& tweak, const CipherBlock& cipher) {
  require_aligned(tweak);
  return LineCodec(key).digest(tweak, cipher);
}

namespace {

Bytes xts_units(const Key128& k1, const Key128& k2, const Block16& tweak, ByteView data,
                bool encrypt) {
  if (data.size() % kBlockBytes != 0) {
    throw std::invalid_argument("XTS data unit length must be a multiple of 16");
  }
  const Aes128 data_cipher(k1);
  Block16 t = Aes128(k2).encrypt(tweak);
  Bytes out(data.size());
  for (std::size_t off = 0; off < data.size(); off += kBlockBytes) {
    Block16 in;
    std::copy(data.begin() + off, data.begin() + off + kBlockBytes, in.begin());
    Block16 x = xor_block(in, t);
    Block16 y = encrypt ? data_cipher.encrypt(x) : data_cipher.decrypt(x);
    Block16 r = xor_block(y, t);
    std::copy(r.begin(), r.end(), out.begin() + off);
    t = gf128_mul_xts(t);
  }
  return out;
}

}  // namespace

Bytes xts_encrypt_units(const Key128& k1, const Key128& k2, const Block16& tweak, ByteView data) {
  return xts_units(k1, k2, tweak, data, true);
}

Bytes xts_decrypt_units(const Key128& k1, const Key128& k2, const Block16& tweak, ByteView data) {
  return xts_units(k1, k2, tweak, data, false);
}

}  // namespace edap::crypto
