#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

#include "edap/common/bytes.hpp"
#include "edap/crypto/aes128.hpp"

namespace edap::crypto {

inline constexpr std::size_t kLineBytes = 128;
inline constexpr std::size_t kSections = kLineBytes / kBlockBytes;
inline constexpr std::size_t kDigestBytes = 8;
/// Serialized EncryptedBlock: ea (8, BE) || cipher (128) || digest (8).
inline constexpr std::size_t kEncryptedBlockBytes = 8 + kLineBytes + kDigestBytes;

/// The owner's memory key <K1, K2>. K1 encrypts data units, K2 encrypts the
/// tweak and keys the digest.
struct XtsKeyPair {
  Key128 k1{};
  Key128 k2{};

  XtsKeyPair() = default;
  /// Throws std::invalid_argument when k1 == k2.
  XtsKeyPair(const Key128& key1, const Key128& key2);

  bool operator==(const XtsKeyPair&) const = default;
};

/// <SEID, effective address> binding of one 128-byte line.
struct Tweak {
  std::uint64_t seid = 0;
  std::uint64_t ea = 0;

  /// seid (8, BE) || ea (8, BE).
  Block16 serialize() const noexcept;
  bool aligned() const noexcept { return ea % kLineBytes == 0; }
};

template <typename Tag>
struct Line {
  std::array<std::uint8_t, kLineBytes> bytes{};

  Block16 section(std::size_t j) const noexcept {
    Block16 s;
    for (std::size_t i = 0; i < kBlockBytes; ++i) s[i] = bytes[j * kBlockBytes + i];
    return s;
  }
  void set_section(std::size_t j, const Block16& s) noexcept {
    for (std::size_t i = 0; i < kBlockBytes; ++i) bytes[j * kBlockBytes + i] = s[i];
  }
  bool operator==(const Line&) const = default;
};

struct PlainTag;
struct CipherTag;
using PlainBlock = Line<PlainTag>;
using CipherBlock = Line<CipherTag>;

struct Digest {
  std::array<std::uint8_t, kDigestBytes> bytes{};
  bool operator==(const Digest&) const = default;
};

struct GhashKey {
  Block16 h{};
  bool operator==(const GhashKey&) const = default;
};

struct SealedLine {
  CipherBlock cipher;
  Digest digest;
};

/// The <E, C, D> tuple: what protected memory and the wire carry for a line.
struct EncryptedBlock {
  std::uint64_t ea = 0;
  CipherBlock cipher;
  Digest digest;

  std::array<std::uint8_t, kEncryptedBlockBytes> serialize() const noexcept;
  static EncryptedBlock parse(ByteView in);
  bool operator==(const EncryptedBlock&) const = default;
};

GhashKey derive_hash_key(const Key128& k2) noexcept;

/// Per-line XTS-AES encryption plus the 8-byte GHASH digest.
///
/// Ciphertext: T0 = E_k2(tweak), T(j+1) = T(j) * alpha, Cj = E_k1(Pj ^ Tj) ^ Tj.
/// Digest: the first 8 bytes of GHASH_H(tweak || C0..C7 || lengths) ^ T0,
/// with H = E_k2(0) and a lengths block of 128 || 1024 (bits, BE).
///
/// All line operations throw AlignmentError for a misaligned tweak.
SealedLine encrypt_block(const XtsKeyPair& key, const Tweak& tweak, const PlainBlock& plain);
PlainBlock decrypt_block(const XtsKeyPair& key, const Tweak& tweak, const CipherBlock& cipher);
/// Throws IntegrityError, without decrypting, when the digest does not match.
PlainBlock verify_and_decrypt(const XtsKeyPair& key, const Tweak& tweak,
                              const CipherBlock& cipher, const Digest& digest);
Digest compute_digest(const XtsKeyPair& key, const Tweak& tweak, const CipherBlock& cipher);

/// Raw XTS over whole 16-byte data units with an arbitrary 16-byte tweak
/// block. Used for standard known-answer vectors and register sealing; no
/// alignment rule, no digest. `data.size()` must be a multiple of 16.
Bytes xts_encrypt_units(const Key128& k1, const Key128& k2, const Block16& tweak, ByteView data);
Bytes xts_decrypt_units(const Key128& k1, const Key128& k2, const Block16& tweak, ByteView data);

/// Same operations with the key schedules kept expanded; this is what the
/// processor's engine holds once K is loaded.
class LineCodec {
 public:
  explicit LineCodec(const XtsKeyPair& key) noexcept;

  SealedLine encrypt(const Tweak& tweak, const PlainBlock& plain) const;
  PlainBlock decrypt(const Tweak& tweak, const CipherBlock& cipher) const;
  PlainBlock verify_and_decrypt(const Tweak& tweak, const CipherBlock& cipher,
                                const Digest& digest) const;
  Digest digest(const Tweak& tweak, const CipherBlock& cipher) const;

  /// One 16-byte data unit with an arbitrary tweak block.
  Block16 encrypt_unit(const Block16& tweak, const Block16& plain) const noexcept;
  Block16 decrypt_unit(const Block16& tweak, const Block16& cipher) const noexcept;

 private:
  Aes128 data_cipher_;
  Aes128 tweak_cipher_;
  GhashKey hash_key_;
};

}  // namespace edap::crypto
