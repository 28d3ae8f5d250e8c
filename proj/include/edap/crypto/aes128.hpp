#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace edap::crypto {

inline constexpr std::size_t kBlockBytes = 16;
/// Symmetric key width of the reference build (AES-128).
inline constexpr std::size_t kKeyBytes = 16;

using Block16 = std::array<std::uint8_t, kBlockBytes>;
using Key128 = std::array<std::uint8_t, kKeyBytes>;

/// FIPS-197 AES with a 128-bit key. Byte-oriented, table-driven S-box; no
/// constant-time claims.
class Aes128 {
 public:
  explicit Aes128(const Key128& key) noexcept;

  Block16 encrypt(const Block16& in) const noexcept;
  Block16 decrypt(const Block16& in) const noexcept;

 private:
  static constexpr int kRounds = 10;
  std::array<std::uint8_t, 16 * (kRounds + 1)> round_keys_{};
};

inline Block16 xor_block(const Block16& a, const Block16& b) noexcept {
  Block16 r;
  for (std::size_t i = 0; i < kBlockBytes; ++i) r[i] = a[i] ^ b[i];
  return r;
}

}  // namespace edap::crypto
