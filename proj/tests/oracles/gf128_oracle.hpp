#pragma once

// Reference GF(2^128) arithmetic for tests only. Deliberately naive and
// structured differently from the library: plain bit loops over byte arrays,
// no word packing, no tables.

#include <array>
#include <cstdint>

namespace oracle {

using Block = std::array<std::uint8_t, 16>;

// SP 800-38D Algorithm 1, bit by bit over bytes.
inline Block ghash_mul(const Block& x, const Block& y) {
  Block z{};
  Block v = y;
  for (int i = 0; i < 128; ++i) {
    if ((x[i / 8] >> (7 - i % 8)) & 1) {
      for (int k = 0; k < 16; ++k) z[k] ^= v[k];
    }
    bool lsb = v[15] & 1;
    for (int k = 15; k > 0; --k) v[k] = static_cast<std::uint8_t>((v[k] >> 1) | (v[k - 1] << 7));
    v[0] >>= 1;
    if (lsb) v[0] ^= 0xe1;
  }
  return z;
}

// XTS encoding: coefficient of x^i is bit (i % 8) of byte (i / 8).
inline int xts_bit(const Block& a, int i) { return (a[i / 8] >> (i % 8)) & 1; }

// Carry-less schoolbook product into 255 coefficients, then reduce with
// x^128 = x^7 + x^2 + x + 1 from the top down.
inline Block xts_mul(const Block& a, const Block& b) {
  std::array<std::uint8_t, 256> prod{};
  for (int i = 0; i < 128; ++i)
    for (int j = 0; j < 128; ++j)
      if (xts_bit(a, i) && xts_bit(b, j)) prod[i + j] ^= 1;
  for (int d = 254; d >= 128; --d) {
    if (!prod[d]) continue;
    prod[d] = 0;
    prod[d - 128 + 7] ^= 1;
    prod[d - 128 + 2] ^= 1;
    prod[d - 128 + 1] ^= 1;
    prod[d - 128 + 0] ^= 1;
  }
  Block r{};
  for (int i = 0; i < 128; ++i)
    if (prod[i]) r[i / 8] |= static_cast<std::uint8_t>(1 << (i % 8));
  return r;
}

// Multiply by x one bit at a time, as the disk-encryption standard describes.
inline Block xts_mul_alpha(const Block& t) {
  Block r{};
  std::uint8_t carry = 0;
  for (int k = 0; k < 16; ++k) {
    r[k] = static_cast<std::uint8_t>((t[k] << 1) | carry);
    carry = t[k] >> 7;
  }
  if (carry) r[0] ^= 0x87;
  return r;
}

}  // namespace oracle
