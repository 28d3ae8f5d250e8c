#pragma once

#include "edap/crypto/aes128.hpp"

namespace edap::crypto {

// Two encodings of GF(2^128) modulo x^128 + x^7 + x^2 + x + 1 are in play:
//
//  * XTS (IEEE 1619): byte 0 holds the lowest-degree coefficients, bit 0 of a
//    byte is the lowest. The primitive element alpha = x encodes as 02 00..00.
//  * GHASH (SP 800-38D): bit-reflected; the most significant bit of byte 0 is
//    the coefficient of x^0, so 1 encodes as 80 00..00.

/// t * alpha in the XTS encoding.
Block16 gf128_mul_xts(const Block16& t) noexcept;

/// General product in the XTS encoding.
Block16 gf128_mul_le(const Block16& a, const Block16& b) noexcept;

/// General product in the GHASH encoding.
Block16 gf128_mul_ghash(const Block16& a, const Block16& b) noexcept;

inline constexpr Block16 kXtsOne = {0x01};
inline constexpr Block16 kXtsAlpha = {0x02};
inline constexpr Block16 kGhashOne = {0x80};

}  // namespace edap::crypto
