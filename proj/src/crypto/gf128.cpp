#include "edap/crypto/gf128.hpp"

#include "edap/common/bytes.hpp"

namespace edap::crypto {

namespace {

// XTS encoding viewed as a little-endian 128-bit integer (lo, hi).
struct Le128 {
  std::uint64_t lo, hi;
};

Le128 load_le(const Block16& b) { return {load_le64(b.data()), load_le64(b.data() + 8)}; }

Block16 store_le(Le128 v) {
  Block16 b;
  store_le64(b.data(), v.lo);
  store_le64(b.data() + 8, v.hi);
  return b;
}

Le128 double_le(Le128 v) {
  std::uint64_t carry = v.hi >> 63;
  v.hi = (v.hi << 1) | (v.lo >> 63);
  v.lo = (v.lo << 1) ^ (0x87 & (0 - carry));
  return v;
}

// GHASH encoding viewed as a big-endian 128-bit integer (hi, lo); x^0 is the
// top bit of hi, so multiplying by x is a right shift.
struct Be128 {
  std::uint64_t hi, lo;
};

Be128 load_be(const Block16& b) { return {load_be64(b.data()), load_be64(b.data() + 8)}; }

Block16 store_be(Be128 v) {
  Block16 b;
  store_be64(b.data(), v.hi);
  store_be64(b.data() + 8, v.lo);
  return b;
}

// Reduction constants for shifting four bits out of the low end (Shoup).
constexpr std::uint16_t kReduce4[16] = {0x0000, 0x1c20, 0x3840, 0x2460, 0x7080, 0x6ca0,
                                        0x48c0, 0x54e0, 0xe100, 0xfd20, 0xd940, 0xc560,
                                        0x9180, 0x8da0, 0xa9c0, 0xb5e0};

}  // namespace

Block16 gf128_mul_xts(const Block16& t) noexcept { return store_le(double_le(load_le(t))); }

Block16 gf128_mul_le(const Block16& a, const Block16& b) noexcept {
  Le128 acc{0, 0};
  Le128 cur = load_le(a);
  Le128 mult = load_le(b);
  for (int i = 0; i < 128; ++i) {
    std::uint64_t bit = (i < 64 ? mult.lo >> i : mult.hi >> (i - 64)) & 1;
    acc.lo ^= cur.lo & (0 - bit);
    acc.hi ^= cur.hi & (0 - bit);
    cur = double_le(cur);
  }
  return store_le(acc);
}

Block16 gf128_mul_ghash(const Block16& a, const Block16& b) noexcept {
  // 4-bit table of b * (nibble), then Horner over the nibbles of a starting
  // from the highest-degree end.
  Be128 table[16];
  table[0] = {0, 0};
  table[8] = load_be(b);
  for (int i = 4; i > 0; i >>= 1) {
    Be128 v = table[2 * i];
    std::uint64_t lsb = v.lo & 1;
    v.lo = (v.lo >> 1) | (v.hi << 63);
    v.hi = (v.hi >> 1) ^ (0xe100000000000000ULL & (0 - lsb));
    table[i] = v;
  }
  for (int i = 2; i < 16; i <<= 1) {
    for (int j = 1; j < i; ++j) {
      table[i + j] = {table[i].hi ^ table[j].hi, table[i].lo ^ table[j].lo};
    }
  }

  Be128 z{0, 0};
  for (int byte = 15; byte >= 0; --byte) {
    for (int half = 0; half < 2; ++half) {
      int nib = half == 0 ? (a[byte] & 0x0f) : (a[byte] >> 4);
      // z = z * x^4
      std::uint8_t rem = static_cast<std::uint8_t>(z.lo & 0x0f);
      z.lo = (z.lo >> 4) | (z.hi << 60);
      z.hi = (z.hi >> 4) ^ (static_cast<std::uint64_t>(kReduce4[rem]) << 48);
      z.hi ^= table[nib].hi;
      z.lo ^= table[nib].lo;
    }
  }
  return store_be(z);
}

}  // namespace edap::crypto
