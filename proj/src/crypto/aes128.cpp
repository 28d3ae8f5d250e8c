#include "edap/crypto/aes128.hpp"

namespace edap::crypto {

namespace {

constexpr std::uint8_t xtime(std::uint8_t x) {
  return static_cast<std::uint8_t>((x << 1) ^ ((x & 0x80) ? 0x1b : 0x00));
}

constexpr std::uint8_t gmul(std::uint8_t a, std::uint8_t b) {
  std::uint8_t r = 0;
  while (b) {
    if (b & 1) r ^= a;
    a = xtime(a);
    b >>= 1;
  }
  return r;
}

// S-box from the multiplicative inverse followed by the affine map.
struct SboxTables {
  std::array<std::uint8_t, 256> fwd{};
  std::array<std::uint8_t, 256> inv{};

  constexpr SboxTables() {
    for (int x = 0; x < 256; ++x) {
      std::uint8_t inverse = 0;
      if (x != 0) {
        for (int y = 1; y < 256; ++y) {
          if (gmul(static_cast<std::uint8_t>(x), static_cast<std::uint8_t>(y)) == 1) {
            inverse = static_cast<std::uint8_t>(y);
            break;
          }
        }
      }
      std::uint8_t s = inverse;
      std::uint8_t r = inverse;
      for (int i = 0; i < 4; ++i) {
        r = static_cast<std::uint8_t>((r << 1) | (r >> 7));
        s ^= r;
      }
      s ^= 0x63;
      fwd[x] = s;
      inv[s] = static_cast<std::uint8_t>(x);
    }
  }
};

constexpr SboxTables kTables{};
constexpr auto& kSbox = kTables.fwd;
constexpr auto& kInvSbox = kTables.inv;

static_assert(kSbox[0x00] == 0x63 && kSbox[0x53] == 0xed && kInvSbox[0x63] == 0x00);

void add_round_key(Block16& s, const std::uint8_t* rk) {
  for (int i = 0; i < 16; ++i) s[i] ^= rk[i];
}

void sub_bytes(Block16& s) {
  for (auto& b : s) b = kSbox[b];
}

void inv_sub_bytes(Block16& s) {
  for (auto& b : s) b = kInvSbox[b];
}

// State is column-major: byte (row r, column c) lives at s[4c + r].
void shift_rows(Block16& s) {
  Block16 t = s;
  for (int c = 0; c < 4; ++c)
    for (int r = 0; r < 4; ++r) s[4 * c + r] = t[4 * ((c + r) % 4) + r];
}

void inv_shift_rows(Block16& s) {
  Block16 t = s;
  for (int c = 0; c < 4; ++c)
    for (int r = 0; r < 4; ++r) s[4 * ((c + r) % 4) + r] = t[4 * c + r];
}

void mix_columns(Block16& s) {
  for (int c = 0; c < 4; ++c) {
    std::uint8_t* col = &s[4 * c];
    std::uint8_t a0 = col[0], a1 = col[1], a2 = col[2], a3 = col[3];
    std::uint8_t all = a0 ^ a1 ^ a2 ^ a3;
    col[0] ^= all ^ xtime(a0 ^ a1);
    col[1] ^= all ^ xtime(a1 ^ a2);
    col[2] ^= all ^ xtime(a2 ^ a3);
    col[3] ^= all ^ xtime(a3 ^ a0);
  }
}

void inv_mix_columns(Block16& s) {
  for (int c = 0; c < 4; ++c) {
    std::uint8_t* col = &s[4 * c];
    std::uint8_t a0 = col[0], a1 = col[1], a2 = col[2], a3 = col[3];
    col[0] = gmul(a0, 14) ^ gmul(a1, 11) ^ gmul(a2, 13) ^ gmul(a3, 9);
    col[1] = gmul(a0, 9) ^ gmul(a1, 14) ^ gmul(a2, 11) ^ gmul(a3, 13);
    col[2] = gmul(a0, 13) ^ gmul(a1, 9) ^ gmul(a2, 14) ^ gmul(a3, 11);
    col[3] = gmul(a0, 11) ^ gmul(a1, 13) ^ gmul(a2, 9) ^ gmul(a3, 14);
  }
}

}  // namespace

Aes128::Aes128(const Key128& key) noexcept {
  for (int i = 0; i < 16; ++i) round_keys_[i] = key[i];
  std::uint8_t rcon = 0x01;
  for (int i = 16; i < static_cast<int>(round_keys_.size()); i += 4) {
    std::uint8_t t[4] = {round_keys_[i - 4], round_keys_[i - 3], round_keys_[i - 2],
                         round_keys_[i - 1]};
    if (i % 16 == 0) {
      std::uint8_t first = t[0];
      t[0] = static_cast<std::uint8_t>(kSbox[t[1]] ^ rcon);
      t[1] = kSbox[t[2]];
      t[2] = kSbox[t[3]];
      t[3] = kSbox[first];
      rcon = xtime(rcon);
    }
    for (int j = 0; j < 4; ++j) round_keys_[i + j] = round_keys_[i - 16 + j] ^ t[j];
  }
}

Block16 Aes128::encrypt(const Block16& in) const noexcept {
  Block16 s = in;
  add_round_key(s, &round_keys_[0]);
  for (int round = 1; round < kRounds; ++round) {
    sub_bytes(s);
    shift_rows(s);
    mix_columns(s);
    add_round_key(s, &round_keys_[16 * round]);
  }
  sub_bytes(s);
  shift_rows(s);
  add_round_key(s, &round_keys_[16 * kRounds]);
  return s;
}

Block16 Aes128::decrypt(const Block16& in) const noexcept {
  Block16 s = in;
  add_round_key(s, &round_keys_[16 * kRounds]);
  for (int round = kRounds - 1; round >= 1; --round) {
    inv_shift_rows(s);
    inv_sub_bytes(s);
    add_round_key(s, &round_keys_[16 * round]);
    inv_mix_columns(s);
  }
  inv_shift_rows(s);
  inv_sub_bytes(s);
  add_round_key(s, &round_keys_[0]);
  return s;
}

}  // namespace edap::crypto
