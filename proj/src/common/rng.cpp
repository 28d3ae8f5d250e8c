#include "edap/common/rng.hpp"

#include <sodium.h>

#include <stdexcept>

namespace edap {

void ensure_sodium() {
  static const int rc = sodium_init();
  if (rc < 0) throw std::runtime_error("libsodium initialization failed");
}

DeterministicRng::DeterministicRng(const Seed& seed) : seed_(seed) { ensure_sodium(); }

DeterministicRng::DeterministicRng(std::uint64_t seed) {
  ensure_sodium();
  std::uint8_t in[8];
  for (int i = 0; i < 8; ++i) in[i] = static_cast<std::uint8_t>(seed >> (8 * i));
  crypto_generichash(seed_.data(), seed_.size(), in, sizeof in, nullptr, 0);
}

void DeterministicRng::fill(std::span<std::uint8_t> out) {
  std::uint8_t material[40];
  std::copy(seed_.begin(), seed_.end(), material);
  for (int i = 0; i < 8; ++i) material[32 + i] = static_cast<std::uint8_t>(counter_ >> (8 * i));
  ++counter_;
  unsigned char subseed[randombytes_SEEDBYTES];
  crypto_generichash(subseed, sizeof subseed, material, sizeof material, nullptr, 0);
  randombytes_buf_deterministic(out.data(), out.size(), subseed);
  sodium_memzero(subseed, sizeof subseed);
}

std::uint64_t DeterministicRng::next_u64() {
  std::uint8_t b[8];
  fill(b);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | b[i];
  return v;
}

DeterministicRng DeterministicRng::fork() { return DeterministicRng(bytes<32>()); }

}  // namespace edap

#include "edap/common/secret.hpp"

namespace edap {

void secure_wipe(void* p, std::size_t n) noexcept { sodium_memzero(p, n); }

}  // namespace edap
