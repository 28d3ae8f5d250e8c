#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace edap {

/// Calls sodium_init() once; safe to call repeatedly.
void ensure_sodium();

/// Seeded cryptographic byte stream. Every draw hashes (seed, counter) into a
/// fresh 32-byte key for libsodium's deterministic generator, so a run is
/// reproducible from its seed alone.
class DeterministicRng {
 public:
  using Seed = std::array<std::uint8_t, 32>;

  explicit DeterministicRng(const Seed& seed);
  explicit DeterministicRng(std::uint64_t seed);

  void fill(std::span<std::uint8_t> out);
  std::uint64_t next_u64();

  template <std::size_t N>
  std::array<std::uint8_t, N> bytes() {
    std::array<std::uint8_t, N> out{};
    fill(out);
    return out;
  }

  /// Independent child stream, e.g. one per actor.
  DeterministicRng fork();

 private:
  Seed seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace edap
