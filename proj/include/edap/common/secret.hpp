#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace edap {

void secure_wipe(void* p, std::size_t n) noexcept;

/// Fixed-size key material that is wiped on destruction.
template <std::size_t N>
class Secret {
 public:
  Secret() = default;
  explicit Secret(const std::array<std::uint8_t, N>& v) : bytes_(v) {}
  Secret(const Secret&) = default;
  Secret& operator=(const Secret&) = default;
  ~Secret() { secure_wipe(bytes_.data(), N); }

  const std::array<std::uint8_t, N>& view() const noexcept { return bytes_; }
  std::array<std::uint8_t, N>& mut() noexcept { return bytes_; }

 private:
  std::array<std::uint8_t, N> bytes_{};
};

}  // namespace edap
